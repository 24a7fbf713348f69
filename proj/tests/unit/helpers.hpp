#pragma once

#include <random>

#include "dfrc/types.hpp"

namespace testing_util {

inline dfrc::CVector random_vector(std::mt19937_64& rng, dfrc::Index n, double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, scale);
  dfrc::CVector v(n);
  for (dfrc::Index i = 0; i < n; ++i) v[i] = {normal(rng), normal(rng)};
  return v;
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline int uniform_int(std::mt19937_64& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

}  // namespace testing_util
