#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "dfrc/types.hpp"

namespace dfrc::detail {

struct RootOptions {
  double abs_tol = 1e-12;
  int max_iterations = 200;
};

/// Root of a monotone function on the bracket [lo, hi] where fn(lo) and fn(hi)
/// have opposite signs. `fn` returns (value, derivative). Newton steps are
/// taken when they stay inside the current bracket, bisection otherwise.
template <class Fn>
double safeguarded_root(Fn&& fn, double lo, double hi, const RootOptions& opts = {}) {
  auto [flo, dlo] = fn(lo);
  auto [fhi, dhi] = fn(hi);
  (void)dlo;
  (void)dhi;
  if (std::abs(flo) <= opts.abs_tol) return lo;
  if (std::abs(fhi) <= opts.abs_tol) return hi;
  if ((flo > 0.0) == (fhi > 0.0)) {
    throw NumericalError("safeguarded_root: bracket does not contain a sign change");
  }
  const bool increasing = fhi > flo;
  double x = 0.5 * (lo + hi);
  for (int it = 0; it < opts.max_iterations; ++it) {
    auto [fx, dfx] = fn(x);
    if (std::abs(fx) <= opts.abs_tol) return x;
    if ((fx > 0.0) == increasing) hi = x; else lo = x;
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(lo), std::abs(hi))) {
      return x;
    }
    double next = dfx != 0.0 ? x - fx / dfx : lo - 1.0;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    x = next;
  }
  throw NumericalError("safeguarded_root: no convergence after " + std::to_string(opts.max_iterations) +
                       " iterations, bracket [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
}

}  // namespace dfrc::detail
