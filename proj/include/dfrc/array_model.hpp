#pragma once

#include <cmath>
#include <numbers>
#include <random>
#include <utility>
#include <vector>

#include "dfrc/types.hpp"

namespace dfrc {

/// Uniform linear array. Element spacing is in wavelengths.
struct ArrayGeometry {
  Index num_antennas = 10;
  double element_spacing = 0.5;

  void validate() const {
    if (num_antennas < 2) throw ConfigError("array: num_antennas must be >= 2");
    if (!(element_spacing > 0.0) || !std::isfinite(element_spacing))
      throw ConfigError("array: element_spacing must be > 0");
  }

  bool operator==(const ArrayGeometry&) const = default;
};

/// Downlink user: channel vector, noise power and SINR target (both linear).
struct UserChannel {
  CVector h;
  double noise_variance = 1.0;
  double sinr_target = 1.0;

  void validate() const {
    if (!(noise_variance > 0.0)) throw ConfigError("user: noise_variance must be > 0");
    if (!(sinr_target > 0.0)) throw ConfigError("user: sinr_target must be > 0");
    if (!(h.norm() > 0.0)) throw ConfigError("user: channel must be nonzero");
  }
};

/// Sampled mainlobe and stopband angles, in degrees.
struct AngleGrids {
  std::vector<double> mainlobe;
  std::vector<double> stopband;
};

/// Closed interval of angles in degrees.
struct AngleInterval {
  double lo = 0.0;
  double hi = 0.0;

  bool operator==(const AngleInterval&) const = default;
};

inline double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }

/// a(theta) with entry n = exp(j 2 pi d n sin(theta)), first element as phase
/// reference.
inline CVector steering_vector(const ArrayGeometry& geometry, double theta_deg) {
  if (!(theta_deg >= -90.0 && theta_deg <= 90.0))
    throw DomainError("steering_vector: angle outside [-90, 90] degrees");
  const double increment =
      2.0 * std::numbers::pi * geometry.element_spacing * std::sin(deg_to_rad(theta_deg));
  CVector a(geometry.num_antennas);
  for (Index n = 0; n < geometry.num_antennas; ++n) {
    a[n] = std::polar(1.0, increment * static_cast<double>(n));
  }
  return a;
}

/// Line-of-sight channel: gain * a(theta_user).
inline CVector los_channel(const ArrayGeometry& geometry, double theta_user_deg,
                           Complex gain = {1.0, 0.0}) {
  if (!(std::abs(gain) > 0.0)) throw ConfigError("los_channel: gain must be nonzero");
  return gain * steering_vector(geometry, theta_user_deg);
}

/// i.i.d. CN(0, 1) channel entries, reproducible per seed.
inline CVector rayleigh_channel(const ArrayGeometry& geometry, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  CVector h(geometry.num_antennas);
  for (Index n = 0; n < geometry.num_antennas; ++n) {
    const double re = normal(rng);
    const double im = normal(rng);
    h[n] = {re, im};
  }
  return h;
}

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double linear) { return 10.0 * std::log10(linear); }
inline double dbm_to_watts(double dbm) { return std::pow(10.0, dbm / 10.0) / 1000.0; }

/// Inclusive uniform sampling of an interval. The last sample is the right
/// endpoint only when the width is a multiple of the step.
inline std::vector<double> sample_interval(const AngleInterval& interval, double step) {
  if (!(step > 0.0)) throw ConfigError("grid: step must be > 0");
  if (interval.hi < interval.lo) throw ConfigError("grid: interval with hi < lo");
  std::vector<double> out;
  const double width = interval.hi - interval.lo;
  const auto count = static_cast<long>(std::floor(width / step + 1e-9));
  for (long i = 0; i <= count; ++i) out.push_back(interval.lo + static_cast<double>(i) * step);
  return out;
}

inline AngleGrids build_grids(const std::vector<AngleInterval>& mainlobe_regions,
                              const std::vector<AngleInterval>& stopband_regions,
                              double mainlobe_step, double stopband_step) {
  auto sample_all = [](const std::vector<AngleInterval>& regions, double step) {
    std::vector<double> pts;
    for (const auto& r : regions) {
      if (r.lo < -90.0 || r.hi > 90.0) throw ConfigError("grid: region outside [-90, 90]");
      auto s = sample_interval(r, step);
      if (!pts.empty() && !s.empty() && s.front() <= pts.back())
        throw ConfigError("grid: regions must be ordered and non-overlapping");
      pts.insert(pts.end(), s.begin(), s.end());
    }
    return pts;
  };
  AngleGrids grids{sample_all(mainlobe_regions, mainlobe_step),
                   sample_all(stopband_regions, stopband_step)};
  if (grids.mainlobe.empty()) throw ConfigError("grid: mainlobe grid is empty");
  if (grids.stopband.empty()) throw ConfigError("grid: stopband grid is empty");
  for (double m : grids.mainlobe) {
    for (const auto& r : stopband_regions) {
      if (m >= r.lo && m <= r.hi) throw ConfigError("grid: mainlobe and stopband overlap");
    }
  }
  return grids;
}

}  // namespace dfrc
