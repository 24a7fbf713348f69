#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dfrc/admm_config.hpp"
#include "dfrc/array_model.hpp"

namespace dfrc {

enum class ChannelModel { kLineOfSight, kRayleigh };

/// Full experiment description. All quantities are stored in linear units.
struct Scenario {
  ArrayGeometry geometry;
  Index num_selected = 8;

  std::vector<double> user_angles{-45.0, 45.0};
  ChannelModel channel_model = ChannelModel::kLineOfSight;
  double channel_gain = 1.0;
  std::uint64_t channel_seed = 0;
  double noise_variance = 1.0;
  double sinr_target = 10.0;

  std::vector<AngleInterval> mainlobe{{-5.0, 5.0}};
  std::vector<AngleInterval> stopband{{-90.0, -60.0}, {-30.0, -20.0}, {20.0, 30.0}, {60.0, 90.0}};
  double mainlobe_step = 2.0;
  double stopband_step = 5.0;

  double passband_threshold = 10.0;
  double stopband_threshold = 0.5;
  double antenna_power = 10.0;  // watts

  AdmmConfig admm;
  // Subarray re-solve after selection; the sparsity weight is ignored there.
  AdmmConfig refit{.eta = 0.0, .rho = 5.0, .max_iterations = 200};
  std::uint64_t seed = 1;

  // Sweep settings.
  std::vector<Index> k_values;
  std::vector<Index> m_values;
  AngleInterval user_span{-60.0, 60.0};
  int trials = 100;

  Index num_users() const { return static_cast<Index>(user_angles.size()); }

  void validate() const {
    geometry.validate();
    admm.validate();
    try {
      refit.validate();
    } catch (const ConfigError& e) {
      throw ConfigError(std::string("refit: ") + e.what());
    }
    if (user_angles.empty()) throw ConfigError("users: at least one user is required");
    if (num_selected < 1 || num_selected > geometry.num_antennas)
      throw ConfigError("num_selected: must satisfy 1 <= K <= N");
    for (double a : user_angles) {
      if (!(a >= -90.0 && a <= 90.0)) throw ConfigError("users.angles_deg: outside [-90, 90]");
    }
    if (!(noise_variance > 0.0)) throw ConfigError("users.noise_variance: must be > 0");
    if (!(sinr_target > 0.0)) throw ConfigError("users.sinr_target: must be > 0");
    if (!(std::abs(channel_gain) > 0.0)) throw ConfigError("users.gain: must be nonzero");
    if (!(passband_threshold > 0.0)) throw ConfigError("thresholds.passband: must be > 0");
    if (!(stopband_threshold > 0.0)) throw ConfigError("thresholds.stopband: must be > 0");
    if (!(antenna_power > 0.0)) throw ConfigError("antenna_power: must be > 0");
    for (Index k : k_values) {
      if (k < 1 || k > geometry.num_antennas) throw ConfigError("sweep.k_values: K out of range");
    }
    for (Index m : m_values) {
      if (m < 1) throw ConfigError("sweep.m_values: M must be >= 1");
    }
    if (trials < 1) throw ConfigError("sweep.trials: must be >= 1");
    if (!(user_span.lo <= user_span.hi)) throw ConfigError("sweep.user_span_deg: lo > hi");
    (void)grids();
  }

  AngleGrids grids() const { return build_grids(mainlobe, stopband, mainlobe_step, stopband_step); }

  std::vector<UserChannel> users() const {
    std::vector<UserChannel> out;
    for (std::size_t m = 0; m < user_angles.size(); ++m) {
      UserChannel u;
      if (channel_model == ChannelModel::kLineOfSight) {
        u.h = los_channel(geometry, user_angles[m], Complex{channel_gain, 0.0});
      } else {
        u.h = channel_gain * rayleigh_channel(geometry, channel_seed + m);
      }
      u.noise_variance = noise_variance;
      u.sinr_target = sinr_target;
      out.push_back(std::move(u));
    }
    return out;
  }

  /// Copy with M users. Keeps the configured angles when M matches, otherwise
  /// places users at the cell midpoints of M equal slices of user_span.
  Scenario with_num_users(Index m) const {
    Scenario s = *this;
    if (m == num_users()) return s;
    s.user_angles.clear();
    const double width = (user_span.hi - user_span.lo) / static_cast<double>(m);
    for (Index i = 0; i < m; ++i) {
      s.user_angles.push_back(user_span.lo + (static_cast<double>(i) + 0.5) * width);
    }
    return s;
  }

  bool operator==(const Scenario&) const = default;
};

}  // namespace dfrc
