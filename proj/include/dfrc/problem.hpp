#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <variant>
#include <vector>

#include "dfrc/array_model.hpp"
#include "dfrc/scenario.hpp"
#include "dfrc/types.hpp"

namespace dfrc {

/// Layout of the stacked beamformer w = [w_1; ...; w_M], each w_m of length N.
/// Entry (user m, antenna n) lives at m * N + n.
struct StackShape {
  Index users = 1;
  Index antennas = 1;

  Index size() const { return users * antennas; }
  Index at(Index user, Index antenna) const { return user * antennas + antenna; }

  auto user_block(CVector& w, Index m) const { return w.segment(m * antennas, antennas); }
  auto user_block(const CVector& w, Index m) const { return w.segment(m * antennas, antennas); }

  /// Entries {n, n + N, ..., n + (M-1) N}.
  CVector antenna_group(const CVector& w, Index n) const {
    CVector g(users);
    for (Index m = 0; m < users; ++m) g[m] = w[at(m, n)];
    return g;
  }

  void set_antenna_group(CVector& w, Index n, const CVector& g) const {
    for (Index m = 0; m < users; ++m) w[at(m, n)] = g[m];
  }

  double group_norm(const CVector& w, Index n) const {
    double s = 0.0;
    for (Index m = 0; m < users; ++m) s += std::norm(w[at(m, n)]);
    return std::sqrt(s);
  }

  bool operator==(const StackShape&) const = default;
};

/// Stacked beamformers with per-user and per-antenna views.
struct BeamformerStack {
  StackShape shape;
  CVector w;

  BeamformerStack() = default;
  BeamformerStack(StackShape s, CVector values) : shape(s), w(std::move(values)) {
    if (w.size() != shape.size()) throw DomainError("BeamformerStack: length must equal M*N");
  }
  static BeamformerStack zeros(StackShape s) { return {s, CVector::Zero(s.size())}; }

  CVector user_block(Index m) const { return shape.user_block(w, m); }
  CVector antenna_group(Index n) const { return shape.antenna_group(w, n); }
};

// Constraint kinds. Each is stored through its generator so that evaluation and
// projection never form the MN x MN matrix.

/// sum_m |a^H w_m|^2 >= threshold, stored as (F, f) = (-A_theta, -threshold).
struct PassBand {
  double angle_deg = 0.0;
  CVector steering;
  double threshold = 0.0;
};

/// sum_m |a^H w_m|^2 <= threshold.
struct StopBand {
  double angle_deg = 0.0;
  CVector steering;
  double threshold = 0.0;
};

/// sum_m |w_m(n)|^2 <= max_power.
struct AntennaPower {
  Index antenna = 0;
  double max_power = 0.0;
};

/// |h^H w_m|^2 - gamma sum_{j != m} |h^H w_j|^2 >= gamma sigma^2, stored as
/// (F, f) = (-D_m, -gamma sigma^2). F is indefinite when M > 1.
struct Sinr {
  Index user = 0;
  CVector channel;
  double target = 1.0;
  double noise_variance = 1.0;
};

/// Untagged w^H F w <= f with explicit Hermitian F.
struct GenericQuadratic {
  CMatrix matrix;
  double bound = 0.0;
};

enum class ConstraintKind { kPassBand, kStopBand, kAntennaPower, kSinr, kGeneric };

inline const char* kind_name(ConstraintKind k) {
  switch (k) {
    case ConstraintKind::kPassBand: return "passband";
    case ConstraintKind::kStopBand: return "stopband";
    case ConstraintKind::kAntennaPower: return "antenna_power";
    case ConstraintKind::kSinr: return "sinr";
    case ConstraintKind::kGeneric: return "generic";
  }
  return "unknown";
}

/// Sum over users of |g^H w_m|^2.
inline double block_response(const StackShape& shape, const CVector& w, const CVector& g) {
  double s = 0.0;
  for (Index m = 0; m < shape.users; ++m) s += std::norm(g.dot(shape.user_block(w, m)));
  return s;
}

/// One constraint w^H F w <= f in normalized form.
class QuadraticConstraint {
 public:
  using Data = std::variant<PassBand, StopBand, AntennaPower, Sinr, GenericQuadratic>;

  QuadraticConstraint(StackShape shape, Data data) : shape_(shape), data_(std::move(data)) {}

  const StackShape& shape() const { return shape_; }
  const Data& data() const { return data_; }
  ConstraintKind kind() const { return static_cast<ConstraintKind>(data_.index()); }

  /// w^H F w evaluated from the generator.
  double quadratic(const CVector& w) const {
    return std::visit(
        [&](const auto& c) -> double {
          using T = std::decay_t<decltype(c)>;
          if constexpr (std::is_same_v<T, PassBand>) {
            return -block_response(shape_, w, c.steering);
          } else if constexpr (std::is_same_v<T, StopBand>) {
            return block_response(shape_, w, c.steering);
          } else if constexpr (std::is_same_v<T, AntennaPower>) {
            return shape_.antenna_group(w, c.antenna).squaredNorm();
          } else if constexpr (std::is_same_v<T, Sinr>) {
            double signal = 0.0;
            double interference = 0.0;
            for (Index j = 0; j < shape_.users; ++j) {
              const double r = std::norm(c.channel.dot(shape_.user_block(w, j)));
              if (j == c.user) signal = r; else interference += r;
            }
            return -(signal - c.target * interference);
          } else {
            return (w.dot(c.matrix * w)).real();
          }
        },
        data_);
  }

  /// F v evaluated from the generator.
  CVector apply(const CVector& v) const {
    return std::visit(
        [&](const auto& c) -> CVector {
          using T = std::decay_t<decltype(c)>;
          if constexpr (std::is_same_v<T, PassBand> || std::is_same_v<T, StopBand>) {
            const double sign = std::is_same_v<T, PassBand> ? -1.0 : 1.0;
            CVector out(v.size());
            for (Index m = 0; m < shape_.users; ++m) {
              shape_.user_block(out, m) = (sign * c.steering.dot(shape_.user_block(v, m))) * c.steering;
            }
            return out;
          } else if constexpr (std::is_same_v<T, AntennaPower>) {
            CVector out = CVector::Zero(v.size());
            for (Index m = 0; m < shape_.users; ++m) out[shape_.at(m, c.antenna)] = v[shape_.at(m, c.antenna)];
            return out;
          } else if constexpr (std::is_same_v<T, Sinr>) {
            CVector out(v.size());
            for (Index j = 0; j < shape_.users; ++j) {
              const double weight = j == c.user ? -1.0 : c.target;
              shape_.user_block(out, j) = (weight * c.channel.dot(shape_.user_block(v, j))) * c.channel;
            }
            return out;
          } else {
            return c.matrix * v;
          }
        },
        data_);
  }

  /// f in w^H F w <= f.
  double bound() const {
    return std::visit(
        [](const auto& c) -> double {
          using T = std::decay_t<decltype(c)>;
          if constexpr (std::is_same_v<T, PassBand>) return -c.threshold;
          else if constexpr (std::is_same_v<T, StopBand>) return c.threshold;
          else if constexpr (std::is_same_v<T, AntennaPower>) return c.max_power;
          else if constexpr (std::is_same_v<T, Sinr>) return -c.target * c.noise_variance;
          else return c.bound;
        },
        data_);
  }

  /// f - w^H F w; nonnegative iff satisfied.
  double slack(const CVector& w) const { return bound() - quadratic(w); }

  bool satisfied(const CVector& w, double tol = 0.0) const { return slack(w) >= -tol; }

  /// Scale used to turn slacks into relative violations: |f|, or 1 if f = 0.
  double scale() const {
    const double f = std::abs(bound());
    return f > 0.0 ? f : 1.0;
  }

  std::string describe() const {
    return std::visit(
        [](const auto& c) -> std::string {
          using T = std::decay_t<decltype(c)>;
          if constexpr (std::is_same_v<T, PassBand>) return "passband@" + std::to_string(c.angle_deg);
          else if constexpr (std::is_same_v<T, StopBand>) return "stopband@" + std::to_string(c.angle_deg);
          else if constexpr (std::is_same_v<T, AntennaPower>) return "power[" + std::to_string(c.antenna) + "]";
          else if constexpr (std::is_same_v<T, Sinr>) return "sinr[" + std::to_string(c.user) + "]";
          else return "generic";
        },
        data_);
  }

 private:
  StackShape shape_;
  Data data_;
};

inline QuadraticConstraint build_passband_constraint(const CVector& steering, double threshold,
                                                     Index users, double angle_deg = 0.0) {
  if (!(threshold > 0.0)) throw ConfigError("passband threshold must be > 0");
  return {StackShape{users, steering.size()}, PassBand{angle_deg, steering, threshold}};
}

inline QuadraticConstraint build_stopband_constraint(const CVector& steering, double threshold,
                                                     Index users, double angle_deg = 0.0) {
  if (!(threshold >= 0.0)) throw ConfigError("stopband threshold must be >= 0");
  return {StackShape{users, steering.size()}, StopBand{angle_deg, steering, threshold}};
}

inline QuadraticConstraint build_power_constraint(Index antenna, double max_power, Index users,
                                                  Index antennas) {
  if (antenna < 0 || antenna >= antennas) throw DomainError("power constraint: antenna index out of range");
  if (!(max_power >= 0.0)) throw ConfigError("power constraint: max_power must be >= 0");
  return {StackShape{users, antennas}, AntennaPower{antenna, max_power}};
}

inline QuadraticConstraint build_sinr_constraint(const CVector& channel, double target,
                                                 double noise_variance, Index user, Index users) {
  if (user < 0 || user >= users) throw DomainError("sinr constraint: user index out of range");
  if (!(target > 0.0)) throw ConfigError("sinr constraint: target must be > 0");
  if (!(noise_variance > 0.0)) throw ConfigError("sinr constraint: noise variance must be > 0");
  return {StackShape{users, channel.size()}, Sinr{user, channel, target, noise_variance}};
}

/// Assembled problem: min ||w||^2 + eta ||w||_{2,1} s.t. all constraints.
/// Order: passband grid, stopband grid, power 0..N-1, SINR 0..M-1.
struct ProblemInstance {
  StackShape shape;
  std::vector<QuadraticConstraint> constraints;
  double eta = 0.0;
  // Original antenna index of each local antenna; identity unless restricted.
  std::vector<Index> antenna_ids;

  Index num_constraints() const { return static_cast<Index>(constraints.size()); }

  double max_relative_violation(const CVector& w) const {
    double worst = 0.0;
    for (const auto& c : constraints) worst = std::max(worst, -c.slack(w) / c.scale());
    return worst;
  }

  /// Subarray problem on the given antennas (ascending, local indices of this
  /// problem). Generators are sliced; power constraints of dropped antennas go.
  ProblemInstance restrict_to(const std::vector<Index>& support) const {
    if (support.empty()) throw DomainError("restrict_to: empty support");
    for (std::size_t i = 0; i < support.size(); ++i) {
      if (support[i] < 0 || support[i] >= shape.antennas)
        throw DomainError("restrict_to: antenna index out of range");
      if (i > 0 && support[i] <= support[i - 1])
        throw DomainError("restrict_to: support must be strictly increasing");
    }
    const auto k = static_cast<Index>(support.size());
    auto slice = [&](const CVector& g) {
      CVector out(k);
      for (Index i = 0; i < k; ++i) out[i] = g[support[static_cast<std::size_t>(i)]];
      return out;
    };
    ProblemInstance out;
    out.shape = StackShape{shape.users, k};
    out.eta = eta;
    for (Index i = 0; i < k; ++i) out.antenna_ids.push_back(antenna_ids[static_cast<std::size_t>(support[static_cast<std::size_t>(i)])]);
    for (const auto& c : constraints) {
      std::visit(
          [&](const auto& d) {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, PassBand>) {
              out.constraints.emplace_back(out.shape, PassBand{d.angle_deg, slice(d.steering), d.threshold});
            } else if constexpr (std::is_same_v<T, StopBand>) {
              out.constraints.emplace_back(out.shape, StopBand{d.angle_deg, slice(d.steering), d.threshold});
            } else if constexpr (std::is_same_v<T, AntennaPower>) {
              auto it = std::find(support.begin(), support.end(), d.antenna);
              if (it != support.end()) {
                out.constraints.emplace_back(out.shape,
                                             AntennaPower{static_cast<Index>(it - support.begin()), d.max_power});
              }
            } else if constexpr (std::is_same_v<T, Sinr>) {
              out.constraints.emplace_back(out.shape, Sinr{d.user, slice(d.channel), d.target, d.noise_variance});
            } else {
              throw DomainError("restrict_to: generic constraints cannot be restricted");
            }
          },
          c.data());
    }
    return out;
  }

  /// Embeds a stack of this (possibly restricted) problem into a full-size
  /// stack with `full_antennas` elements; other entries are zero.
  CVector embed(const CVector& local, Index full_antennas) const {
    StackShape full{shape.users, full_antennas};
    CVector out = CVector::Zero(full.size());
    for (Index m = 0; m < shape.users; ++m) {
      for (Index n = 0; n < shape.antennas; ++n) {
        out[full.at(m, antenna_ids[static_cast<std::size_t>(n)])] = local[shape.at(m, n)];
      }
    }
    return out;
  }
};

inline std::vector<Index> identity_ids(Index n) {
  std::vector<Index> ids(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) ids[static_cast<std::size_t>(i)] = i;
  return ids;
}

/// Builds the constraint family from raw ingredients.
inline ProblemInstance assemble(const ArrayGeometry& geometry, const AngleGrids& grids,
                                const std::vector<UserChannel>& users, double passband_threshold,
                                double stopband_threshold, double antenna_power, double eta) {
  geometry.validate();
  if (users.empty()) throw ConfigError("assemble: at least one user is required");
  if (grids.mainlobe.empty()) throw ConfigError("assemble: mainlobe grid is empty");
  if (grids.stopband.empty()) throw ConfigError("assemble: stopband grid is empty");
  if (!(eta >= 0.0)) throw ConfigError("assemble: eta must be >= 0");
  const auto m = static_cast<Index>(users.size());
  const Index n = geometry.num_antennas;
  ProblemInstance p;
  p.shape = StackShape{m, n};
  p.eta = eta;
  p.antenna_ids = identity_ids(n);
  for (double theta : grids.mainlobe) {
    p.constraints.push_back(
        build_passband_constraint(steering_vector(geometry, theta), passband_threshold, m, theta));
  }
  for (double theta : grids.stopband) {
    p.constraints.push_back(
        build_stopband_constraint(steering_vector(geometry, theta), stopband_threshold, m, theta));
  }
  for (Index i = 0; i < n; ++i) p.constraints.push_back(build_power_constraint(i, antenna_power, m, n));
  for (Index j = 0; j < m; ++j) {
    const auto& u = users[static_cast<std::size_t>(j)];
    u.validate();
    if (u.h.size() != n) throw ConfigError("assemble: channel length must equal N");
    p.constraints.push_back(build_sinr_constraint(u.h, u.sinr_target, u.noise_variance, j, m));
  }
  return p;
}

inline ProblemInstance assemble(const Scenario& scenario) {
  scenario.validate();
  return assemble(scenario.geometry, scenario.grids(), scenario.users(),
                  scenario.passband_threshold, scenario.stopband_threshold,
                  scenario.antenna_power, scenario.admm.eta);
}

/// ||w||_{2,1}: sum over antennas of the l2 norm across users.
inline double l21_norm(const StackShape& shape, const CVector& w) {
  double s = 0.0;
  for (Index n = 0; n < shape.antennas; ++n) s += shape.group_norm(w, n);
  return s;
}

inline double objective(const StackShape& shape, const CVector& w, double eta) {
  return w.squaredNorm() + eta * l21_norm(shape, w);
}

}  // namespace dfrc
