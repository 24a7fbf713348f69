#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "dfrc/array_model.hpp"
#include "dfrc/problem.hpp"
#include "dfrc/types.hpp"

namespace dfrc {

/// Relative tolerance used for the overall feasibility verdict.
inline constexpr double kFeasibilityTolerance = 1e-6;

/// sum_m ||w_m||^2.
inline double tx_power(const CVector& w) { return w.squaredNorm(); }

/// sum_m |w_m(n)|^2 for every antenna n.
inline RVector per_antenna_power(const StackShape& shape, const CVector& w) {
  RVector p(shape.antennas);
  for (Index n = 0; n < shape.antennas; ++n) p[n] = std::pow(shape.group_norm(w, n), 2);
  return p;
}

/// Mainlobe-to-sidelobe response ratio from mainlobe and stopband sums.
/// Returns +inf when only the stopband sum is zero and NaN when both are.
inline double response_ratio(double mainlobe, double stopband) {
  if (stopband > 0.0) return mainlobe / stopband;
  if (mainlobe > 0.0) return std::numeric_limits<double>::infinity();
  return std::numeric_limits<double>::quiet_NaN();
}

inline double msrr(const StackShape& shape, const CVector& w, const ArrayGeometry& geometry,
                   const AngleGrids& grids) {
  double main = 0.0;
  double side = 0.0;
  for (double t : grids.mainlobe) main += block_response(shape, w, steering_vector(geometry, t));
  for (double t : grids.stopband) side += block_response(shape, w, steering_vector(geometry, t));
  return response_ratio(main, side);
}

/// MSRR over the grid angles carried by the problem's band constraints.
inline double msrr(const ProblemInstance& problem, const CVector& w) {
  double main = 0.0;
  double side = 0.0;
  for (const auto& c : problem.constraints) {
    if (const auto* p = std::get_if<PassBand>(&c.data())) main += block_response(problem.shape, w, p->steering);
    if (const auto* s = std::get_if<StopBand>(&c.data())) side += block_response(problem.shape, w, s->steering);
  }
  return response_ratio(main, side);
}

struct BeampatternPoint {
  double angle_deg = 0.0;
  double response = 0.0;
};

/// Angles from -90 to 90 degrees in `step` increments.
inline std::vector<double> display_grid(double step = 0.5) {
  std::vector<double> out;
  const auto count = static_cast<long>(std::floor(180.0 / step + 1e-9));
  for (long i = 0; i <= count; ++i) out.push_back(-90.0 + static_cast<double>(i) * step);
  return out;
}

/// sum_m |a(theta)^H w_m|^2 over the given angles.
inline std::vector<BeampatternPoint> beampattern(const StackShape& shape, const CVector& w,
                                                 const ArrayGeometry& geometry,
                                                 const std::vector<double>& angles) {
  std::vector<BeampatternPoint> out;
  out.reserve(angles.size());
  for (double t : angles) out.push_back({t, block_response(shape, w, steering_vector(geometry, t))});
  return out;
}

/// Received SINR of every user.
inline RVector sinr_per_user(const StackShape& shape, const CVector& w, const std::vector<UserChannel>& users) {
  RVector out(shape.users);
  for (Index m = 0; m < shape.users; ++m) {
    const auto& u = users[static_cast<std::size_t>(m)];
    double signal = 0.0;
    double interference = 0.0;
    for (Index j = 0; j < shape.users; ++j) {
      const double r = std::norm(u.h.dot(shape.user_block(w, j)));
      if (j == m) signal = r; else interference += r;
    }
    out[m] = signal / (interference + u.noise_variance);
  }
  return out;
}

struct ConstraintSlack {
  std::size_t index = 0;
  ConstraintKind kind = ConstraintKind::kGeneric;
  std::string label;
  double slack = 0.0;     // f - w^H F w
  double relative = 0.0;  // slack / |f|
};

struct FeasibilityReport {
  std::vector<ConstraintSlack> slacks;
  // Worst relative violation per kind, indexed by ConstraintKind; <= 0 means satisfied.
  std::array<double, 5> max_violation{};
  bool feasible = true;

  double worst() const {
    double w = -std::numeric_limits<double>::infinity();
    for (const auto& s : slacks) w = std::max(w, -s.relative);
    return w;
  }
};

inline FeasibilityReport feasibility_report(const ProblemInstance& problem, const CVector& w,
                                            double tolerance = kFeasibilityTolerance) {
  FeasibilityReport r;
  r.max_violation.fill(-std::numeric_limits<double>::infinity());
  for (std::size_t l = 0; l < problem.constraints.size(); ++l) {
    const auto& c = problem.constraints[l];
    ConstraintSlack s{l, c.kind(), c.describe(), c.slack(w), 0.0};
    s.relative = s.slack / c.scale();
    auto& worst = r.max_violation[static_cast<std::size_t>(s.kind)];
    worst = std::max(worst, -s.relative);
    if (s.relative < -tolerance) r.feasible = false;
    r.slacks.push_back(std::move(s));
  }
  return r;
}

/// Metrics of one design on the full array.
struct DesignReport {
  std::vector<Index> support;
  double tx_power = 0.0;
  double msrr = 0.0;
  double msrr_db = 0.0;
  RVector sinr;
  RVector antenna_power;
  FeasibilityReport feasibility;
  std::vector<BeampatternPoint> beampattern;
};

inline DesignReport make_report(const ProblemInstance& problem, const CVector& w, const ArrayGeometry& geometry,
                                const AngleGrids& grids, const std::vector<UserChannel>& users,
                                std::vector<Index> support, double display_step = 0.5) {
  DesignReport r;
  r.support = std::move(support);
  r.tx_power = tx_power(w);
  r.msrr = msrr(problem.shape, w, geometry, grids);
  r.msrr_db = linear_to_db(r.msrr);
  r.sinr = sinr_per_user(problem.shape, w, users);
  r.antenna_power = per_antenna_power(problem.shape, w);
  r.feasibility = feasibility_report(problem, w);
  r.beampattern = beampattern(problem.shape, w, geometry, display_grid(display_step));
  return r;
}

}  // namespace dfrc
