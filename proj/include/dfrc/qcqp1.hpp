#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Eigenvalues>

#include "dfrc/detail/root_find.hpp"
#include "dfrc/problem.hpp"
#include "dfrc/types.hpp"

namespace dfrc {

/// Nearest point of {v : v^H F v <= f} to a given v_bar, with its multiplier.
struct ProjectionResult {
  CVector point;
  double multiplier = 0.0;  // mu >= 0 in (v - v_bar) + mu F v = 0
  bool active = false;
  double kkt_residual = 0.0;
};

namespace detail {

inline constexpr double kTinyCoefficient = 1e-300;

/// Splits each user block of v along the unit generator g / ||g||.
/// Returns the coefficients z_m = (g / ||g||)^H v_m.
inline CVector generator_coefficients(const StackShape& shape, const CVector& v, const CVector& g,
                                      double g_norm) {
  CVector z(shape.users);
  for (Index m = 0; m < shape.users; ++m) z[m] = g.dot(shape.user_block(v, m)) / g_norm;
  return z;
}

/// v_m + (z_new_m - z_old_m) g / ||g||, leaving the complement of g untouched.
inline CVector replace_coefficients(const StackShape& shape, const CVector& v, const CVector& g,
                                    double g_norm, const CVector& z_old, const CVector& z_new) {
  CVector out = v;
  for (Index m = 0; m < shape.users; ++m) {
    const Complex delta = z_new[m] - z_old[m];
    if (delta != Complex{0.0, 0.0}) shape.user_block(out, m) += (delta / g_norm) * g;
  }
  return out;
}

}  // namespace detail

/// Radial projection of one antenna group onto the ball sum |g_m|^2 <= max_power.
inline CVector project_antenna_power(const CVector& group, double max_power) {
  const double norm = group.norm();
  if (norm * norm <= max_power) return group;
  return group * (std::sqrt(max_power) / norm);
}

/// Projection onto sum_m |a^H v_m|^2 <= threshold. Coefficients along a shrink
/// by the common factor 1 / (1 + mu ||a||^2).
inline ProjectionResult project_stopband(const StackShape& shape, const CVector& v_bar,
                                         const CVector& steering, double threshold) {
  const double a_norm = steering.norm();
  const CVector z = detail::generator_coefficients(shape, v_bar, steering, a_norm);
  const double response = a_norm * a_norm * z.squaredNorm();
  if (response <= threshold) return {v_bar, 0.0, false, 0.0};
  // sum ||a||^2 |z_m|^2 / (1 + mu ||a||^2)^2 = threshold has the closed-form root below.
  const double factor = std::sqrt(threshold / response);
  const CVector z_new = z * factor;
  const double mu = threshold > 0.0 ? (1.0 / factor - 1.0) / (a_norm * a_norm)
                                     : std::numeric_limits<double>::infinity();
  return {detail::replace_coefficients(shape, v_bar, steering, a_norm, z, z_new), mu, true, 0.0};
}

/// Projection onto sum_m |a^H v_m|^2 >= threshold (exterior of a cylinder).
/// Coefficients along a grow as 1 / (1 - mu ||a||^2). When every coefficient is
/// zero the required mass goes into user block 0.
inline ProjectionResult project_passband(const StackShape& shape, const CVector& v_bar,
                                         const CVector& steering, double threshold) {
  const double a_norm = steering.norm();
  const double a2 = a_norm * a_norm;
  const CVector z = detail::generator_coefficients(shape, v_bar, steering, a_norm);
  const double response = a2 * z.squaredNorm();
  if (response >= threshold) return {v_bar, 0.0, false, 0.0};
  CVector z_new = z;
  double mu = 1.0 / a2;
  if (z.norm() < detail::kTinyCoefficient) {
    z_new.setZero();
    z_new[0] = std::sqrt(threshold) / a_norm;
  } else {
    const double factor = std::sqrt(threshold / response);
    z_new = z * factor;
    mu = (1.0 - 1.0 / factor) / a2;
  }
  return {detail::replace_coefficients(shape, v_bar, steering, a_norm, z, z_new), mu, true, 0.0};
}

/// Projection onto |h^H v_m|^2 - gamma sum_{j != m} |h^H v_j|^2 >= gamma sigma^2.
///
/// With t = mu ||h||^2 in [0, 1], the stationary point scales the own
/// coefficient by 1 / (1 - t) and the interfering ones by 1 / (1 + gamma t).
/// The constraint value is increasing in t, so the root is bracketed; we solve
/// in s = 1 - t to keep precision when the own coefficient is small. A zero
/// own coefficient is the hard case t = 1 with the own coefficient injected.
inline ProjectionResult project_sinr(const StackShape& shape, const CVector& v_bar,
                                     const CVector& channel, double target, double noise_variance,
                                     Index user, const detail::RootOptions& opts = {}) {
  const double h_norm = channel.norm();
  const double h2 = h_norm * h_norm;
  const CVector z = detail::generator_coefficients(shape, v_bar, channel, h_norm);
  const double own2 = std::norm(z[user]);
  const double interference2 = z.squaredNorm() - own2;
  const double rhs = target * noise_variance;
  if (h2 * (own2 - target * interference2) >= rhs) return {v_bar, 0.0, false, 0.0};

  CVector z_new(z.size());
  double t = 1.0;
  if (std::sqrt(own2) < detail::kTinyCoefficient) {
    for (Index j = 0; j < z.size(); ++j) z_new[j] = z[j] / (1.0 + target);
    const double interference_new = z_new.squaredNorm() - std::norm(z_new[user]);
    z_new[user] = std::sqrt((rhs + target * h2 * interference_new) / h2);
  } else {
    // g(s) = h2 (own2 / s^2 - gamma I / (1 + gamma (1 - s))^2) - rhs, decreasing in s.
    auto g = [&](double s) -> std::pair<double, double> {
      const double d = 1.0 + target * (1.0 - s);
      const double value = h2 * (own2 / (s * s) - target * interference2 / (d * d)) - rhs;
      const double deriv = h2 * (-2.0 * own2 / (s * s * s) - 2.0 * target * target * interference2 / (d * d * d));
      return {value, deriv};
    };
    // Lower end of the bracket: own-term alone already exceeds the target.
    double s_lo = std::min(1.0, std::sqrt(own2 * h2 / (rhs + h2 * target * interference2 + 1e-300)));
    while (g(s_lo).first < 0.0 && s_lo > 1e-300) s_lo *= 0.5;
    detail::RootOptions scaled = opts;
    scaled.abs_tol = opts.abs_tol * std::max(1.0, rhs);
    const double s = detail::safeguarded_root(g, s_lo, 1.0, scaled);
    t = 1.0 - s;
    for (Index j = 0; j < z.size(); ++j) {
      z_new[j] = j == user ? z[j] / s : z[j] / (1.0 + target * t);
    }
  }
  return {detail::replace_coefficients(shape, v_bar, channel, h_norm, z, z_new), t / h2, true, 0.0};
}

/// Projection onto {v : v^H F v <= f} for any Hermitian F via its
/// eigendecomposition. Handles the trust-region style hard case.
inline ProjectionResult project_generic(const CMatrix& matrix, double bound, const CVector& v_bar,
                                        const detail::RootOptions& opts = {}) {
  if (matrix.rows() != matrix.cols() || matrix.rows() != v_bar.size())
    throw DomainError("project_generic: dimension mismatch");
  const double current = v_bar.dot(matrix * v_bar).real();
  if (current <= bound) return {v_bar, 0.0, false, 0.0};

  Eigen::SelfAdjointEigenSolver<CMatrix> eig(matrix);
  if (eig.info() != Eigen::Success) throw NumericalError("project_generic: eigendecomposition failed");
  const RVector& lambda = eig.eigenvalues();
  const CMatrix& q = eig.eigenvectors();
  const CVector y = q.adjoint() * v_bar;
  const Index n = lambda.size();
  const double lambda_min = lambda[0];
  const double spread = std::max(1.0, lambda.cwiseAbs().maxCoeff());

  auto point_at = [&](double mu) {
    CVector c(n);
    for (Index i = 0; i < n; ++i) c[i] = y[i] / (1.0 + mu * lambda[i]);
    return c;
  };
  // phi(mu) = sum lambda_i |y_i|^2 / (1 + mu lambda_i)^2 - f is decreasing.
  auto phi = [&](double mu) -> std::pair<double, double> {
    double value = -bound;
    double deriv = 0.0;
    for (Index i = 0; i < n; ++i) {
      const double d = 1.0 + mu * lambda[i];
      const double w = std::norm(y[i]);
      value += lambda[i] * w / (d * d);
      deriv -= 2.0 * lambda[i] * lambda[i] * w / (d * d * d);
    }
    return {value, deriv};
  };

  detail::RootOptions scaled = opts;
  scaled.abs_tol = opts.abs_tol * std::max(1.0, std::abs(bound));

  if (lambda_min >= 0.0) {
    if (bound < 0.0) throw DomainError("project_generic: PSD matrix with negative bound has an empty feasible set");
    double hi = 1.0;
    while (phi(hi).first > 0.0 && hi < 1e300) hi *= 2.0;
    if (phi(hi).first > 0.0) {
      // Limit mu -> infinity: keep only the null-space component.
      CVector c = CVector::Zero(n);
      for (Index i = 0; i < n; ++i) {
        if (lambda[i] <= 1e-12 * spread) c[i] = y[i];
      }
      return {q * c, std::numeric_limits<double>::infinity(), true, 0.0};
    }
    const double mu = detail::safeguarded_root(phi, 0.0, hi, scaled);
    return {q * point_at(mu), mu, true, 0.0};
  }

  const double mu_max = -1.0 / lambda_min;
  const double crit_tol = 1e-12 * spread;
  double crit_mass = 0.0;
  for (Index i = 0; i < n; ++i) {
    if (lambda[i] <= lambda_min + crit_tol) crit_mass += std::norm(y[i]);
  }
  // Value at mu_max of the non-critical terms.
  double rest = -bound;
  for (Index i = 0; i < n; ++i) {
    if (lambda[i] > lambda_min + crit_tol) {
      const double d = 1.0 + mu_max * lambda[i];
      rest += lambda[i] * std::norm(y[i]) / (d * d);
    }
  }
  auto hard_case = [&]() -> ProjectionResult {
    // Stop at mu_max and close the gap along the critical eigenvector.
    CVector c = CVector::Zero(n);
    for (Index i = 0; i < n; ++i) {
      if (lambda[i] > lambda_min + crit_tol) c[i] = y[i] / (1.0 + mu_max * lambda[i]);
    }
    const double magnitude = std::sqrt(rest / -lambda_min);
    const Complex phase = std::abs(y[0]) > 0.0 ? y[0] / std::abs(y[0]) : Complex{1.0, 0.0};
    c[0] = magnitude * phase;
    return {q * c, mu_max, true, 0.0};
  };
  if (std::sqrt(crit_mass) <= 1e-14 * std::max(1.0, y.norm()) && rest > 0.0) return hard_case();
  auto phi_crit = [&](double mu) {
    if (crit_mass == 0.0) {
      // Critical terms vanish identically; evaluate without them so mu_max is usable.
      double value = -bound;
      double deriv = 0.0;
      for (Index i = 0; i < n; ++i) {
        if (lambda[i] > lambda_min + crit_tol) {
          const double d = 1.0 + mu * lambda[i];
          const double w = std::norm(y[i]);
          value += lambda[i] * w / (d * d);
          deriv -= 2.0 * lambda[i] * lambda[i] * w / (d * d * d);
        }
      }
      return std::pair<double, double>{value, deriv};
    }
    return phi(mu);
  };
  double hi = mu_max;
  if (crit_mass > 0.0) {
    // Step back from the pole until phi is negative.
    double gap = 0.5 * mu_max;
    hi = mu_max - gap;
    while (phi(hi).first > 0.0) {
      gap *= 0.5;
      hi = mu_max - gap;
      if (gap < std::numeric_limits<double>::epsilon() * mu_max) break;
    }
    if (phi(hi).first > 0.0) return hard_case();
  }
  const double mu = detail::safeguarded_root(phi_crit, 0.0, hi, scaled);
  CVector c = point_at(mu);
  if (crit_mass == 0.0) {
    for (Index i = 0; i < n; ++i) {
      if (lambda[i] <= lambda_min + crit_tol) c[i] = 0.0;
    }
  }
  return {q * c, mu, true, 0.0};
}

/// KKT stationarity residual ||(v - v_bar) + mu F v||.
inline double kkt_residual(const QuadraticConstraint& constraint, const CVector& v_bar,
                           const ProjectionResult& r) {
  if (!r.active) return (r.point - v_bar).norm();
  if (!std::isfinite(r.multiplier)) return 0.0;
  return ((r.point - v_bar) + r.multiplier * constraint.apply(r.point)).norm();
}

/// Nearest point of the constraint set to v_bar. Feasible inputs come back
/// unchanged; otherwise dispatches on the constraint kind.
inline ProjectionResult project(const QuadraticConstraint& constraint, const CVector& v_bar,
                                const detail::RootOptions& opts = {}) {
  const StackShape& shape = constraint.shape();
  if (v_bar.size() != shape.size()) throw DomainError("project: length must equal M*N");
  if (constraint.quadratic(v_bar) <= constraint.bound()) return {v_bar, 0.0, false, 0.0};

  ProjectionResult r = std::visit(
      [&](const auto& c) -> ProjectionResult {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, PassBand>) {
          return project_passband(shape, v_bar, c.steering, c.threshold);
        } else if constexpr (std::is_same_v<T, StopBand>) {
          return project_stopband(shape, v_bar, c.steering, c.threshold);
        } else if constexpr (std::is_same_v<T, AntennaPower>) {
          CVector out = v_bar;
          const CVector g = shape.antenna_group(v_bar, c.antenna);
          shape.set_antenna_group(out, c.antenna, project_antenna_power(g, c.max_power));
          const double mu = c.max_power > 0.0 ? g.norm() / std::sqrt(c.max_power) - 1.0
                                              : std::numeric_limits<double>::infinity();
          return {out, mu, true, 0.0};
        } else if constexpr (std::is_same_v<T, Sinr>) {
          return project_sinr(shape, v_bar, c.channel, c.target, c.noise_variance, c.user, opts);
        } else {
          return project_generic(c.matrix, c.bound, v_bar, opts);
        }
      },
      constraint.data());
  r.kkt_residual = kkt_residual(constraint, v_bar, r);
  return r;
}

}  // namespace dfrc
