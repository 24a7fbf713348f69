#pragma once

// Numerical minimizer of (eta/L) ||v||_{2,1} + (rho/2) ||v - c||^2 over the
// full vector, in real coordinates. Every subset of groups pinned at zero is
// tried, and the free groups are solved by damped Newton. Test-only.

#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

struct ProxProblem {
  Eigen::VectorXcd c;
  int users = 1;
  int antennas = 1;
  double eta = 0.0;
  double rho = 1.0;
  int num_constraints = 1;
};

namespace prox_detail {

// Real coordinates: x[2i] = Re v_i, x[2i+1] = Im v_i; group n holds entries m*N + n.
inline std::vector<int> group_coords(const ProxProblem& p, int n) {
  std::vector<int> idx;
  for (int m = 0; m < p.users; ++m) {
    idx.push_back(2 * (m * p.antennas + n));
    idx.push_back(2 * (m * p.antennas + n) + 1);
  }
  return idx;
}

inline double objective(const ProxProblem& p, const Eigen::VectorXd& x, const Eigen::VectorXd& c) {
  const double w = p.eta / p.num_constraints;
  double value = 0.5 * p.rho * (x - c).squaredNorm();
  for (int n = 0; n < p.antennas; ++n) {
    double g = 0.0;
    for (int i : group_coords(p, n)) g += x[i] * x[i];
    value += w * std::sqrt(g);
  }
  return value;
}

}  // namespace prox_detail

inline Eigen::VectorXcd prox_oracle(const ProxProblem& p) {
  using Eigen::MatrixXd;
  using Eigen::VectorXd;
  const int dim = 2 * static_cast<int>(p.c.size());
  VectorXd c(dim);
  for (int i = 0; i < p.c.size(); ++i) {
    c[2 * i] = p.c[i].real();
    c[2 * i + 1] = p.c[i].imag();
  }
  const double weight = p.eta / p.num_constraints;
  double best_value = std::numeric_limits<double>::infinity();
  VectorXd best = VectorXd::Zero(dim);

  for (unsigned mask = 0; mask < (1u << p.antennas); ++mask) {
    // Bit n set: group n pinned at zero.
    VectorXd x = c;
    for (int n = 0; n < p.antennas; ++n) {
      if (mask & (1u << n)) {
        for (int i : prox_detail::group_coords(p, n)) x[i] = 0.0;
      }
    }
    bool ok = true;
    for (int it = 0; it < 200 && ok; ++it) {
      VectorXd grad = p.rho * (x - c);
      MatrixXd hess = p.rho * MatrixXd::Identity(dim, dim);
      for (int n = 0; n < p.antennas; ++n) {
        if (mask & (1u << n)) continue;
        const auto idx = prox_detail::group_coords(p, n);
        double g2 = 0.0;
        for (int i : idx) g2 += x[i] * x[i];
        const double g = std::sqrt(g2);
        if (g == 0.0) {
          ok = false;
          break;
        }
        for (int i : idx) grad[i] += weight * x[i] / g;
        for (int i : idx) {
          for (int j : idx) hess(i, j) += weight * ((i == j ? 1.0 / g : 0.0) - x[i] * x[j] / (g * g * g));
        }
      }
      if (!ok) break;
      for (int n = 0; n < p.antennas; ++n) {
        if (!(mask & (1u << n))) continue;
        for (int i : prox_detail::group_coords(p, n)) {
          grad[i] = 0.0;
          hess.row(i).setZero();
          hess.col(i).setZero();
          hess(i, i) = 1.0;
        }
      }
      if (grad.norm() < 1e-15 * (1.0 + c.norm())) break;
      const VectorXd step = hess.ldlt().solve(-grad);
      double t = 1.0;
      const double f0 = prox_detail::objective(p, x, c);
      while (t > 1e-12 && prox_detail::objective(p, x + t * step, c) > f0 + 1e-4 * t * grad.dot(step)) t *= 0.5;
      x += t * step;
    }
    if (!ok) continue;
    const double value = prox_detail::objective(p, x, c);
    if (value < best_value) {
      best_value = value;
      best = x;
    }
  }
  Eigen::VectorXcd out(p.c.size());
  for (int i = 0; i < p.c.size(); ++i) out[i] = {best[2 * i], best[2 * i + 1]};
  return out;
}

inline double prox_objective(const ProxProblem& p, const Eigen::VectorXcd& v) {
  double value = 0.5 * p.rho * (v - p.c).squaredNorm();
  for (int n = 0; n < p.antennas; ++n) {
    double g = 0.0;
    for (int m = 0; m < p.users; ++m) g += std::norm(v[m * p.antennas + n]);
    value += p.eta / p.num_constraints * std::sqrt(g);
  }
  return value;
}

}  // namespace oracle
