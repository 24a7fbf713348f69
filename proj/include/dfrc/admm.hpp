#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "dfrc/admm_config.hpp"
#include "dfrc/detail/parallel.hpp"
#include "dfrc/problem.hpp"
#include "dfrc/prox_l21.hpp"
#include "dfrc/qcqp1.hpp"
#include "dfrc/types.hpp"

namespace dfrc {

struct IterationRecord {
  double objective = 0.0;
  double primal_residual = 0.0;  // max_l ||v_l - w||
  double dual_residual = 0.0;    // rho ||w^(k+1) - w^(k)||
};

/// Consensus variable, per-constraint copies and scaled duals.
struct AdmmState {
  CVector w;
  std::vector<CVector> v;
  std::vector<CVector> u;
  int k = 0;
  std::vector<IterationRecord> history;
  std::vector<std::string> warnings;
};

// ---------------------------------------------------------------------------
// Updates

namespace detail {

/// Fixed-order pairwise sum of v_l + u_l over l in [lo, hi).
inline CVector pairwise_sum(const std::vector<CVector>& v, const std::vector<CVector>& u, std::size_t lo,
                            std::size_t hi) {
  if (hi - lo == 1) return v[lo] + u[lo];
  const std::size_t mid = lo + (hi - lo) / 2;
  return pairwise_sum(v, u, lo, mid) + pairwise_sum(v, u, mid, hi);
}

}  // namespace detail

/// Closed-form minimizer of ||w||^2 + (rho/2) sum_l ||v_l - w + u_l||^2.
inline CVector update_w(const std::vector<CVector>& v, const std::vector<CVector>& u, double rho) {
  if (v.empty()) throw DomainError("update_w: need at least one constraint copy");
  if (v.size() != u.size()) throw DomainError("update_w: v and u must have equal length");
  const double count = static_cast<double>(v.size());
  return (rho / (2.0 + rho * count)) * detail::pairwise_sum(v, u, 0, v.size());
}

/// Group shrinkage of w - u_l followed by projection onto constraint l.
inline CVector update_v_one(const ProblemInstance& problem, std::size_t l, const CVector& w, const CVector& u,
                            double eta, double rho) {
  const CVector shrunk = group_shrink(w - u, eta, rho, problem.num_constraints(), problem.shape);
  return project(problem.constraints[l], shrunk).point;
}

inline std::vector<CVector> update_v(const ProblemInstance& problem, const CVector& w,
                                     const std::vector<CVector>& u, double eta, double rho, int parallelism = 1) {
  std::vector<CVector> v(problem.constraints.size());
  detail::parallel_for(v.size(), parallelism, [&](std::size_t l) {
    v[l] = update_v_one(problem, l, w, u[l], eta, rho);
  });
  return v;
}

inline CVector update_u(const CVector& u, const CVector& v, const CVector& w) { return u + (v - w); }

/// Runs the consensus iterations from an initialized state.
inline void iterate(const ProblemInstance& problem, const AdmmConfig& config, AdmmState& state) {
  const std::size_t count = problem.constraints.size();
  if (count == 0) {
    // Nothing to enforce: minimizer of ||w||^2 + eta ||w||_{2,1} is zero.
    for (int k = 0; k < config.max_iterations; ++k) {
      const CVector next = CVector::Zero(problem.shape.size());
      state.history.push_back({0.0, 0.0, config.rho * (next - state.w).norm()});
      state.w = next;
      ++state.k;
    }
    return;
  }
  const double rho = config.rho;
  for (int k = 0; k < config.max_iterations; ++k) {
    const CVector w_next = update_w(state.v, state.u, rho);
    std::vector<double> primal(count, 0.0);
    detail::parallel_for(count, config.parallelism, [&](std::size_t l) {
      CVector v_l;
      try {
        v_l = update_v_one(problem, l, w_next, state.u[l], problem.eta, rho);
      } catch (const Error& e) {
        throw NumericalError("admm iteration " + std::to_string(state.k) + ", constraint " + std::to_string(l) +
                             " (" + problem.constraints[l].describe() + "): " + e.what());
      }
      state.u[l] = update_u(state.u[l], v_l, w_next);
      primal[l] = (v_l - w_next).norm();
      state.v[l] = std::move(v_l);
    });
    IterationRecord rec;
    rec.objective = objective(problem.shape, w_next, problem.eta);
    rec.primal_residual = *std::max_element(primal.begin(), primal.end());
    rec.dual_residual = rho * (w_next - state.w).norm();
    state.history.push_back(rec);
    state.w = w_next;
    ++state.k;
    if (config.primal_tol && config.dual_tol && rec.primal_residual < *config.primal_tol &&
        rec.dual_residual < *config.dual_tol) {
      break;
    }
  }
}

// ---------------------------------------------------------------------------
// Feasible starting point

struct FeasibilityOptions {
  int max_sweeps = 500;
  int max_restarts = 20;
  double tolerance = 1e-8;  // relative violation accepted as feasible
  // Constraints are projected with their bound tightened by this relative
  // margin, which keeps the final point strictly inside the original set.
  double margin = 1e-7;
  // Last resort: consensus iterations with eta = 0 from the starting beams.
  int consensus_iterations = 2000;
  double consensus_rho = 20.0;
};

namespace detail {

/// Copy of a constraint with its bound pulled inwards by `margin` (relative).
inline QuadraticConstraint tightened(const QuadraticConstraint& c, double margin) {
  if (margin == 0.0) return c;
  return std::visit(
      [&](auto d) -> QuadraticConstraint {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, PassBand>) d.threshold *= (1.0 + margin);
        else if constexpr (std::is_same_v<T, StopBand>) d.threshold *= (1.0 - margin);
        else if constexpr (std::is_same_v<T, AntennaPower>) d.max_power *= (1.0 - margin);
        else if constexpr (std::is_same_v<T, Sinr>) d.target *= (1.0 + margin);
        else d.bound -= margin * std::max(1.0, std::abs(d.bound));
        return {c.shape(), d};
      },
      c.data());
}

inline std::string worst_constraints(const ProblemInstance& problem, const CVector& w, std::size_t count) {
  std::vector<std::pair<double, std::size_t>> viol;
  for (std::size_t l = 0; l < problem.constraints.size(); ++l) {
    const auto& c = problem.constraints[l];
    viol.emplace_back(-c.slack(w) / c.scale(), l);
  }
  std::stable_sort(viol.begin(), viol.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  std::ostringstream os;
  for (std::size_t i = 0; i < std::min(count, viol.size()); ++i) {
    if (i) os << ", ";
    os << problem.constraints[viol[i].second].describe() << " (relative violation " << viol[i].first << ")";
  }
  return os.str();
}

/// Cyclic projections in constraint order; returns the final relative violation.
inline double cyclic_projection(const ProblemInstance& problem, CVector& w, const FeasibilityOptions& opts) {
  std::vector<QuadraticConstraint> tight;
  tight.reserve(problem.constraints.size());
  for (const auto& c : problem.constraints) tight.push_back(tightened(c, opts.margin));
  double violation = problem.max_relative_violation(w);
  for (int sweep = 0; sweep < opts.max_sweeps && violation > opts.tolerance; ++sweep) {
    for (const auto& c : tight) w = project(c, w).point;
    violation = problem.max_relative_violation(w);
  }
  return violation;
}

}  // namespace detail

namespace detail {

/// Linearly constrained minimum-variance beam: argmin w^H R w s.t. C^H w = g.
inline CVector lcmv(const CMatrix& covariance, const CMatrix& directions, const CVector& gains) {
  const auto chol = covariance.llt();
  const CMatrix ric = chol.solve(directions);
  const CMatrix gram = directions.adjoint() * ric;
  return ric * gram.completeOrthogonalDecomposition().solve(gains);
}

}  // namespace detail

/// Starting beams for the feasibility search. Each user gets an LCMV beam with
/// unit gain on its own channel and nulls on the other users, scaled to twice
/// its SINR target; user 0 additionally carries an LCMV beam towards the
/// mainlobe center, scaled until every passband constraint has 20% headroom.
/// The covariance is the stopband steering energy plus diagonal loading.
inline CVector initial_beams(const ProblemInstance& problem) {
  const StackShape& shape = problem.shape;
  std::vector<const Sinr*> sinr;
  std::vector<const PassBand*> passband;
  CMatrix covariance = CMatrix::Zero(shape.antennas, shape.antennas);
  for (const auto& c : problem.constraints) {
    if (const auto* s = std::get_if<Sinr>(&c.data())) sinr.push_back(s);
    if (const auto* p = std::get_if<PassBand>(&c.data())) passband.push_back(p);
    if (const auto* sb = std::get_if<StopBand>(&c.data())) covariance += sb->steering * sb->steering.adjoint();
  }
  const double loading = 1e-3 * std::max(1.0, covariance.trace().real() / static_cast<double>(shape.antennas));
  covariance += loading * CMatrix::Identity(shape.antennas, shape.antennas);

  CVector base = CVector::Zero(shape.size());
  CMatrix channels = CMatrix::Zero(shape.antennas, shape.users);
  for (const auto* s : sinr) channels.col(s->user) = s->channel;
  for (const auto* s : sinr) {
    CVector gains = CVector::Zero(shape.users);
    gains[s->user] = 1.0;
    CVector col = detail::lcmv(covariance, channels, gains);
    const double gain = std::norm(s->channel.dot(col));
    if (gain > 0.0) col *= std::sqrt(2.0 * s->target * s->noise_variance / gain);
    shape.user_block(base, s->user) = col;
  }
  if (!passband.empty()) {
    const CVector& center = passband[passband.size() / 2]->steering;
    CMatrix directions(shape.antennas, shape.users + 1);
    directions.col(0) = center;
    directions.rightCols(shape.users) = channels;
    CVector gains = CVector::Zero(shape.users + 1);
    gains[0] = 1.0;
    const CVector radar = detail::lcmv(covariance, directions, gains);
    auto headroom = [&](double tau) {
      CVector trial = base;
      shape.user_block(trial, 0) += tau * radar;
      double worst = std::numeric_limits<double>::infinity();
      for (const auto* p : passband) {
        worst = std::min(worst, block_response(shape, trial, p->steering) - 1.2 * p->threshold);
      }
      return worst;
    };
    if (headroom(0.0) < 0.0) {
      double hi = 1e-3;
      while (headroom(hi) < 0.0 && hi < 1e12) hi *= 2.0;
      double lo = 0.0;
      for (int it = 0; it < 100; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (headroom(mid) < 0.0) lo = mid; else hi = mid;
      }
      shape.user_block(base, 0) += hi * radar;
    }
  }
  return base;
}

/// Scales a feasible w down until the first lower-bound constraint (passband
/// or SINR) is tight, up to a relative margin. Upper-bound constraints stay
/// satisfied since their quadratic forms are PSD.
inline CVector scale_to_tight(const ProblemInstance& problem, const CVector& w, double margin = 1e-7) {
  double required = 0.0;
  for (const auto& c : problem.constraints) {
    const auto kind = c.kind();
    if (kind != ConstraintKind::kPassBand && kind != ConstraintKind::kSinr) {
      if (kind == ConstraintKind::kGeneric) return w;
      continue;
    }
    // Lower-bound constraint -q(w) >= -f with q(cw) = c^2 q(w).
    const double have = -c.quadratic(w);
    const double need = -c.bound();
    if (!(have > 0.0)) return w;
    required = std::max(required, need / have);
  }
  if (required <= 0.0 || required >= 1.0) return w;
  return w * std::min(1.0, std::sqrt(required * (1.0 + margin)));
}

/// Feasible point for every constraint of `problem`.
///
/// Starts from initial_beams() and runs cyclic projections over all
/// constraints. Failed attempts restart from a random perturbation of the
/// starting beams; when all restarts fail, consensus iterations without the
/// sparsity term are run from the starting beams and their output is
/// projected again. A warm start, when given, is tried first.
inline CVector find_feasible_point(const ProblemInstance& problem, std::uint64_t seed,
                                   const std::optional<CVector>& warm_start = std::nullopt,
                                   const FeasibilityOptions& opts = {}) {
  const StackShape& shape = problem.shape;
  if (problem.constraints.empty()) return CVector::Zero(shape.size());

  const CVector base = initial_beams(problem);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  CVector best;
  double best_violation = std::numeric_limits<double>::infinity();
  const int attempts = opts.max_restarts + 1 + (warm_start ? 1 : 0);
  for (int attempt = 0; attempt < attempts; ++attempt) {
    CVector w;
    if (warm_start && attempt == 0) {
      w = *warm_start;
    } else {
      w = base;
      const int restart = attempt - (warm_start ? 1 : 0);
      if (restart > 0) {
        const double scale = 0.3 * std::max(base.norm(), 1e-3) / std::sqrt(static_cast<double>(w.size()));
        for (Index i = 0; i < w.size(); ++i) w[i] += scale * Complex{normal(rng), normal(rng)};
      }
    }
    const double violation = detail::cyclic_projection(problem, w, opts);
    if (violation <= opts.tolerance) return scale_to_tight(problem, w);
    if (violation < best_violation) {
      best_violation = violation;
      best = w;
    }
  }
  if (opts.consensus_iterations > 0) {
    ProblemInstance plain = problem;
    plain.eta = 0.0;
    AdmmState state;
    state.w = base;
    state.v.assign(problem.constraints.size(), base);
    state.u.assign(problem.constraints.size(), CVector::Zero(shape.size()));
    AdmmConfig config;
    config.eta = 0.0;
    config.rho = opts.consensus_rho;
    config.max_iterations = opts.consensus_iterations;
    iterate(plain, config, state);
    CVector w = state.w;
    const double violation = detail::cyclic_projection(problem, w, opts);
    if (violation <= opts.tolerance) return scale_to_tight(problem, w);
    if (violation < best_violation) best = w;
  }
  throw InfeasibleError("no feasible point found after " + std::to_string(attempts) +
                        " attempts; worst constraints: " + detail::worst_constraints(problem, best, 3));
}

/// v_l = w0 and u_l = 0 for every constraint, w0 a feasible point.
inline AdmmState initialize(const ProblemInstance& problem, std::uint64_t seed,
                            const std::optional<CVector>& warm_start = std::nullopt) {
  AdmmState state;
  state.w = find_feasible_point(problem, seed, warm_start);
  state.v.assign(problem.constraints.size(), state.w);
  state.u.assign(problem.constraints.size(), CVector::Zero(problem.shape.size()));
  return state;
}

/// Full solve: feasible initialization followed by the consensus iterations.
inline AdmmState solve(const ProblemInstance& problem, const AdmmConfig& config, std::uint64_t seed,
                       const std::optional<CVector>& warm_start = std::nullopt) {
  config.validate();
  AdmmState state = initialize(problem, seed, warm_start);
  if (auto msg = premise_warning(config, problem.num_constraints())) state.warnings.push_back(*msg);
  iterate(problem, config, state);
  return state;
}

}  // namespace dfrc
