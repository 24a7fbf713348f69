#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "dfrc/admm.hpp"
#include "dfrc/detail/parallel.hpp"
#include "dfrc/eval.hpp"
#include "dfrc/problem.hpp"

namespace dfrc {

/// Antenna indices by descending group norm; ties go to the lower index.
inline std::vector<Index> rank_groups(const StackShape& shape, const CVector& w) {
  std::vector<Index> order(static_cast<std::size_t>(shape.antennas));
  std::iota(order.begin(), order.end(), Index{0});
  std::vector<double> norms(order.size());
  for (Index n = 0; n < shape.antennas; ++n) norms[static_cast<std::size_t>(n)] = shape.group_norm(w, n);
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
    return norms[static_cast<std::size_t>(a)] > norms[static_cast<std::size_t>(b)];
  });
  return order;
}

/// The K strongest antennas, in ascending index order.
inline std::vector<Index> select_support(const StackShape& shape, const CVector& w, Index k) {
  if (k < 1 || k > shape.antennas) throw DomainError("select_support: K must satisfy 1 <= K <= N");
  auto order = rank_groups(shape, w);
  order.resize(static_cast<std::size_t>(k));
  std::sort(order.begin(), order.end());
  return order;
}

inline std::string format_support(const std::vector<Index>& support) {
  std::string s = "{";
  for (std::size_t i = 0; i < support.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(support[i]);
  }
  return s + "}";
}

struct RefitResult {
  std::vector<Index> support;
  CVector w;  // full-size stack, zero off the support
  AdmmState state;
};

/// Iterations between feasibility polishes during a refit.
inline constexpr int kRefitCheckpoint = 10;

/// Re-solves on the subarray with the sparsity term removed.
///
/// Every kRefitCheckpoint iterations the consensus point is projected back
/// onto the feasible set and scaled until a lower-bound constraint is tight.
/// When that beats the best design so far, the iterations restart from it.
/// The feasible starting point is kept if nothing better turns up.
inline RefitResult refit(const ProblemInstance& problem, const std::vector<Index>& support,
                         const AdmmConfig& config, std::uint64_t seed) {
  ProblemInstance reduced = problem.restrict_to(support);
  reduced.eta = 0.0;
  AdmmConfig cfg = config;
  cfg.eta = 0.0;
  cfg.primal_tol.reset();
  cfg.dual_tol.reset();
  cfg.validate();
  RefitResult out;
  out.support = support;
  try {
    out.state = initialize(reduced, seed);
  } catch (const InfeasibleError& e) {
    throw InfeasibleError("refit on support " + format_support(support) + " is infeasible: " + e.what());
  }
  if (auto msg = premise_warning(cfg, reduced.num_constraints())) out.state.warnings.push_back(*msg);
  CVector best = out.state.w;
  double best_power = tx_power(best);
  const FeasibilityOptions opts;
  AdmmState& st = out.state;
  for (int done = 0; done < config.max_iterations; done += kRefitCheckpoint) {
    cfg.max_iterations = std::min(kRefitCheckpoint, config.max_iterations - done);
    iterate(reduced, cfg, st);
    CVector candidate = st.w;
    if (reduced.max_relative_violation(candidate) > opts.tolerance) detail::cyclic_projection(reduced, candidate, opts);
    if (reduced.max_relative_violation(candidate) > opts.tolerance) continue;
    candidate = scale_to_tight(reduced, candidate);
    const double power = tx_power(candidate);
    if (power < best_power) {
      best = candidate;
      best_power = power;
      st.w = best;
      st.v.assign(st.v.size(), best);
      for (auto& u : st.u) u.setZero();
    }
  }
  out.w = reduced.embed(best, problem.shape.antennas);
  return out;
}

struct TrialOutcome {
  std::vector<Index> support;
  bool feasible = false;
  double tx_power = std::numeric_limits<double>::quiet_NaN();
  double msrr = std::numeric_limits<double>::quiet_NaN();
};

struct BaselineStats {
  Index k = 0;
  int trials = 0;
  int infeasible = 0;
  double mean_tx_power = std::numeric_limits<double>::quiet_NaN();
  double mean_msrr = std::numeric_limits<double>::quiet_NaN();
  std::vector<TrialOutcome> outcomes;
};

/// Uniform K-subset drawn from the trial's own stream.
inline std::vector<Index> random_support(Index antennas, Index k, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Index> idx(static_cast<std::size_t>(antennas));
  std::iota(idx.begin(), idx.end(), Index{0});
  // Partial Fisher-Yates with an explicit modulo-free draw keeps the sequence
  // identical across standard libraries.
  for (Index i = 0; i < k; ++i) {
    const std::uint64_t span = static_cast<std::uint64_t>(antennas - i);
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % span;
    std::uint64_t r;
    do {
      r = rng();
    } while (r >= limit);
    std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(i + static_cast<Index>(r % span))]);
  }
  idx.resize(static_cast<std::size_t>(k));
  std::sort(idx.begin(), idx.end());
  return idx;
}

/// Random-selection baseline: per trial a uniform K-subset is refit. Infeasible
/// draws are counted and excluded from the means. Trial t uses the stream
/// split_seed(seed, t), so results do not depend on `parallelism`.
inline BaselineStats random_selection_baseline(const ProblemInstance& problem, Index k, int trials,
                                               std::uint64_t seed, const AdmmConfig& config,
                                               int parallelism = 1) {
  if (trials < 1) throw ConfigError("random baseline: trials must be >= 1");
  if (k < 1 || k > problem.shape.antennas) throw ConfigError("random baseline: K out of range");
  BaselineStats stats;
  stats.k = k;
  stats.trials = trials;
  stats.outcomes.resize(static_cast<std::size_t>(trials));
  AdmmConfig inner = config;
  inner.parallelism = 1;
  detail::parallel_for(stats.outcomes.size(), parallelism, [&](std::size_t t) {
    const std::uint64_t trial_seed = detail::split_seed(seed, t);
    TrialOutcome o;
    o.support = random_support(problem.shape.antennas, k, trial_seed);
    try {
      const RefitResult r = refit(problem, o.support, inner, trial_seed);
      o.feasible = true;
      o.tx_power = tx_power(r.w);
      o.msrr = msrr(problem, r.w);
    } catch (const InfeasibleError&) {
      o.feasible = false;
    }
    stats.outcomes[t] = std::move(o);
  });
  double tx = 0.0;
  double ratio = 0.0;
  int feasible = 0;
  for (const auto& o : stats.outcomes) {
    if (!o.feasible) {
      ++stats.infeasible;
      continue;
    }
    tx += o.tx_power;
    ratio += o.msrr;
    ++feasible;
  }
  if (feasible > 0) {
    stats.mean_tx_power = tx / feasible;
    stats.mean_msrr = ratio / feasible;
  }
  return stats;
}

}  // namespace dfrc
