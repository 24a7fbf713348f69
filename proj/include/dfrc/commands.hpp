#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "dfrc/admm.hpp"
#include "dfrc/eval.hpp"
#include "dfrc/problem.hpp"
#include "dfrc/scenario_io.hpp"
#include "dfrc/select_refit.hpp"

#ifndef DFRC_VERSION
#define DFRC_VERSION "0.1.0"
#endif
#ifndef DFRC_GIT_REVISION
#define DFRC_GIT_REVISION "unknown"
#endif

namespace dfrc {

/// Process exit codes shared by all subcommands.
enum ExitCode : int { kExitOk = 0, kExitError = 1, kExitInfeasible = 2 };

/// Command-line overrides. `parallel` only changes scheduling, never results.
struct RunOptions {
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  int parallel = 1;
};

/// %.17g, so every double survives a text round trip.
inline std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::string fmt(Complex z) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g%+.17gj", z.real(), z.imag());
  return buf;
}

/// Result of the full pipeline: sparse solve, top-K selection, subarray refit.
struct Design {
  ProblemInstance problem;
  AdmmState sparse;
  std::vector<Index> support;
  RefitResult refit;
  DesignReport report;
};

inline AdmmConfig with_parallelism(AdmmConfig c, int parallel) {
  c.parallelism = std::max(1, parallel);
  return c;
}

/// Sparse solve on the full array followed by refits for each K in `ks`.
/// Infeasible refits come back as std::nullopt.
struct SelectionSweep {
  ProblemInstance problem;
  AdmmState sparse;
  std::vector<std::optional<RefitResult>> refits;
};

inline SelectionSweep proposed_designs(const Scenario& scenario, const std::vector<Index>& ks, std::uint64_t seed,
                                       int parallel) {
  SelectionSweep out;
  out.problem = assemble(scenario);
  out.sparse = solve(out.problem, with_parallelism(scenario.admm, parallel), seed);
  for (Index k : ks) {
    const auto support = select_support(out.problem.shape, out.sparse.w, k);
    try {
      out.refits.emplace_back(refit(out.problem, support, with_parallelism(scenario.refit, parallel), seed));
    } catch (const InfeasibleError&) {
      out.refits.emplace_back(std::nullopt);
    }
  }
  return out;
}

/// Single design at scenario.num_selected. Throws InfeasibleError when the
/// selected support admits no feasible refit.
inline Design design(const Scenario& scenario, std::uint64_t seed, int parallel = 1) {
  Design d;
  d.problem = assemble(scenario);
  d.sparse = solve(d.problem, with_parallelism(scenario.admm, parallel), seed);
  d.support = select_support(d.problem.shape, d.sparse.w, scenario.num_selected);
  d.refit = refit(d.problem, d.support, with_parallelism(scenario.refit, parallel), seed);
  d.report = make_report(d.problem, d.refit.w, scenario.geometry, scenario.grids(), scenario.users(), d.support);
  return d;
}

namespace detail {

inline std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  return out;
}

inline void prepare_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) throw Error("cannot create output directory '" + dir.string() + "'");
}

inline Json provenance(const Scenario& scenario, std::uint64_t seed) {
  return {{"scenario_hash", scenario_hash(scenario)},
          {"seed", seed},
          {"version", DFRC_VERSION},
          {"git", DFRC_GIT_REVISION}};
}

inline Json to_json(const RVector& v) {
  Json a = Json::array();
  for (Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

inline Json report_json(const Scenario& scenario, std::uint64_t seed, const Design& d) {
  const auto& r = d.report;
  Json violations;
  for (std::size_t k = 0; k < r.feasibility.max_violation.size(); ++k) {
    violations[kind_name(static_cast<ConstraintKind>(k))] = r.feasibility.max_violation[k];
  }
  Json j;
  j["provenance"] = provenance(scenario, seed);
  j["scenario"] = to_json(scenario);
  j["support"] = r.support;
  j["metrics"] = {{"tx_power_w", r.tx_power},
                  {"msrr", r.msrr},
                  {"msrr_db", r.msrr_db},
                  {"sinr", to_json(r.sinr)},
                  {"antenna_power_w", to_json(r.antenna_power)}};
  j["feasibility"] = {{"feasible", r.feasibility.feasible},
                      {"tolerance", kFeasibilityTolerance},
                      {"max_relative_violation", violations}};
  j["solver"] = {{"iterations", d.sparse.k},
                 {"refit_iterations", d.refit.state.k},
                 {"num_constraints", d.problem.num_constraints()},
                 {"warnings", d.sparse.warnings}};
  return j;
}

}  // namespace detail

/// Writes report.json, beampattern.csv, history.csv and weights.csv.
/// Returns kExitInfeasible when no feasible K-antenna design is found.
inline int cmd_solve(const Scenario& scenario, const std::filesystem::path& out_dir, const RunOptions& opts,
                     std::ostream& log) {
  const std::uint64_t seed = opts.seed.value_or(scenario.seed);
  detail::prepare_dir(out_dir);
  const std::string hash = scenario_hash(scenario);
  Design d;
  try {
    d = design(scenario, seed, opts.parallel);
  } catch (const InfeasibleError& e) {
    log << "infeasible: " << e.what() << "\n";
    return kExitInfeasible;
  }
  for (const auto& w : d.sparse.warnings) log << "warning: " << w << "\n";
  for (const auto& w : d.refit.state.warnings) log << "warning (refit): " << w << "\n";

  detail::open_output(out_dir / "report.json") << detail::report_json(scenario, seed, d).dump(2) << "\n";
  {
    auto out = detail::open_output(out_dir / "beampattern.csv");
    out << "theta_deg,response,scenario_hash,seed\n";
    for (const auto& p : d.report.beampattern) out << fmt(p.angle_deg) << ',' << fmt(p.response) << ',' << hash << ',' << seed << '\n';
  }
  {
    auto out = detail::open_output(out_dir / "history.csv");
    out << "k,objective,primal_residual,dual_residual,scenario_hash,seed\n";
    for (std::size_t k = 0; k < d.sparse.history.size(); ++k) {
      const auto& h = d.sparse.history[k];
      out << k + 1 << ',' << fmt(h.objective) << ',' << fmt(h.primal_residual) << ',' << fmt(h.dual_residual) << ','
          << hash << ',' << seed << '\n';
    }
  }
  {
    auto out = detail::open_output(out_dir / "weights.csv");
    out << "user,antenna,weight,scenario_hash,seed\n";
    const auto& shape = d.problem.shape;
    for (Index m = 0; m < shape.users; ++m) {
      for (Index n = 0; n < shape.antennas; ++n) {
        out << m << ',' << n << ',' << fmt(d.refit.w[shape.at(m, n)]) << ',' << hash << ',' << seed << '\n';
      }
    }
  }
  log << "support " << format_support(d.support) << " tx_power " << fmt(d.report.tx_power) << " W, msrr "
      << fmt(d.report.msrr_db) << " dB\n";
  if (!d.report.feasibility.feasible) {
    log << "infeasible: refit design violates constraints by " << fmt(d.report.feasibility.worst()) << "\n";
    return kExitInfeasible;
  }
  return kExitOk;
}

namespace detail {

inline constexpr const char* kSweepHeader = "method,trials,infeasible,mean_tx_power_w,mean_msrr,mean_msrr_db,scenario_hash,seed\n";

inline void write_row(std::ostream& out, const std::string& prefix, const char* method, int trials, int infeasible,
                      double tx, double msrr, const std::string& hash, std::uint64_t seed) {
  out << prefix << method << ',' << trials << ',' << infeasible << ',' << fmt(tx) << ',' << fmt(msrr) << ','
      << fmt(linear_to_db(msrr)) << ',' << hash << ',' << seed << '\n';
}

inline void write_proposed(std::ostream& out, const std::string& prefix, const ProblemInstance& problem,
                           const std::optional<RefitResult>& r, const std::string& hash, std::uint64_t seed) {
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  if (r) {
    write_row(out, prefix, "proposed", 1, 0, tx_power(r->w), msrr(problem, r->w), hash, seed);
  } else {
    write_row(out, prefix, "proposed", 1, 1, nan, nan, hash, seed);
  }
}

}  // namespace detail

/// Proposed selection against the random baseline for every K in the sweep.
inline int cmd_sweep_k(const Scenario& scenario, const std::filesystem::path& out_dir, const RunOptions& opts,
                       std::ostream& log) {
  if (scenario.k_values.empty()) throw ConfigError("sweep.k_values: empty K list");
  const std::uint64_t seed = opts.seed.value_or(scenario.seed);
  const int trials = opts.trials.value_or(scenario.trials);
  if (trials < 1) throw ConfigError("trials: must be >= 1");
  detail::prepare_dir(out_dir);
  const std::string hash = scenario_hash(scenario);
  const auto sweep = proposed_designs(scenario, scenario.k_values, seed, opts.parallel);
  auto out = detail::open_output(out_dir / "sweep.csv");
  out << "k," << detail::kSweepHeader;
  for (std::size_t i = 0; i < scenario.k_values.size(); ++i) {
    const Index k = scenario.k_values[i];
    const std::string prefix = std::to_string(k) + ",";
    detail::write_proposed(out, prefix, sweep.problem, sweep.refits[i], hash, seed);
    const auto stats = random_selection_baseline(sweep.problem, k, trials, detail::split_seed(seed, 1000 + k),
                                                 scenario.refit, opts.parallel);
    detail::write_row(out, prefix, "random", trials, stats.infeasible, stats.mean_tx_power, stats.mean_msrr, hash, seed);
    log << "K=" << k << (sweep.refits[i] ? "" : " (proposed infeasible)") << ", random infeasible " << stats.infeasible
        << "/" << trials << "\n";
  }
  return kExitOk;
}

/// Proposed and random designs at fixed K for every user count in the sweep.
inline int cmd_sweep_m(const Scenario& scenario, const std::filesystem::path& out_dir, const RunOptions& opts,
                       std::ostream& log) {
  if (scenario.m_values.empty()) throw ConfigError("sweep.m_values: empty M list");
  const std::uint64_t seed = opts.seed.value_or(scenario.seed);
  const int trials = opts.trials.value_or(scenario.trials);
  if (trials < 1) throw ConfigError("trials: must be >= 1");
  detail::prepare_dir(out_dir);
  const std::string hash = scenario_hash(scenario);
  auto out = detail::open_output(out_dir / "sweep.csv");
  out << "m,k," << detail::kSweepHeader;
  for (Index m : scenario.m_values) {
    const Scenario s = scenario.with_num_users(m);
    const std::string prefix = std::to_string(m) + "," + std::to_string(s.num_selected) + ",";
    std::optional<RefitResult> proposed;
    ProblemInstance problem = assemble(s);
    try {
      auto sweep = proposed_designs(s, {s.num_selected}, seed, opts.parallel);
      proposed = std::move(sweep.refits.front());
    } catch (const InfeasibleError& e) {
      log << "M=" << m << ": " << e.what() << "\n";
    }
    detail::write_proposed(out, prefix, problem, proposed, hash, seed);
    const auto stats = random_selection_baseline(problem, s.num_selected, trials, detail::split_seed(seed, 2000 + m),
                                                 s.refit, opts.parallel);
    detail::write_row(out, prefix, "random", trials, stats.infeasible, stats.mean_tx_power, stats.mean_msrr, hash, seed);
    log << "M=" << m << (proposed ? "" : " (proposed infeasible)") << ", random infeasible " << stats.infeasible << "/"
        << trials << "\n";
  }
  return kExitOk;
}

/// Validates the scenario and prints its size and hash.
inline int cmd_check_config(const Scenario& scenario, std::ostream& log) {
  const auto problem = assemble(scenario);
  const auto grids = scenario.grids();
  log << "ok: N=" << scenario.geometry.num_antennas << " M=" << scenario.num_users() << " K=" << scenario.num_selected
      << " L=" << problem.num_constraints() << " (passband " << grids.mainlobe.size() << ", stopband "
      << grids.stopband.size() << ")\n";
  if (auto w = premise_warning(scenario.admm, problem.num_constraints())) log << "warning: " << *w << "\n";
  log << "hash " << scenario_hash(scenario) << "\n";
  return kExitOk;
}

}  // namespace dfrc
