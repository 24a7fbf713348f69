// Command-line front end: solve, sweep-k, sweep-m, check-config.

#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "dfrc/commands.hpp"

namespace {

struct Args {
  std::string scenario;
  std::string out = "out";
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  int parallel = 1;
};

void add_common(CLI::App* cmd, Args& args, bool with_out, bool with_trials) {
  cmd->add_option("--scenario", args.scenario, "Scenario JSON file")->required();
  if (with_out) cmd->add_option("--out", args.out, "Output directory")->capture_default_str();
  cmd->add_option("--seed", args.seed, "Master seed (overrides the scenario)");
  if (with_trials) cmd->add_option("--trials", args.trials, "Monte-Carlo trials per point")->check(CLI::PositiveNumber);
  cmd->add_option("--parallel", args.parallel, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse-array DFRC beamformer design"};
  app.require_subcommand(1);
  Args args;
  auto* solve = app.add_subcommand("solve", "Design a K-antenna beamformer and write report artifacts");
  auto* sweep_k = app.add_subcommand("sweep-k", "Proposed vs random selection over the K list");
  auto* sweep_m = app.add_subcommand("sweep-m", "Proposed vs random selection over the M list");
  auto* check = app.add_subcommand("check-config", "Validate a scenario file");
  add_common(solve, args, true, false);
  add_common(sweep_k, args, true, true);
  add_common(sweep_m, args, true, true);
  check->add_option("--scenario", args.scenario, "Scenario JSON file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? dfrc::kExitOk : dfrc::kExitError;
  }

  try {
    const dfrc::Scenario scenario = dfrc::load_scenario(args.scenario);
    const dfrc::RunOptions opts{args.seed, args.trials, args.parallel};
    if (*solve) return dfrc::cmd_solve(scenario, args.out, opts, std::cerr);
    if (*sweep_k) return dfrc::cmd_sweep_k(scenario, args.out, opts, std::cerr);
    if (*sweep_m) return dfrc::cmd_sweep_m(scenario, args.out, opts, std::cerr);
    return dfrc::cmd_check_config(scenario, std::cout);
  } catch (const dfrc::InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return dfrc::kExitInfeasible;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return dfrc::kExitError;
  }
}
