#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "dfrc/types.hpp"

namespace dfrc {

/// Hyperparameters of the consensus ADMM solver.
struct AdmmConfig {
  double eta = 0.1;            // sparsity weight on the l2,1 term
  double rho = 50.0;           // augmented Lagrangian parameter
  int max_iterations = 100;
  std::optional<double> primal_tol;  // early stop only when both are set
  std::optional<double> dual_tol;
  int parallelism = 1;

  void validate() const {
    if (!(eta >= 0.0)) throw ConfigError("admm: eta must be >= 0");
    if (!(rho > 0.0)) throw ConfigError("admm: rho must be > 0");
    if (max_iterations < 0) throw ConfigError("admm: max_iterations must be >= 0");
    if (parallelism < 1) throw ConfigError("admm: parallelism must be >= 1");
    if (primal_tol && !(*primal_tol > 0.0)) throw ConfigError("admm: primal_tol must be > 0");
    if (dual_tol && !(*dual_tol > 0.0)) throw ConfigError("admm: dual_tol must be > 0");
  }

  bool operator==(const AdmmConfig&) const = default;
};

/// The projection form of the v-update relies on rho/2 dominating eta/L. Returns
/// a warning message when rho/2 < 10 * eta / L.
inline std::optional<std::string> premise_warning(const AdmmConfig& config, Index num_constraints) {
  if (num_constraints <= 0) return std::nullopt;
  const double lhs = config.rho / 2.0;
  const double rhs = 10.0 * config.eta / static_cast<double>(num_constraints);
  if (lhs < rhs) {
    return "rho/2 = " + std::to_string(lhs) + " is not much larger than eta/L = " +
           std::to_string(config.eta / static_cast<double>(num_constraints)) +
           "; the projection v-update is a coarse approximation";
  }
  return std::nullopt;
}

}  // namespace dfrc
