#pragma once

#include <algorithm>
#include <cmath>

#include "dfrc/problem.hpp"
#include "dfrc/types.hpp"

namespace dfrc {

/// Groups with a norm below this are treated as exactly zero.
inline constexpr double kZeroGroupNorm = 1e-300;

/// Proximal operator of (eta / L) ||.||_{2,1} with quadratic weight rho / 2:
///
///   argmin_v (eta / L) ||v||_{2,1} + (rho / 2) ||v - c||^2.
///
/// Every antenna group c_(n) is scaled by max(0, 1 - eta / (rho L ||c_(n)||)),
/// so phases survive and groups inside the dead zone become zero.
inline CVector group_shrink(const CVector& c, double eta, double rho, Index num_constraints,
                            const StackShape& shape) {
  if (c.size() != shape.size()) throw DomainError("group_shrink: length must equal M*N");
  if (!(eta >= 0.0)) throw DomainError("group_shrink: eta must be >= 0");
  if (!(rho > 0.0)) throw DomainError("group_shrink: rho must be > 0");
  if (num_constraints < 1) throw DomainError("group_shrink: L must be >= 1");
  if (eta == 0.0) return c;

  const double threshold = eta / (rho * static_cast<double>(num_constraints));
  CVector out(c.size());
  for (Index n = 0; n < shape.antennas; ++n) {
    const double g = shape.group_norm(c, n);
    const double scale = g < kZeroGroupNorm ? 0.0 : std::max(0.0, 1.0 - threshold / g);
    for (Index m = 0; m < shape.users; ++m) {
      const Index i = shape.at(m, n);
      out[i] = scale * c[i];
    }
  }
  return out;
}

}  // namespace dfrc
