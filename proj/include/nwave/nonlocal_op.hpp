#pragma once

#include <limits>

#include "nwave/grid.hpp"
#include "nwave/kernel.hpp"

namespace nwave {

inline constexpr double kInfNorm = std::numeric_limits<double>::infinity();

/// alpha * (J * u - u), u extended by zero outside its grid.
GridFunction apply_L(const Kernel& J, const GridFunction& u, double alpha,
                     ConvolutionBackend backend = ConvolutionBackend::automatic);

/// lambda^q * (J_lambda * u - u). Throws UnresolvedKernel when J_lambda spans
/// fewer than 9 cells; logs a warning for lambda < 1.
GridFunction apply_rescaled_L(const Kernel& J, const GridFunction& u, double lambda, double q,
                              ConvolutionBackend backend = ConvolutionBackend::automatic);

/// Centered second difference (u[j+1] - 2u[j] + u[j-1]) / dx^2, zero-extended.
GridFunction second_difference(const GridFunction& u);

/// Discrete L^p norm (sum |u|^p dx)^(1/p) over a window; p = kInfNorm gives max|u|.
double lp_norm(const GridFunction& u, double p, Window window);

/// ||lambda^2 (J_lambda * psi - psi)||_p / ||psi_xx||_p.
///
/// Both norms are taken over the cells whose J_lambda stencil lies inside the
/// grid. Throws std::domain_error when the denominator vanishes while the
/// numerator does not.
double second_order_bound_ratio(const Kernel& J, const GridFunction& psi, double lambda, double p);

}  // namespace nwave
