#include "nwave/nonlocal_op.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <stdexcept>

namespace nwave {

namespace {

// coefficient * (J * u - u) with long double accumulation of the scaled
// difference.
GridFunction scaled_difference(const Kernel& J, const GridFunction& u, long double coefficient,
                               ConvolutionBackend backend) {
  require_matching_spacing(J, u);
  GridFunction out = u.like();
  if (coefficient == 0.0L) return out;

  const auto resolved = resolve_backend(J, backend);
  const std::size_t n = u.size();
  if (resolved == ConvolutionBackend::direct) {
    // Sum J_k dx (u[j-k] - u[j]) directly so constants cancel exactly.
    const int R = J.radius_cells();
    const double dx = J.dx();
    for (std::size_t j = 0; j < n; ++j) {
      long double acc = 0.0L;
      for (int k = -R; k <= R; ++k) {
        const auto src = static_cast<std::ptrdiff_t>(j) - k;
        const double neighbor =
            (src >= 0 && src < static_cast<std::ptrdiff_t>(n)) ? u[static_cast<std::size_t>(src)] : 0.0;
        acc += static_cast<long double>(J.at(k)) * (static_cast<long double>(neighbor) - u[j]);
      }
      out[j] = static_cast<double>(coefficient * acc * dx);
    }
    return out;
  }

  Convolver conv(J, n, resolved);
  conv.apply(u.values(), out.values());
  for (std::size_t j = 0; j < n; ++j) {
    out[j] = static_cast<double>(coefficient * (static_cast<long double>(out[j]) - u[j]));
  }
  return out;
}

}  // namespace

GridFunction apply_L(const Kernel& J, const GridFunction& u, double alpha, ConvolutionBackend backend) {
  if (!(alpha >= 0.0)) throw std::invalid_argument("nonlocal strength alpha must be >= 0");
  return scaled_difference(J, u, alpha, backend);
}

GridFunction apply_rescaled_L(const Kernel& J, const GridFunction& u, double lambda, double q,
                              ConvolutionBackend backend) {
  if (!(q > 1.0 && q <= 2.0)) throw std::invalid_argument("exponent q must lie in (1, 2]");
  if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be positive");
  if (lambda < 1.0) {
    std::clog << "warning: rescaled operator with lambda=" << lambda << " < 1\n";
  }
  const Kernel Jl = rescale(J, lambda);
  const long double coefficient = std::pow(static_cast<long double>(lambda), static_cast<long double>(q));
  return scaled_difference(Jl, u, coefficient, backend);
}

GridFunction second_difference(const GridFunction& u) {
  GridFunction out = u.like();
  const std::size_t n = u.size();
  const double inv = 1.0 / (u.dx() * u.dx());
  for (std::size_t j = 0; j < n; ++j) {
    const double left = j > 0 ? u[j - 1] : 0.0;
    const double right = j + 1 < n ? u[j + 1] : 0.0;
    out[j] = (right - 2.0 * u[j] + left) * inv;
  }
  return out;
}

double lp_norm(const GridFunction& u, double p, Window window) {
  if (!(p >= 1.0)) throw std::invalid_argument("L^p norm requires p >= 1");
  const std::size_t end = std::min(window.end, u.size());
  if (std::isinf(p)) {
    double m = 0.0;
    for (std::size_t j = window.begin; j < end; ++j) m = std::max(m, std::abs(u[j]));
    return m;
  }
  long double acc = 0.0L;
  if (p == 1.0) {
    for (std::size_t j = window.begin; j < end; ++j) acc += std::abs(u[j]);
    return static_cast<double>(acc * u.dx());
  }
  if (p == 2.0) {
    for (std::size_t j = window.begin; j < end; ++j) acc += static_cast<long double>(u[j]) * u[j];
    return static_cast<double>(std::sqrt(acc * u.dx()));
  }
  for (std::size_t j = window.begin; j < end; ++j) acc += std::pow(static_cast<long double>(std::abs(u[j])), p);
  return static_cast<double>(std::pow(acc * u.dx(), 1.0L / p));
}

double second_order_bound_ratio(const Kernel& J, const GridFunction& psi, double lambda, double p) {
  const Kernel Jl = rescale(J, lambda);
  const GridFunction diff = scaled_difference(Jl, psi, static_cast<long double>(lambda) * lambda,
                                              ConvolutionBackend::automatic);
  const GridFunction psi_xx = second_difference(psi);
  const auto radius = static_cast<std::size_t>(std::max(Jl.radius_cells(), 1));
  const Window w = psi.interior(radius);
  if (w.size() == 0) throw std::invalid_argument("grid too small for the rescaled kernel stencil");
  const double num = lp_norm(diff, p, w);
  const double den = lp_norm(psi_xx, p, w);
  if (den == 0.0) {
    if (num == 0.0) return 0.0;
    throw std::domain_error("second_order_bound_ratio: psi_xx vanishes but the nonlocal term does not");
  }
  return num / den;
}

}  // namespace nwave
