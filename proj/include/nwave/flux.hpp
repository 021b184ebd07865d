#pragma once

#include <cmath>

#include "nwave/grid.hpp"

namespace nwave {

/// Exponent of the convective nonlinearity, restricted to 1 < q <= 2.
class FluxParams {
 public:
  explicit FluxParams(double q);
  double q() const { return q_; }

 private:
  double q_;
};

/// f(u) = |u|^(q-1) u / q.
double flux(double u, double q);

/// f'(u) = |u|^(q-1).
double flux_derivative(double u, double q);

/// Godunov flux for f. Because f' >= 0 everywhere the Riemann fan never
/// moves left, so this is exactly the upwind value f(uL).
double numerical_flux(double uL, double uR, double q);

/// max_j |u_j|^(q-1).
double max_wave_speed(const GridFunction& u, double q);

/// |a|^e with exact shortcuts for the exponents used by q in {1.25, 1.5, 1.75, 2}.
class PowerLaw {
 public:
  explicit PowerLaw(double exponent);
  double operator()(double a) const {
    a = std::abs(a);
    switch (mode_) {
      case Mode::one: return a;
      case Mode::half: return std::sqrt(a);
      case Mode::quarter: return std::sqrt(std::sqrt(a));
      case Mode::three_quarters: {
        const double s = std::sqrt(a);
        return s * std::sqrt(s);
      }
      case Mode::general: return a == 0.0 ? 0.0 : std::pow(a, exponent_);
    }
    return std::pow(a, exponent_);
  }

 private:
  enum class Mode { one, half, quarter, three_quarters, general };
  double exponent_;
  Mode mode_;
};

}  // namespace nwave
