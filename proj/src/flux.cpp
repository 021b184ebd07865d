#include "nwave/flux.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace nwave {

FluxParams::FluxParams(double q) : q_(q) {
  if (!(q > 1.0 && q <= 2.0)) {
    std::ostringstream msg;
    msg << "exponent q=" << q << " outside the admissible range (1, 2]";
    throw std::invalid_argument(msg.str());
  }
}

double flux(double u, double q) {
  if (u == 0.0) return 0.0;
  return std::pow(std::abs(u), q - 1.0) * u / q;
}

double flux_derivative(double u, double q) {
  if (u == 0.0) return 0.0;
  return std::pow(std::abs(u), q - 1.0);
}

double numerical_flux(double uL, double /*uR*/, double q) { return flux(uL, q); }

double max_wave_speed(const GridFunction& u, double q) {
  double m = 0.0;
  for (double v : u.values()) m = std::max(m, std::abs(v));
  return flux_derivative(m, q);
}

PowerLaw::PowerLaw(double exponent) : exponent_(exponent) {
  if (exponent == 1.0) {
    mode_ = Mode::one;
  } else if (exponent == 0.5) {
    mode_ = Mode::half;
  } else if (exponent == 0.25) {
    mode_ = Mode::quarter;
  } else if (exponent == 0.75) {
    mode_ = Mode::three_quarters;
  } else {
    mode_ = Mode::general;
  }
}

}  // namespace nwave
