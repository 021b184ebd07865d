#pragma once

// Independent reference computations used only by the tests.

#include <cmath>
#include <functional>
#include <vector>

namespace oracle {

// Composite Simpson rule on [a, b] with n (even) panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n = 20000) {
  if (n % 2) ++n;
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

// Godunov flux by brute force: min over [uL, uR] if uL <= uR, max over [uR, uL] otherwise.
inline double godunov_brute(const std::function<double(double)>& f, double uL, double uR, int samples = 4000) {
  const double lo = std::min(uL, uR);
  const double hi = std::max(uL, uR);
  double best = f(uL);
  for (int i = 0; i <= samples; ++i) {
    const double v = f(lo + (hi - lo) * i / samples);
    best = uL <= uR ? std::min(best, v) : std::max(best, v);
  }
  return best;
}

inline double power_flux(double u, double q) { return std::pow(std::abs(u), q - 1.0) * u / q; }

}  // namespace oracle
