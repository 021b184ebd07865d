#include "nwave/profiles.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>

namespace nwave {

NWave::NWave(double mass, double q) : mass_(mass), q_(q) {
  if (!(q > 1.0 && q <= 2.0)) throw std::invalid_argument("N-wave exponent q must lie in (1, 2]");
  if (!std::isfinite(mass)) throw std::invalid_argument("N-wave mass must be finite");
}

double NWave::front(double t) const {
  if (!(t > 0.0)) throw std::invalid_argument("N-wave evaluated at non-positive time");
  const double e = (q_ - 1.0) / q_;
  return std::pow(q_ / (q_ - 1.0), e) * std::pow(std::abs(mass_), e) * std::pow(t, 1.0 / q_);
}

double NWave::eval(double t, double x) const {
  const double r = front(t);
  if (!(x > 0.0 && x < r)) return 0.0;
  const double v = std::pow(x / t, 1.0 / (q_ - 1.0));
  return mass_ < 0.0 ? -v : v;
}

double NWave::antiderivative(double t, double x) const {
  const double r = front(t);
  const double y = std::clamp(x, 0.0, r);
  // t^(-1/(q-1)) (q-1)/q y^(q/(q-1))
  const double v = (q_ - 1.0) / q_ * std::pow(y, q_ / (q_ - 1.0)) * std::pow(t, -1.0 / (q_ - 1.0));
  return mass_ < 0.0 ? -v : v;
}

double NWave::sup_norm(double t) const { return std::pow(front(t) / t, 1.0 / (q_ - 1.0)); }

double nwave_eval(const NWave& nw, double t, double x) { return nw.eval(t, x); }

GridFunction nwave_sample(const NWave& nw, double t, const GridFunction& grid, Sampling sampling) {
  const double r = nw.front(t);
  if (!(grid.x_min() < 0.0 && grid.x_max() > r)) {
    std::ostringstream msg;
    msg << "grid [" << grid.x_min() << ", " << grid.x_max() << ") does not cover the N-wave support [0, " << r
        << "]";
    throw std::invalid_argument(msg.str());
  }
  GridFunction out = grid.like();
  for (std::size_t j = 0; j < out.size(); ++j) {
    if (sampling == Sampling::point) {
      out[j] = nw.eval(t, grid.center(j));
    } else {
      const double a = grid.left_edge(j);
      const double b = grid.left_edge(j + 1);
      if (b <= 0.0 || a >= r) continue;
      out[j] = (nw.antiderivative(t, b) - nw.antiderivative(t, a)) / grid.dx();
    }
  }
  return out;
}

std::string_view to_string(DatumKind kind) {
  switch (kind) {
    case DatumKind::box: return "box";
    case DatumKind::gaussian: return "gaussian";
    case DatumKind::two_boxes_signed: return "two_boxes_signed";
    case DatumKind::dipole_zero_mass: return "dipole_zero_mass";
  }
  return "?";
}

DatumKind parse_datum_kind(std::string_view name) {
  for (auto k : {DatumKind::box, DatumKind::gaussian, DatumKind::two_boxes_signed, DatumKind::dipole_zero_mass}) {
    if (name == to_string(k)) return k;
  }
  throw std::invalid_argument("unknown initial datum kind '" + std::string(name) +
                              "' (expected box, gaussian, two_boxes_signed or dipole_zero_mass)");
}

namespace {

// Adds height times the covered fraction of each cell of [a, b].
void add_box(GridFunction& u, double a, double b, double height) {
  for (std::size_t j = 0; j < u.size(); ++j) {
    const double lo = std::max(a, u.left_edge(j));
    const double hi = std::min(b, u.left_edge(j + 1));
    if (hi > lo) u[j] += height * (hi - lo) / u.dx();
  }
}

void require_inside(const GridFunction& grid, double a, double b) {
  if (a < grid.x_min() || b > grid.x_max()) {
    std::ostringstream msg;
    msg << "initial datum support [" << a << ", " << b << "] leaves the grid [" << grid.x_min() << ", "
        << grid.x_max() << ")";
    throw std::invalid_argument(msg.str());
  }
}

}  // namespace

GridFunction make_initial_datum(DatumKind kind, const DatumParams& p, const GridFunction& grid) {
  GridFunction u = grid.like();
  switch (kind) {
    case DatumKind::box:
    case DatumKind::dipole_zero_mass: {
      if (!(p.width > 0.0)) throw std::invalid_argument("box width must be positive");
      const double span = kind == DatumKind::box ? p.width : 2.0 * p.width;
      require_inside(grid, p.left, p.left + span);
      add_box(u, p.left, p.left + p.width, p.height);
      if (kind == DatumKind::dipole_zero_mass) add_box(u, p.left + p.width, p.left + 2.0 * p.width, -p.height);
      break;
    }
    case DatumKind::two_boxes_signed:
      require_inside(grid, -2.0, 1.0);
      add_box(u, 0.0, 1.0, p.positive_height);
      add_box(u, -2.0, -1.0, p.negative_height);
      break;
    case DatumKind::gaussian: {
      if (!(p.sigma > 0.0)) throw std::invalid_argument("gaussian sigma must be positive");
      const double a = p.center - 4.0 * p.sigma;
      const double b = p.center + 4.0 * p.sigma;
      require_inside(grid, a, b);
      const double s = std::sqrt(2.0) * p.sigma;
      long double total = 0.0L;
      for (std::size_t j = 0; j < u.size(); ++j) {
        const double lo = std::max(a, u.left_edge(j));
        const double hi = std::min(b, u.left_edge(j + 1));
        if (hi <= lo) continue;
        u[j] = 0.5 * (std::erf((hi - p.center) / s) - std::erf((lo - p.center) / s));
        total += u[j];
      }
      const double scale = p.mass / static_cast<double>(total);
      for (std::size_t j = 0; j < u.size(); ++j) u[j] *= scale / u.dx();
      break;
    }
  }
  return u;
}

}  // namespace nwave
