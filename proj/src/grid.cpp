#include "nwave/grid.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace nwave {

namespace {

void check_spacing(double x_min, double dx) {
  if (!(dx > 0.0) || !std::isfinite(dx)) {
    throw std::invalid_argument("grid spacing must be positive and finite, got " +
                                std::to_string(dx));
  }
  if (!std::isfinite(x_min)) throw std::invalid_argument("grid origin must be finite");
}

}  // namespace

GridFunction::GridFunction(double x_min, double dx, std::size_t n, double fill)
    : x_min_(x_min), dx_(dx), values_(n, fill) {
  check_spacing(x_min, dx);
}

GridFunction::GridFunction(double x_min, double dx, std::vector<double> values)
    : x_min_(x_min), dx_(dx), values_(std::move(values)) {
  check_spacing(x_min, dx);
}

GridFunction GridFunction::on_interval(double x_min, double x_max, double dx) {
  check_spacing(x_min, dx);
  if (!(x_max > x_min)) throw std::invalid_argument("grid requires x_max > x_min");
  const double cells = std::round((x_max - x_min) / dx);
  if (cells < 1.0) throw std::invalid_argument("grid has no cells");
  return GridFunction(x_min, dx, static_cast<std::size_t>(cells));
}

bool GridFunction::same_grid(const GridFunction& other, double rel_tol) const {
  if (size() != other.size()) return false;
  const double scale = std::max(dx_, other.dx_);
  return std::abs(dx_ - other.dx_) <= rel_tol * scale &&
         std::abs(x_min_ - other.x_min_) <= rel_tol * std::max(1.0, std::abs(x_min_)) + rel_tol * scale;
}

Window GridFunction::interior(std::size_t radius_cells) const {
  if (2 * radius_cells >= size()) return {0, 0};
  return {radius_cells, size() - radius_cells};
}

double GridFunction::integral(Window w) const {
  double sum = 0.0;
  for (std::size_t j = w.begin; j < w.end && j < size(); ++j) sum += values_[j];
  return sum * dx_;
}

bool GridFunction::all_finite() const {
  for (double v : values_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

}  // namespace nwave
