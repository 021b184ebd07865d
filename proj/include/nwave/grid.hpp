#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace nwave {

/// Half-open range of cell indices [begin, end).
struct Window {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const { return end > begin ? end - begin : 0; }
  bool contains(std::size_t j) const { return j >= begin && j < end; }
};

/// Real-valued field on a uniform cell-centered grid covering [x_min, x_max).
/// Values outside the grid are taken to be zero by every operator in the
/// library.
class GridFunction {
 public:
  GridFunction() = default;
  GridFunction(double x_min, double dx, std::size_t n, double fill = 0.0);
  GridFunction(double x_min, double dx, std::vector<double> values);

  /// Grid with n = round((x_max - x_min) / dx) cells.
  static GridFunction on_interval(double x_min, double x_max, double dx);

  double x_min() const { return x_min_; }
  double x_max() const { return x_min_ + static_cast<double>(values_.size()) * dx_; }
  double dx() const { return dx_; }
  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }

  double center(std::size_t j) const { return x_min_ + (static_cast<double>(j) + 0.5) * dx_; }
  double left_edge(std::size_t j) const { return x_min_ + static_cast<double>(j) * dx_; }

  double& operator[](std::size_t j) { return values_[j]; }
  double operator[](std::size_t j) const { return values_[j]; }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }

  /// Same spacing, origin and size (relative tolerance on the reals).
  bool same_grid(const GridFunction& other, double rel_tol = 1e-12) const;

  /// A field on the same grid, filled with `fill`.
  GridFunction like(double fill = 0.0) const { return GridFunction(x_min_, dx_, size(), fill); }

  /// Cells whose stencil of the given half-width lies inside the grid.
  Window interior(std::size_t radius_cells) const;
  Window full() const { return {0, size()}; }

  /// Sum of values times dx over the window.
  double integral(Window w) const;
  double integral() const { return integral(full()); }

  bool all_finite() const;

 private:
  double x_min_ = 0.0;
  double dx_ = 1.0;
  std::vector<double> values_;
};

/// Grid description used by configs before any values exist.
struct GridSpec {
  double x_min = -5.0;
  double x_max = 5.0;
  double dx = 1.0 / 256.0;

  GridFunction make() const { return GridFunction::on_interval(x_min, x_max, dx); }
};

}  // namespace nwave
