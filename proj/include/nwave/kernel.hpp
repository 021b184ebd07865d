#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "nwave/grid.hpp"

namespace nwave {

enum class KernelFamily { uniform, triangle, truncated_gaussian };

std::string_view to_string(KernelFamily family);
KernelFamily parse_kernel_family(std::string_view name);

/// Raised when a kernel (or one of its rescalings) spans fewer than nine
/// grid samples.
class UnresolvedKernel : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Discretized nonnegative, even, unit-mass convolution kernel.
///
/// Samples live at the integer offsets k*dx, k = -R..R, and are stored so
/// that samples()[R + k] is the value at offset k. The discrete mass
/// sum(samples)*dx is one to rounding; m2() is the discrete second moment
/// sum((k dx)^2 samples) dx.
class Kernel {
 public:
  KernelFamily family() const { return family_; }
  /// Radius of the continuous support.
  double support_radius() const { return support_radius_; }
  double dx() const { return dx_; }
  /// Accumulated rescaling factor relative to the kernel built by make_kernel.
  double scale() const { return scale_; }
  int radius_cells() const { return radius_; }
  std::size_t stencil_size() const { return samples_.size(); }
  std::span<const double> samples() const { return samples_; }
  /// Value at offset k*dx; zero outside the stencil.
  double at(int k) const;
  double m0() const { return m0_; }
  double m2() const { return m2_; }

 private:
  friend Kernel make_kernel(KernelFamily, double, double);
  friend Kernel rescale(const Kernel&, double);

  KernelFamily family_ = KernelFamily::uniform;
  double support_radius_ = 0.0;
  double dx_ = 0.0;
  double scale_ = 1.0;
  int radius_ = 0;
  std::vector<double> samples_;
  double m0_ = 0.0;
  double m2_ = 0.0;
};

/// Samples the family's profile with support radius `width` at the offsets
/// k*dx and normalizes to unit discrete mass. Throws std::invalid_argument on
/// non-positive width or dx, UnresolvedKernel when fewer than 9 samples fit.
Kernel make_kernel(KernelFamily family, double width, double dx);

/// J_lambda(x) = lambda * J(lambda x), resampled on the same spacing.
///
/// The resampled stencil is normalized to unit mass and its discrete second
/// moment is matched exactly to m2(J)/lambda^2 by mixing in weight at the
/// center sample or at the two outermost samples, so m2 scales exactly.
Kernel rescale(const Kernel& kernel, double lambda);

enum class ConvolutionBackend { automatic, direct, fft };

/// Stencils with at most this many samples use the direct sum.
inline constexpr std::size_t kDirectStencilLimit = 64;

ConvolutionBackend resolve_backend(const Kernel& kernel, ConvolutionBackend requested);

/// Reusable convolution of a fixed kernel with fields of a fixed size.
///
/// Fields are extended by zero outside the grid. Owns scratch buffers, so a
/// Convolver must not be shared between threads; construct one per thread.
class Convolver {
 public:
  Convolver(const Kernel& kernel, std::size_t n, ConvolutionBackend backend = ConvolutionBackend::automatic);
  ~Convolver();
  Convolver(Convolver&&) noexcept;
  Convolver& operator=(Convolver&&) noexcept;
  Convolver(const Convolver&) = delete;
  Convolver& operator=(const Convolver&) = delete;

  /// out[j] = sum_k J(x_j - x_k) u[k] dx.
  void apply(std::span<const double> u, std::span<double> out);

  ConvolutionBackend backend() const { return backend_; }
  const Kernel& kernel() const { return kernel_; }
  std::size_t size() const { return n_; }

 private:
  struct FftState;

  void apply_direct(std::span<const double> u, std::span<double> out) const;

  Kernel kernel_;
  std::size_t n_ = 0;
  ConvolutionBackend backend_ = ConvolutionBackend::direct;
  std::unique_ptr<FftState> fft_;
};

/// (J * u) on u's grid. The spacing of u must match the kernel's.
GridFunction convolve(const Kernel& kernel, const GridFunction& u,
                      ConvolutionBackend backend = ConvolutionBackend::automatic);

/// Throws std::invalid_argument unless the field spacing equals the kernel's.
void require_matching_spacing(const Kernel& kernel, const GridFunction& u);

}  // namespace nwave
