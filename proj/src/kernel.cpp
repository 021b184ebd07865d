#include "nwave/kernel.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>
#include <sstream>

namespace nwave {

namespace {

constexpr int kMinRadiusCells = 4;  // 2*4 + 1 = 9 samples

// Profile with support radius `a`; at |x| == a the value is the mean of the
// one-sided limits.
double profile(KernelFamily family, double a, double x) {
  const double ax = std::abs(x);
  const double edge_tol = 1e-12 * a;
  if (ax > a + edge_tol) return 0.0;
  const bool on_edge = std::abs(ax - a) <= edge_tol;
  switch (family) {
    case KernelFamily::uniform:
      return on_edge ? 0.25 / a : 0.5 / a;
    case KernelFamily::triangle:
      return on_edge ? 0.0 : (1.0 - ax / a) / a;
    case KernelFamily::truncated_gaussian: {
      const double sigma = a / 4.0;
      const double g = std::exp(-0.5 * (x / sigma) * (x / sigma));
      return on_edge ? 0.5 * g : g;
    }
  }
  return 0.0;
}

int radius_in_cells(double width, double dx) {
  return static_cast<int>(std::floor(width / dx + 1e-9));
}

// Symmetric sampling at offsets k*dx, k = -R..R.
std::vector<double> sample_profile(KernelFamily family, double width, double dx, int radius) {
  std::vector<double> s(2 * static_cast<std::size_t>(radius) + 1, 0.0);
  for (int k = 0; k <= radius; ++k) {
    const double v = profile(family, width, k * dx);
    s[radius + k] = v;
    s[radius - k] = v;
  }
  return s;
}

// Symmetric-order sums so that mirrored samples contribute identically.
double discrete_mass(const std::vector<double>& s, int radius, double dx) {
  long double m = s[radius];
  for (int k = 1; k <= radius; ++k) m += static_cast<long double>(s[radius + k]) + s[radius - k];
  return static_cast<double>(m * dx);
}

double discrete_second_moment(const std::vector<double>& s, int radius, double dx) {
  long double m = 0.0L;
  for (int k = 1; k <= radius; ++k) {
    const long double x = static_cast<long double>(k) * dx;
    m += x * x * (static_cast<long double>(s[radius + k]) + s[radius - k]);
  }
  return static_cast<double>(m * dx);
}

std::size_t next_fast_size(std::size_t n) {
  for (std::size_t m = std::max<std::size_t>(n, 1);; ++m) {
    std::size_t r = m;
    for (std::size_t p : {2u, 3u, 5u, 7u}) {
      while (r % p == 0) r /= p;
    }
    if (r == 1) return m;
  }
}

std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

std::string_view to_string(KernelFamily family) {
  switch (family) {
    case KernelFamily::uniform: return "uniform";
    case KernelFamily::triangle: return "triangle";
    case KernelFamily::truncated_gaussian: return "truncated_gaussian";
  }
  return "unknown";
}

KernelFamily parse_kernel_family(std::string_view name) {
  if (name == "uniform") return KernelFamily::uniform;
  if (name == "triangle") return KernelFamily::triangle;
  if (name == "truncated_gaussian" || name == "gaussian") return KernelFamily::truncated_gaussian;
  throw std::invalid_argument("unknown kernel family '" + std::string(name) +
                              "' (expected uniform, triangle or truncated_gaussian)");
}

double Kernel::at(int k) const {
  if (k < -radius_ || k > radius_) return 0.0;
  return samples_[static_cast<std::size_t>(radius_ + k)];
}

Kernel make_kernel(KernelFamily family, double width, double dx) {
  if (!(width > 0.0) || !std::isfinite(width)) {
    throw std::invalid_argument("kernel width must be positive");
  }
  if (!(dx > 0.0) || !std::isfinite(dx)) throw std::invalid_argument("kernel dx must be positive");
  const int radius = radius_in_cells(width, dx);
  if (radius < kMinRadiusCells) {
    std::ostringstream msg;
    msg << "kernel of width " << width << " is unresolved at dx=" << dx << ": "
        << 2 * radius + 1 << " samples, need at least 9 (dx <= width/4)";
    throw UnresolvedKernel(msg.str());
  }

  Kernel J;
  J.family_ = family;
  J.support_radius_ = width;
  J.dx_ = dx;
  J.radius_ = radius;
  J.samples_ = sample_profile(family, width, dx, radius);
  const double mass = discrete_mass(J.samples_, radius, dx);
  for (double& v : J.samples_) v /= mass;
  J.m0_ = discrete_mass(J.samples_, radius, dx);
  J.m2_ = discrete_second_moment(J.samples_, radius, dx);
  return J;
}

Kernel rescale(const Kernel& kernel, double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument("rescale factor must be positive");
  }
  if (lambda == 1.0) return kernel;

  const double dx = kernel.dx();
  const double width = kernel.support_radius() / lambda;
  const int radius = radius_in_cells(width, dx);
  if (radius < kMinRadiusCells) {
    std::ostringstream msg;
    msg << "rescaled kernel (lambda=" << lambda << ", support radius " << width
        << ") spans " << 2 * radius + 1 << " samples at dx=" << dx << ", need at least 9";
    throw UnresolvedKernel(msg.str());
  }

  Kernel J;
  J.family_ = kernel.family();
  J.support_radius_ = width;
  J.dx_ = dx;
  J.scale_ = kernel.scale() * lambda;
  J.radius_ = radius;
  J.samples_ = sample_profile(kernel.family(), width, dx, radius);
  const double mass = discrete_mass(J.samples_, radius, dx);
  for (double& v : J.samples_) v /= mass;

  // Mix (1 - theta) s + theta e with a unit mass e: the center sample when the
  // sampled moment is too large, the two outermost samples when too small.
  const double target = kernel.m2() / (lambda * lambda);
  const double sampled = discrete_second_moment(J.samples_, radius, dx);
  const double edge = static_cast<double>(radius) * dx;
  const double e_m2 = sampled > target ? 0.0 : edge * edge;
  if (!(std::abs(e_m2 - sampled) > 0.0) || (sampled < target && !(e_m2 >= target))) {
    throw UnresolvedKernel("rescaled kernel cannot match the second moment at this dx");
  }
  const double theta = (sampled - target) / (sampled - e_m2);
  for (double& v : J.samples_) v *= 1.0 - theta;
  if (sampled > target) {
    J.samples_[radius] += theta / dx;
  } else {
    J.samples_.front() += 0.5 * theta / dx;
    J.samples_.back() += 0.5 * theta / dx;
  }

  J.m0_ = discrete_mass(J.samples_, radius, dx);
  J.m2_ = discrete_second_moment(J.samples_, radius, dx);
  return J;
}

ConvolutionBackend resolve_backend(const Kernel& kernel, ConvolutionBackend requested) {
  if (requested != ConvolutionBackend::automatic) return requested;
  return kernel.stencil_size() <= kDirectStencilLimit ? ConvolutionBackend::direct
                                                      : ConvolutionBackend::fft;
}

void require_matching_spacing(const Kernel& kernel, const GridFunction& u) {
  if (std::abs(kernel.dx() - u.dx()) > 1e-12 * kernel.dx()) {
    std::ostringstream msg;
    msg << "grid spacing " << u.dx() << " does not match kernel spacing " << kernel.dx();
    throw std::invalid_argument(msg.str());
  }
}

struct Convolver::FftState {
  std::size_t size = 0;
  double* real = nullptr;
  fftw_complex* spectrum = nullptr;
  std::vector<std::complex<double>> kernel_hat;
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;

  ~FftState() {
    std::lock_guard lock(fftw_planner_mutex());
    if (forward) fftw_destroy_plan(forward);
    if (backward) fftw_destroy_plan(backward);
    if (real) fftw_free(real);
    if (spectrum) fftw_free(spectrum);
  }
};

Convolver::Convolver(const Kernel& kernel, std::size_t n, ConvolutionBackend backend)
    : kernel_(kernel), n_(n), backend_(resolve_backend(kernel, backend)) {
  if (n == 0) throw std::invalid_argument("convolution of an empty field");
  if (backend_ != ConvolutionBackend::fft) return;

  const auto radius = static_cast<std::size_t>(kernel.radius_cells());
  fft_ = std::make_unique<FftState>();
  auto& st = *fft_;
  // Linear convolution without wrap-around needs N >= n + R.
  st.size = next_fast_size(n + radius + 1);
  const std::size_t half = st.size / 2 + 1;
  {
    std::lock_guard lock(fftw_planner_mutex());
    st.real = fftw_alloc_real(st.size);
    st.spectrum = fftw_alloc_complex(half);
    st.forward = fftw_plan_dft_r2c_1d(static_cast<int>(st.size), st.real, st.spectrum, FFTW_ESTIMATE);
    st.backward = fftw_plan_dft_c2r_1d(static_cast<int>(st.size), st.spectrum, st.real, FFTW_ESTIMATE);
  }
  if (!st.forward || !st.backward) throw std::runtime_error("FFTW plan creation failed");

  std::fill(st.real, st.real + st.size, 0.0);
  const double dx = kernel.dx();
  const int R = kernel.radius_cells();
  for (int k = -R; k <= R; ++k) {
    const std::size_t idx = k >= 0 ? static_cast<std::size_t>(k) : st.size - static_cast<std::size_t>(-k);
    st.real[idx] = kernel.at(k) * dx;
  }
  fftw_execute(st.forward);
  st.kernel_hat.resize(half);
  const double inv = 1.0 / static_cast<double>(st.size);
  for (std::size_t i = 0; i < half; ++i) {
    st.kernel_hat[i] = std::complex<double>(st.spectrum[i][0], st.spectrum[i][1]) * inv;
  }
}

Convolver::~Convolver() = default;
Convolver::Convolver(Convolver&&) noexcept = default;
Convolver& Convolver::operator=(Convolver&&) noexcept = default;

void Convolver::apply(std::span<const double> u, std::span<double> out) {
  if (u.size() != n_ || out.size() != n_) {
    throw std::invalid_argument("convolution size mismatch");
  }
  if (backend_ != ConvolutionBackend::fft) {
    apply_direct(u, out);
    return;
  }
  auto& st = *fft_;
  std::copy(u.begin(), u.end(), st.real);
  std::fill(st.real + n_, st.real + st.size, 0.0);
  fftw_execute_dft_r2c(st.forward, st.real, st.spectrum);
  const std::size_t half = st.size / 2 + 1;
  for (std::size_t i = 0; i < half; ++i) {
    const std::complex<double> z(st.spectrum[i][0], st.spectrum[i][1]);
    const std::complex<double> w = z * st.kernel_hat[i];
    st.spectrum[i][0] = w.real();
    st.spectrum[i][1] = w.imag();
  }
  fftw_execute_dft_c2r(st.backward, st.spectrum, st.real);
  std::copy(st.real, st.real + n_, out.begin());
}

void Convolver::apply_direct(std::span<const double> u, std::span<double> out) const {
  const auto n = static_cast<std::ptrdiff_t>(n_);
  const int R = kernel_.radius_cells();
  const double dx = kernel_.dx();
  const auto s = kernel_.samples();
  for (std::ptrdiff_t j = 0; j < n; ++j) {
    const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(-R, j - (n - 1));
    const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(R, j);
    double acc = 0.0;
    for (std::ptrdiff_t k = lo; k <= hi; ++k) acc += s[static_cast<std::size_t>(k + R)] * u[static_cast<std::size_t>(j - k)];
    out[static_cast<std::size_t>(j)] = acc * dx;
  }
}

GridFunction convolve(const Kernel& kernel, const GridFunction& u, ConvolutionBackend backend) {
  require_matching_spacing(kernel, u);
  GridFunction out = u.like();
  Convolver conv(kernel, u.size(), backend);
  conv.apply(u.values(), out.values());
  return out;
}

}  // namespace nwave
