#include <catch_amalgamated.hpp>

#include <cmath>

#include "nwave/kernel.hpp"
#include "oracles.hpp"

using namespace nwave;
using Catch::Approx;

TEST_CASE("kernel samples are nonnegative, even and of unit mass") {
  for (auto family : {KernelFamily::uniform, KernelFamily::triangle, KernelFamily::truncated_gaussian}) {
    for (double dx : {1.0 / 64.0, 1.0 / 100.0, 1.0 / 256.0}) {
      const Kernel J = make_kernel(family, 1.0, dx);
      const auto s = J.samples();
      REQUIRE(s.size() == 2 * static_cast<std::size_t>(J.radius_cells()) + 1);
      for (std::size_t i = 0; i < s.size(); ++i) {
        CHECK(s[i] >= 0.0);
        CHECK(s[i] == s[s.size() - 1 - i]);
      }
      CHECK(std::abs(J.m0() - 1.0) <= 1e-12);
      CHECK(J.m2() > 0.0);
      CHECK(std::isfinite(J.m2()));
    }
  }
}

TEST_CASE("uniform kernel of width 1 has m2 close to 1/3") {
  const double dx = 1.0 / 256.0;
  const Kernel J = make_kernel(KernelFamily::uniform, 1.0, dx);
  CHECK(J.m0() == Approx(1.0).epsilon(1e-12));
  // trapezoid sampling of the density 1/2 on [-1, 1]
  CHECK(std::abs(J.m2() - 1.0 / 3.0) <= dx * dx);
  CHECK(J.support_radius() == 1.0);
}

TEST_CASE("triangle kernel is normalized") {
  const Kernel J = make_kernel(KernelFamily::triangle, 1.0, 1.0 / 128.0);
  CHECK(std::abs(J.m0() - 1.0) <= 1e-12);
  CHECK(std::abs(J.m2() - 1.0 / 6.0) <= 1e-4);
}

TEST_CASE("truncated gaussian second moment matches quadrature") {
  const double dx = 1e-3;
  const Kernel J = make_kernel(KernelFamily::truncated_gaussian, 4.0, dx);
  const auto g = [](double x) { return std::exp(-0.5 * x * x); };
  const double mass = oracle::simpson(g, -4.0, 4.0);
  const double m2 = oracle::simpson([&](double x) { return x * x * g(x); }, -4.0, 4.0) / mass;
  CHECK(std::abs(J.m2() - m2) <= 1e-6);
}

TEST_CASE("unresolved kernels are rejected") {
  CHECK_THROWS_AS(make_kernel(KernelFamily::uniform, 0.01, 0.01), UnresolvedKernel);
  CHECK_NOTHROW(make_kernel(KernelFamily::uniform, 0.04, 0.01));
  CHECK_THROWS_AS(make_kernel(KernelFamily::uniform, -1.0, 0.01), std::invalid_argument);
  const Kernel J = make_kernel(KernelFamily::uniform, 1.0, 1.0 / 32.0);
  CHECK_THROWS_AS(rescale(J, 16.0), UnresolvedKernel);
}

TEST_CASE("rescaling") {
  const double dx = 1.0 / 256.0;
  const Kernel J = make_kernel(KernelFamily::uniform, 1.0, dx);

  SECTION("lambda = 1 is the identity") {
    const Kernel K = rescale(J, 1.0);
    REQUIRE(K.stencil_size() == J.stencil_size());
    for (std::size_t i = 0; i < J.stencil_size(); ++i) CHECK(K.samples()[i] == J.samples()[i]);
  }
  SECTION("lambda = 2 divides m2 by 4") {
    const Kernel K = rescale(J, 2.0);
    CHECK(K.m2() == Approx(J.m2() / 4.0).epsilon(1e-13));
    CHECK(K.m0() == Approx(1.0).epsilon(1e-13));
  }
  SECTION("lambda = 10 shrinks the support") {
    const Kernel K = rescale(J, 10.0);
    CHECK(K.support_radius() == Approx(0.1).epsilon(1e-15));
  }
  SECTION("every integer lambda up to 64 keeps m2 exact and samples nonnegative") {
    for (auto family : {KernelFamily::uniform, KernelFamily::triangle, KernelFamily::truncated_gaussian}) {
      const Kernel base = make_kernel(family, 1.0, dx);
      for (int l = 1; l <= 64; ++l) {
        const Kernel K = rescale(base, l);
        CHECK(K.m2() == Approx(base.m2() / (l * l)).epsilon(1e-12));
        CHECK(std::abs(K.m0() - 1.0) <= 1e-12);
        for (double v : K.samples()) CHECK(v >= 0.0);
      }
    }
  }
}

TEST_CASE("family names round-trip") {
  for (auto family : {KernelFamily::uniform, KernelFamily::triangle, KernelFamily::truncated_gaussian}) {
    CHECK(parse_kernel_family(to_string(family)) == family);
  }
  CHECK_THROWS_AS(parse_kernel_family("boxcar"), std::invalid_argument);
}

TEST_CASE("convolution") {
  const double dx = 1.0 / 64.0;
  for (double width : {0.25, 2.0}) {  // direct and FFT backends
    const Kernel J = make_kernel(KernelFamily::triangle, width, dx);
    const GridFunction grid = GridFunction::on_interval(-6.0, 6.0, dx);
    const Window in = grid.interior(static_cast<std::size_t>(J.radius_cells()));

    SECTION("constants are reproduced in the interior, width " + std::to_string(width)) {
      const GridFunction c = convolve(J, grid.like(3.0));
      for (std::size_t j = in.begin; j < in.end; ++j) CHECK(c[j] == Approx(3.0).epsilon(1e-12));
    }
    SECTION("a unit-mass cell reproduces the samples, width " + std::to_string(width)) {
      GridFunction d = grid.like();
      const std::size_t mid = grid.size() / 2;
      d[mid] = 1.0 / dx;
      const GridFunction c = convolve(J, d);
      for (int k = -J.radius_cells(); k <= J.radius_cells(); ++k) {
        CHECK(c[mid + k] == Approx(J.at(k)).margin(1e-11));
      }
    }
    SECTION("x^2 gains exactly m2, width " + std::to_string(width)) {
      GridFunction u = grid.like();
      for (std::size_t j = 0; j < u.size(); ++j) u[j] = u.center(j) * u.center(j);
      const GridFunction c = convolve(J, u);
      for (std::size_t j = in.begin; j < in.end; ++j) CHECK(c[j] - u[j] == Approx(J.m2()).margin(1e-10));
    }
    SECTION("backends agree, width " + std::to_string(width)) {
      GridFunction u = grid.like();
      for (std::size_t j = 0; j < u.size(); ++j) u[j] = std::sin(3.0 * u.center(j)) + (j % 7 == 0 ? 1.0 : 0.0);
      const GridFunction a = convolve(J, u, ConvolutionBackend::direct);
      const GridFunction b = convolve(J, u, ConvolutionBackend::fft);
      for (std::size_t j = 0; j < u.size(); ++j) CHECK(a[j] == Approx(b[j]).margin(1e-12));
    }
  }
}

TEST_CASE("mismatched spacing is rejected") {
  const Kernel J = make_kernel(KernelFamily::uniform, 1.0, 1.0 / 64.0);
  CHECK_THROWS_AS(convolve(J, GridFunction::on_interval(0.0, 1.0, 1.0 / 32.0)), std::invalid_argument);
}
