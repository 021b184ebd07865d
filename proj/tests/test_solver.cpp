#include <catch_amalgamated.hpp>

#include <cmath>

#include "nwave/nonlocal_op.hpp"
#include "nwave/solver.hpp"
#include "oracles.hpp"

using namespace nwave;
using Catch::Approx;

namespace {

SimParams params_on(double x_min, double x_max, double dx) {
  SimParams p;
  p.grid = {x_min, x_max, dx};
  return p;
}

GridFunction box(const GridFunction& grid, double a, double b, double h) {
  GridFunction u = grid.like();
  for (std::size_t j = 0; j < u.size(); ++j) {
    const double lo = std::max(a, u.left_edge(j));
    const double hi = std::min(b, u.left_edge(j) + u.dx());
    if (hi > lo) u[j] = h * (hi - lo) / u.dx();
  }
  return u;
}

// Reference update written out term by term with zero ghosts.
GridFunction reference_step(const GridFunction& u, const SimParams& p, double dt) {
  const Kernel J = p.lambda == 1.0 ? p.kernel.build(u.dx()) : rescale(p.kernel.build(u.dx()), p.lambda);
  const double dx = u.dx();
  const auto n = static_cast<long>(u.size());
  auto at = [&](long j) { return j < 0 || j >= n ? 0.0 : u[static_cast<std::size_t>(j)]; };
  GridFunction out = u.like();
  for (long j = 0; j < n; ++j) {
    double conv = 0.0;
    for (int k = -J.radius_cells(); k <= J.radius_cells(); ++k) conv += J.at(k) * at(j - k) * dx;
    const double fl = oracle::power_flux(at(j), p.q) - oracle::power_flux(at(j - 1), p.q);
    out[static_cast<std::size_t>(j)] = at(j) - dt / dx * fl +
                                       dt * p.alpha * std::pow(p.lambda, p.q) * (conv - at(j)) +
                                       dt * p.mu * (at(j + 1) - 2.0 * at(j) + at(j - 1)) / (dx * dx);
  }
  return out;
}

}  // namespace

TEST_CASE("parameter validation") {
  SimParams p;
  CHECK_NOTHROW(p.validate());
  auto bad = [](auto mutate) {
    SimParams s;
    mutate(s);
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  };
  bad([](SimParams& s) { s.q = 2.5; });
  bad([](SimParams& s) { s.q = 1.0; });
  bad([](SimParams& s) { s.cfl = 1.0; });
  bad([](SimParams& s) { s.mu = -0.1; });
  bad([](SimParams& s) { s.lambda = 0.0; });
  bad([](SimParams& s) { s.output_times = {0.5, 0.2}; });
  bad([](SimParams& s) { s.output_times = {2.0}; });
  try {
    SimParams s;
    s.q = 2.5;
    s.validate();
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("(1, 2]") != std::string::npos);
  }
}

TEST_CASE("schedule appends t_final") {
  SimParams p;
  p.t_final = 2.0;
  p.output_times = {0.0, 1.0};
  CHECK(p.schedule() == std::vector<double>{0.0, 1.0, 2.0});
  p.output_times = {};
  CHECK(p.schedule() == std::vector<double>{2.0});
}

TEST_CASE("single steps") {
  SECTION("zero is a fixed point") {
    const SimParams p = params_on(-2.0, 2.0, 1.0 / 64.0);
    const GridFunction u = step(p.grid.make(), p, 1e-3);
    for (double v : u.values()) CHECK(v == 0.0);
  }
  SECTION("constants survive in the interior") {
    SimParams p = params_on(-4.0, 4.0, 1.0 / 64.0);
    const GridFunction u = step(p.grid.make().like(0.7), p, 1e-3);
    const Window in = u.interior(static_cast<std::size_t>(p.kernel.build(u.dx()).radius_cells()) + 1);
    for (std::size_t j = in.begin; j < in.end; ++j) CHECK(u[j] == Approx(0.7).epsilon(1e-12));
  }
  SECTION("hand-evaluated Riemann step") {
    SimParams p;
    p.alpha = 0.0;
    p.kernel.width = 1.0;
    const double dx = 0.25;
    GridFunction u(0.0, dx, std::vector<double>{1.0, 1.0, 0.0, 0.0});
    p.grid = {0.0, 1.0, dx};
    const GridFunction v = step(u, p, 0.5 * dx);
    // f(1) = 2/3; ghost on the left is zero
    CHECK(v[0] == Approx(1.0 - 0.5 * (2.0 / 3.0)).epsilon(1e-15));
    CHECK(v[1] == Approx(1.0).epsilon(1e-15));
    CHECK(v[2] == Approx(0.5 * (2.0 / 3.0)).epsilon(1e-15));
    CHECK(v[3] == 0.0);
  }
  SECTION("full update matches the term-by-term reference") {
    for (double lambda : {1.0, 2.0}) {
      SimParams p = params_on(-2.0, 3.0, 1.0 / 64.0);
      p.mu = 0.05;
      p.alpha = 0.7;
      p.lambda = lambda;
      p.kernel.family = KernelFamily::triangle;
      p.kernel.width = 0.5;
      GridFunction u = box(p.grid.make(), -0.3, 0.9, 1.3);
      for (std::size_t j = 0; j < u.size(); ++j) u[j] -= 0.5 * std::exp(-4.0 * (u.center(j) - 1.5) * (u.center(j) - 1.5));
      const double dt = 0.5 * stable_dt(p, std::pow(1.3, 0.5), u.dx());
      const GridFunction a = step(u, p, dt);
      const GridFunction b = reference_step(u, p, dt);
      for (std::size_t j = 0; j < u.size(); ++j) CHECK(a[j] == Approx(b[j]).margin(1e-13));
    }
  }
  SECTION("steps beyond the monotonicity budget are rejected") {
    const SimParams p = params_on(-2.0, 2.0, 1.0 / 64.0);
    const GridFunction u = box(p.grid.make(), 0.0, 1.0, 1.0);
    const double budget = stable_dt(p, 1.0, u.dx());
    CHECK_NOTHROW(step(u, p, budget));
    CHECK_THROWS_AS(step(u, p, 1.5 * budget), std::invalid_argument);
  }
}

TEST_CASE("stable_dt combines every rate") {
  SimParams p;
  p.mu = 0.1;
  p.lambda = 2.0;
  const double dx = 0.01;
  const double rate = 3.0 / dx + std::pow(2.0, 1.5) + 2.0 * 0.1 / (dx * dx);
  CHECK(stable_dt(p, 3.0, dx) == Approx(p.cfl / rate).epsilon(1e-14));
}

TEST_CASE("runs of the standard box") {
  SimParams p = params_on(-8.0, 12.0, 1.0 / 128.0);
  p.t_final = 4.0;
  p.output_times = {0.0, 0.5, 1.0, 2.0, 4.0};
  const GridFunction phi = box(p.grid.make(), 0.0, 1.0, 1.0);
  const Trajectory tr = run(phi, p);

  REQUIRE(tr.snapshots.size() == 5);
  for (std::size_t i = 0; i < 5; ++i) CHECK(tr.snapshots[i].t == p.output_times[i]);
  CHECK(tr.at(0.0).u.values()[300] == phi.values()[300]);
  for (const auto& s : tr.snapshots) {
    // the FFT convolution leaves rounding-level negatives far from the support
    for (double v : s.u.values()) CHECK(v >= -1e-15);
    if (s.t > 0.0) {
      double sup = 0.0;
      for (double v : s.u.values()) sup = std::max(sup, v);
      CHECK(sup <= std::pow(3.0 / s.t, 2.0 / 3.0) + 1e-10);
    }
  }
  for (std::size_t i = 0; i < tr.mass_history.size(); ++i) {
    const double expected = 1.0 - tr.budget_history[i].leaked_mass;
    CHECK(std::abs(tr.mass_history[i].mass - expected) <= 1e-12);
    CHECK(std::abs(tr.mass_history[i].mass - 1.0) <= tr.budget_history[i].leaked_l1 + 1e-12);
  }
}

TEST_CASE("zero datum gives a zero trajectory") {
  SimParams p = params_on(-2.0, 2.0, 1.0 / 64.0);
  const Trajectory tr = run(p.grid.make(), p);
  for (const auto& s : tr.snapshots) {
    for (double v : s.u.values()) CHECK(v == 0.0);
  }
}

TEST_CASE("aborts") {
  SECTION("time step collapse names time and cell") {
    SimParams p = params_on(-2.0, 2.0, 1.0 / 64.0);
    p.cfl = 0.999;
    const GridFunction phi = box(p.grid.make(), 0.0, 0.5, 1e30);
    try {
      run(phi, p);
      FAIL("no abort");
    } catch (const NumericalAbort& e) {
      CHECK(e.reason() == NumericalAbort::Reason::step_collapse);
      CHECK(e.time() == 0.0);
      CHECK(e.cell() == 128);
      CHECK(std::string(e.what()).find("cell 128") != std::string::npos);
    }
  }
  SECTION("a narrow domain exceeds the tail budget") {
    SimParams p = params_on(-1.0, 2.0, 1.0 / 64.0);
    p.t_final = 5.0;
    const GridFunction phi = box(p.grid.make(), 0.0, 1.0, 1.0);
    try {
      run(phi, p);
      FAIL("no abort");
    } catch (const NumericalAbort& e) {
      CHECK(e.reason() == NumericalAbort::Reason::tail_budget);
      CHECK(std::string(e.what()).find("widen") != std::string::npos);
    }
  }
}

TEST_CASE("ensembles run in lockstep and preserve order") {
  SimParams p = params_on(-4.0, 8.0, 1.0 / 64.0);
  p.t_final = 2.0;
  p.output_times = {0.0, 1.0, 2.0};
  const GridFunction grid = p.grid.make();
  GridFunction a = box(grid, 0.0, 1.0, 1.0);
  GridFunction b = box(grid, -0.5, 1.5, 1.5);
  const std::vector<GridFunction> data = {a, b};
  const auto out = run_ensemble(data, p);
  REQUIRE(out.size() == 2);
  CHECK(out[0].steps == out[1].steps);
  for (std::size_t i = 0; i < out[0].snapshots.size(); ++i) {
    const auto& ua = out[0].snapshots[i].u;
    const auto& ub = out[1].snapshots[i].u;
    for (std::size_t j = 0; j < ua.size(); ++j) CHECK(ua[j] <= ub[j] + 1e-15);
  }
  // a lone run with the same datum takes its own, larger steps
  CHECK(run(a, p).steps < out[0].steps);
}

TEST_CASE("rescaling maps") {
  const GridFunction grid = GridFunction::on_interval(-4.0, 8.0, 1.0 / 64.0);
  const GridFunction u = box(grid, 0.0, 1.0, 1.0);

  SECTION("lambda = 1 on the same grid is the identity") {
    const GridFunction v = remap_rescaled(u, 1.0, grid);
    for (std::size_t j = 0; j < u.size(); ++j) CHECK(v[j] == Approx(u[j]).margin(1e-15));
  }
  SECTION("mass is preserved") {
    for (double lambda : {2.0, 3.0, 7.5}) {
      const GridFunction v = remap_rescaled(u, lambda, GridFunction::on_interval(-1.0, 2.0, 1.0 / 64.0));
      CHECK(v.integral() == Approx(1.0).epsilon(1e-12));
      // lambda u(lambda x) is lambda on [0, 1/lambda]
      CHECK(lp_norm(v, 1.0, v.full()) == Approx(1.0).epsilon(1e-12));
    }
  }
  SECTION("trajectory rescaling interpolates in time and rejects unbracketed times") {
    SimParams p = params_on(-4.0, 8.0, 1.0 / 64.0);
    p.t_final = 2.0;
    p.output_times = {0.0, 1.0, 2.0};
    const Trajectory tr = run(u, p);
    const double at_one[] = {1.0};
    const Trajectory same = rescale_trajectory(tr, 1.0, at_one, p.grid);
    for (std::size_t j = 0; j < u.size(); ++j) CHECK(same.snapshots[0].u[j] == Approx(tr.at(1.0).u[j]).margin(1e-15));
    const double mid[] = {0.5};
    const Trajectory half = rescale_trajectory(tr, std::pow(1.5, 1.0 / 1.5), mid, {-2.0, 4.0, 1.0 / 64.0});
    CHECK(half.snapshots[0].u.integral() == Approx(1.0).epsilon(1e-8));
    const double late[] = {3.0};
    CHECK_THROWS_AS(rescale_trajectory(tr, 1.0, late, p.grid), std::out_of_range);
  }
}
