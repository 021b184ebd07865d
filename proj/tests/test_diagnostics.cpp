#include <catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include "nwave/diagnostics.hpp"
#include "oracles.hpp"

using namespace nwave;
using Catch::Approx;

namespace {

GridFunction box(const GridFunction& grid, double a, double b, double h) {
  DatumParams p;
  p.left = a;
  p.width = b - a;
  p.height = h;
  return make_initial_datum(DatumKind::box, p, grid);
}

// Synthetic trajectory with the given fields (no simulation).
Trajectory synthetic(const std::vector<double>& times, const std::function<GridFunction(double)>& at, double q) {
  Trajectory tr;
  tr.params.q = q;
  for (double t : times) {
    tr.snapshots.push_back({t, at(t)});
    tr.mass_history.push_back({t, tr.snapshots.back().u.integral()});
    BudgetRecord b;
    b.t = t;
    tr.budget_history.push_back(b);
  }
  return tr;
}

}  // namespace

TEST_CASE("Oleinik margin") {
  const NWave nw(1.0, 1.5);
  const GridFunction grid = GridFunction::on_interval(-1.0, 4.0, 1.0 / 256.0);
  for (double t : {1.0, 3.0}) {
    const Report r = oleinik_margin(nwave_sample(nw, t, grid, Sampling::point), 1.5, t, 0.0);
    CHECK(r.value("margin") == Approx(1.0).epsilon(1e-10));
  }
  CHECK(oleinik_margin(grid.like(2.0), 1.5, 1.0, 0.0).value("margin") == 0.0);

  GridFunction neg = grid.like(1.0);
  neg[10] = -0.5;
  CHECK_THROWS_AS(oleinik_margin(neg, 1.5, 1.0, 0.0), std::invalid_argument);
  GridFunction noise = grid.like(1.0);
  noise[10] = -1e-14;
  CHECK_NOTHROW(oleinik_margin(noise, 1.5, 1.0, 0.0));
}

TEST_CASE("Oleinik margin on an evolved box improves under refinement") {
  double excess[2];
  for (int k = 0; k < 2; ++k) {
    SimParams p;
    p.grid = {-4.0, 6.0, 1.0 / (256.0 * (k + 1))};
    p.t_final = 1.0;
    const Trajectory tr = run(box(p.grid.make(), 0.0, 1.0, 1.0), p);
    excess[k] = oleinik_margin(tr.at(1.0).u, 1.5, 1.0, 0.0).value("excess");
  }
  CHECK((excess[1] == 0.0 || excess[1] <= 0.5 * excess[0]));
}

TEST_CASE("decay fit recovers exact power laws") {
  const std::vector<double> times = {0.0, 1.0, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0};
  const GridFunction grid = GridFunction::on_interval(-1.0, 200.0, 0.25);
  const double q = 1.5;
  // self-similar box of mass 1: height t^(-1/q), width t^(1/q)
  auto at = [&](double t) {
    if (t == 0.0) return box(grid, 0.0, 1.0, 1.0);
    const double s = std::pow(t, 1.0 / q);
    return box(grid, 0.0, s, 1.0 / s);
  };
  const Trajectory tr = synthetic(times, at, q);
  for (double p : {1.0, 2.0, kInfNorm}) {
    DecayFitOptions o;
    o.mass = 1.0;
    const Report r = decay_fit(tr, p, o);
    const double target = std::isinf(p) ? -1.0 / q : -(1.0 / q) * (1.0 - 1.0 / p);
    CHECK(r.value("target") == Approx(target).margin(1e-15));
    CHECK(r.value("slope") == Approx(target).margin(2e-3));
    CHECK(r.value("points") == 7.0);
  }
  DecayFitOptions late;
  late.t_from = 10.0;
  CHECK(decay_fit(tr, 2.0, late).value("points") == 4.0);
}

TEST_CASE("explicit sup bound") {
  const GridFunction grid = GridFunction::on_interval(-1.0, 10.0, 0.01);
  const Trajectory ok = synthetic({0.0, 1.0, 8.0}, [&](double t) { return box(grid, 0.0, 1.0, t == 8.0 ? 0.5 : 1.0); }, 1.5);
  CHECK(sup_bound(ok, 1.0).verdict == Verdict::pass);
  // (3/8)^(2/3) = 0.52, so a height of 0.6 at t = 8 breaks the bound
  const Trajectory bad = synthetic({0.0, 8.0}, [&](double t) { return box(grid, 0.0, 1.0, t == 8.0 ? 0.6 : 1.0); }, 1.5);
  CHECK(sup_bound(bad, 1.0).verdict == Verdict::fail);
}

TEST_CASE("tail mass") {
  const GridFunction grid = GridFunction::on_interval(-4.0, 4.0, 1.0 / 64.0);
  const GridFunction b = box(grid, 0.0, 1.0, 1.0);
  CHECK(tail_mass(b, 0.25) == Approx(0.5).epsilon(1e-12));
  CHECK(tail_mass(b, 1.0) == 0.0);
  CHECK(tail_mass(box(grid, -0.3, 0.3, 2.0), 0.5) == 0.0);
  // 2R = 0.51 splits a cell
  CHECK(tail_mass(b, 0.255) == Approx(0.49).epsilon(1e-12));
  CHECK_THROWS_AS(tail_mass(b, 2.5), std::invalid_argument);
}

TEST_CASE("L1 modulus") {
  const GridFunction grid = GridFunction::on_interval(-1.0, 2.0, 0.01);
  const GridFunction b = box(grid, 0.0, 1.0, 1.0);
  CHECK(l1_modulus(b, 0.0) == 0.0);
  CHECK(l1_modulus(b, 0.1) == Approx(0.2).epsilon(1e-12));
  CHECK(l1_modulus(b, -0.1) == Approx(0.2).epsilon(1e-12));
  CHECK_THROWS_AS(l1_modulus(b, 0.015), std::invalid_argument);
}

TEST_CASE("entropy residual") {
  const GridFunction grid = GridFunction::on_interval(-2.0, 4.0, 1.0 / 128.0);
  std::vector<double> times;
  for (int i = 0; i <= 100; ++i) times.push_back(0.5 + 0.02 * i);

  SECTION("constant states give zero") {
    for (double c : {0.0, 0.5, 2.0}) {
      Trajectory tr = synthetic(times, [&](double) { return grid.like(c); }, 1.5);
      tr.params.alpha = 0.0;
      for (double k : {-1.0, 0.0, 0.5, 1.0}) {
        const Report r = entropy_residual(tr, {k, 1.5, 0.4, 1.0, 0.6}, 1e-3);
        CHECK(std::abs(r.value("residual")) <= 1e-6);
      }
    }
  }
  SECTION("the N-wave satisfies every entropy inequality") {
    const NWave nw(1.0, 1.5);
    Trajectory tr = nwave_trajectory(nw, times, {-2.0, 4.0, 1.0 / 128.0});
    for (double k : {-1.0, 0.0, 0.5, 1.0}) {
      for (double xc : {0.25, 1.0, 1.75}) {
        const Report r = entropy_residual(tr, {k, 1.5, 0.4, xc, 0.6}, 1e-3);
        CHECK(r.verdict == Verdict::pass);
      }
    }
  }
  SECTION("a non-entropic expansion shock is caught") {
    // jump from 0 up to 1 at the Rankine-Hugoniot speed 2/3: a weak solution, but not entropic
    Trajectory tr = synthetic(times, [&](double t) { return box(grid, 0.5 + 2.0 * t / 3.0, 3.9, 1.0); }, 1.5);
    tr.params.alpha = 0.0;
    const Report r = entropy_residual(tr, {0.5, 1.5, 0.4, 1.5, 0.6}, 1e-3);
    CHECK(r.value("residual") < -1e-2);
  }
  SECTION("supports outside the trajectory are rejected") {
    Trajectory tr = synthetic(times, [&](double) { return grid.like(); }, 1.5);
    CHECK_THROWS_AS(entropy_residual(tr, {0.0, 0.5, 0.4, 1.0, 0.6}, 1e-3), std::invalid_argument);
    CHECK_THROWS_AS(entropy_residual(tr, {0.0, 1.5, 0.4, 3.8, 0.6}, 1e-3), std::invalid_argument);
  }
}

TEST_CASE("nonlocal comparison") {
  const double dx = 1.0 / 64.0;
  const Kernel J = make_kernel(KernelFamily::uniform, 0.5, dx);
  const GridFunction grid = GridFunction::on_interval(-3.0, 3.0, dx);
  GridFunction w = grid.like();
  for (std::size_t j = 0; j < w.size(); ++j) w[j] = std::exp(-w.center(j) * w.center(j));

  SECTION("constant z gives A_z = 0") {
    const ComparisonCase c = make_comparison_case(J, 1.0, grid.like(1.7), w);
    CHECK(std::abs(c.A_z_at_x0) <= 1e-12);
    CHECK(check_nonlocal_comparison(J, c).verdict == Verdict::pass);
  }
  SECTION("beta = 0 gives A_z = 0 everywhere") {
    GridFunction z = grid.like();
    for (std::size_t j = 0; j < z.size(); ++j) z[j] = 1.0 + 0.5 * std::sin(3.0 * z.center(j));
    for (std::size_t j = 0; j < z.size(); j += 37) CHECK(std::abs(comparison_A(J, z, 0.0, j)) <= 1e-12);
    CHECK(check_nonlocal_comparison(J, make_comparison_case(J, 0.0, z, w)).verdict == Verdict::pass);
  }
  SECTION("A_z against a direct sum") {
    GridFunction z = grid.like();
    for (std::size_t j = 0; j < z.size(); ++j) z[j] = 1.0 + 0.5 * std::sin(3.0 * z.center(j));
    const double beta = 0.5;
    const std::size_t x = 200;
    double ref = 0.0;
    for (int k = -J.radius_cells(); k <= J.radius_cells(); ++k) {
      const double zy = z[x - k];
      ref += J.at(k) * (z[x] * std::pow(zy, beta) - beta / (beta + 1.0) * std::pow(zy, beta + 1.0) -
                        std::pow(z[x], beta + 1.0) / (beta + 1.0)) * dx;
    }
    CHECK(comparison_A(J, z, beta, x) == Approx(ref).margin(1e-13));
  }
  SECTION("negative z is rejected") {
    CHECK_THROWS_AS(make_comparison_case(J, 1.0, grid.like(-1.0), w), std::invalid_argument);
  }
}

TEST_CASE("N-wave distance") {
  const NWave nw(1.0, 1.5);
  const GridFunction grid = GridFunction::on_interval(-1.0, 4.0, 1.0 / 256.0);
  CHECK(nwave_distance(nwave_sample(nw, 1.0, grid), nw, 1.0, 1.0) == 0.0);
  CHECK(nwave_distance(grid.like(), nw, 1.0, 1.0) == Approx(1.0).epsilon(1e-12));
  // p = 2 carries the prefactor t^(1/3)
  const GridFunction w8 = nwave_sample(nw, 8.0, GridFunction::on_interval(-1.0, 10.0, 1.0 / 256.0));
  const double l2 = lp_norm(w8, 2.0, w8.full());
  CHECK(nwave_distance(GridFunction::on_interval(-1.0, 10.0, 1.0 / 256.0), nw, 8.0, 2.0) ==
        Approx(2.0 * l2).epsilon(1e-12));
}

TEST_CASE("energy, mass and contraction reports on real runs") {
  SimParams p;
  p.grid = {-4.0, 8.0, 1.0 / 128.0};
  p.t_final = 2.0;
  p.output_times = {0.0, 0.5, 1.0, 2.0};
  const GridFunction g = p.grid.make();
  const GridFunction a = box(g, 0.0, 1.0, 1.0);
  const GridFunction b = box(g, -0.5, 1.0, 1.5);
  const std::vector<GridFunction> data = {a, b};
  const auto runs = run_ensemble(data, p);
  CHECK(energy_dissipation(runs[0]).verdict == Verdict::pass);
  CHECK(energy_dissipation(runs[0]).value("worst_excess") <= 1e-10);
  CHECK(mass_balance(runs[1]).verdict == Verdict::pass);
  const Report c = pair_contraction(runs[0], runs[1], true);
  CHECK(c.verdict == Verdict::pass);
  CHECK(c.value("initial_distance") == Approx(1.25).epsilon(1e-12));

  // a fabricated energy gain is flagged
  Trajectory fake = runs[0];
  for (double& v : fake.snapshots.back().u.values()) v *= 1.5;
  CHECK(energy_dissipation(fake).verdict == Verdict::fail);
}

TEST_CASE("report serialization") {
  Report r;
  r.name = "demo";
  r.verdict = Verdict::pass;
  r.tolerance = 0.5;
  r.add("a", 1.0);
  r.add("b", 2.5);
  std::ostringstream text;
  write_text(text, r);
  CHECK(text.str().rfind("report demo pass tol=0.5\n", 0) == 0);
  CHECK(text.str().find("  b 2.5") != std::string::npos);
  std::ostringstream csv;
  const std::vector<Report> rs = {r};
  write_csv(csv, rs);
  CHECK(csv.str() == "report,label,value,verdict,tolerance\ndemo,a,1,pass,0.5\ndemo,b,2.5,pass,0.5\n");
  CHECK(r.value("b") == 2.5);
  CHECK_THROWS_AS(r.value("c"), std::out_of_range);
  Report f = r;
  f.verdict = Verdict::fail;
  const std::vector<Report> mixed = {r, f};
  CHECK_FALSE(all_passed(mixed));
}
