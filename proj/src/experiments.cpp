#include "nwave/experiments.hpp"

#include <array>
#include <cmath>
#include <sstream>

namespace nwave {

std::string_view to_string(StudyKind kind) {
  switch (kind) {
    case StudyKind::long_time_nonnegative: return "long_time_nonnegative";
    case StudyKind::long_time_sign_changing: return "long_time_sign_changing";
    case StudyKind::vanishing_viscosity: return "vanishing_viscosity";
    case StudyKind::rescaling_family: return "rescaling_family";
    case StudyKind::kernel_bound_sweep: return "kernel_bound_sweep";
  }
  return "?";
}

StudyKind parse_study_kind(std::string_view name) {
  for (auto k : {StudyKind::long_time_nonnegative, StudyKind::long_time_sign_changing, StudyKind::vanishing_viscosity,
                 StudyKind::rescaling_family, StudyKind::kernel_bound_sweep}) {
    if (name == to_string(k)) return k;
  }
  throw ConfigError("unknown study '" + std::string(name) + "'");
}

StudySpec default_study(StudyKind kind) {
  StudySpec spec;
  spec.kind = kind;
  Config& c = spec.base;
  switch (kind) {
    case StudyKind::long_time_nonnegative:
      spec.sweep = {1.0, 3.0, 10.0, 30.0, 100.0};
      break;
    case StudyKind::long_time_sign_changing:
      c.datum = DatumKind::two_boxes_signed;
      spec.sweep = {1.0, 3.0, 10.0, 30.0, 100.0};
      break;
    case StudyKind::vanishing_viscosity:
      c.sim.grid.x_min = -8.0;
      c.sim.grid.x_max = 10.0;
      c.auto_x_max = false;
      c.sim.t_final = 1.0;
      spec.sweep = {0.4, 0.2, 0.1, 0.05};
      break;
    case StudyKind::rescaling_family:
      // J_lambda must stay resolved at the largest lambda
      c.sim.kernel.width = 1.0;
      spec.sweep = {1.0, 2.0, 4.0, 8.0};
      break;
    case StudyKind::kernel_bound_sweep:
      c.sim.kernel.width = 1.0;
      c.sim.grid = {-4.0, 4.0, 1.0 / 256.0};
      c.auto_x_max = false;
      for (int l = 1; l <= 64; ++l) spec.sweep.push_back(l);
      break;
  }
  return spec;
}

namespace {

Trajectory simulate(const GridFunction& phi, const SimParams& p) {
  try {
    return run(phi, p);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  } catch (const UnresolvedKernel& e) {
    throw ConfigError(e.what());
  }
}

std::string at_label(const char* what, double v) {
  std::ostringstream s;
  s << what << "@" << v;
  return s.str();
}

void require_sorted_positive(const std::vector<double>& xs, bool increasing, const char* what) {
  if (xs.empty()) throw ConfigError(std::string(what) + ": empty sweep");
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!(xs[i] > 0.0)) throw ConfigError(std::string(what) + ": sweep values must be positive");
    if (i > 0 && (increasing ? !(xs[i] > xs[i - 1]) : !(xs[i] < xs[i - 1]))) {
      throw ConfigError(std::string(what) + (increasing ? ": sweep must increase" : ": sweep must decrease"));
    }
  }
}

double l1_distance(const GridFunction& a, const GridFunction& b) {
  if (!a.same_grid(b, 1e-9)) throw std::invalid_argument("L1 distance between different grids");
  long double acc = 0.0L;
  for (std::size_t j = 0; j < a.size(); ++j) acc += std::abs(a[j] - b[j]);
  return static_cast<double>(acc * a.dx());
}

// Averages pairs of cells of a field on a grid twice as fine as `coarse`.
GridFunction coarsen(const GridFunction& fine, const GridFunction& coarse) {
  GridFunction out = coarse.like();
  const double offset = (coarse.x_min() - fine.x_min()) / fine.dx();
  const auto shift = static_cast<std::ptrdiff_t>(std::lround(offset));
  for (std::size_t j = 0; j < out.size(); ++j) {
    const std::ptrdiff_t a = shift + 2 * static_cast<std::ptrdiff_t>(j);
    double s = 0.0;
    for (std::ptrdiff_t k = a; k < a + 2; ++k) {
      if (k >= 0 && k < static_cast<std::ptrdiff_t>(fine.size())) s += fine[static_cast<std::size_t>(k)];
    }
    out[j] = 0.5 * s;
  }
  return out;
}

bool strictly_decreasing(const std::vector<double>& xs) {
  for (std::size_t i = 1; i < xs.size(); ++i) {
    if (!(xs[i] < xs[i - 1])) return false;
  }
  return true;
}

void maybe_write(const StudySpec& spec, const std::string& file, const std::string& contents) {
  if (!spec.out_dir.empty()) write_atomic(spec.out_dir / file, contents);
}

}  // namespace

SuiteResult run_long_time(const StudySpec& spec) {
  require_sorted_positive(spec.sweep, true, "long-time study");
  Config c = spec.base;
  validate(c);
  if (!(c.sim.q < 2.0)) throw ConfigError("long-time study needs 1 < q < 2");
  std::vector<double> times = {0.0};
  times.insert(times.end(), spec.sweep.begin(), spec.sweep.end());
  c.sim.output_times = times;
  c.sim.t_final = times.back();
  const GridFunction phi = c.initial_datum();
  const double mass = phi.integral();
  if (std::abs(mass) <= 1e-12 * std::max(1.0, lp_norm(phi, 1.0, phi.full()))) {
    throw ConfigError("N-wave comparison needs an initial datum with nonzero mass");
  }
  const Trajectory tr = simulate(phi, c.resolved_sim());
  const NWave nw(mass, c.sim.q);

  SuiteResult out;
  for (double p : {1.0, 2.0}) {
    Report r;
    r.name = p == 1.0 ? "nwave_distance_p1" : "nwave_distance_p2";
    std::vector<double> d;
    for (double t : spec.sweep) {
      d.push_back(nwave_distance(tr.at(t).u, nw, t, p));
      r.add(at_label("scaled_distance", t), d.back());
      out.summary.push_back({t, at_label("scaled_distance_p", p), d.back()});
    }
    const double ratio = d.front() / d.back();
    r.add("first_over_last", ratio);
    const bool mono = strictly_decreasing(d);
    r.add("monotone", mono ? 1.0 : 0.0);
    if (p == 1.0) {
      r.tolerance = 3.0;
      r.verdict = (mono && ratio >= 3.0) ? Verdict::pass : Verdict::fail;
    } else {
      r.verdict = mono ? Verdict::pass : Verdict::fail;
    }
    out.reports.push_back(std::move(r));
  }
  out.reports.push_back(mass_balance(tr));
  out.reports.push_back(energy_dissipation(tr));
  bool nonneg = true;
  for (double v : phi.values()) nonneg = nonneg && v >= 0.0;
  if (nonneg) out.reports.push_back(sup_bound(tr, mass));
  for (const auto& m : tr.mass_history) out.summary.push_back({m.t, "mass", m.mass});

  maybe_write(spec, "snapshots.csv", snapshots_csv(tr));
  maybe_write(spec, "mass_history.csv", mass_history_csv(tr));
  return out;
}

SuiteResult run_vanishing_viscosity(const StudySpec& spec) {
  require_sorted_positive(spec.sweep, false, "vanishing-viscosity study");
  Config base = spec.base;
  base.sim.output_times = {0.0, 0.5 * base.sim.t_final, base.sim.t_final};
  validate(base);
  const double t = base.sim.t_final;

  // index 0 is mu = 0, then the sweep; each at dx and dx/2
  std::vector<double> mus = {0.0};
  mus.insert(mus.end(), spec.sweep.begin(), spec.sweep.end());
  const std::size_t m = mus.size();
  std::vector<GridFunction> finals(2 * m);
  std::vector<Report> energies(2 * m);
  parallel_for(2 * m, [&](std::size_t i) {
    Config c = base;
    c.sim.mu = mus[i % m];
    if (i >= m) c.sim.grid.dx /= 2.0;
    const Trajectory tr = simulate(c.initial_datum(), c.resolved_sim());
    finals[i] = tr.at(t).u;
    energies[i] = energy_dissipation(tr);
  });

  const double floor = l1_distance(finals[0], coarsen(finals[m], finals[0]));
  SuiteResult out;
  Report r;
  r.name = "vanishing_viscosity";
  r.add("floor", floor);
  std::vector<double> coarse_d;
  std::vector<double> fine_d;
  bool above = true;
  for (std::size_t i = 1; i < m; ++i) {
    coarse_d.push_back(l1_distance(finals[i], finals[0]));
    fine_d.push_back(l1_distance(finals[m + i], finals[m]));
    r.add(at_label("distance_dx_mu", mus[i]), coarse_d.back());
    r.add(at_label("distance_dx/2_mu", mus[i]), fine_d.back());
    out.summary.push_back({mus[i], "distance_dx", coarse_d.back()});
    out.summary.push_back({mus[i], "distance_dx/2", fine_d.back()});
    above = above && coarse_d.back() > floor;
  }
  out.summary.push_back({0.0, "floor", floor});
  const bool mono = strictly_decreasing(coarse_d);
  const bool mono_fine = strictly_decreasing(fine_d);
  r.add("monotone_dx", mono ? 1.0 : 0.0);
  r.add("monotone_dx/2", mono_fine ? 1.0 : 0.0);
  r.add("above_floor", above ? 1.0 : 0.0);
  if (!above) {
    r.verdict = Verdict::informational;
    r.note = "some viscosities are below the numerical-viscosity floor";
  } else {
    r.verdict = (mono && mono_fine) ? Verdict::pass : Verdict::fail;
  }
  out.reports.push_back(std::move(r));
  out.reports.push_back(merge_energy(energies));
  return out;
}

namespace {

struct Pipelines {
  GridFunction rescaled;  // rescale_trajectory of the original-frame run
  GridFunction direct;    // the lambda-system run
  Report energy_source;
  Report energy_direct;
};

Pipelines rescaling_pipelines(const Config& base, double lambda, double dx) {
  const double q = base.sim.q;
  const GridSpec target{-6.0, 8.0, dx};
  const double t_source = std::pow(lambda, q);

  Config a = base;
  a.sim.lambda = 1.0;
  a.sim.grid = {target.x_min * lambda, target.x_max * lambda, dx};
  a.auto_x_max = false;
  a.sim.t_final = t_source;
  a.sim.output_times = {0.0, t_source};
  const Trajectory src = simulate(a.initial_datum(), a.resolved_sim());
  const double one[] = {1.0};
  Trajectory ra = rescale_trajectory(src, lambda, one, target);

  // lambda phi(lambda x), cell averaged on the target grid
  Config b = base;
  b.sim.lambda = lambda;
  b.sim.grid = target;
  b.auto_x_max = false;
  b.sim.t_final = 1.0;
  b.sim.output_times = {0.0, 1.0};
  const GridFunction phi_fine = a.initial_datum();
  GridFunction phi_l = remap_rescaled(phi_fine, lambda, target.make());
  const Trajectory direct = simulate(phi_l, b.resolved_sim());
  return {ra.snapshots.front().u, direct.at(1.0).u, energy_dissipation(src), energy_dissipation(direct)};
}

}  // namespace

SuiteResult run_rescaling_family(const StudySpec& spec) {
  require_sorted_positive(spec.sweep, true, "rescaling study");
  const Config& base = spec.base;
  validate(base);
  const double dx = base.sim.grid.dx;
  try {
    rescale(base.sim.kernel.build(dx), spec.sweep.back());
  } catch (const UnresolvedKernel& e) {
    throw ConfigError(e.what());
  }
  const std::size_t n = spec.sweep.size();
  std::vector<Pipelines> coarse(n), fine(n);
  parallel_for(2 * n, [&](std::size_t i) {
    const double lambda = spec.sweep[i % n];
    if (i < n) {
      coarse[i] = rescaling_pipelines(base, lambda, dx);
    } else {
      fine[i - n] = rescaling_pipelines(base, lambda, dx / 2.0);
    }
  });

  const GridFunction phi = base.initial_datum();
  const double M = phi.integral();
  const NWave nw(M, base.sim.q);
  SuiteResult out;
  Report agree;
  agree.name = "rescaling_agreement";
  agree.tolerance = 0.75;
  Report approach;
  approach.name = "rescaling_nwave_approach";
  Report mass;
  mass.name = "rescaling_mass";
  // leakage through the boundaries is capped at tail_cap * ||phi||_1
  mass.tolerance = std::max(1e-10, base.sim.tail_cap * lp_norm(phi, 1.0, phi.full()));
  bool agree_ok = true;
  bool mass_ok = true;
  std::vector<double> to_nwave;
  for (std::size_t i = 0; i < n; ++i) {
    const double lambda = spec.sweep[i];
    const double dc = l1_distance(coarse[i].rescaled, coarse[i].direct);
    const double df = l1_distance(fine[i].rescaled, fine[i].direct);
    agree.add(at_label("pipeline_gap_dx", lambda), dc);
    agree.add(at_label("pipeline_gap_dx/2", lambda), df);
    agree_ok = agree_ok && (dc == 0.0 ? df == 0.0 : df <= 0.75 * dc);
    const double dn = nwave_distance(coarse[i].rescaled, nw, 1.0, 1.0);
    const double dd = nwave_distance(coarse[i].direct, nw, 1.0, 1.0);
    to_nwave.push_back(dn);
    approach.add(at_label("distance_rescaled", lambda), dn);
    approach.add(at_label("distance_direct", lambda), dd);
    const double ma = coarse[i].rescaled.integral();
    const double mb = coarse[i].direct.integral();
    mass.add(at_label("mass_rescaled", lambda), ma);
    mass.add(at_label("mass_direct", lambda), mb);
    mass_ok = mass_ok && std::abs(ma - M) <= mass.tolerance && std::abs(mb - M) <= mass.tolerance;
    out.summary.push_back({lambda, "pipeline_gap_dx", dc});
    out.summary.push_back({lambda, "pipeline_gap_dx/2", df});
    out.summary.push_back({lambda, "distance_to_nwave", dn});
    out.summary.push_back({lambda, "mass", ma});
  }
  agree.verdict = agree_ok ? Verdict::pass : Verdict::fail;
  approach.verdict = strictly_decreasing(to_nwave) ? Verdict::pass : Verdict::fail;
  mass.verdict = mass_ok ? Verdict::pass : Verdict::fail;
  std::vector<Report> energies;
  for (const auto* set : {&coarse, &fine}) {
    for (const Pipelines& pl : *set) {
      energies.push_back(pl.energy_source);
      energies.push_back(pl.energy_direct);
    }
  }
  out.reports = {agree, approach, mass, merge_energy(energies)};
  return out;
}

namespace {

struct TestFunction {
  const char* name;
  double (*f)(double);
};

const TestFunction kSmoothSet[] = {
    {"quadratic", [](double x) { return x * x; }},
    {"gaussian", [](double x) { return std::exp(-x * x); }},
    {"lorentzian", [](double x) { return 1.0 / (1.0 + x * x); }},
    {"cosine", [](double x) { return std::cos(x); }},
};

}  // namespace

SuiteResult run_kernel_bound_sweep(const StudySpec& spec) {
  require_sorted_positive(spec.sweep, true, "kernel bound sweep");
  const Config& base = spec.base;
  Kernel J;
  try {
    J = base.sim.kernel.build(base.sim.grid.dx);
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  const double half_m2 = J.m2() / 2.0;
  const GridFunction grid = base.sim.grid.make();
  const double ps[] = {1.0, 2.0, kInfNorm};
  constexpr std::size_t kFns = std::size(kSmoothSet);

  const std::size_t n = spec.sweep.size();
  // ratios[i][f][p]
  std::vector<std::array<std::array<double, 3>, kFns>> ratios(n);
  parallel_for(n, [&](std::size_t i) {
    for (std::size_t f = 0; f < kFns; ++f) {
      GridFunction psi = grid.like();
      for (std::size_t j = 0; j < psi.size(); ++j) psi[j] = kSmoothSet[f].f(psi.center(j));
      for (std::size_t k = 0; k < 3; ++k) {
        try {
          ratios[i][f][k] = second_order_bound_ratio(J, psi, spec.sweep[i], ps[k]);
        } catch (const UnresolvedKernel& e) {
          throw ConfigError(e.what());
        }
      }
    }
  });

  SuiteResult out;
  Report quad;
  quad.name = "quadratic_row";
  quad.tolerance = 1e-10;
  Report bound;
  bound.name = "kernel_bound";
  bound.tolerance = 2.0 * half_m2;
  Report taylor;
  taylor.name = "gaussian_taylor_limit";
  taylor.tolerance = 0.05;
  double quad_dev = 0.0;
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double lambda = spec.sweep[i];
    for (std::size_t f = 0; f < kFns; ++f) {
      for (std::size_t k = 0; k < 3; ++k) {
        const double r = ratios[i][f][k];
        std::ostringstream metric;
        metric << "ratio_" << kSmoothSet[f].name << "_p" << ps[k];
        out.summary.push_back({lambda, metric.str(), r});
        worst = std::max(worst, r);
        if (f == 0) quad_dev = std::max(quad_dev, std::abs(r - half_m2));
        if (f == 1 && lambda == 16.0) {
          taylor.add(metric.str(), r / half_m2 - 1.0);
        }
      }
    }
  }
  quad.add("half_m2", half_m2);
  quad.add("max_deviation", quad_dev);
  quad.verdict = quad_dev <= 1e-10 ? Verdict::pass : Verdict::fail;
  bound.add("half_m2", half_m2);
  bound.add("max_ratio", worst);
  bound.verdict = worst <= 2.0 * half_m2 ? Verdict::pass : Verdict::fail;
  if (taylor.values.empty()) {
    taylor.verdict = Verdict::informational;
    taylor.note = "lambda = 16 not in the sweep";
  } else {
    bool ok = true;
    for (const auto& [label, v] : taylor.values) ok = ok && std::abs(v) <= 0.05;
    taylor.verdict = ok ? Verdict::pass : Verdict::fail;
  }
  out.reports = {quad, bound, taylor};
  return out;
}

SuiteResult run_study(const StudySpec& spec) {
  switch (spec.kind) {
    case StudyKind::long_time_nonnegative:
    case StudyKind::long_time_sign_changing: return run_long_time(spec);
    case StudyKind::vanishing_viscosity: return run_vanishing_viscosity(spec);
    case StudyKind::rescaling_family: return run_rescaling_family(spec);
    case StudyKind::kernel_bound_sweep: return run_kernel_bound_sweep(spec);
  }
  throw ConfigError("unknown study");
}

void write_result(const std::filesystem::path& dir, const SuiteResult& result, const std::string& manifest) {
  write_atomic(dir / "manifest.txt", manifest);
  write_atomic(dir / "reports.txt", reports_text(result.reports));
  std::ostringstream csv;
  write_csv(csv, result.reports);
  write_atomic(dir / "reports.csv", csv.str());
  write_atomic(dir / "summary.csv", summary_csv(result.summary));
  write_atomic(dir / "verdict.txt", result.passed() ? "pass\n" : "fail\n");
}

}  // namespace nwave
