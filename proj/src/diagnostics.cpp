#include "nwave/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "nwave/flux.hpp"

namespace nwave {

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::informational: return "informational";
  }
  return "?";
}

double Report::value(const std::string& label) const {
  for (const auto& [l, v] : values) {
    if (l == label) return v;
  }
  throw std::out_of_range("report " + name + " has no value '" + label + "'");
}

void write_text(std::ostream& os, const Report& r) {
  os << "report " << r.name << ' ' << to_string(r.verdict) << " tol=" << std::setprecision(6) << r.tolerance;
  if (!r.note.empty()) os << " # " << r.note;
  os << '\n';
  os << std::setprecision(17);
  for (const auto& [label, v] : r.values) os << "  " << label << ' ' << v << '\n';
}

void write_csv(std::ostream& os, std::span<const Report> reports) {
  os << "report,label,value,verdict,tolerance\n" << std::setprecision(17);
  for (const auto& r : reports) {
    for (const auto& [label, v] : r.values) {
      os << r.name << ',' << label << ',' << v << ',' << to_string(r.verdict) << ',' << r.tolerance << '\n';
    }
  }
}

bool all_passed(std::span<const Report> reports) {
  return std::all_of(reports.begin(), reports.end(), [](const Report& r) { return r.passed(); });
}

namespace {

double max_abs(const GridFunction& u) {
  double m = 0.0;
  for (double v : u.values()) m = std::max(m, std::abs(v));
  return m;
}

Verdict verdict_of(bool ok) { return ok ? Verdict::pass : Verdict::fail; }

std::string label_at(const char* what, double t) {
  std::ostringstream s;
  s << what << "@t=" << t;
  return s.str();
}

}  // namespace

Report oleinik_margin(const GridFunction& u, double q, double t, double tol_scheme) {
  if (!(t > 0.0)) throw std::invalid_argument("Oleinik margin needs t > 0");
  FluxParams check(q);
  const double floor = kRoundingFloor * max_abs(u);
  std::vector<double> powered(u.size());
  for (std::size_t j = 0; j < u.size(); ++j) {
    if (u[j] < -floor) {
      std::ostringstream msg;
      msg << "Oleinik margin requires u >= 0; cell " << j << " holds " << u[j];
      throw std::invalid_argument(msg.str());
    }
    powered[j] = u[j] <= 0.0 ? 0.0 : std::pow(u[j], q - 1.0);
  }
  double m = 0.0;
  std::size_t where = 0;
  for (std::size_t j = 0; j + 1 < u.size(); ++j) {
    const double d = (powered[j + 1] - powered[j]) / u.dx();
    if (d > m) {
      m = d;
      where = j;
    }
  }
  Report r;
  r.name = "oleinik";
  r.tolerance = tol_scheme;
  r.add("t", t);
  r.add("margin", m * t);
  r.add("excess", std::max(0.0, m * t - 1.0));
  r.add("x", u.center(where));
  r.verdict = verdict_of(m * t <= 1.0 + tol_scheme);
  return r;
}

Report sup_bound(const Trajectory& traj, double mass, double tol) {
  const double q = traj.params.q;
  Report r;
  r.name = "sup_bound";
  r.tolerance = tol;
  bool ok = true;
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& s : traj.snapshots) {
    if (s.t <= 0.0) continue;
    const double bound = std::pow(q * mass / ((q - 1.0) * s.t), 1.0 / q);
    const double sup = max_abs(s.u);
    worst = std::max(worst, sup - bound);
    if (sup > bound + tol) ok = false;
    r.add(label_at("sup", s.t), sup);
    r.add(label_at("bound", s.t), bound);
  }
  r.add("worst_excess", worst);
  r.verdict = verdict_of(ok);
  return r;
}

Report decay_fit(const Trajectory& traj, double p, const DecayFitOptions& options) {
  const double q = traj.params.q;
  std::vector<std::pair<double, double>> pts;
  for (const auto& s : traj.snapshots) {
    if (s.t >= 1.0) pts.emplace_back(s.t, lp_norm(s.u, p, s.u.full()));
  }
  if (pts.size() < 5 || pts.back().first < 10.0 * pts.front().first) {
    throw std::invalid_argument("decay fit needs at least 5 snapshots with t >= 1 spanning a decade");
  }
  const double t_from = options.t_from.value_or(1.0);
  long double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t n = 0;
  for (const auto& [t, norm] : pts) {
    if (t < t_from * (1.0 - 1e-12)) continue;
    if (!(norm > 0.0)) throw std::invalid_argument("decay fit on a vanishing solution");
    const long double x = std::log(t);
    const long double y = std::log(norm);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  if (n < 2) throw std::invalid_argument("decay fit window holds fewer than two snapshots");
  const double slope = static_cast<double>((n * sxy - sx * sy) / (n * sxx - sx * sx));
  const double target = std::isinf(p) ? -1.0 / q : -(1.0 / q) * (1.0 - 1.0 / p);

  Report r;
  r.name = "decay";
  r.tolerance = options.slope_tol;
  r.add("p", p);
  r.add("slope", slope);
  r.add("target", target);
  r.add("points", static_cast<double>(n));
  bool ok = std::abs(slope - target) <= options.slope_tol;

  if (std::isinf(p)) {
    bool nonneg = true;
    for (const auto& s : traj.snapshots) {
      const double floor = kRoundingFloor * max_abs(s.u);
      for (double v : s.u.values()) nonneg = nonneg && v >= -floor;
    }
    if (nonneg) {
      double mass = 0.0;
      if (options.mass) {
        mass = *options.mass;
      } else {
        mass = traj.mass_history.front().mass + traj.budget_history.front().leaked_mass;
      }
      const Report b = sup_bound(traj, mass, options.bound_tol);
      r.add("sup_bound_worst_excess", b.value("worst_excess"));
      ok = ok && b.passed();
    }
  }
  if (p == 1.0) {
    // ||u(t)||_1 never grows.
    double prev = std::numeric_limits<double>::infinity();
    bool mono = true;
    for (const auto& s : traj.snapshots) {
      const double n1 = lp_norm(s.u, 1.0, s.u.full());
      mono = mono && n1 <= prev * (1.0 + 1e-12);
      prev = n1;
    }
    r.add("l1_nonincreasing", mono ? 1.0 : 0.0);
    ok = ok && mono;
  }
  r.verdict = verdict_of(ok);
  return r;
}

double tail_mass(const GridFunction& u, double R) {
  if (!(R > 0.0) || -2.0 * R < u.x_min() || 2.0 * R > u.x_max()) {
    std::ostringstream msg;
    msg << "tail radius R=" << R << " out of range: need 0 < 2R inside [" << u.x_min() << ", " << u.x_max() << "]";
    throw std::invalid_argument(msg.str());
  }
  long double acc = 0.0L;
  for (std::size_t j = 0; j < u.size(); ++j) {
    const double a = u.left_edge(j);
    const double b = u.left_edge(j + 1);
    // length of [a,b] outside [-2R, 2R]
    const double inside = std::max(0.0, std::min(b, 2.0 * R) - std::max(a, -2.0 * R));
    const double outside = (b - a) - inside;
    if (outside > 0.0) acc += std::abs(u[j]) * outside;
  }
  return static_cast<double>(acc);
}

Report tail_bound_check(const Trajectory& traj, const GridFunction& phi, std::span<const double> radii,
                        double t_calibrate, std::span<const double> check_times) {
  const double q = traj.params.q;
  auto initial_tail = [&](double R) { return tail_mass(phi, R / 2.0); };
  auto shape = [&](double t, double R) { return t / (R * R) + std::pow(t, 1.0 / q) / R; };

  const GridFunction& u0 = traj.at(t_calibrate).u;
  double C = 0.0;
  for (double R : radii) {
    const double need = (tail_mass(u0, R) - initial_tail(R)) / shape(t_calibrate, R);
    C = std::max(C, need);
  }
  Report r;
  r.name = "tails";
  r.tolerance = 0.0;
  r.add("C", C);
  bool ok = true;
  for (double t : check_times) {
    const GridFunction& u = traj.at(t).u;
    for (double R : radii) {
      const double lhs = tail_mass(u, R);
      const double rhs = initial_tail(R) + C * shape(t, R);
      std::ostringstream label;
      label << "slack@t=" << t << ",R=" << R;
      r.add(label.str(), rhs - lhs);
      ok = ok && lhs <= rhs + 1e-14;
    }
  }
  r.verdict = verdict_of(ok);
  return r;
}

double l1_modulus(const GridFunction& u, double h) {
  const double cells = h / u.dx();
  const double rounded = std::round(cells);
  if (std::abs(cells - rounded) > 1e-9 * std::max(1.0, std::abs(cells))) {
    std::ostringstream msg;
    msg << "shift h=" << h << " is not a whole number of cells (dx=" << u.dx() << ")";
    throw std::invalid_argument(msg.str());
  }
  const auto s = static_cast<std::ptrdiff_t>(std::abs(rounded));
  const auto n = static_cast<std::ptrdiff_t>(u.size());
  auto at = [&](std::ptrdiff_t j) { return (j >= 0 && j < n) ? u[static_cast<std::size_t>(j)] : 0.0; };
  long double acc = 0.0L;
  for (std::ptrdiff_t j = -s; j < n; ++j) acc += std::abs(at(j + s) - at(j));
  return static_cast<double>(acc * u.dx());
}

namespace {

struct Bump {
  double value;
  double derivative;
  double second;
};

// b(s) = exp(-1/(1-s^2)) and its first two derivatives.
Bump bump(double s) {
  if (std::abs(s) >= 1.0) return {0.0, 0.0, 0.0};
  const double g = 1.0 - s * s;
  const double b = std::exp(-1.0 / g);
  const double d1 = -2.0 * s / (g * g);
  // b'' = b (d1^2 + d1'), d1' = -2/g^2 - 8 s^2/g^3
  const double d1p = -2.0 / (g * g) - 8.0 * s * s / (g * g * g);
  return {b, b * d1, b * (d1 * d1 + d1p)};
}

double sgn(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

}  // namespace

Report entropy_residual(const Trajectory& traj, const EntropyTestCase& tc, double tol_quad) {
  if (traj.snapshots.size() < 2) throw std::invalid_argument("entropy residual needs at least two snapshots");
  const SimParams& prm = traj.params;
  const double t_lo = tc.t_center - tc.t_half;
  const double t_hi = tc.t_center + tc.t_half;
  const GridFunction& first = traj.snapshots.front().u;
  const double x_lo = tc.x_center - tc.x_half;
  const double x_hi = tc.x_center + tc.x_half;
  if (!(tc.t_half > 0.0 && tc.x_half > 0.0) || t_lo <= 0.0 || t_lo < traj.snapshots.front().t ||
      t_hi > traj.snapshots.back().t || x_lo < first.x_min() || x_hi > first.x_max()) {
    std::ostringstream msg;
    msg << "test function support [" << t_lo << ", " << t_hi << "] x [" << x_lo << ", " << x_hi
        << "] is not inside the trajectory box";
    throw std::invalid_argument(msg.str());
  }

  const double rate = prm.nonlocal_rate();
  std::optional<Convolver> conv;
  if (rate > 0.0) conv.emplace(rescale(prm.kernel.build(first.dx()), prm.lambda), first.size(), prm.backend);
  std::vector<double> ju(first.size());
  const double fk = flux(tc.k, prm.q);

  // Spatial integral at one snapshot.
  auto slice = [&](const Snapshot& s) -> long double {
    const double st = (s.t - tc.t_center) / tc.t_half;
    const Bump bt = bump(st);
    if (bt.value == 0.0) return 0.0L;
    const GridFunction& u = s.u;
    if (conv) conv->apply(u.values(), ju);
    long double acc = 0.0L;
    for (std::size_t j = 0; j < u.size(); ++j) {
      const double sx = (u.center(j) - tc.x_center) / tc.x_half;
      if (std::abs(sx) >= 1.0) continue;
      const Bump bx = bump(sx);
      const double phi = bt.value * bx.value;
      const double phi_t = bt.derivative / tc.t_half * bx.value;
      const double phi_x = bt.value * bx.derivative / tc.x_half;
      const double phi_xx = bt.value * bx.second / (tc.x_half * tc.x_half);
      const double d = u[j] - tc.k;
      const double sg = sgn(d);
      double integrand = std::abs(d) * phi_t + sg * (flux(u[j], prm.q) - fk) * phi_x;
      if (prm.mu > 0.0) integrand += prm.mu * std::abs(d) * phi_xx;
      // J*(u-k) = J*u - k, the kernel having unit mass
      if (rate > 0.0) integrand += rate * (sg * (ju[j] - tc.k) - std::abs(d)) * phi;
      acc += integrand;
    }
    return acc * u.dx();
  };

  long double total = 0.0L;
  const auto& snaps = traj.snapshots;
  long double prev = slice(snaps.front());
  std::size_t used = 0;
  for (std::size_t i = 1; i < snaps.size(); ++i) {
    const long double cur = slice(snaps[i]);
    const double t0 = snaps[i - 1].t;
    const double t1 = snaps[i].t;
    if (t1 > t_lo && t0 < t_hi) {
      total += 0.5L * (prev + cur) * (t1 - t0);
      ++used;
    }
    prev = cur;
  }
  if (used < 4) throw std::invalid_argument("entropy residual: fewer than 4 time intervals cover the test function");

  Report r;
  r.name = "entropy";
  r.tolerance = tol_quad;
  r.add("k", tc.k);
  r.add("t_center", tc.t_center);
  r.add("x_center", tc.x_center);
  r.add("residual", static_cast<double>(total));
  r.verdict = verdict_of(total >= -tol_quad);
  return r;
}

Trajectory nwave_trajectory(const NWave& nw, std::span<const double> times, const GridSpec& grid) {
  Trajectory traj;
  traj.params.q = nw.q();
  traj.params.alpha = 0.0;
  traj.params.mu = 0.0;
  traj.params.grid = grid;
  traj.params.output_times.assign(times.begin(), times.end());
  if (!times.empty()) traj.params.t_final = times.back();
  const GridFunction g = grid.make();
  for (double t : times) {
    GridFunction u = nwave_sample(nw, t, g);
    traj.mass_history.push_back({t, u.integral()});
    traj.budget_history.push_back({t, 0.0, 0.0, 0.0, 0.0});
    traj.snapshots.push_back({t, std::move(u)});
  }
  return traj;
}

namespace {

double zpow(double z, double e) { return e == 0.0 ? 1.0 : std::pow(z, e); }

std::vector<std::size_t> argmax_all(const GridFunction& w) {
  double m = -std::numeric_limits<double>::infinity();
  for (double v : w.values()) m = std::max(m, v);
  std::vector<std::size_t> idx;
  for (std::size_t j = 0; j < w.size(); ++j) {
    if (w[j] == m) idx.push_back(j);
  }
  return idx;
}

// L(g)(x) = sum_k J_k dx (g(x-k) - g(x)) for g given by a callback, zero outside.
template <class G>
long double L_at(const Kernel& J, std::size_t n, std::size_t x, G g) {
  const int R = J.radius_cells();
  const long double gx = g(x);
  long double acc = 0.0L;
  for (int k = -R; k <= R; ++k) {
    const auto y = static_cast<std::ptrdiff_t>(x) - k;
    const long double gy = (y >= 0 && y < static_cast<std::ptrdiff_t>(n)) ? g(static_cast<std::size_t>(y)) : 0.0L;
    acc += static_cast<long double>(J.at(k)) * (gy - gx);
  }
  return acc * J.dx();
}

}  // namespace

double comparison_A(const Kernel& J, const GridFunction& z, double beta, std::size_t x) {
  const int R = J.radius_cells();
  const auto n = static_cast<std::ptrdiff_t>(z.size());
  const long double zx = z[x];
  const long double zx_b1 = zpow(z[x], beta + 1.0);
  long double acc = 0.0L;
  for (int k = -R; k <= R; ++k) {
    const auto y = static_cast<std::ptrdiff_t>(x) - k;
    const double zy = (y >= 0 && y < n) ? z[static_cast<std::size_t>(y)] : 0.0;
    const long double term =
        zx * zpow(zy, beta) - beta / (beta + 1.0) * zpow(zy, beta + 1.0) - zx_b1 / (beta + 1.0);
    acc += static_cast<long double>(J.at(k)) * term;
  }
  return static_cast<double>(acc * J.dx());
}

ComparisonCase make_comparison_case(const Kernel& J, double beta, GridFunction z, GridFunction w) {
  if (!(beta >= 0.0)) throw std::invalid_argument("comparison exponent beta must be >= 0");
  if (!z.same_grid(w)) throw std::invalid_argument("z and w must share a grid");
  require_matching_spacing(J, z);
  for (std::size_t j = 0; j < z.size(); ++j) {
    if (z[j] < 0.0) {
      std::ostringstream msg;
      msg << "comparison case needs z >= 0; cell " << j << " holds " << z[j];
      throw std::invalid_argument(msg.str());
    }
  }
  ComparisonCase c;
  c.beta = beta;
  c.x0 = argmax_all(w).front();
  c.A_z_at_x0 = comparison_A(J, z, beta, c.x0);
  c.z = std::move(z);
  c.w = std::move(w);
  return c;
}

Report check_nonlocal_comparison(const Kernel& J, const ComparisonCase& c, double tol) {
  for (double v : c.z.values()) {
    if (v < 0.0) throw std::invalid_argument("comparison case needs z >= 0");
  }
  const double beta = c.beta;
  const auto& z = c.z;
  const auto& w = c.w;
  const std::size_t n = z.size();
  Report r;
  r.name = "nonlocal_comparison";
  r.tolerance = tol;
  bool ok = true;
  double worst_A = -std::numeric_limits<double>::infinity();
  double worst_gap = -std::numeric_limits<double>::infinity();
  std::vector<std::size_t> points = argmax_all(w);
  if (std::find(points.begin(), points.end(), c.x0) == points.end()) {
    throw std::invalid_argument("x0 is not an argmax of w");
  }
  for (std::size_t x0 : points) {
    const long double lhs =
        z[x0] * L_at(J, n, x0, [&](std::size_t j) { return static_cast<long double>(zpow(z[j], beta)) * w[j]; }) -
        beta / (beta + 1.0) * w[x0] *
            L_at(J, n, x0, [&](std::size_t j) { return static_cast<long double>(zpow(z[j], beta + 1.0)); });
    const double A = x0 == c.x0 ? c.A_z_at_x0 : comparison_A(J, z, beta, x0);
    const double gap = static_cast<double>(lhs - static_cast<long double>(A) * w[x0]);
    worst_A = std::max(worst_A, A);
    worst_gap = std::max(worst_gap, gap);
    ok = ok && A <= tol && gap <= tol;
  }
  r.add("beta", beta);
  r.add("A_z", worst_A);
  r.add("lhs_minus_rhs", worst_gap);
  r.add("argmax_count", static_cast<double>(points.size()));
  r.verdict = verdict_of(ok);
  return r;
}

double nwave_distance(const GridFunction& u, const NWave& nw, double t, double p, Sampling sampling) {
  if (!(t > 0.0)) throw std::invalid_argument("N-wave distance needs t > 0");
  GridFunction w = nwave_sample(nw, t, u, sampling);
  for (std::size_t j = 0; j < w.size(); ++j) w[j] = u[j] - w[j];
  const double exponent = std::isinf(p) ? 1.0 / nw.q() : (1.0 / nw.q()) * (1.0 - 1.0 / p);
  return std::pow(t, exponent) * lp_norm(w, p, w.full());
}

Report energy_dissipation(const Trajectory& traj, double tol) {
  Report r;
  r.name = "energy";
  r.tolerance = tol;
  const auto& b = traj.budget_history;
  if (b.size() != traj.snapshots.size()) throw std::invalid_argument("energy: budget and snapshots differ in length");
  std::vector<double> l2(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) {
    const GridFunction& u = traj.snapshots[i].u;
    long double s2 = 0.0L;
    for (double v : u.values()) s2 += static_cast<long double>(v) * v;
    l2[i] = static_cast<double>(s2 * u.dx());
  }
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < b.size(); ++i) {
    for (std::size_t j = i + 1; j < b.size(); ++j) {
      const double excess = l2[j] + (b[j].dirichlet - b[i].dirichlet) - l2[i];
      worst = std::max(worst, excess);
    }
  }
  if (b.size() < 2) worst = 0.0;
  r.add("pairs", static_cast<double>(b.size() * (b.size() - 1) / 2));
  r.add("worst_excess", worst);
  r.add("dirichlet_total", b.empty() ? 0.0 : b.back().dirichlet);
  r.verdict = verdict_of(worst <= tol);
  return r;
}

Report merge_energy(std::span<const Report> parts) {
  Report r;
  r.name = "energy";
  double worst = -std::numeric_limits<double>::infinity();
  double pairs = 0.0;
  bool ok = !parts.empty();
  for (const Report& p : parts) {
    worst = std::max(worst, p.value("worst_excess"));
    pairs += p.value("pairs");
    r.tolerance = p.tolerance;
    ok = ok && p.passed();
  }
  r.add("runs", static_cast<double>(parts.size()));
  r.add("pairs", pairs);
  r.add("worst_excess", parts.empty() ? 0.0 : worst);
  r.verdict = ok ? Verdict::pass : Verdict::fail;
  return r;
}

Report mass_balance(const Trajectory& traj, double tol) {
  Report r;
  r.name = "mass";
  r.tolerance = tol;
  if (traj.mass_history.empty()) {
    r.verdict = Verdict::informational;
    return r;
  }
  const double m0 = traj.mass_history.front().mass + traj.budget_history.front().leaked_mass;
  double worst = 0.0;
  for (std::size_t i = 0; i < traj.mass_history.size(); ++i) {
    const double expected = m0 - traj.budget_history[i].leaked_mass;
    worst = std::max(worst, std::abs(traj.mass_history[i].mass - expected));
  }
  double l1 = 0.0;
  for (double v : traj.snapshots.front().u.values()) l1 += std::abs(v);
  l1 *= traj.snapshots.front().u.dx();
  r.add("initial_mass", m0);
  r.add("worst_drift", worst);
  r.add("tail_budget", traj.tail_budget());
  r.verdict = verdict_of(worst <= tol * std::max(1.0, std::abs(m0)) &&
                         traj.tail_budget() <= traj.params.tail_cap * std::max(l1, 1e-300) * (1.0 + 1e-9));
  return r;
}

Report initial_trace(const Trajectory& traj, const GridFunction& phi, double R) {
  Report r;
  r.name = "initial_trace";
  r.verdict = Verdict::informational;
  r.add("R", R);
  for (const auto& s : traj.snapshots) {
    if (!s.u.same_grid(phi)) throw std::invalid_argument("initial trace: grid mismatch");
    long double acc = 0.0L;
    for (std::size_t j = 0; j < phi.size(); ++j) {
      if (std::abs(phi.center(j)) < R) acc += std::abs(s.u[j] - phi[j]);
    }
    r.add(label_at("l1_distance", s.t), static_cast<double>(acc * phi.dx()));
  }
  return r;
}

Report pair_contraction(const Trajectory& a, const Trajectory& b, bool ordered) {
  if (a.snapshots.size() != b.snapshots.size()) throw std::invalid_argument("pair runs have different schedules");
  const GridFunction& pa = a.snapshots.front().u;
  const GridFunction& pb = b.snapshots.front().u;
  long double d0 = 0.0L;
  long double p0 = 0.0L;
  for (std::size_t j = 0; j < pa.size(); ++j) {
    const double d = pb[j] - pa[j];
    d0 += std::abs(d);
    p0 += std::max(d, 0.0);
  }
  const double dist0 = static_cast<double>(d0 * pa.dx());
  const double pos0 = static_cast<double>(p0 * pa.dx());
  const double rounding = 1e-12 * std::max(1.0, dist0);

  Report r;
  r.name = "contraction";
  r.tolerance = rounding;
  bool ok = true;
  double worst_l1 = -std::numeric_limits<double>::infinity();
  double worst_pos = -std::numeric_limits<double>::infinity();
  double worst_order = 0.0;
  for (std::size_t i = 0; i < a.snapshots.size(); ++i) {
    const GridFunction& ua = a.snapshots[i].u;
    const GridFunction& ub = b.snapshots[i].u;
    const double budget = a.budget_history[i].leaked_l1 + b.budget_history[i].leaked_l1;
    long double dl = 0.0L;
    long double pl = 0.0L;
    const double scale = std::max(max_abs(ua), max_abs(ub));
    for (std::size_t j = 0; j < ua.size(); ++j) {
      const double d = ub[j] - ua[j];
      dl += std::abs(d);
      pl += std::max(d, 0.0);
      if (ordered) worst_order = std::max(worst_order, -d / std::max(scale, 1e-300));
    }
    const double l1 = static_cast<double>(dl * ua.dx()) - dist0 - budget;
    const double pos = static_cast<double>(pl * ua.dx()) - pos0 - budget;
    worst_l1 = std::max(worst_l1, l1);
    worst_pos = std::max(worst_pos, pos);
    ok = ok && l1 <= rounding && pos <= rounding;
  }
  r.add("initial_distance", dist0);
  r.add("l1_excess", worst_l1);
  r.add("positive_part_excess", worst_pos);
  if (ordered) {
    r.add("order_violation", worst_order);
    ok = ok && worst_order <= kRoundingFloor;
  }
  r.verdict = verdict_of(ok);
  return r;
}

}  // namespace nwave
