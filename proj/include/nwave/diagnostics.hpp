#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "nwave/grid.hpp"
#include "nwave/kernel.hpp"
#include "nwave/nonlocal_op.hpp"
#include "nwave/profiles.hpp"
#include "nwave/solver.hpp"

namespace nwave {

enum class Verdict { pass, fail, informational };

std::string_view to_string(Verdict v);

struct Report {
  std::string name;
  std::vector<std::pair<std::string, double>> values;
  Verdict verdict = Verdict::informational;
  double tolerance = 0.0;
  std::string note;

  void add(std::string label, double value) { values.emplace_back(std::move(label), value); }
  /// First value with this label; throws std::out_of_range if absent.
  double value(const std::string& label) const;
  bool passed() const { return verdict != Verdict::fail; }
};

/// "report <name> <verdict> tol=<tol>" followed by indented "label value" lines.
void write_text(std::ostream& os, const Report& r);
/// Header "report,label,value,verdict,tolerance" then one row per value.
void write_csv(std::ostream& os, std::span<const Report> reports);
bool all_passed(std::span<const Report> reports);

/// Negative values above -kRoundingFloor * max|u| are rounding noise, not data.
inline constexpr double kRoundingFloor = 1e-12;

/// max_j (u_{j+1}^(q-1) - u_j^(q-1)) / dx, reported as m*t.
/// Passes iff m*t <= 1 + tol_scheme. Throws std::invalid_argument on
/// negative cells below the rounding floor.
Report oleinik_margin(const GridFunction& u, double q, double t, double tol_scheme);

struct DecayFitOptions {
  /// Fit over snapshots with t >= t_from (at least 1).
  std::optional<double> t_from;
  /// Mass used by the explicit sup bound; default is the initial mass.
  std::optional<double> mass;
  double slope_tol = 0.1;
  double bound_tol = 1e-10;
};

/// Least-squares slope of log ||u(t)||_p against log t, compared with
/// -(1/q)(1 - 1/p). For p = inf and u >= 0 it also asserts
/// ||u(t)||_inf <= (qM/((q-1)t))^(1/q) at every snapshot with t > 0.
Report decay_fit(const Trajectory& traj, double p, const DecayFitOptions& options = {});

/// Explicit sup bound alone, at every snapshot with t > 0.
Report sup_bound(const Trajectory& traj, double mass, double tol = 1e-10);

/// Integral of |u| over |x| > 2R (exact for piecewise-constant u).
double tail_mass(const GridFunction& u, double R);

/// Calibrates C in
///   tail_mass(u(t), R) <= int_{|x|>R} |phi| + C (t/R^2 + t^(1/q)/R)
/// at t = t_calibrate (smallest C covering every R) and checks the bound at
/// the remaining snapshot times in `check_times`.
Report tail_bound_check(const Trajectory& traj, const GridFunction& phi, std::span<const double> radii,
                        double t_calibrate, std::span<const double> check_times);

/// Sum |u(x+h) - u(x)| dx with u extended by zero; h must be a whole number of cells.
double l1_modulus(const GridFunction& u, double h);

/// Kruzkov constant and tensor-product bump
///   phi(t, x) = b((t - t_center)/t_half) b((x - x_center)/x_half),
///   b(s) = exp(-1/(1 - s^2)) on |s| < 1.
struct EntropyTestCase {
  double k = 0.0;
  double t_center = 1.0;
  double t_half = 0.5;
  double x_center = 0.0;
  double x_half = 1.0;
};

/// R = int int |u-k| phi_t + sgn(u-k)(f(u)-f(k)) phi_x + mu |u-k| phi_xx
///       + alpha lambda^q (sgn(u-k) J_lambda*(u-k) - |u-k|) phi dx dt
/// with sgn(0) = 0, midpoint rule in x and trapezoid rule over the
/// snapshots in t. Passes iff R >= -tol_quad.
Report entropy_residual(const Trajectory& traj, const EntropyTestCase& tc, double tol_quad);

/// The N-wave as a trajectory of exact cell averages at the given times
/// (alpha = mu = 0).
Trajectory nwave_trajectory(const NWave& nw, std::span<const double> times, const GridSpec& grid);

struct ComparisonCase {
  double beta = 0.0;
  GridFunction z;
  GridFunction w;
  std::size_t x0 = 0;
  double A_z_at_x0 = 0.0;
};

/// Fills x0 (lowest index of max w) and A_z(x0). Throws on negative z.
ComparisonCase make_comparison_case(const Kernel& J, double beta, GridFunction z, GridFunction w);

/// A_z(x) = int J(x-y) [z(x) z^beta(y) - beta/(beta+1) z^(beta+1)(y) - z^(beta+1)(x)/(beta+1)] dy.
double comparison_A(const Kernel& J, const GridFunction& z, double beta, std::size_t x);

/// Checks A_z(x0) <= tol and
///   z L(z^beta w) - beta/(beta+1) w L(z^(beta+1)) <= A_z w   at x0
/// (and at every other index where w attains its maximum).
Report check_nonlocal_comparison(const Kernel& J, const ComparisonCase& c, double tol = 1e-10);

/// t^((1/q)(1-1/p)) ||u - w_M(t)||_p with w_M sampled on u's grid.
double nwave_distance(const GridFunction& u, const NWave& nw, double t, double p,
                      Sampling sampling = Sampling::cell_average);

/// ||u(t2)||^2 + D(t2) - D(t1) <= ||u(t1)||^2 + tol for every pair of
/// snapshots, where D is the discrete Dirichlet integral recorded by run().
Report energy_dissipation(const Trajectory& traj, double tol = 1e-10);

/// One energy report for several runs: worst excess over all of them.
Report merge_energy(std::span<const Report> parts);

/// |mass(t) - (mass(0) - leaked)| at every snapshot, and leaked L^1 below the cap.
Report mass_balance(const Trajectory& traj, double tol = 1e-10);

/// ||u(t) - phi||_{L^1(|x|<R)} along the schedule; informational.
Report initial_trace(const Trajectory& traj, const GridFunction& phi, double R);

/// L^1 and positive-part contraction plus cellwise ordering for a pair run
/// in lockstep. `ordered` requests the ordering check (phi <= phi_tilde).
Report pair_contraction(const Trajectory& a, const Trajectory& b, bool ordered);

}  // namespace nwave
