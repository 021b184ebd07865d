#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "nwave/grid.hpp"
#include "nwave/kernel.hpp"

namespace nwave {

struct KernelSpec {
  KernelFamily family = KernelFamily::uniform;
  double width = 0.25;

  Kernel build(double dx) const { return make_kernel(family, width, dx); }
};

/// Parameters of one simulation of
///   u_t + |u|^(q-1) u_x = alpha lambda^q (J_lambda * u - u) + mu u_xx.
struct SimParams {
  double q = 1.5;
  double lambda = 1.0;
  double mu = 0.0;
  double alpha = 1.0;
  KernelSpec kernel;
  GridSpec grid;
  double t_final = 1.0;
  double cfl = 0.9;
  /// Snapshot times; t_final is appended when missing. Empty means {t_final}.
  std::vector<double> output_times;
  /// Largest boundary leakage tolerated, relative to ||phi||_1.
  double tail_cap = 1e-6;
  ConvolutionBackend backend = ConvolutionBackend::automatic;

  /// Throws std::invalid_argument naming the violated constraint.
  void validate() const;
  std::vector<double> schedule() const;
  /// alpha * lambda^q.
  double nonlocal_rate() const;
};

/// Largest dt keeping the full update monotone:
///   dt * (speed/dx + alpha lambda^q + 2 mu/dx^2) <= cfl.
double stable_dt(const SimParams& params, double max_speed, double dx);

struct Snapshot {
  double t = 0.0;
  GridFunction u;
};

struct MassRecord {
  double t = 0.0;
  double mass = 0.0;
};

/// Bookkeeping accumulated from t = 0 up to a snapshot.
struct BudgetRecord {
  double t = 0.0;
  /// L^1 mass that left the truncated domain (outflow, viscous flux and
  /// nonlocal deposits beyond the edges). This is the tail budget.
  double leaked_l1 = 0.0;
  /// Signed mass that left the domain: mass(t) = mass(0) - leaked_mass.
  double leaked_mass = 0.0;
  /// Discrete nonlocal Dirichlet integral over [0, t], see run().
  double dirichlet = 0.0;
  double l2_squared = 0.0;
};

struct Trajectory {
  SimParams params;
  std::vector<Snapshot> snapshots;
  std::vector<MassRecord> mass_history;
  std::vector<BudgetRecord> budget_history;
  std::size_t steps = 0;

  /// Leakage accumulated up to the last snapshot.
  double tail_budget() const { return budget_history.empty() ? 0.0 : budget_history.back().leaked_l1; }
  /// Snapshot recorded at time t (relative tolerance 1e-12). Throws otherwise.
  const Snapshot& at(double t) const;
  std::size_t index_of(double t) const;
};

/// Why a run stopped early.
class NumericalAbort : public std::runtime_error {
 public:
  enum class Reason { non_finite, step_collapse, tail_budget };

  NumericalAbort(Reason reason, double time, std::size_t cell, const std::string& detail);

  Reason reason() const { return reason_; }
  double time() const { return time_; }
  std::size_t cell() const { return cell_; }

 private:
  Reason reason_;
  double time_;
  std::size_t cell_;
};

/// One forward-Euler step of the monotone scheme
///   u'_j = u_j - dt/dx (f(u_j) - f(u_{j-1}))
///          + dt alpha lambda^q ((J_lambda * u)_j - u_j)
///          + dt mu (u_{j+1} - 2 u_j + u_{j-1}) / dx^2
/// with zero ghost cells. Throws std::invalid_argument when dt exceeds the
/// monotonicity budget and NumericalAbort on non-finite output.
GridFunction step(const GridFunction& u, const SimParams& params, double dt);

/// Simulates from phi and records snapshots at params.schedule().
///
/// The Dirichlet entry of each BudgetRecord accumulates, per step,
///   dt * (E(u) - tau ||A u||^2),   tau = dt (P + Q) / Q,
/// where A u = alpha lambda^q (J_lambda * u - u), E(u) = -2 <u, A u> is the
/// nonlocal Dirichlet form, P = speed/dx + 2 mu/dx^2 and Q = alpha lambda^q.
/// This is the energy the forward-Euler nonlocal part removes, so
///   ||u(t2)||^2 + D(t2) - D(t1) <= ||u(t1)||^2
/// holds for the scheme itself.
Trajectory run(const GridFunction& phi, const SimParams& params);

/// Advances several data in lockstep with a common time step (the minimum of
/// their budgets), so discrete comparison principles apply pairwise.
std::vector<Trajectory> run_ensemble(std::span<const GridFunction> data, const SimParams& params);

/// Domain needed so that the tail stays small at t_final: {left, right}.
/// Heuristic, quoted by the tail-budget abort and used for automatic grids.
std::pair<double, double> required_domain(const GridFunction& phi, const SimParams& params);

/// Cell averages of lambda * u(lambda x) on the target grid, treating u as
/// piecewise constant. Conserves mass whenever the target covers the
/// rescaled support; for lambda = 1 on the same grid it is the identity.
GridFunction remap_rescaled(const GridFunction& source, double lambda, const GridFunction& target);

/// u_lambda(t, x) = lambda u(lambda^q t, lambda x) at the requested times,
/// sampled on `target`. Source times that are not snapshots are linearly
/// interpolated between the bracketing snapshots; times outside the recorded
/// range throw std::out_of_range.
Trajectory rescale_trajectory(const Trajectory& trajectory, double lambda,
                              std::span<const double> times, const GridSpec& target);

}  // namespace nwave
