#include "nwave/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

#include "nwave/flux.hpp"

namespace nwave {

namespace {

constexpr double kDtMinFraction = 1e-12;

std::string describe(const char* what, double value) {
  std::ostringstream msg;
  msg << what << " (got " << value << ")";
  return msg.str();
}

double max_abs(std::span<const double> u, std::size_t* where = nullptr) {
  double m = 0.0;
  std::size_t idx = 0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    const double a = std::abs(u[j]);
    if (a > m) {
      m = a;
      idx = j;
    }
  }
  if (where) *where = idx;
  return m;
}

struct StepStats {
  double leaked_l1 = 0.0;
  double leaked_mass = 0.0;
  double dirichlet = 0.0;
};

// Precomputed pieces of the update for one grid and parameter set.
class Engine {
 public:
  Engine(const SimParams& params, const GridFunction& grid)
      : q_(params.q),
        mu_(params.mu),
        dx_(grid.dx()),
        n_(grid.size()),
        rate_(params.nonlocal_rate()),
        power_(params.q - 1.0) {
    if (rate_ > 0.0) {
      const Kernel base = params.kernel.build(dx_);
      kernel_ = rescale(base, params.lambda);
      convolver_.emplace(*kernel_, n_, params.backend);
      conv_.assign(n_, 0.0);
      // Kernel mass deposited outside [0, n) from each cell near an edge.
      outside_weight_.assign(n_, 0.0);
      const int R = kernel_->radius_cells();
      const auto n = static_cast<std::ptrdiff_t>(n_);
      for (std::ptrdiff_t k = 0; k < n; ++k) {
        if (k >= R && k < n - R) continue;
        long double w = 0.0L;
        for (int m = -R; m <= R; ++m) {
          const std::ptrdiff_t j = k + m;
          if (j < 0 || j >= n) w += kernel_->at(m);
        }
        outside_weight_[static_cast<std::size_t>(k)] = static_cast<double>(w * dx_);
      }
    }
  }

  double convective_rate(double speed) const {
    return speed / dx_ + (mu_ > 0.0 ? 2.0 * mu_ / (dx_ * dx_) : 0.0);
  }
  double nonlocal_rate() const { return rate_; }
  const std::optional<Kernel>& kernel() const { return kernel_; }

  double f(double u) const { return power_(u) * u / q_; }

  // out = one step of size dt from u. `convective` is the P used for the
  // budget (ensemble maximum).
  StepStats advance(std::span<const double> u, std::span<double> out, double dt, double convective) {
    StepStats stats;
    const double c_adv = dt / dx_;
    const double c_visc = mu_ > 0.0 ? dt * mu_ / (dx_ * dx_) : 0.0;
    const double c_nl = dt * rate_;
    if (rate_ > 0.0) convolver_->apply(u, conv_);

    long double u_au = 0.0L;
    long double au_au = 0.0L;
    long double outside_signed = 0.0L;
    long double outside_abs = 0.0L;
    double flux_left = 0.0;  // f(ghost) = f(0)
    for (std::size_t j = 0; j < n_; ++j) {
      const double uj = u[j];
      const double fj = f(uj);
      double next = uj - c_adv * (fj - flux_left);
      if (rate_ > 0.0) {
        const double au = rate_ * (conv_[j] - uj);
        next += dt * au;
        u_au += static_cast<long double>(uj) * au;
        au_au += static_cast<long double>(au) * au;
        const double w = outside_weight_[j];
        if (w != 0.0) {
          outside_signed += static_cast<long double>(w) * uj;
          outside_abs += static_cast<long double>(w) * std::abs(uj);
        }
      }
      if (c_visc > 0.0) {
        const double left = j > 0 ? u[j - 1] : 0.0;
        const double right = j + 1 < n_ ? u[j + 1] : 0.0;
        next += c_visc * (right - 2.0 * uj + left);
      }
      out[j] = next;
      flux_left = fj;
    }

    const double outflow = dt * flux_left;  // f(u_{n-1}) leaves on the right
    double viscous_left = 0.0;
    double viscous_right = 0.0;
    if (c_visc > 0.0) {
      viscous_left = dt * mu_ / dx_ * u[0];
      viscous_right = dt * mu_ / dx_ * u[n_ - 1];
    }
    const double nonlocal_signed = static_cast<double>(c_nl * outside_signed * dx_);
    const double nonlocal_abs = static_cast<double>(c_nl * outside_abs * dx_);
    stats.leaked_mass = outflow + viscous_left + viscous_right + nonlocal_signed;
    stats.leaked_l1 = std::abs(outflow) + std::abs(viscous_left) + std::abs(viscous_right) + nonlocal_abs;

    if (rate_ > 0.0) {
      const double energy = static_cast<double>(-2.0L * u_au * dx_);
      const double tau = dt * (convective + rate_) / rate_;
      stats.dirichlet = dt * (energy - tau * static_cast<double>(au_au * dx_));
    }
    return stats;
  }

 private:
  double q_;
  double mu_;
  double dx_;
  std::size_t n_;
  double rate_;
  PowerLaw power_;
  std::optional<Kernel> kernel_;
  std::optional<Convolver> convolver_;
  std::vector<double> conv_;
  std::vector<double> outside_weight_;
};

void check_finite(std::span<const double> u, double t) {
  for (std::size_t j = 0; j < u.size(); ++j) {
    if (!std::isfinite(u[j])) {
      std::ostringstream msg;
      msg << "non-finite value in cell " << j << " at t=" << t;
      throw NumericalAbort(NumericalAbort::Reason::non_finite, t, j, msg.str());
    }
  }
}

}  // namespace

void SimParams::validate() const {
  if (!(q > 1.0 && q <= 2.0)) throw std::invalid_argument(describe("q must lie in (1, 2]", q));
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw std::invalid_argument(describe("lambda must be > 0", lambda));
  if (!(mu >= 0.0) || !std::isfinite(mu)) throw std::invalid_argument(describe("mu must be >= 0", mu));
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw std::invalid_argument(describe("alpha must be >= 0", alpha));
  if (!(cfl > 0.0 && cfl < 1.0)) throw std::invalid_argument(describe("cfl must lie in (0, 1)", cfl));
  if (!(t_final > 0.0) || !std::isfinite(t_final)) throw std::invalid_argument(describe("t_final must be > 0", t_final));
  if (!(grid.dx > 0.0)) throw std::invalid_argument(describe("grid.dx must be > 0", grid.dx));
  if (!(grid.x_max > grid.x_min)) throw std::invalid_argument("grid.x_max must exceed grid.x_min");
  if (!(kernel.width > 0.0)) throw std::invalid_argument(describe("kernel.width must be > 0", kernel.width));
  if (!(tail_cap > 0.0)) throw std::invalid_argument(describe("tail_cap must be > 0", tail_cap));
  for (std::size_t i = 0; i < output_times.size(); ++i) {
    const double t = output_times[i];
    if (!(t >= 0.0) || t > t_final * (1.0 + 1e-12)) {
      throw std::invalid_argument(describe("output times must lie in [0, t_final]", t));
    }
    if (i > 0 && !(t > output_times[i - 1])) {
      throw std::invalid_argument("output times must be strictly increasing");
    }
  }
}

std::vector<double> SimParams::schedule() const {
  std::vector<double> s = output_times;
  if (s.empty() || s.back() < t_final * (1.0 - 1e-12)) s.push_back(t_final);
  return s;
}

double SimParams::nonlocal_rate() const {
  if (alpha == 0.0) return 0.0;
  return alpha * static_cast<double>(std::pow(static_cast<long double>(lambda), static_cast<long double>(q)));
}

double stable_dt(const SimParams& params, double max_speed, double dx) {
  double rate = max_speed / dx + params.nonlocal_rate();
  if (params.mu > 0.0) rate += 2.0 * params.mu / (dx * dx);
  if (rate <= 0.0) return std::numeric_limits<double>::infinity();
  return params.cfl / rate;
}

NumericalAbort::NumericalAbort(Reason reason, double time, std::size_t cell, const std::string& detail)
    : std::runtime_error(detail), reason_(reason), time_(time), cell_(cell) {}

std::size_t Trajectory::index_of(double t) const {
  for (std::size_t i = 0; i < snapshots.size(); ++i) {
    if (std::abs(snapshots[i].t - t) <= 1e-12 * std::max(1.0, std::abs(t))) return i;
  }
  throw std::out_of_range(describe("no snapshot at requested time", t));
}

const Snapshot& Trajectory::at(double t) const { return snapshots[index_of(t)]; }

GridFunction step(const GridFunction& u, const SimParams& params, double dt) {
  params.validate();
  if (!(dt > 0.0)) throw std::invalid_argument(describe("time step must be positive", dt));
  const double budget = stable_dt(params, flux_derivative(max_abs(u.values()), params.q), u.dx());
  if (dt > budget * (1.0 + 1e-12)) {
    std::ostringstream msg;
    msg << "time step " << dt << " exceeds the monotonicity budget " << budget;
    throw std::invalid_argument(msg.str());
  }
  Engine engine(params, u);
  GridFunction out = u.like();
  const double convective = engine.convective_rate(flux_derivative(max_abs(u.values()), params.q));
  engine.advance(u.values(), out.values(), dt, convective);
  check_finite(out.values(), dt);
  return out;
}

std::pair<double, double> required_domain(const GridFunction& phi, const SimParams& params) {
  std::size_t first = phi.size();
  std::size_t last = 0;
  double l1 = 0.0;
  for (std::size_t j = 0; j < phi.size(); ++j) {
    if (phi[j] != 0.0) {
      first = std::min(first, j);
      last = j;
      l1 += std::abs(phi[j]);
    }
  }
  if (first == phi.size()) return {phi.x_min(), phi.x_max()};
  l1 *= phi.dx();
  const double q = params.q;
  const double t = params.t_final;
  const double front = std::pow(q / (q - 1.0), (q - 1.0) / q) * std::pow(l1, (q - 1.0) / q) * std::pow(t, 1.0 / q);
  const double m2 = params.alpha > 0.0 ? params.kernel.build(phi.dx()).m2() : 0.0;
  const double diffusivity = params.alpha * std::pow(params.lambda, q - 2.0) * m2 / 2.0 + params.mu;
  const double reach = params.alpha > 0.0 ? params.kernel.width / params.lambda : 0.0;
  // Gaussian tail beyond z standard deviations is below exp(-z^2/2) = tail_cap
  const double z = std::sqrt(2.0 * std::log(1.0 / std::min(params.tail_cap, 0.5)));
  const double spread = z * std::sqrt(2.0 * diffusivity * t) + reach;
  return {phi.left_edge(first) - spread, phi.left_edge(last) + phi.dx() + front + spread};
}

std::vector<Trajectory> run_ensemble(std::span<const GridFunction> data, const SimParams& params) {
  params.validate();
  if (data.empty()) return {};
  const GridFunction& grid = data.front();
  for (const auto& d : data) {
    if (!d.same_grid(grid)) throw std::invalid_argument("ensemble members must share one grid");
    if (!d.all_finite()) throw std::invalid_argument("initial datum has non-finite values");
  }
  const GridFunction reference = params.grid.make();
  if (!grid.same_grid(reference, 1e-9)) {
    throw std::invalid_argument("initial datum grid does not match params.grid");
  }
  Engine engine(params, grid);
  const std::vector<double> times = params.schedule();
  const double dt_min = kDtMinFraction * params.t_final;
  const std::size_t members = data.size();

  std::vector<Trajectory> out(members);
  std::vector<GridFunction> current(data.begin(), data.end());
  std::vector<GridFunction> next(data.begin(), data.end());
  std::vector<BudgetRecord> running(members);
  std::vector<double> cap(members);
  for (std::size_t m = 0; m < members; ++m) {
    out[m].params = params;
    double l1 = 0.0;
    for (double v : data[m].values()) l1 += std::abs(v);
    cap[m] = params.tail_cap * std::max(l1 * grid.dx(), std::numeric_limits<double>::min());
  }

  auto record = [&](double t) {
    for (std::size_t m = 0; m < members; ++m) {
      BudgetRecord b = running[m];
      b.t = t;
      long double l2 = 0.0L;
      for (double v : current[m].values()) l2 += static_cast<long double>(v) * v;
      b.l2_squared = static_cast<double>(l2 * grid.dx());
      out[m].snapshots.push_back({t, current[m]});
      out[m].mass_history.push_back({t, current[m].integral()});
      out[m].budget_history.push_back(b);
    }
  };

  double t = 0.0;
  std::size_t steps = 0;
  for (double target : times) {
    while (t < target) {
      double speed_abs = 0.0;
      std::size_t hot_member = 0;
      std::size_t hot_cell = 0;
      for (std::size_t m = 0; m < members; ++m) {
        std::size_t cell = 0;
        const double a = max_abs(current[m].values(), &cell);
        if (a >= speed_abs) {
          speed_abs = a;
          hot_member = m;
          hot_cell = cell;
        }
      }
      (void)hot_member;
      const double speed = flux_derivative(speed_abs, params.q);
      const double budget = stable_dt(params, speed, grid.dx());
      if (budget < dt_min) {
        std::ostringstream msg;
        msg << "time step collapsed to " << budget << " < " << dt_min << " at t=" << t << " (cell " << hot_cell
            << ", |u|=" << speed_abs << ")";
        throw NumericalAbort(NumericalAbort::Reason::step_collapse, t, hot_cell, msg.str());
      }
      const bool last = budget >= target - t;
      const double dt = last ? target - t : budget;
      const double convective = engine.convective_rate(speed);
      for (std::size_t m = 0; m < members; ++m) {
        const StepStats s = engine.advance(current[m].values(), next[m].values(), dt, convective);
        check_finite(next[m].values(), t + dt);
        running[m].leaked_l1 += s.leaked_l1;
        running[m].leaked_mass += s.leaked_mass;
        running[m].dirichlet += s.dirichlet;
        if (running[m].leaked_l1 > cap[m]) {
          std::ostringstream msg;
          const auto [left, right] = required_domain(data[m], params);
          msg << "tail budget exceeded at t=" << t + dt << ": leaked " << running[m].leaked_l1 << " > cap "
              << cap[m] << "; widen the domain [" << grid.x_min() << ", " << grid.x_max() << "] to about ["
              << left << ", " << right << "]";
          throw NumericalAbort(NumericalAbort::Reason::tail_budget, t + dt, 0, msg.str());
        }
        std::swap(current[m], next[m]);
      }
      t = last ? target : t + dt;
      ++steps;
    }
    record(t);
  }
  for (auto& tr : out) tr.steps = steps;
  return out;
}

Trajectory run(const GridFunction& phi, const SimParams& params) {
  auto result = run_ensemble(std::span<const GridFunction>(&phi, 1), params);
  return std::move(result.front());
}

GridFunction remap_rescaled(const GridFunction& source, double lambda, const GridFunction& target) {
  if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be positive");
  GridFunction out = target.like();
  const double sdx = source.dx();
  const double s0 = source.x_min();
  const auto ns = static_cast<std::ptrdiff_t>(source.size());
  for (std::size_t i = 0; i < target.size(); ++i) {
    const double a = lambda * target.left_edge(i);
    const double b = lambda * target.left_edge(i + 1);
    const double width = b - a;
    auto k0 = static_cast<std::ptrdiff_t>(std::floor((a - s0) / sdx));
    auto k1 = static_cast<std::ptrdiff_t>(std::ceil((b - s0) / sdx));
    k0 = std::max<std::ptrdiff_t>(k0, 0);
    k1 = std::min<std::ptrdiff_t>(k1, ns);
    double acc = 0.0;
    for (std::ptrdiff_t k = k0; k < k1; ++k) {
      const double lo = std::max(a, source.left_edge(static_cast<std::size_t>(k)));
      const double hi = std::min(b, source.left_edge(static_cast<std::size_t>(k) + 1));
      if (hi > lo) acc += source[static_cast<std::size_t>(k)] * ((hi - lo) / width);
    }
    out[i] = lambda * acc;
  }
  return out;
}

Trajectory rescale_trajectory(const Trajectory& trajectory, double lambda, std::span<const double> times,
                              const GridSpec& target) {
  if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be positive");
  if (trajectory.snapshots.empty()) throw std::invalid_argument("empty trajectory");
  const GridFunction grid = target.make();
  const double lq = std::pow(lambda, trajectory.params.q);

  Trajectory out;
  out.params = trajectory.params;
  out.params.lambda = trajectory.params.lambda * lambda;
  out.params.grid = target;
  out.params.output_times.assign(times.begin(), times.end());
  if (!times.empty()) out.params.t_final = times.back();

  const auto& snaps = trajectory.snapshots;
  for (double t : times) {
    const double s = lq * t;
    const double tol = 1e-9 * std::max(1.0, s);
    const GridFunction* exact = nullptr;
    std::size_t upper = snaps.size();
    for (std::size_t i = 0; i < snaps.size(); ++i) {
      if (std::abs(snaps[i].t - s) <= tol) {
        exact = &snaps[i].u;
        break;
      }
      if (snaps[i].t > s) {
        upper = i;
        break;
      }
    }
    GridFunction source;
    if (exact) {
      source = *exact;
    } else {
      if (upper == 0 || upper == snaps.size()) {
        throw std::out_of_range(describe("requested time not bracketed by snapshots (source time)", s));
      }
      const Snapshot& lo = snaps[upper - 1];
      const Snapshot& hi = snaps[upper];
      const double w = (s - lo.t) / (hi.t - lo.t);
      source = lo.u;
      for (std::size_t j = 0; j < source.size(); ++j) source[j] = (1.0 - w) * lo.u[j] + w * hi.u[j];
    }
    GridFunction field = remap_rescaled(source, lambda, grid);
    out.mass_history.push_back({t, field.integral()});
    BudgetRecord b;
    b.t = t;
    out.budget_history.push_back(b);
    out.snapshots.push_back({t, std::move(field)});
  }
  return out;
}

}  // namespace nwave
