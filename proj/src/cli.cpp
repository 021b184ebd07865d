#include "nwave/cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>

#include "nwave/experiments.hpp"

namespace nwave {

namespace {

struct Options {
  std::string config;
  std::vector<std::string> sets;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::string target;  // suite or study name
  double mass = 1.0;
  double time = 1.0;
};

Config assemble(const Options& o, Config base = {}) {
  Config cfg = o.config.empty() ? base : load_config(o.config, base);
  for (const auto& s : o.sets) apply_override(cfg, s);
  if (o.seed) cfg.seed = *o.seed;
  validate(cfg);
  return cfg;
}

std::string manifest(const std::string& command, const Config& cfg) {
  return "command = " + command + "\n" + dump_config(cfg);
}

void print_reports(std::ostream& out, const SuiteResult& r) {
  for (const auto& rep : r.reports) write_text(out, rep);
  out << (r.passed() ? "verdict pass\n" : "verdict fail\n");
}

int cmd_simulate(const Options& o, std::ostream& out) {
  const Config cfg = assemble(o);
  const Trajectory tr = run(cfg.initial_datum(), cfg.resolved_sim());
  const std::filesystem::path dir = o.out.empty() ? "." : o.out;
  std::filesystem::create_directories(dir);
  write_atomic(dir / "manifest.txt", manifest("simulate", cfg));
  write_atomic(dir / "snapshots.csv", snapshots_csv(tr));
  write_atomic(dir / "mass_history.csv", mass_history_csv(tr));
  out << "steps " << tr.steps << "\nsnapshots " << tr.snapshots.size() << "\n";
  return exit_pass;
}

int cmd_verify(const Options& o, std::ostream& out) {
  const Config cfg = assemble(o);
  const SuiteResult r = run_suite(o.target, cfg);
  print_reports(out, r);
  if (!o.out.empty()) {
    std::filesystem::create_directories(o.out);
    write_result(o.out, r, manifest("verify " + o.target, cfg));
  }
  return r.passed() ? exit_pass : exit_fail;
}

int cmd_study(const Options& o, std::ostream& out) {
  StudySpec spec = default_study(parse_study_kind(o.target));
  spec.base = assemble(o, spec.base);
  if (!spec.base.sweep.empty()) spec.sweep = spec.base.sweep;
  if (!o.out.empty()) {
    spec.out_dir = o.out;
    std::filesystem::create_directories(spec.out_dir);
  }
  const SuiteResult r = run_study(spec);
  print_reports(out, r);
  if (!o.out.empty()) write_result(o.out, r, manifest("study " + o.target, spec.base));
  return r.passed() ? exit_pass : exit_fail;
}

void emit(const Options& o, std::ostream& out, const std::string& file, const std::string& text) {
  if (o.out.empty()) {
    out << text;
    return;
  }
  std::filesystem::create_directories(o.out);
  write_atomic(std::filesystem::path(o.out) / file, text);
}

int cmd_dump_kernel(const Options& o, std::ostream& out) {
  const Config cfg = assemble(o);
  Kernel J = cfg.sim.kernel.build(cfg.sim.grid.dx);
  if (cfg.sim.lambda != 1.0) J = rescale(J, cfg.sim.lambda);
  emit(o, out, "kernel.csv", kernel_csv(J));
  return exit_pass;
}

int cmd_dump_nwave(const Options& o, std::ostream& out) {
  const Config cfg = assemble(o);
  if (!(o.time > 0.0)) throw ConfigError("--time must be positive");
  const NWave nw(o.mass, cfg.sim.q);
  const auto [lo, hi] = std::minmax(0.0, nw.front(o.time));
  GridSpec g = cfg.sim.grid;
  g.x_min = std::min(g.x_min, lo - 1.0);
  g.x_max = std::max(g.x_max, hi + 1.0);
  emit(o, out, "nwave.csv", nwave_csv(nwave_sample(nw, o.time, g.make(), Sampling::cell_average), o.time));
  return exit_pass;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"nwave: convection with nonlocal diffusion, numerical lab"};
  app.require_subcommand(1);
  Options o;
  auto common = [&o](CLI::App* c) {
    c->add_option("--config", o.config, "config file (key = value lines)");
    c->add_option("--set", o.sets, "override key=value (repeatable)")->allow_extra_args(false);
    c->add_option("--out", o.out, "output directory");
    c->add_option("--seed", o.seed, "seed for randomized suites");
  };
  auto* sim = app.add_subcommand("simulate", "run one simulation and write snapshots");
  auto* ver = app.add_subcommand("verify", "run a verification suite");
  auto* stu = app.add_subcommand("study", "run an end-to-end study");
  auto* dk = app.add_subcommand("dump-kernel", "write the sampled kernel");
  auto* dn = app.add_subcommand("dump-nwave", "write the cell-averaged N-wave");
  for (auto* c : {sim, ver, stu, dk, dn}) common(c);
  ver->add_option("suite", o.target, "suite name")->required();
  stu->add_option("study", o.target, "study name")->required();
  dn->add_option("--mass", o.mass, "total mass M");
  dn->add_option("--time", o.time, "time t");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return exit_pass;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n" << app.help();
    return exit_usage;
  }

  try {
    if (*sim) return cmd_simulate(o, out);
    if (*ver) return cmd_verify(o, out);
    if (*stu) return cmd_study(o, out);
    if (*dk) return cmd_dump_kernel(o, out);
    return cmd_dump_nwave(o, out);
  } catch (const NumericalAbort& e) {
    err << "numerical abort: " << e.what() << "\n";
    return exit_abort;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return exit_usage;
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << "\n";
    return exit_usage;
  } catch (const std::domain_error& e) {
    err << "config error: " << e.what() << "\n";
    return exit_usage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_usage;
  }
}

}  // namespace nwave
