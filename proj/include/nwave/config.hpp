#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "nwave/profiles.hpp"
#include "nwave/solver.hpp"

namespace nwave {

/// Bad configuration; the message names the source and line when known.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Config {
  Config() {
    sim.grid.x_min = -20.0;
    sim.grid.x_max = 20.0;
  }

  SimParams sim;
  /// grid.x_max = auto: r(t_final) for ||phi||_1 plus auto_margin.
  bool auto_x_max = true;
  double auto_margin = 20.0;

  DatumKind datum = DatumKind::box;
  DatumParams datum_params;

  std::vector<double> sweep;
  double tol_scheme = 0.0;
  double tol_quad = 1e-3;
  std::uint64_t seed = 20240611;
  int cases = 1000;

  /// Every key that was set, in the order of the last assignment.
  std::map<std::string, std::string> assigned;

  /// Grid with auto_x_max resolved.
  GridSpec grid() const;
  GridFunction initial_datum() const;
  SimParams resolved_sim() const;
};

/// Sets one dotted key. Throws ConfigError (without location) on unknown
/// keys or malformed values.
void set_key(Config& cfg, const std::string& key, const std::string& value);

/// Parses "key = value" lines with '#' comments on top of `base`, then
/// re-validates the simulation parameters. Errors carry "source:line: ".
Config parse_config(const std::string& text, const std::string& source, Config base = {});
Config load_config(const std::filesystem::path& path, Config base = {});

/// Applies "key=value" overrides (command line --set).
void apply_override(Config& cfg, const std::string& assignment);

/// Validates the assembled config; ConfigError on failure.
void validate(const Config& cfg);

/// Canonical key = value dump (manifest files).
std::string dump_config(const Config& cfg);

}  // namespace nwave
