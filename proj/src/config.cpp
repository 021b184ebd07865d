#include "nwave/config.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "nwave/profiles.hpp"

namespace nwave {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  const std::string s = trim(v);
  char* end = nullptr;
  const double d = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || !std::isfinite(d)) {
    throw ConfigError("key '" + key + "' expects a number, got '" + v + "'");
  }
  return d;
}

std::vector<double> to_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (trim(item).empty()) continue;
    out.push_back(to_double(key, item));
  }
  return out;
}

std::uint64_t to_unsigned(const std::string& key, const std::string& v) {
  const std::string s = trim(v);
  if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) {
    throw ConfigError("key '" + key + "' expects a non-negative integer, got '" + v + "'");
  }
  return std::stoull(s);
}

ConvolutionBackend to_backend(const std::string& v) {
  if (v == "auto" || v == "automatic") return ConvolutionBackend::automatic;
  if (v == "direct") return ConvolutionBackend::direct;
  if (v == "fft") return ConvolutionBackend::fft;
  throw ConfigError("key 'backend' expects auto, direct or fft, got '" + v + "'");
}

std::string backend_name(ConvolutionBackend b) {
  switch (b) {
    case ConvolutionBackend::automatic: return "auto";
    case ConvolutionBackend::direct: return "direct";
    case ConvolutionBackend::fft: return "fft";
  }
  return "auto";
}

std::string join(const std::vector<double>& xs) {
  std::ostringstream os;
  os << std::setprecision(17);
  for (std::size_t i = 0; i < xs.size(); ++i) os << (i ? ", " : "") << xs[i];
  return os.str();
}

}  // namespace

void set_key(Config& cfg, const std::string& key, const std::string& raw) {
  const std::string value = trim(raw);
  SimParams& s = cfg.sim;
  DatumParams& d = cfg.datum_params;
  try {
    if (key == "q") s.q = to_double(key, value);
    else if (key == "lambda") s.lambda = to_double(key, value);
    else if (key == "mu") s.mu = to_double(key, value);
    else if (key == "alpha") s.alpha = to_double(key, value);
    else if (key == "cfl") s.cfl = to_double(key, value);
    else if (key == "t_final") s.t_final = to_double(key, value);
    else if (key == "tail_cap") s.tail_cap = to_double(key, value);
    else if (key == "output_times") s.output_times = to_list(key, value);
    else if (key == "backend") s.backend = to_backend(value);
    else if (key == "kernel.family") s.kernel.family = parse_kernel_family(value);
    else if (key == "kernel.width") s.kernel.width = to_double(key, value);
    else if (key == "grid.x_min") s.grid.x_min = to_double(key, value);
    else if (key == "grid.x_max") {
      cfg.auto_x_max = value == "auto";
      if (!cfg.auto_x_max) s.grid.x_max = to_double(key, value);
    } else if (key == "grid.dx") s.grid.dx = to_double(key, value);
    else if (key == "grid.margin") cfg.auto_margin = to_double(key, value);
    else if (key == "datum.kind") cfg.datum = parse_datum_kind(value);
    else if (key == "datum.height") d.height = to_double(key, value);
    else if (key == "datum.left") d.left = to_double(key, value);
    else if (key == "datum.width") d.width = to_double(key, value);
    else if (key == "datum.mass") d.mass = to_double(key, value);
    else if (key == "datum.center") d.center = to_double(key, value);
    else if (key == "datum.sigma") d.sigma = to_double(key, value);
    else if (key == "datum.positive_height") d.positive_height = to_double(key, value);
    else if (key == "datum.negative_height") d.negative_height = to_double(key, value);
    else if (key == "sweep") cfg.sweep = to_list(key, value);
    else if (key == "tol.scheme") cfg.tol_scheme = to_double(key, value);
    else if (key == "tol.quad") cfg.tol_quad = to_double(key, value);
    else if (key == "seed") cfg.seed = to_unsigned(key, value);
    else if (key == "cases") cfg.cases = static_cast<int>(to_unsigned(key, value));
    else throw ConfigError("unknown key '" + key + "'");
    // range errors on single-valued keys are reported at their own line
    SimParams probe;
    if (key == "q") probe.q = s.q;
    else if (key == "lambda") probe.lambda = s.lambda;
    else if (key == "mu") probe.mu = s.mu;
    else if (key == "alpha") probe.alpha = s.alpha;
    else if (key == "cfl") probe.cfl = s.cfl;
    else if (key == "t_final") probe.t_final = s.t_final;
    else if (key == "tail_cap") probe.tail_cap = s.tail_cap;
    else if (key == "kernel.width") probe.kernel.width = s.kernel.width;
    else if (key == "grid.dx") probe.grid.dx = s.grid.dx;
    probe.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  cfg.assigned[key] = value;
}

namespace {

// Right end of the datum support and its L^1 norm.
std::pair<double, double> datum_extent(const Config& cfg) {
  const DatumParams& d = cfg.datum_params;
  switch (cfg.datum) {
    case DatumKind::box: return {d.left + d.width, std::abs(d.height) * d.width};
    case DatumKind::dipole_zero_mass: return {d.left + 2.0 * d.width, 2.0 * std::abs(d.height) * d.width};
    case DatumKind::two_boxes_signed: return {1.0, std::abs(d.positive_height) + std::abs(d.negative_height)};
    case DatumKind::gaussian: return {d.center + 4.0 * d.sigma, std::abs(d.mass)};
  }
  return {0.0, 0.0};
}

}  // namespace

constexpr double kMaxCells = 5e7;

GridSpec Config::grid() const {
  GridSpec g = sim.grid;
  if (auto_x_max) {
    const auto [right, l1] = datum_extent(*this);
    const double front = l1 > 0.0 ? NWave(l1, sim.q).front(sim.t_final) : 0.0;
    g.x_max = std::ceil(right + front + auto_margin);
  }
  return g;
}

SimParams Config::resolved_sim() const {
  SimParams s = sim;
  s.grid = grid();
  return s;
}

GridFunction Config::initial_datum() const {
  try {
    return make_initial_datum(datum, datum_params, grid().make());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

void validate(const Config& cfg) {
  try {
    cfg.resolved_sim().validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  const GridSpec g = cfg.grid();
  const double cells = (g.x_max - g.x_min) / g.dx;
  if (!(cells <= kMaxCells)) {
    std::ostringstream msg;
    msg << "grid [" << g.x_min << ", " << g.x_max << "] at dx=" << g.dx << " needs " << cells
        << " cells, more than the limit " << kMaxCells;
    throw ConfigError(msg.str());
  }
  if (!(cfg.tol_scheme >= 0.0)) throw ConfigError("tol.scheme must be >= 0");
  if (!(cfg.tol_quad >= 0.0)) throw ConfigError("tol.quad must be >= 0");
  if (cfg.cases < 1) throw ConfigError("cases must be >= 1");
}

Config parse_config(const std::string& text, const std::string& source, Config cfg) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = source + ":" + std::to_string(lineno) + ": ";
    if (eq == std::string::npos) throw ConfigError(where + "expected 'key = value', got '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    try {
      set_key(cfg, key, line.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError(where + e.what());
    }
  }
  try {
    validate(cfg);
  } catch (const ConfigError& e) {
    throw ConfigError(source + ": " + e.what());
  }
  return cfg;
}

Config load_config(const std::filesystem::path& path, Config base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path.string(), std::move(base));
}

void apply_override(Config& cfg, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError("override '" + assignment + "' is not key=value");
  try {
    set_key(cfg, trim(assignment.substr(0, eq)), assignment.substr(eq + 1));
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("--set: ") + e.what());
  }
}

std::string dump_config(const Config& cfg) {
  const SimParams& s = cfg.sim;
  const DatumParams& d = cfg.datum_params;
  const GridSpec g = cfg.grid();
  std::ostringstream os;
  os << std::setprecision(17);
  os << "q = " << s.q << "\nlambda = " << s.lambda << "\nmu = " << s.mu << "\nalpha = " << s.alpha
     << "\ncfl = " << s.cfl << "\nt_final = " << s.t_final << "\ntail_cap = " << s.tail_cap
     << "\noutput_times = " << join(s.output_times) << "\nbackend = " << backend_name(s.backend)
     << "\nkernel.family = " << to_string(s.kernel.family) << "\nkernel.width = " << s.kernel.width
     << "\ngrid.x_min = " << g.x_min << "\ngrid.x_max = " << g.x_max << "\ngrid.dx = " << g.dx
     << "\ndatum.kind = " << to_string(cfg.datum) << "\ndatum.height = " << d.height << "\ndatum.left = " << d.left
     << "\ndatum.width = " << d.width << "\ndatum.mass = " << d.mass << "\ndatum.center = " << d.center
     << "\ndatum.sigma = " << d.sigma << "\ndatum.positive_height = " << d.positive_height
     << "\ndatum.negative_height = " << d.negative_height << "\nsweep = " << join(cfg.sweep)
     << "\ntol.scheme = " << cfg.tol_scheme << "\ntol.quad = " << cfg.tol_quad << "\nseed = " << cfg.seed
     << "\ncases = " << cfg.cases << '\n';
  return os.str();
}

}  // namespace nwave
