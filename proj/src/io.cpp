#include "nwave/io.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace nwave {

namespace fs = std::filesystem;

void write_atomic(const fs::path& path, const std::string& contents) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::string snapshots_csv(const Trajectory& traj) {
  std::ostringstream os;
  os << std::setprecision(17) << "t,x,u\n";
  for (const auto& s : traj.snapshots) {
    for (std::size_t j = 0; j < s.u.size(); ++j) os << s.t << ',' << s.u.center(j) << ',' << s.u[j] << '\n';
  }
  return os.str();
}

std::string mass_history_csv(const Trajectory& traj) {
  std::ostringstream os;
  os << std::setprecision(17) << "t,mass,leaked_mass,leaked_l1,l2_squared,dirichlet\n";
  for (std::size_t i = 0; i < traj.mass_history.size(); ++i) {
    const auto& b = traj.budget_history[i];
    os << traj.mass_history[i].t << ',' << traj.mass_history[i].mass << ',' << b.leaked_mass << ','
       << b.leaked_l1 << ',' << b.l2_squared << ',' << b.dirichlet << '\n';
  }
  return os.str();
}

std::vector<SnapshotRow> parse_snapshots_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "t,x,u") throw std::invalid_argument("snapshot CSV lacks the t,x,u header");
  std::vector<SnapshotRow> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    SnapshotRow r{};
    char c1 = 0, c2 = 0;
    std::istringstream ls(line);
    if (!(ls >> r.t >> c1 >> r.x >> c2 >> r.u) || c1 != ',' || c2 != ',') {
      throw std::invalid_argument("malformed snapshot CSV line " + std::to_string(lineno));
    }
    rows.push_back(r);
  }
  return rows;
}

std::string summary_csv(std::span<const SummaryRow> rows) {
  std::ostringstream os;
  os << std::setprecision(17) << "sweep_value,metric,value\n";
  for (const auto& r : rows) os << r.sweep_value << ',' << r.metric << ',' << r.value << '\n';
  return os.str();
}

namespace {

constexpr char kMagic[4] = {'N', 'W', 'G', 'F'};
constexpr std::uint32_t kVersion = 1;

template <class T>
void put(std::string& s, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  s.append(buf, sizeof(T));
}

template <class T>
T get(const std::string& s, std::size_t& pos) {
  if (pos + sizeof(T) > s.size()) throw std::invalid_argument("binary grid dump is truncated");
  T v;
  std::memcpy(&v, s.data() + pos, sizeof(T));
  pos += sizeof(T);
  return v;
}

}  // namespace

std::string encode_binary(const GridFunction& u) {
  std::string s(kMagic, 4);
  put<std::uint32_t>(s, kVersion);
  put<std::uint64_t>(s, u.size());
  put<double>(s, u.dx());
  put<double>(s, u.x_min());
  for (double v : u.values()) put<double>(s, v);
  return s;
}

GridFunction decode_binary(const std::string& bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw std::invalid_argument("not a grid dump (bad magic)");
  }
  std::size_t pos = 4;
  const auto version = get<std::uint32_t>(bytes, pos);
  if (version != kVersion) throw std::invalid_argument("unsupported grid dump version " + std::to_string(version));
  const auto n = get<std::uint64_t>(bytes, pos);
  const double dx = get<double>(bytes, pos);
  const double x_min = get<double>(bytes, pos);
  if (bytes.size() - pos != n * sizeof(double)) throw std::invalid_argument("grid dump size does not match header");
  std::vector<double> values(n);
  for (auto& v : values) v = get<double>(bytes, pos);
  return GridFunction(x_min, dx, std::move(values));
}

std::string kernel_csv(const Kernel& J) {
  std::ostringstream os;
  os << std::setprecision(17) << "x,J\n";
  for (int k = -J.radius_cells(); k <= J.radius_cells(); ++k) os << k * J.dx() << ',' << J.at(k) << '\n';
  return os.str();
}

std::string nwave_csv(const GridFunction& w, double t) {
  std::ostringstream os;
  os << std::setprecision(17) << "t,x,u\n";
  for (std::size_t j = 0; j < w.size(); ++j) os << t << ',' << w.center(j) << ',' << w[j] << '\n';
  return os.str();
}

std::string reports_text(std::span<const Report> reports) {
  std::ostringstream os;
  for (const auto& r : reports) write_text(os, r);
  return os.str();
}

}  // namespace nwave
