#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "nwave/diagnostics.hpp"
#include "nwave/grid.hpp"
#include "nwave/kernel.hpp"
#include "nwave/solver.hpp"

namespace nwave {

/// Writes `contents` to a temporary sibling of `path` and renames it into place.
void write_atomic(const std::filesystem::path& path, const std::string& contents);

/// "t,x,u" rows for every snapshot, 17 significant digits.
std::string snapshots_csv(const Trajectory& traj);
/// "t,mass,leaked_mass,leaked_l1,l2_squared,dirichlet".
std::string mass_history_csv(const Trajectory& traj);

struct SnapshotRow {
  double t;
  double x;
  double u;
};
std::vector<SnapshotRow> parse_snapshots_csv(const std::string& text);

/// Summary rows "sweep_value,metric,value".
struct SummaryRow {
  double sweep_value;
  std::string metric;
  double value;
};
std::string summary_csv(std::span<const SummaryRow> rows);

/// Binary layout (little-endian host order): "NWGF", u32 version = 1,
/// u64 n, f64 dx, f64 x_min, then n f64 values.
std::string encode_binary(const GridFunction& u);
GridFunction decode_binary(const std::string& bytes);

std::string kernel_csv(const Kernel& J);
std::string nwave_csv(const GridFunction& w, double t);

std::string reports_text(std::span<const Report> reports);

}  // namespace nwave
