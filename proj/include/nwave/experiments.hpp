#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "nwave/config.hpp"
#include "nwave/diagnostics.hpp"
#include "nwave/io.hpp"

namespace nwave {

struct SuiteResult {
  std::vector<Report> reports;
  std::vector<SummaryRow> summary;

  bool passed() const { return all_passed(reports); }
  const Report& report(const std::string& name) const;
};

/// Worker count: NWAVE_THREADS if set and positive, else the hardware count.
std::size_t worker_count();

/// Runs task(i) for i in [0, n) on a pool of worker_count() threads and
/// rethrows the first exception. Results must be written to per-index slots.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& task);

// Verification suites. Each builds its runs from cfg and throws ConfigError
// when the configuration violates the suite's preconditions.
const std::vector<std::string>& suite_names();
SuiteResult run_suite(const std::string& name, const Config& cfg);

SuiteResult suite_oleinik(const Config& cfg);
SuiteResult suite_decay(const Config& cfg);
SuiteResult suite_contraction(const Config& cfg);
SuiteResult suite_comparison(const Config& cfg);
SuiteResult suite_entropy(const Config& cfg);
SuiteResult suite_tails(const Config& cfg);
SuiteResult suite_nonlocal_comparison(const Config& cfg);
SuiteResult suite_kernel_bound(const Config& cfg);

/// Random ComparisonCase generator used by the nonlocal comparison suite.
ComparisonCase random_comparison_case(const Kernel& J, std::uint64_t seed, std::size_t index);

enum class StudyKind {
  long_time_nonnegative,
  long_time_sign_changing,
  vanishing_viscosity,
  rescaling_family,
  kernel_bound_sweep
};

std::string_view to_string(StudyKind kind);
StudyKind parse_study_kind(std::string_view name);

struct StudySpec {
  StudyKind kind = StudyKind::long_time_nonnegative;
  Config base;
  std::vector<double> sweep;
  std::filesystem::path out_dir;
};

/// Desk-scale defaults for each study; cfg.sweep (when set) replaces the sweep.
StudySpec default_study(StudyKind kind);

SuiteResult run_long_time(const StudySpec& spec);
SuiteResult run_vanishing_viscosity(const StudySpec& spec);
SuiteResult run_rescaling_family(const StudySpec& spec);
SuiteResult run_kernel_bound_sweep(const StudySpec& spec);
SuiteResult run_study(const StudySpec& spec);

/// Writes reports.txt, reports.csv, summary.csv and verdict.txt into dir.
void write_result(const std::filesystem::path& dir, const SuiteResult& result, const std::string& manifest);

}  // namespace nwave
