#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "phsadapt/adaptive_driver.hpp"
#include "phsadapt/baselines.hpp"
#include "phsadapt/test_functions.hpp"

namespace phsadapt {

/// Settings shared by the experiment commands. Every field has a key in the
/// key=value config file format (see README).
struct RunConfig {
  FunctionKind function = FunctionKind::F2;
  double a = 1000.0;
  int m = 1;
  int mu = 2;
  std::size_t n = 0;
  double eps = 1e-5;
  std::uint64_t seed = 1;
  /// Explicit shifts; when empty they are drawn from `seed`.
  std::vector<Point> shifts;
  int l_max = 60;
  std::size_t n_cap = 316227;
  std::filesystem::path out_dir = ".";
  unsigned workers = 0;
  bool violators_only = false;
  SingularPolicy singular = SingularPolicy::LeastSquares;
};

/// Applies one key=value setting. Throws InvalidArgument for unknown keys or
/// malformed values.
void apply_setting(RunConfig& config, const std::string& key, const std::string& value);

/// Reads key=value lines ('#' starts a comment, blank lines are skipped).
std::map<std::string, std::string> read_config_file(const std::filesystem::path& path);

/// "x1;x2;..." (d = 1) or "x1,y1;x2,y2;..." (d = 2).
std::vector<Point> parse_shifts(const std::string& text);

TestFunction make_test_function(const RunConfig& config, int dim);

struct ExperimentResult {
  AdaptiveReport report;
  /// Largest per-point actual error.
  double max_error = 0.0;
  /// Median of estimate / actual over points with actual > 1e-14 (NaN if none).
  double median_ratio = 0.0;
};

/// Runs the adaptive driver on the configured test function with exact
/// errors, and writes nodes.csv, cells.csv (quadrature), errors.csv,
/// summary.csv and levels.csv into config.out_dir when write_files is set.
ExperimentResult run_experiment(const RunConfig& config, Family family, int dim, bool write_files = true);

struct SweepConfig {
  RunConfig base;
  int dim = 1;
  Family family = Family::Quadrature;
  std::vector<double> a_values{1.0, 10.0, 100.0, 1000.0};
  std::vector<double> eps_values{1e-7, 1e-6, 1e-5, 1e-4};
  int seeds = 10;
};

struct SweepCell {
  double a = 0.0;
  double eps = 0.0;
  double mean_nodes = 0.0;
  double mean_max_error = 0.0;
  double mean_global_error = 0.0;
};

/// Runs every (a, eps, seed) combination; seeds are base.seed, base.seed+1, ...
/// Writes sweep_runs.csv and sweep.csv into base.out_dir.
std::vector<SweepCell> run_sweep(const SweepConfig& config, bool write_files = true);

struct TimingRow {
  int d = 0;
  int m = 0;
  int mu = 0;
  std::size_t n = 0;
  double tau_m = 0.0;
  double tau_mmu = 0.0;
  double tau_ext = 0.0;
};

/// Mean seconds per solve over `reps` random stencils with n = M_{d,m+mu}:
/// tau_m for the degree-m weights, tau_mmu for a direct degree-(m+mu) solve,
/// tau_ext for the extension from the degree-m factorization. Single threaded.
std::vector<TimingRow> bench_timing(const std::vector<int>& dims, const std::vector<int>& ms,
                                    const std::vector<int>& mus, int reps, std::uint64_t seed);
void write_timing_csv(const std::filesystem::path& path, const std::vector<TimingRow>& rows);

/// A stencil of n nearest points from a random cloud around a random center.
Stencil random_stencil(int dim, int m, int mu, std::size_t n, std::uint64_t seed);

struct TrapezoidRun {
  TrapezoidResult result;
  double exact = 0.0;
  double error = 0.0;
  /// Largest |trapezoid - exact| over the accepted subintervals.
  double max_error = 0.0;
};

/// Adaptive trapezoid rule for the configured 1D function on [-1, 1];
/// writes trapz_summary.csv when write_files is set.
TrapezoidRun run_trapezoid(const RunConfig& config, bool write_files = true);

}  // namespace phsadapt
