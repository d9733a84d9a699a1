#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "phsadapt/geometry.hpp"
#include "phsadapt/kernel_ops.hpp"
#include "phsadapt/local_interp.hpp"
#include "phsadapt/types.hpp"

namespace phsadapt {

enum class Termination { Converged, LevelLimit, NodeCap };

std::string to_string(Termination t);

struct AdaptiveConfig {
  int dim = 1;
  /// Quadrature integrates over [-1, 1]^d; Differentiation approximates the
  /// gradient at every node.
  Family family = Family::Quadrature;
  int m = 1;
  int mu = 2;
  /// Stencil size; 0 selects M_{d, m+mu}.
  std::size_t n = 0;
  double eps = 1e-5;
  int l_max = 60;
  std::size_t n_cap = 316227;  // floor(10^5.5)
  /// Recompute only points that are new or whose neighborhood changed while
  /// their last estimate exceeded eps.
  bool violators_only = false;
  /// Handling of stencils that are not unisolvent for degree m+mu (the
  /// n = M_{d,m+mu} nearest points of a lattice never are in 2D).
  SingularPolicy singular = SingularPolicy::LeastSquares;
  /// 0 = hardware concurrency.
  unsigned workers = 0;
  int count_per_axis = 10;

  std::size_t stencil_size() const;
  /// Throws InvalidArgument for inconsistent settings.
  void validate() const;
};

/// Exact values used to report actual errors.
struct ExactOracle {
  std::function<double(const Cell&)> cell_integral;
  std::function<Point(const Point&)> gradient;
  std::optional<double> total_integral;
};

struct PointRecord {
  std::size_t id = 0;
  Point x{};
  /// Level at which the values were last computed.
  int level = 0;
  double estimate = 0.0;
  /// Degree-m approximation (one entry per operator component).
  Eigen::VectorXd value;
  /// NaN unless an oracle was given.
  double actual = 0.0;
  bool ill_conditioned = false;
  bool rank_deficient = false;
};

struct LevelStats {
  int level = 0;
  std::size_t nodes = 0;
  std::size_t eval_points = 0;
  std::size_t recomputed = 0;
  std::size_t refined = 0;
};

struct AdaptiveReport {
  AdaptiveConfig config;
  RefinementState state;
  /// Final records ordered by id: active cells (quadrature) or nodes.
  std::vector<PointRecord> records;
  std::vector<LevelStats> levels;
  Termination reason = Termination::Converged;
  std::size_t final_nodes = 0;
  int levels_used = 0;
  /// Quadrature: sum of the per-cell values. Differentiation: largest
  /// per-point estimate.
  double global_value = 0.0;
  /// Quadrature: |global_value - exact|. Differentiation: largest actual
  /// per-point error. NaN without an oracle.
  double global_error = 0.0;
  std::size_t ill_conditioned_count = 0;
  std::size_t rank_deficient_count = 0;
};

using ScalarField = std::function<double(const Point&)>;

/// Level loop: find neighborhoods, recompute weight pairs on points that are
/// new or whose neighborhood changed, refine where the estimate exceeds eps.
/// Stops when nothing needs recomputing, after l_max refinement levels or
/// once the node count exceeds n_cap; the latter two finish with one
/// evaluation pass without refinement. f must be safe to call concurrently.
AdaptiveReport run_adaptive(const ScalarField& f, const AdaptiveConfig& config,
                            const ExactOracle* oracle = nullptr);

/// Degree-m approximations at the requested evaluation ids; unknown ids
/// throw InvalidArgument.
std::vector<PointRecord> evaluate_final(const AdaptiveReport& report, std::span<const std::size_t> ids);

/// errors.csv: id,x[,y],estimate,actual,level
void write_errors_csv(const std::filesystem::path& path, const AdaptiveReport& report);
/// summary.csv: reason,N,levels,global_value,global_error
void write_summary_csv(const std::filesystem::path& path, const AdaptiveReport& report);
/// levels.csv: level,N,K,recomputed,refined
void write_levels_csv(const std::filesystem::path& path, const AdaptiveReport& report);

}  // namespace phsadapt
