#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <unordered_map>
#include <utility>
#include <vector>

#include "phsadapt/kdtree.hpp"
#include "phsadapt/kernel_ops.hpp"
#include "phsadapt/types.hpp"

namespace phsadapt {

/// Unique points in the cube [-1, 1]^d. Points closer than 1e-12 to an
/// existing node are merged with it.
class NodeSet {
 public:
  static constexpr double kMergeDistance = 1e-12;

  explicit NodeSet(int dim);

  int dim() const { return dim_; }
  std::size_t size() const { return points_.size(); }
  const Point& operator[](NodeId i) const { return points_[i]; }
  const std::vector<Point>& points() const { return points_; }

  /// Inserts p unless an existing node lies within kMergeDistance; returns
  /// the node id and whether it was new. Coordinates within 1e-12 outside
  /// the cube are clamped; anything farther throws InvalidArgument.
  std::pair<NodeId, bool> insert(const Point& p);
  std::optional<NodeId> find(const Point& p) const;
  bool in_domain(const Point& p) const;

  /// Rebuilds the spatial index over the current points.
  void rebuild_index();
  bool index_current() const { return index_.size() == points_.size(); }

  /// The n nearest nodes ordered by distance, ties by lower id. Uses the
  /// index when it is current and a linear scan otherwise. Throws
  /// InsufficientNodes when n exceeds the node count.
  std::vector<NodeId> nearest_neighbors(const Point& q, std::size_t n) const;

 private:
  using Key = std::array<std::int64_t, 3>;
  struct KeyHash {
    std::size_t operator()(const Key& k) const noexcept;
  };

  Key key_of(const Point& p) const;
  std::optional<NodeId> find_near(const Point& p) const;

  int dim_;
  std::vector<Point> points_;
  std::unordered_map<Key, std::vector<NodeId>, KeyHash> buckets_;
  KdTree index_;
};

/// One cell of a tessellation with the ids of its vertices.
struct TessCell {
  std::size_t id = 0;
  std::array<NodeId, 3> vertices{};
  Cell geometry;
  bool active = true;
};

/// Intervals (d = 1) or triangles (d = 2) partitioning the domain. Cell ids
/// are never reused; refined cells are deactivated.
class Tessellation {
 public:
  std::size_t add(const std::array<NodeId, 3>& vertices, const Cell& geometry);
  void deactivate(std::size_t id);

  const TessCell& operator[](std::size_t id) const { return cells_[id]; }
  std::size_t total_count() const { return cells_.size(); }
  std::size_t active_count() const { return active_; }
  std::vector<std::size_t> active_ids() const;
  double total_measure() const;

 private:
  std::vector<TessCell> cells_;
  std::size_t active_ = 0;
};

enum class Family { Quadrature, Differentiation };

struct EvalPoint {
  std::size_t id = 0;
  Point x{};
};

/// Node set, evaluation set, tessellation and neighborhood cache of the
/// adaptive loop at one refinement level.
struct RefinementState {
  int dim = 1;
  Family family = Family::Quadrature;
  int level = 0;
  double initial_spacing = 2.0 / 9.0;
  NodeSet nodes{1};
  Tessellation tessellation;
  /// Neighborhoods N_{k,n} of the current level keyed by evaluation id.
  std::unordered_map<std::size_t, std::vector<NodeId>> neighborhoods;
  /// Evaluation ids recomputed at the current level.
  std::vector<std::size_t> dirty;

  /// Quadrature: barycenters of the active cells (id = cell id).
  /// Differentiation: the nodes themselves (id = node id).
  std::vector<EvalPoint> evaluation_points() const;
};

/// count^d equally spaced points on [-1, 1]^d including the faces.
NodeSet initial_grid(int dim, int count_per_axis = 10);

/// Free-function form of NodeSet::nearest_neighbors.
std::vector<NodeId> nearest_neighbors(const NodeSet& nodes, const Point& q, std::size_t n);

/// Tessellation of the node set: consecutive intervals in 1D, Delaunay
/// triangles in 2D.
Tessellation tessellate(const NodeSet& nodes);

/// Initial state: grid, index and (for quadrature) the tessellation.
RefinementState make_initial_state(int dim, Family family, int count_per_axis = 10);

/// Splits cell `id`: 1D inserts the midpoint and replaces the interval by its
/// halves; 2D inserts the barycenter and edge midpoints and replaces the
/// triangle by the Delaunay triangulation of those seven points. Returns the
/// ids of the new cells.
std::vector<std::size_t> refine_quadrature_cell(RefinementState& state, std::size_t id);

/// Adds nodes around node `id`: in 1D the midpoints toward its two nearest
/// other nodes in the cached neighborhood; in 2D the eight points at radius
/// h0 / 2^(level+1) along the axes and diagonals. Candidates outside the
/// domain are discarded. Returns the ids of nodes that were actually new.
std::vector<NodeId> refine_differentiation_point(RefinementState& state, NodeId id);

void write_nodes_csv(const std::filesystem::path& path, const NodeSet& nodes);
void write_cells_csv(const std::filesystem::path& path, const Tessellation& tess, int dim);

}  // namespace phsadapt
