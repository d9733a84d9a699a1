#include "phsadapt/geometry.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>
#include <fmt/os.h>

#include "phsadapt/delaunay.hpp"
#include "phsadapt/errors.hpp"

namespace phsadapt {

namespace {

constexpr double kDomainSlack = 1e-12;

std::vector<NodeId> brute_force_nearest(const std::vector<Point>& pts, const Point& q, std::size_t n) {
  std::vector<std::pair<double, NodeId>> d(pts.size());
  for (NodeId i = 0; i < pts.size(); ++i) d[i] = {squared_distance(pts[i], q), i};
  std::partial_sort(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(n), d.end());
  std::vector<NodeId> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = d[i].second;
  return out;
}

}  // namespace

// ---- NodeSet -------------------------------------------------------------

NodeSet::NodeSet(int dim) : dim_(dim) {
  if (dim < 1 || dim > 3) throw InvalidArgument(fmt::format("NodeSet: dimension {} not in 1..3", dim));
}

std::size_t NodeSet::KeyHash::operator()(const Key& k) const noexcept {
  std::size_t h = 1469598103934665603ULL;
  for (auto v : k) {
    h ^= static_cast<std::size_t>(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  }
  return h;
}

NodeSet::Key NodeSet::key_of(const Point& p) const {
  Key k{0, 0, 0};
  for (int j = 0; j < dim_; ++j) {
    k[static_cast<std::size_t>(j)] = static_cast<std::int64_t>(std::floor(p[static_cast<std::size_t>(j)] / kMergeDistance));
  }
  return k;
}

std::optional<NodeId> NodeSet::find_near(const Point& p) const {
  const Key base = key_of(p);
  const int span0 = 1;
  const int span1 = dim_ >= 2 ? 1 : 0;
  const int span2 = dim_ >= 3 ? 1 : 0;
  std::optional<NodeId> best;
  double best_d = kMergeDistance * kMergeDistance;
  for (int a = -span0; a <= span0; ++a) {
    for (int b = -span1; b <= span1; ++b) {
      for (int c = -span2; c <= span2; ++c) {
        const Key k{base[0] + a, base[1] + b, base[2] + c};
        auto it = buckets_.find(k);
        if (it == buckets_.end()) continue;
        for (NodeId id : it->second) {
          const double d = squared_distance(points_[id], p);
          if (d <= best_d && (!best || id < *best || d < best_d)) {
            best = id;
            best_d = d;
          }
        }
      }
    }
  }
  return best;
}

bool NodeSet::in_domain(const Point& p) const {
  for (int j = 0; j < dim_; ++j) {
    const double v = p[static_cast<std::size_t>(j)];
    if (!(v >= -1.0 - kDomainSlack && v <= 1.0 + kDomainSlack)) return false;
  }
  return true;
}

std::optional<NodeId> NodeSet::find(const Point& p) const { return find_near(p); }

std::pair<NodeId, bool> NodeSet::insert(const Point& p_in) {
  if (!in_domain(p_in)) {
    throw InvalidArgument(fmt::format("NodeSet: point ({}, {}) outside [-1, 1]^{}", p_in[0], p_in[1], dim_));
  }
  Point p{0.0, 0.0, 0.0};
  for (int j = 0; j < dim_; ++j) {
    const auto jj = static_cast<std::size_t>(j);
    p[jj] = std::clamp(p_in[jj], -1.0, 1.0);
  }
  if (auto hit = find_near(p)) return {*hit, false};
  const NodeId id = points_.size();
  points_.push_back(p);
  buckets_[key_of(p)].push_back(id);
  return {id, true};
}

void NodeSet::rebuild_index() { index_ = KdTree(points_, dim_); }

std::vector<NodeId> NodeSet::nearest_neighbors(const Point& q, std::size_t n) const {
  if (n > points_.size()) {
    throw InsufficientNodes(fmt::format("nearest_neighbors: {} requested, {} available", n, points_.size()));
  }
  if (index_current()) return index_.nearest(q, n);
  return brute_force_nearest(points_, q, n);
}

std::vector<NodeId> nearest_neighbors(const NodeSet& nodes, const Point& q, std::size_t n) {
  return nodes.nearest_neighbors(q, n);
}

// ---- Tessellation ----------------------------------------------------------

std::size_t Tessellation::add(const std::array<NodeId, 3>& vertices, const Cell& geometry) {
  const std::size_t id = cells_.size();
  cells_.push_back(TessCell{id, vertices, geometry, true});
  ++active_;
  return id;
}

void Tessellation::deactivate(std::size_t id) {
  if (id >= cells_.size()) throw InvalidArgument(fmt::format("Tessellation: no cell {}", id));
  if (cells_[id].active) {
    cells_[id].active = false;
    --active_;
  }
}

std::vector<std::size_t> Tessellation::active_ids() const {
  std::vector<std::size_t> out;
  out.reserve(active_);
  for (const auto& c : cells_)
    if (c.active) out.push_back(c.id);
  return out;
}

double Tessellation::total_measure() const {
  double s = 0.0;
  for (const auto& c : cells_)
    if (c.active) s += c.geometry.measure();
  return s;
}

// ---- construction ------------------------------------------------------------

NodeSet initial_grid(int dim, int count_per_axis) {
  if (dim < 1 || dim > 2) throw InvalidArgument(fmt::format("initial_grid: dimension {} not in 1..2", dim));
  if (count_per_axis < 2) throw InvalidArgument("initial_grid: need at least 2 points per axis");
  const double h = 2.0 / (count_per_axis - 1);
  auto coord = [&](int i) { return i == count_per_axis - 1 ? 1.0 : -1.0 + h * i; };
  NodeSet s(dim);
  if (dim == 1) {
    for (int i = 0; i < count_per_axis; ++i) s.insert(make_point(coord(i)));
  } else {
    for (int j = 0; j < count_per_axis; ++j)
      for (int i = 0; i < count_per_axis; ++i) s.insert(make_point(coord(i), coord(j)));
  }
  s.rebuild_index();
  return s;
}

Tessellation tessellate(const NodeSet& nodes) {
  Tessellation t;
  if (nodes.dim() == 1) {
    std::vector<NodeId> order(nodes.size());
    for (NodeId i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](NodeId a, NodeId b) { return nodes[a][0] < nodes[b][0]; });
    if (order.size() < 2) throw DegenerateInput("tessellate: need at least 2 nodes in 1D");
    for (std::size_t i = 0; i + 1 < order.size(); ++i) {
      t.add({order[i], order[i + 1], 0}, Cell::interval(nodes[order[i]][0], nodes[order[i + 1]][0]));
    }
    return t;
  }
  if (nodes.dim() != 2) throw InvalidArgument("tessellate: only d = 1, 2");
  for (const auto& tri : delaunay_triangulate(nodes.points())) {
    t.add({tri[0], tri[1], tri[2]}, Cell::triangle(nodes[tri[0]], nodes[tri[1]], nodes[tri[2]]));
  }
  return t;
}

RefinementState make_initial_state(int dim, Family family, int count_per_axis) {
  RefinementState s;
  s.dim = dim;
  s.family = family;
  s.level = 0;
  s.initial_spacing = 2.0 / (count_per_axis - 1);
  s.nodes = initial_grid(dim, count_per_axis);
  if (family == Family::Quadrature) s.tessellation = tessellate(s.nodes);
  return s;
}

std::vector<EvalPoint> RefinementState::evaluation_points() const {
  std::vector<EvalPoint> out;
  if (family == Family::Quadrature) {
    for (std::size_t id : tessellation.active_ids()) out.push_back({id, tessellation[id].geometry.barycenter()});
  } else {
    out.reserve(nodes.size());
    for (NodeId i = 0; i < nodes.size(); ++i) out.push_back({i, nodes[i]});
  }
  return out;
}

// ---- refinement ------------------------------------------------------------

std::vector<std::size_t> refine_quadrature_cell(RefinementState& state, std::size_t id) {
  if (id >= state.tessellation.total_count() || !state.tessellation[id].active) {
    throw InvalidArgument(fmt::format("refine_quadrature_cell: no active cell {}", id));
  }
  const TessCell cell = state.tessellation[id];
  std::vector<std::size_t> created;

  if (state.dim == 1) {
    const NodeId a = cell.vertices[0];
    const NodeId b = cell.vertices[1];
    const NodeId mid = state.nodes.insert(midpoint(state.nodes[a], state.nodes[b])).first;
    state.tessellation.deactivate(id);
    created.push_back(state.tessellation.add({a, mid, 0}, Cell::interval(state.nodes[a][0], state.nodes[mid][0])));
    created.push_back(state.tessellation.add({mid, b, 0}, Cell::interval(state.nodes[mid][0], state.nodes[b][0])));
    return created;
  }

  // Local point set: 3 vertices, 3 edge midpoints, barycenter.
  std::array<NodeId, 7> ids{};
  for (std::size_t i = 0; i < 3; ++i) ids[i] = cell.vertices[i];
  for (std::size_t i = 0; i < 3; ++i) {
    ids[3 + i] = state.nodes.insert(midpoint(state.nodes[cell.vertices[i]], state.nodes[cell.vertices[(i + 1) % 3]])).first;
  }
  ids[6] = state.nodes.insert(cell.geometry.barycenter()).first;

  std::vector<Point> local(7);
  for (std::size_t i = 0; i < 7; ++i) local[i] = state.nodes[ids[i]];
  const auto tris = delaunay_triangulate(local);

  state.tessellation.deactivate(id);
  for (const auto& tri : tris) {
    created.push_back(state.tessellation.add({ids[tri[0]], ids[tri[1]], ids[tri[2]]},
                                             Cell::triangle(local[tri[0]], local[tri[1]], local[tri[2]])));
  }
  return created;
}

std::vector<NodeId> refine_differentiation_point(RefinementState& state, NodeId id) {
  if (id >= state.nodes.size()) throw InvalidArgument(fmt::format("refine_differentiation_point: no node {}", id));
  const Point x = state.nodes[id];
  std::vector<Point> candidates;

  if (state.dim == 1) {
    std::vector<NodeId> hood;
    if (auto it = state.neighborhoods.find(id); it != state.neighborhoods.end()) {
      hood = it->second;
    } else {
      hood = state.nodes.nearest_neighbors(x, std::min<std::size_t>(3, state.nodes.size()));
    }
    std::sort(hood.begin(), hood.end(), [&](NodeId a, NodeId b) {
      const double da = squared_distance(state.nodes[a], x);
      const double db = squared_distance(state.nodes[b], x);
      return da < db || (da == db && a < b);
    });
    int taken = 0;
    for (NodeId j : hood) {
      if (j == id) continue;
      candidates.push_back(midpoint(x, state.nodes[j]));
      if (++taken == 2) break;
    }
  } else {
    const double r = state.initial_spacing / std::ldexp(1.0, state.level + 1);
    const double s = (std::sqrt(2.0) / 2.0) * r;
    const double axis[4][2] = {{r, 0.0}, {-r, 0.0}, {0.0, r}, {0.0, -r}};
    const double diag[4][2] = {{s, s}, {-s, -s}, {s, -s}, {-s, s}};
    for (const auto& o : axis) candidates.push_back(make_point(x[0] + o[0], x[1] + o[1]));
    for (const auto& o : diag) candidates.push_back(make_point(x[0] + o[0], x[1] + o[1]));
  }

  std::vector<NodeId> added;
  for (const Point& c : candidates) {
    if (!state.nodes.in_domain(c)) continue;
    auto [nid, fresh] = state.nodes.insert(c);
    if (fresh) added.push_back(nid);
  }
  return added;
}

// ---- export ------------------------------------------------------------------

void write_nodes_csv(const std::filesystem::path& path, const NodeSet& nodes) {
  auto out = fmt::output_file(path.string());
  out.print("{}", nodes.dim() == 1 ? "id,x\n" : "id,x,y\n");
  for (NodeId i = 0; i < nodes.size(); ++i) {
    if (nodes.dim() == 1) {
      out.print("{},{:.17g}\n", i, nodes[i][0]);
    } else {
      out.print("{},{:.17g},{:.17g}\n", i, nodes[i][0], nodes[i][1]);
    }
  }
}

void write_cells_csv(const std::filesystem::path& path, const Tessellation& tess, int dim) {
  auto out = fmt::output_file(path.string());
  if (dim == 1) {
    out.print("id,v0,v1,measure,bx\n");
  } else {
    out.print("id,v0,v1,v2,measure,bx,by\n");
  }
  for (std::size_t id : tess.active_ids()) {
    const TessCell& c = tess[id];
    const Point b = c.geometry.barycenter();
    if (dim == 1) {
      out.print("{},{},{},{:.17g},{:.17g}\n", id, c.vertices[0], c.vertices[1], c.geometry.measure(), b[0]);
    } else {
      out.print("{},{},{},{},{:.17g},{:.17g},{:.17g}\n", id, c.vertices[0], c.vertices[1], c.vertices[2],
                c.geometry.measure(), b[0], b[1]);
    }
  }
}

}  // namespace phsadapt
