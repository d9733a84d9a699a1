#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "phsadapt/types.hpp"

namespace phsadapt {

using Triangle = std::array<std::size_t, 3>;

/// Delaunay triangulation of planar points by incremental insertion with
/// Lawson edge flips. Triangles are counterclockwise and index into
/// `points`. Points on an existing edge split it; an edge is flipped only when
/// the opposite vertex is inside the circumcircle by more than a relative
/// tolerance, so co-circular ties keep the diagonal created first (the
/// result is deterministic in the input order). Duplicate points are
/// ignored. Throws DegenerateInput for fewer than three non-collinear points.
std::vector<Triangle> delaunay_triangulate(std::span<const Point> points);

/// > 0 when d lies strictly inside the circumcircle of the counterclockwise
/// triangle (a, b, c); the raw determinant.
double incircle(const Point& a, const Point& b, const Point& c, const Point& d);

}  // namespace phsadapt
