#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

namespace phsadapt {

/// A point in up to three dimensions. Coordinates beyond the working
/// dimension are kept at zero, so Euclidean distances are correct for any d.
using Point = std::array<double, 3>;

inline Point make_point(double x, double y = 0.0, double z = 0.0) { return {x, y, z}; }

inline double squared_distance(const Point& a, const Point& b) {
  const double dx = a[0] - b[0];
  const double dy = a[1] - b[1];
  const double dz = a[2] - b[2];
  return dx * dx + dy * dy + dz * dz;
}

inline double distance(const Point& a, const Point& b) { return std::sqrt(squared_distance(a, b)); }

inline Point midpoint(const Point& a, const Point& b) {
  return {0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1]), 0.5 * (a[2] + b[2])};
}

using NodeId = std::size_t;

}  // namespace phsadapt
