#pragma once

#include <array>
#include <cstddef>

#include "phsadapt/basis.hpp"
#include "phsadapt/types.hpp"

namespace phsadapt {

/// An integration cell: an interval [a, b] for d = 1 or a counterclockwise
/// triangle for d = 2.
class Cell {
 public:
  Cell() = default;

  /// Throws InvalidArgument unless b > a.
  static Cell interval(double a, double b);
  /// Vertices are reordered to counterclockwise. Throws InvalidArgument for
  /// (near) zero area.
  static Cell triangle(const Point& p0, const Point& p1, const Point& p2);

  int dim() const { return dim_; }
  std::size_t vertex_count() const { return static_cast<std::size_t>(dim_) + 1; }
  const Point& vertex(std::size_t i) const { return vertices_[i]; }
  double measure() const { return measure_; }
  /// Average of the vertices.
  Point barycenter() const;

 private:
  int dim_ = 0;
  std::array<Point, 3> vertices_{};
  double measure_ = 0.0;
};

/// Signed area of (a, b, c); positive for counterclockwise order.
double signed_area(const Point& a, const Point& b, const Point& c);

/// phi(|x - c|) with phi(r) = r^3.
double kernel_eval(const Point& c, const Point& x);

/// d^alpha |x - c|^3 at x0 for |alpha| = 1, i.e. 3 |x0 - c| (x0 - c)_j.
/// The value at x0 = c is the limit 0. Throws UnsupportedOrder otherwise.
double kernel_derivative(const Point& c, const Point& x0, const MultiIndex& alpha);

/// Integral of |x - c|^3 over the cell. Closed form in both dimensions: in
/// 1D through the antiderivative t^3 |t| / 4, in 2D through a signed fan of
/// triangles with apex c, each integrated exactly in polar coordinates.
double kernel_moment(const Point& c, const Cell& cell);

/// Integral of (x - center)^alpha over the cell, exact.
double monomial_moment(const Point& center, const MultiIndex& alpha, const Cell& cell);

}  // namespace phsadapt
