#include "phsadapt/kernel_ops.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "phsadapt/errors.hpp"

namespace phsadapt {

namespace {

// Integral of r^3 over the triangle (c, a, b), with the sign of its
// orientation. With p the distance from c to the line through a and b, and t
// the signed abscissa along that line measured from the foot of the
// perpendicular, the polar integral reduces to
//   (1/5) [ p t R^3 / 4 + 3/8 p^3 t R ]_a^b + 3/40 p^5 ln((R_b + t_b) / (R_a + t_a)).
double fan_moment(const Point& c, const Point& a, const Point& b) {
  const double ex = b[0] - a[0];
  const double ey = b[1] - a[1];
  const double len = std::hypot(ex, ey);
  if (len == 0.0) return 0.0;
  const double ux = ex / len;
  const double uy = ey / len;

  const double ax = a[0] - c[0];
  const double ay = a[1] - c[1];
  const double bx = b[0] - c[0];
  const double by = b[1] - c[1];

  const double orient = ax * by - ay * bx;
  const double p = std::abs(ux * ay - uy * ax);
  const double scale = std::max({std::hypot(ax, ay), std::hypot(bx, by), len});
  if (orient == 0.0 || p <= 1e-15 * scale) return 0.0;

  const double ta = ax * ux + ay * uy;
  const double tb = bx * ux + by * uy;
  const double ra = std::hypot(ax, ay);
  const double rb = std::hypot(bx, by);

  auto poly = [p](double t, double r) { return p * t * r * r * r / 4.0 + 0.375 * p * p * p * t * r; };
  // R + t without cancellation when t < 0: R + t = p^2 / (R - t).
  auto sum_rt = [p](double t, double r) { return t >= 0.0 ? r + t : p * p / (r - t); };

  const double p5 = p * p * p * p * p;
  const double value =
      (poly(tb, rb) - poly(ta, ra)) / 5.0 + 0.075 * p5 * std::log(sum_rt(tb, rb) / sum_rt(ta, ra));
  return orient > 0.0 ? value : -value;
}

double factorial(int k) {
  double r = 1.0;
  for (int i = 2; i <= k; ++i) r *= i;
  return r;
}

}  // namespace

Cell Cell::interval(double a, double b) {
  if (!(b > a)) throw InvalidArgument("Cell::interval: requires b > a");
  Cell c;
  c.dim_ = 1;
  c.vertices_[0] = make_point(a);
  c.vertices_[1] = make_point(b);
  c.measure_ = b - a;
  return c;
}

Cell Cell::triangle(const Point& p0, const Point& p1, const Point& p2) {
  const double area = signed_area(p0, p1, p2);
  const double bx = std::max({p0[0], p1[0], p2[0]}) - std::min({p0[0], p1[0], p2[0]});
  const double by = std::max({p0[1], p1[1], p2[1]}) - std::min({p0[1], p1[1], p2[1]});
  if (!(std::abs(area) > 1e-15 * bx * by) || area == 0.0) {
    throw InvalidArgument("Cell::triangle: degenerate triangle");
  }
  Cell c;
  c.dim_ = 2;
  c.vertices_ = area > 0.0 ? std::array<Point, 3>{p0, p1, p2} : std::array<Point, 3>{p0, p2, p1};
  c.measure_ = std::abs(area);
  return c;
}

Point Cell::barycenter() const {
  Point g{};
  const auto k = vertex_count();
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < 3; ++j) g[j] += vertices_[i][j];
  }
  for (auto& v : g) v /= static_cast<double>(k);
  return g;
}

double signed_area(const Point& a, const Point& b, const Point& c) {
  return 0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]));
}

double kernel_eval(const Point& c, const Point& x) {
  const double r = distance(c, x);
  return r * r * r;
}

double kernel_derivative(const Point& c, const Point& x0, const MultiIndex& alpha) {
  if (alpha.degree() != 1) {
    throw UnsupportedOrder("kernel_derivative: only first derivatives are supported (|alpha| = " +
                           std::to_string(alpha.degree()) + ")");
  }
  int j = 0;
  while (alpha[j] == 0) ++j;
  const double r = distance(c, x0);
  return 3.0 * r * (x0[static_cast<std::size_t>(j)] - c[static_cast<std::size_t>(j)]);
}

double kernel_moment(const Point& c, const Cell& cell) {
  if (cell.dim() == 1) {
    auto g = [](double t) { return t * t * t * std::abs(t) / 4.0; };
    return g(cell.vertex(1)[0] - c[0]) - g(cell.vertex(0)[0] - c[0]);
  }
  if (cell.dim() == 2) {
    const auto& v0 = cell.vertex(0);
    const auto& v1 = cell.vertex(1);
    const auto& v2 = cell.vertex(2);
    return fan_moment(c, v0, v1) + fan_moment(c, v1, v2) + fan_moment(c, v2, v0);
  }
  throw InvalidArgument("kernel_moment: unsupported cell dimension");
}

double monomial_moment(const Point& center, const MultiIndex& alpha, const Cell& cell) {
  if (cell.dim() != alpha.dim()) throw InvalidArgument("monomial_moment: dimension mismatch");
  if (cell.dim() == 1) {
    const int k = alpha[0];
    const double b = cell.vertex(1)[0] - center[0];
    const double a = cell.vertex(0)[0] - center[0];
    return (std::pow(b, k + 1) - std::pow(a, k + 1)) / (k + 1);
  }
  if (cell.dim() != 2) throw InvalidArgument("monomial_moment: unsupported cell dimension");

  // x = v0 + u e1 + v e2 on the reference simplex u, v >= 0, u + v <= 1.
  // (x - center)^alpha is expanded as a bivariate polynomial in (u, v).
  const auto& v0 = cell.vertex(0);
  const auto& v1 = cell.vertex(1);
  const auto& v2 = cell.vertex(2);
  const int deg = alpha.degree();
  const auto stride = static_cast<std::size_t>(deg + 1);
  std::vector<double> poly(stride * stride, 0.0);
  std::vector<double> next(stride * stride, 0.0);
  poly[0] = 1.0;
  int cur = 0;
  for (std::size_t j = 0; j < 2; ++j) {
    const double a = v0[j] - center[j];
    const double e1 = v1[j] - v0[j];
    const double e2 = v2[j] - v0[j];
    for (int rep = 0; rep < alpha[static_cast<int>(j)]; ++rep) {
      std::fill(next.begin(), next.end(), 0.0);
      for (int p = 0; p <= cur; ++p) {
        for (int q = 0; p + q <= cur; ++q) {
          const double c = poly[static_cast<std::size_t>(p) * stride + static_cast<std::size_t>(q)];
          if (c == 0.0) continue;
          next[static_cast<std::size_t>(p) * stride + static_cast<std::size_t>(q)] += c * a;
          next[static_cast<std::size_t>(p + 1) * stride + static_cast<std::size_t>(q)] += c * e1;
          next[static_cast<std::size_t>(p) * stride + static_cast<std::size_t>(q + 1)] += c * e2;
        }
      }
      std::swap(poly, next);
      ++cur;
    }
  }
  double sum = 0.0;
  for (int p = 0; p <= deg; ++p) {
    for (int q = 0; p + q <= deg; ++q) {
      const double c = poly[static_cast<std::size_t>(p) * stride + static_cast<std::size_t>(q)];
      if (c != 0.0) sum += c * factorial(p) * factorial(q) / factorial(p + q + 2);
    }
  }
  return 2.0 * cell.measure() * sum;
}

}  // namespace phsadapt
