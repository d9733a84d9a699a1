#include "phsadapt/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include <fmt/format.h>

#include "phsadapt/errors.hpp"

namespace phsadapt {

GaussRule gauss_legendre(int n) {
  if (n < 1) throw InvalidArgument(fmt::format("gauss_legendre: n = {}", n));
  GaussRule r;
  r.nodes.resize(static_cast<std::size_t>(n));
  r.weights.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // recompute derivative at the converged root
    double p0 = 1.0;
    double p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    const auto lo = static_cast<std::size_t>(i);
    const auto hi = static_cast<std::size_t>(n - 1 - i);
    r.nodes[lo] = -x;
    r.nodes[hi] = x;
    r.weights[lo] = w;
    r.weights[hi] = w;
  }
  if (n % 2 == 1) r.nodes[static_cast<std::size_t>(n / 2)] = 0.0;
  return r;
}

namespace {

const GaussRule& cached_rule(int n) {
  static std::mutex mu;
  static std::map<int, GaussRule> cache;
  std::lock_guard lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, gauss_legendre(n)).first;
  return it->second;
}

double gauss_on(const std::function<double(double)>& f, double a, double b, const GaussRule& g) {
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  double s = 0.0;
  for (std::size_t i = 0; i < g.nodes.size(); ++i) s += g.weights[i] * f(mid + half * g.nodes[i]);
  return s * half;
}

double adapt_interval(const std::function<double(double)>& f, double a, double b, double whole, double tol,
                      double total_len, const GaussRule& g, int depth, int max_depth) {
  const double m = 0.5 * (a + b);
  const double left = gauss_on(f, a, m, g);
  const double right = gauss_on(f, m, b, g);
  const double refined = left + right;
  if (std::abs(refined - whole) <= tol * (b - a) / total_len || depth >= max_depth) return refined;
  return adapt_interval(f, a, m, left, tol, total_len, g, depth + 1, max_depth) +
         adapt_interval(f, m, b, right, tol, total_len, g, depth + 1, max_depth);
}

Point lerp(const Point& a, const Point& b, double t) {
  return {a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1]), a[2] + t * (b[2] - a[2])};
}

double adapt_triangle(const std::function<double(const Point&)>& f, const Point& a, const Point& b, const Point& c,
                      double whole, double tol, double total_area, int depth, int max_depth) {
  const Point ab = midpoint(a, b);
  const Point bc = midpoint(b, c);
  const Point ca = midpoint(c, a);
  const std::array<std::array<Point, 3>, 4> kids{{{a, ab, ca}, {ab, b, bc}, {ca, bc, c}, {ab, bc, ca}}};
  std::array<double, 4> v{};
  double refined = 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    v[i] = triangle_rule(f, kids[i][0], kids[i][1], kids[i][2]);
    refined += v[i];
  }
  const double area = std::abs(signed_area(a, b, c));
  if (std::abs(refined - whole) <= tol * area / total_area || depth >= max_depth) return refined;
  double s = 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    s += adapt_triangle(f, kids[i][0], kids[i][1], kids[i][2], v[i], tol, total_area, depth + 1, max_depth);
  }
  return s;
}

}  // namespace

double integrate_interval(const std::function<double(double)>& f, double a, double b, double abs_tol,
                          double rel_tol, int max_depth) {
  if (b == a) return 0.0;
  if (b < a) return -integrate_interval(f, b, a, abs_tol, rel_tol, max_depth);
  const GaussRule& g = cached_rule(10);
  const double whole = gauss_on(f, a, b, g);
  const double tol = std::max(abs_tol, rel_tol * std::abs(whole));
  return adapt_interval(f, a, b, whole, tol, b - a, g, 0, max_depth);
}

double triangle_rule(const std::function<double(const Point&)>& f, const Point& a, const Point& b, const Point& c,
                     int order) {
  // x = a + s (b - a) + s t (c - b), s, t in [0, 1]; Jacobian 2 |T| s.
  const GaussRule& g = cached_rule(order);
  const double area2 = 2.0 * std::abs(signed_area(a, b, c));
  double sum = 0.0;
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    const double s = 0.5 * (g.nodes[i] + 1.0);
    const Point p = lerp(a, b, s);
    const Point q = lerp(a, c, s);
    double inner = 0.0;
    for (std::size_t j = 0; j < g.nodes.size(); ++j) {
      const double t = 0.5 * (g.nodes[j] + 1.0);
      inner += g.weights[j] * f(lerp(p, q, t));
    }
    sum += g.weights[i] * s * inner;
  }
  return 0.25 * sum * area2;
}

double integrate_triangle(const std::function<double(const Point&)>& f, const Point& a, const Point& b,
                          const Point& c, double abs_tol, double rel_tol, int max_depth) {
  const double whole = triangle_rule(f, a, b, c);
  const double tol = std::max(abs_tol, rel_tol * std::abs(whole));
  const double area = std::abs(signed_area(a, b, c));
  if (area == 0.0) return 0.0;
  return adapt_triangle(f, a, b, c, whole, tol, area, 0, max_depth);
}

double integrate_cell(const std::function<double(const Point&)>& f, const Cell& cell, double abs_tol,
                      double rel_tol) {
  if (cell.dim() == 1) {
    return integrate_interval([&](double x) { return f(make_point(x)); }, cell.vertex(0)[0], cell.vertex(1)[0],
                              abs_tol, rel_tol);
  }
  return integrate_triangle(f, cell.vertex(0), cell.vertex(1), cell.vertex(2), abs_tol, rel_tol);
}

}  // namespace phsadapt
