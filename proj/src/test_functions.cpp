#include "phsadapt/test_functions.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>

#include <fmt/format.h>

#include "phsadapt/errors.hpp"
#include "phsadapt/quadrature.hpp"

namespace phsadapt {

namespace {

// erf(v) - erf(u) without cancellation in the tails.
double erf_diff(double u, double v) {
  if (u >= 0.0) return std::erfc(u) - std::erfc(v);
  if (v <= 0.0) return std::erfc(-v) - std::erfc(-u);
  return std::erf(v) - std::erf(u);
}

// atan(v) - atan(u).
double atan_diff(double u, double v) {
  if (u * v > 0.0) return std::atan((v - u) / (1.0 + u * v));
  return std::atan(v) - std::atan(u);
}

// Integral over x in [lo, hi] of exp(-a (x - y)^2).
double gauss_row(double a, double y, double lo, double hi) {
  const double s = std::sqrt(a);
  return 0.5 * std::sqrt(std::numbers::pi / a) * erf_diff(s * (lo - y), s * (hi - y));
}

// Integral over x in [lo, hi] of 1 / (c + a (x - y)^2), c > 0.
double lorentz_row(double a, double c, double y, double lo, double hi) {
  const double k = std::sqrt(a / c);
  return atan_diff(k * (lo - y), k * (hi - y)) / std::sqrt(a * c);
}

// Integral of g(y, xl, xr) over y where [xl(y), xr(y)] is the horizontal
// section of the triangle.
double integrate_rows(const std::function<double(double, double, double)>& g, const Point& p0, const Point& p1,
                      const Point& p2) {
  std::array<Point, 3> v{p0, p1, p2};
  std::sort(v.begin(), v.end(), [](const Point& a, const Point& b) { return a[1] < b[1]; });
  auto x_at = [](const Point& a, const Point& b, double y) {
    if (b[1] == a[1]) return a[0];
    return a[0] + (b[0] - a[0]) * (y - a[1]) / (b[1] - a[1]);
  };
  double total = 0.0;
  auto piece = [&](const Point& s0, const Point& s1, double y_lo, double y_hi) {
    if (!(y_hi > y_lo)) return;
    total += integrate_interval(
        [&](double y) {
          const double xa = x_at(s0, s1, y);
          const double xb = x_at(v[0], v[2], y);
          return g(y, std::min(xa, xb), std::max(xa, xb));
        },
        y_lo, y_hi, 1e-17, 1e-14);
  };
  piece(v[0], v[1], v[0][1], v[1][1]);
  piece(v[1], v[2], v[1][1], v[2][1]);
  return total;
}

}  // namespace

FunctionKind parse_function_kind(const std::string& s) {
  if (s == "f1") return FunctionKind::F1;
  if (s == "f2") return FunctionKind::F2;
  if (s == "linear") return FunctionKind::Linear;
  throw InvalidArgument(fmt::format("unknown function kind '{}' (expected f1, f2 or linear)", s));
}

std::string to_string(FunctionKind k) {
  switch (k) {
    case FunctionKind::F1:
      return "f1";
    case FunctionKind::F2:
      return "f2";
    case FunctionKind::Linear:
      return "linear";
  }
  return "?";
}

std::vector<Point> random_shifts(int dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Point> out(static_cast<std::size_t>(2 * dim), Point{0.0, 0.0, 0.0});
  for (auto& p : out) {
    for (int j = 0; j < dim; ++j) {
      double v;
      do {
        v = u(rng);
      } while (v <= -1.0);
      p[static_cast<std::size_t>(j)] = v;
    }
  }
  return out;
}

TestFunction::TestFunction(FunctionKind kind, int dim, double a, std::vector<Point> shifts)
    : kind_(kind), dim_(dim), a_(a), shifts_(std::move(shifts)) {
  if (dim < 1 || dim > 2) throw InvalidArgument(fmt::format("TestFunction: dimension {} not in 1..2", dim));
  if (kind != FunctionKind::Linear) {
    if (!(a > 0.0)) throw InvalidArgument("TestFunction: a must be positive");
    if (shifts_.empty()) throw InvalidArgument("TestFunction: no shifts");
    for (const auto& y : shifts_) {
      for (int j = 0; j < dim; ++j) {
        const double v = y[static_cast<std::size_t>(j)];
        if (!(v > -1.0 && v < 1.0)) throw InvalidArgument("TestFunction: shifts must lie in (-1, 1)^d");
      }
    }
  }
}

TestFunction TestFunction::seeded(FunctionKind kind, int dim, double a, std::uint64_t seed) {
  return TestFunction(kind, dim, a, random_shifts(dim, seed));
}

double TestFunction::operator()(const Point& x) const {
  if (kind_ == FunctionKind::Linear) {
    double s = 0.0;
    for (int j = 0; j < dim_; ++j) s += x[static_cast<std::size_t>(j)];
    return s;
  }
  double s = 0.0;
  for (const auto& y : shifts_) {
    const double r2 = squared_distance(x, y);
    s += kind_ == FunctionKind::F1 ? 1.0 / (1.0 + a_ * r2) : std::exp(-a_ * r2);
  }
  return s;
}

Point TestFunction::gradient(const Point& x) const {
  Point g{0.0, 0.0, 0.0};
  if (kind_ == FunctionKind::Linear) {
    for (int j = 0; j < dim_; ++j) g[static_cast<std::size_t>(j)] = 1.0;
    return g;
  }
  for (const auto& y : shifts_) {
    const double r2 = squared_distance(x, y);
    double c;
    if (kind_ == FunctionKind::F1) {
      const double q = 1.0 + a_ * r2;
      c = -2.0 * a_ / (q * q);
    } else {
      c = -2.0 * a_ * std::exp(-a_ * r2);
    }
    for (int j = 0; j < dim_; ++j) {
      const auto jj = static_cast<std::size_t>(j);
      g[jj] += c * (x[jj] - y[jj]);
    }
  }
  return g;
}

double TestFunction::exact_integral() const {
  if (dim_ == 1) return exact_integral(Cell::interval(-1.0, 1.0));
  if (kind_ == FunctionKind::Linear) return 0.0;
  double s = 0.0;
  for (const auto& y : shifts_) {
    if (kind_ == FunctionKind::F2) {
      s += gauss_row(a_, y[0], -1.0, 1.0) * gauss_row(a_, y[1], -1.0, 1.0);
    } else {
      s += integrate_interval(
          [&](double yy) {
            const double c = 1.0 + a_ * (yy - y[1]) * (yy - y[1]);
            return lorentz_row(a_, c, y[0], -1.0, 1.0);
          },
          -1.0, 1.0, 1e-16, 1e-14);
    }
  }
  return s;
}

double TestFunction::exact_integral(const Cell& cell) const {
  if (kind_ == FunctionKind::Linear) {
    const Point b = cell.barycenter();
    double s = 0.0;
    for (int j = 0; j < dim_; ++j) s += b[static_cast<std::size_t>(j)];
    return s * cell.measure();
  }
  if (cell.dim() != dim_) throw InvalidArgument("TestFunction::exact_integral: cell dimension mismatch");
  double s = 0.0;
  if (dim_ == 1) {
    const double lo = cell.vertex(0)[0];
    const double hi = cell.vertex(1)[0];
    const double sa = std::sqrt(a_);
    for (const auto& y : shifts_) {
      if (kind_ == FunctionKind::F2) {
        s += gauss_row(a_, y[0], lo, hi);
      } else {
        s += atan_diff(sa * (lo - y[0]), sa * (hi - y[0])) / sa;
      }
    }
    return s;
  }
  for (const auto& y : shifts_) {
    if (kind_ == FunctionKind::F2) {
      s += integrate_rows(
          [&](double yy, double xl, double xr) {
            return std::exp(-a_ * (yy - y[1]) * (yy - y[1])) * gauss_row(a_, y[0], xl, xr);
          },
          cell.vertex(0), cell.vertex(1), cell.vertex(2));
    } else {
      s += integrate_rows(
          [&](double yy, double xl, double xr) {
            const double c = 1.0 + a_ * (yy - y[1]) * (yy - y[1]);
            return lorentz_row(a_, c, y[0], xl, xr);
          },
          cell.vertex(0), cell.vertex(1), cell.vertex(2));
    }
  }
  return s;
}

}  // namespace phsadapt
