#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "phsadapt/kernel_ops.hpp"
#include "phsadapt/types.hpp"

namespace phsadapt {

/// F1: sum_i 1 / (1 + a |x - y_i|^2).  F2: sum_i exp(-a |x - y_i|^2).
/// Linear: sum_j x_j (no shifts; used for exactness smoke runs).
enum class FunctionKind { F1, F2, Linear };

FunctionKind parse_function_kind(const std::string& s);
std::string to_string(FunctionKind k);

/// 2d shifts drawn uniformly from the open cube (-1, 1)^d with mt19937_64.
std::vector<Point> random_shifts(int dim, std::uint64_t seed);

class TestFunction {
 public:
  /// Shifts must lie strictly inside (-1, 1)^d. F1/F2 expect 2d of them but
  /// any positive count is accepted (single-term probes).
  TestFunction(FunctionKind kind, int dim, double a, std::vector<Point> shifts);
  static TestFunction seeded(FunctionKind kind, int dim, double a, std::uint64_t seed);

  FunctionKind kind() const { return kind_; }
  int dim() const { return dim_; }
  double sharpness() const { return a_; }
  const std::vector<Point>& shifts() const { return shifts_; }

  double operator()(const Point& x) const;
  /// Analytic gradient; components beyond dim are zero.
  Point gradient(const Point& x) const;

  /// Integral over [-1, 1]^d. F2 via erf (tensorized in 2D), F1 in 1D via
  /// arctan; F1 in 2D by adaptive quadrature of the closed-form inner integral.
  double exact_integral() const;
  /// Integral over one cell: closed form for intervals, adaptive cubature on
  /// triangles (F2 triangles use the closed-form inner integral in x).
  double exact_integral(const Cell& cell) const;

 private:
  FunctionKind kind_;
  int dim_;
  double a_;
  std::vector<Point> shifts_;
};

}  // namespace phsadapt
