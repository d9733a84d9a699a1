#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "phsadapt/kernel_ops.hpp"
#include "phsadapt/local_interp.hpp"

namespace phsadapt {

struct TrapezoidResult {
  double value = 0.0;
  /// Distinct evaluation nodes: the endpoints of the final partition.
  std::size_t nodes = 0;
  std::size_t intervals = 0;
  /// Sorted partition endpoints, a and b included.
  std::vector<double> breakpoints;
};

/// Recursive-bisection trapezoid rule. On [lo, hi] the trapezoid value is
/// accepted when |Simpson - trapezoid| <= eps (hi - lo) / (b - a); otherwise
/// the interval is split at its midpoint. Throws MaxDepthExceeded past depth 60.
TrapezoidResult adaptive_trapezoid(const std::function<double(double)>& f, double a, double b, double eps);

/// Weights from a direct assembly and dense solve of the full saddle system
/// at the given degree, independent of SaddleSystem and extend_weights. The
/// matrix is assembled and solved in long double.
Eigen::MatrixXd oracle_full_solve(const Stencil& stencil, const OperatorSpec& op, int degree);

/// Adaptive cubature of f over the cell to ~1e-12 relative.
double oracle_integral(const std::function<double(const Point&)>& f, const Cell& cell);

}  // namespace phsadapt
