#pragma once

#include <functional>
#include <vector>

#include "phsadapt/kernel_ops.hpp"
#include "phsadapt/types.hpp"

namespace phsadapt {

struct GaussRule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [-1, 1] (Newton on the Legendre recurrence).
GaussRule gauss_legendre(int n);

/// Adaptive bisection with a 10-point Gauss rule; an interval is accepted when
/// the rule and its two-half refinement differ by at most
/// max(abs_tol, rel_tol * |value|) scaled to the interval length.
double integrate_interval(const std::function<double(double)>& f, double a, double b, double abs_tol = 1e-14,
                          double rel_tol = 1e-13, int max_depth = 50);

/// Conical-product Gauss rule (order x order) on a triangle.
double triangle_rule(const std::function<double(const Point&)>& f, const Point& a, const Point& b, const Point& c,
                     int order = 12);

/// Adaptive 4-way midpoint subdivision of the triangle with triangle_rule.
double integrate_triangle(const std::function<double(const Point&)>& f, const Point& a, const Point& b,
                          const Point& c, double abs_tol = 1e-15, double rel_tol = 1e-13, int max_depth = 12);

/// Integral over an interval or triangle cell.
double integrate_cell(const std::function<double(const Point&)>& f, const Cell& cell, double abs_tol = 1e-15,
                      double rel_tol = 1e-13);

}  // namespace phsadapt
