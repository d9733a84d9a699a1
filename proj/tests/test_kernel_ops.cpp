#include <doctest.h>

#include <array>
#include <cmath>
#include <random>
#include <vector>

#include "phsadapt/basis.hpp"
#include "phsadapt/errors.hpp"
#include "phsadapt/kernel_ops.hpp"
#include "test_util.hpp"

using namespace phsadapt;

namespace {

// Centroid rule on the uniform 4^k midpoint subdivision of the triangle.
double centroid_sum(const Point& c, const Point& a, const Point& b, const Point& t, int k) {
  if (k == 0) {
    const Point g{(a[0] + b[0] + t[0]) / 3, (a[1] + b[1] + t[1]) / 3, 0.0};
    return std::abs(signed_area(a, b, t)) * kernel_eval(c, g);
  }
  const Point ab = midpoint(a, b), bt = midpoint(b, t), ta = midpoint(t, a);
  return centroid_sum(c, a, ab, ta, k - 1) + centroid_sum(c, ab, b, bt, k - 1) + centroid_sum(c, ta, bt, t, k - 1) +
         centroid_sum(c, ab, bt, ta, k - 1);
}

// Richardson table over successive subdivision levels; the centroid rule
// error expands in powers of 4^-k.
double subdivision_oracle(const Point& c, const Point& a, const Point& b, const Point& t) {
  constexpr int kLevels = 10;
  std::array<double, kLevels> row{};
  for (int k = 0; k < kLevels; ++k) row[static_cast<std::size_t>(k)] = centroid_sum(c, a, b, t, k);
  double factor = 4.0;
  for (int j = 1; j < 3; ++j) {
    for (int k = kLevels - 1; k >= j; --k) {
      const auto i = static_cast<std::size_t>(k);
      row[i] = (factor * row[i] - row[i - 1]) / (factor - 1.0);
    }
    factor *= 4.0;
  }
  return row[kLevels - 1];
}

std::array<Cell, 4> midpoint_split(const Cell& t) {
  const Point a = t.vertex(0), b = t.vertex(1), c = t.vertex(2);
  const Point ab = midpoint(a, b), bc = midpoint(b, c), ca = midpoint(c, a);
  return {Cell::triangle(a, ab, ca), Cell::triangle(ab, b, bc), Cell::triangle(ca, bc, c), Cell::triangle(ab, bc, ca)};
}

Cell random_triangle(std::mt19937_64& rng) {
  for (;;) {
    const Point a = test::random_point(rng, 2), b = test::random_point(rng, 2), c = test::random_point(rng, 2);
    if (std::abs(signed_area(a, b, c)) > 0.05) return Cell::triangle(a, b, c);
  }
}

}  // namespace

TEST_SUITE("kernel_ops") {

TEST_CASE("cells") {
  const auto iv = Cell::interval(-0.5, 1.5);
  CHECK(iv.dim() == 1);
  CHECK(iv.measure() == 2.0);
  CHECK(iv.barycenter()[0] == 0.5);
  CHECK_THROWS_AS(Cell::interval(1.0, 1.0), InvalidArgument);

  // Clockwise input is reordered.
  const auto t = Cell::triangle(make_point(0, 0), make_point(0, 1), make_point(1, 0));
  CHECK(t.measure() == doctest::Approx(0.5));
  CHECK(signed_area(t.vertex(0), t.vertex(1), t.vertex(2)) > 0.0);
  CHECK(t.barycenter()[0] == doctest::Approx(1.0 / 3));
  CHECK_THROWS_AS(Cell::triangle(make_point(0, 0), make_point(1, 1), make_point(2, 2)), InvalidArgument);
}

TEST_CASE("kernel_eval") {
  CHECK(kernel_eval(make_point(0.0), make_point(2.0)) == 8.0);
  CHECK(kernel_eval(make_point(0.4, 0.1), make_point(0.4, 0.1)) == 0.0);
  CHECK(kernel_eval(make_point(0, 0), make_point(3, 4)) == doctest::Approx(125.0));
}

TEST_CASE("kernel_derivative") {
  CHECK(kernel_derivative(make_point(1.0), make_point(2.0), MultiIndex{1}) == doctest::Approx(3.0));
  CHECK(kernel_derivative(make_point(0.3, 0.3), make_point(0.3, 0.3), MultiIndex{1, 0}) == 0.0);
  CHECK(kernel_derivative(make_point(0, 0), make_point(3, 4), MultiIndex{1, 0}) == doctest::Approx(45.0));
  CHECK_THROWS_AS(kernel_derivative(make_point(0.0), make_point(1.0), MultiIndex{2}), UnsupportedOrder);
  CHECK_THROWS_AS(kernel_derivative(make_point(0, 0), make_point(1, 0), MultiIndex{1, 1}), UnsupportedOrder);
}

TEST_CASE("kernel_derivative matches central differences") {
  std::mt19937_64 rng(3);
  const double h = 1e-6;
  for (int trial = 0; trial < 100; ++trial) {
    const Point c = test::random_point(rng, 2);
    const Point x = test::random_point(rng, 2);
    if (distance(c, x) < 1e-2) continue;
    for (int j = 0; j < 2; ++j) {
      Point xp = x, xm = x;
      xp[static_cast<std::size_t>(j)] += h;
      xm[static_cast<std::size_t>(j)] -= h;
      const double fd = (kernel_eval(c, xp) - kernel_eval(c, xm)) / (2 * h);
      const double exact = kernel_derivative(c, x, MultiIndex::unit(2, j));
      CHECK(std::abs(fd - exact) <= 1e-7 * std::max(1.0, std::abs(exact)));
    }
  }
}

TEST_CASE("kernel_moment in 1D") {
  CHECK(kernel_moment(make_point(0.0), Cell::interval(0.0, 1.0)) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(kernel_moment(make_point(0.0), Cell::interval(-1.0, 1.0)) == doctest::Approx(0.5).epsilon(1e-15));
  // Center outside the interval: integral of (x + 1)^3 over [0, 1].
  CHECK(kernel_moment(make_point(-1.0), Cell::interval(0.0, 1.0)) == doctest::Approx(15.0 / 4).epsilon(1e-15));
}

TEST_CASE("kernel_moment in 2D matches the subdivision oracle") {
  const auto unit = Cell::triangle(make_point(0, 0), make_point(1, 0), make_point(0, 1));
  const double oracle = subdivision_oracle(make_point(0, 0), unit.vertex(0), unit.vertex(1), unit.vertex(2));
  CHECK(test::rel_diff(kernel_moment(make_point(0, 0), unit), oracle) <= 1e-10);

  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    const Cell t = random_triangle(rng);
    const Point c = test::random_point(rng, 2);
    const double ref = subdivision_oracle(c, t.vertex(0), t.vertex(1), t.vertex(2));
    CHECK(test::rel_diff(kernel_moment(c, t), ref) <= 1e-10);
  }
}

TEST_CASE("moments are additive over the midpoint split") {
  std::mt19937_64 rng(23);
  const auto basis = enumerate_basis(2, 4);
  for (int trial = 0; trial < 30; ++trial) {
    const Cell t = random_triangle(rng);
    const Point c = test::random_point(rng, 2);
    double kernel_parts = 0.0;
    for (const auto& s : midpoint_split(t)) kernel_parts += kernel_moment(c, s);
    CHECK(test::rel_diff(kernel_parts, kernel_moment(c, t)) <= 1e-11);
    for (const auto& alpha : basis) {
      double parts = 0.0;
      for (const auto& s : midpoint_split(t)) parts += monomial_moment(c, alpha, s);
      const double whole = monomial_moment(c, alpha, t);
      CHECK(std::abs(parts - whole) <= 1e-11 * std::max(1.0, std::abs(whole)));
    }
  }
}

TEST_CASE("monomial_moment") {
  CHECK(monomial_moment(make_point(0.0), MultiIndex{1}, Cell::interval(0.0, 1.0)) == doctest::Approx(0.5));
  CHECK(monomial_moment(make_point(0.5), MultiIndex{2}, Cell::interval(0.0, 1.0)) == doctest::Approx(1.0 / 12));
  const auto unit = Cell::triangle(make_point(0, 0), make_point(1, 0), make_point(0, 1));
  CHECK(monomial_moment(make_point(0, 0), MultiIndex{0, 0}, unit) == doctest::Approx(0.5));
  CHECK(monomial_moment(make_point(0, 0), MultiIndex{1, 0}, unit) == doctest::Approx(1.0 / 6).epsilon(1e-14));
  // p! q! / (p + q + 2)! on the reference simplex.
  CHECK(monomial_moment(make_point(0, 0), MultiIndex{2, 1}, unit) == doctest::Approx(2.0 / 120).epsilon(1e-14));
  // Shifted center: x - 1 over the unit triangle is 1/6 - 1/2.
  CHECK(monomial_moment(make_point(1, 0), MultiIndex{1, 0}, unit) == doctest::Approx(1.0 / 6 - 0.5).epsilon(1e-14));
}

}
