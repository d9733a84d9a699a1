#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "phsadapt/errors.hpp"
#include "phsadapt/fixtures.hpp"
#include "phsadapt/quadrature.hpp"
#include "phsadapt/test_functions.hpp"
#include "test_util.hpp"

using namespace phsadapt;

TEST_SUITE("quadrature") {

TEST_CASE("Gauss-Legendre rules") {
  for (int n = 1; n <= 20; ++n) {
    const auto rule = gauss_legendre(n);
    REQUIRE(rule.nodes.size() == static_cast<std::size_t>(n));
    double wsum = 0.0;
    for (double w : rule.weights) wsum += w;
    CHECK(wsum == doctest::Approx(2.0).epsilon(1e-14));
    // Exact for x^k, k <= 2n - 1.
    for (int k = 0; k <= 2 * n - 1; ++k) {
      double v = 0.0;
      for (int i = 0; i < n; ++i) v += rule.weights[static_cast<std::size_t>(i)] * std::pow(rule.nodes[static_cast<std::size_t>(i)], k);
      const double exact = k % 2 == 1 ? 0.0 : 2.0 / (k + 1);
      CHECK(std::abs(v - exact) <= 1e-14);
    }
  }
  CHECK_THROWS_AS(gauss_legendre(0), InvalidArgument);
}

TEST_CASE("adaptive interval and triangle integration") {
  CHECK(integrate_interval([](double x) { return x * x * x; }, 0.0, 1.0) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(integrate_interval([](double x) { return std::exp(-1000 * x * x); }, -1.0, 1.0) ==
        doctest::Approx(std::sqrt(std::numbers::pi / 1000) * std::erf(std::sqrt(1000.0))).epsilon(1e-13));
  const Point a = make_point(0, 0), b = make_point(1, 0), c = make_point(0, 1);
  CHECK(triangle_rule([](const Point&) { return 1.0; }, a, b, c) == doctest::Approx(0.5).epsilon(1e-15));
  // x^2 y^3 over the unit triangle: 2! 3! / 7!.
  CHECK(triangle_rule([](const Point& p) { return p[0] * p[0] * p[1] * p[1] * p[1]; }, a, b, c) ==
        doctest::Approx(12.0 / 5040).epsilon(1e-14));
  CHECK(integrate_triangle([](const Point& p) { return std::sqrt(p[0] + p[1]); }, a, b, c) ==
        doctest::Approx(0.4).epsilon(1e-12));
  CHECK(integrate_cell([](const Point& p) { return p[0]; }, Cell::interval(0.0, 2.0)) == doctest::Approx(2.0));
}

}

TEST_SUITE("test_functions") {

TEST_CASE("parsing and shifts") {
  CHECK(parse_function_kind("f1") == FunctionKind::F1);
  CHECK(parse_function_kind("f2") == FunctionKind::F2);
  CHECK(parse_function_kind("linear") == FunctionKind::Linear);
  CHECK_THROWS_AS(parse_function_kind("f3"), InvalidArgument);
  CHECK(to_string(FunctionKind::F2) == "f2");

  for (int d = 1; d <= 2; ++d) {
    const auto s = random_shifts(d, 42);
    REQUIRE(s.size() == static_cast<std::size_t>(2 * d));
    for (const auto& y : s) {
      for (int j = 0; j < d; ++j) CHECK(std::abs(y[static_cast<std::size_t>(j)]) < 1.0);
    }
    CHECK(random_shifts(d, 42) == s);
    CHECK(random_shifts(d, 43) != s);
  }
  CHECK_THROWS_AS(TestFunction(FunctionKind::F2, 1, 1.0, {make_point(1.0)}), InvalidArgument);
  CHECK_THROWS_AS(TestFunction(FunctionKind::F2, 1, -1.0, {make_point(0.0)}), InvalidArgument);
}

TEST_CASE("point values") {
  const TestFunction f2(FunctionKind::F2, 1, 1.0, {make_point(0.0)});
  CHECK(f2(make_point(0.0)) == 1.0);
  const TestFunction f1(FunctionKind::F1, 1, 1000.0, {make_point(0.0)});
  CHECK(f1(make_point(0.0)) == 1.0);
  CHECK(f1(make_point(1.0)) == doctest::Approx(1.0 / 1001).epsilon(1e-15));
  const auto f = TestFunction::seeded(FunctionKind::F2, 2, 100.0, 5);
  const auto& y = f.shifts();
  double others = 0.0;
  for (std::size_t i = 1; i < y.size(); ++i) others += std::exp(-100.0 * squared_distance(y[0], y[i]));
  CHECK(f(y[0]) == doctest::Approx(1.0 + others).epsilon(1e-15));
  const TestFunction lin(FunctionKind::Linear, 2, 1.0, {});
  CHECK(lin(make_point(0.25, -0.5)) == -0.25);
}

TEST_CASE("gradients") {
  const TestFunction f2(FunctionKind::F2, 1, 1.0, {make_point(0.0)});
  CHECK(f2.gradient(make_point(1.0))[0] == doctest::Approx(-2.0 * std::exp(-1.0)).epsilon(1e-15));
  CHECK(f2.gradient(make_point(0.0))[0] == 0.0);

  std::mt19937_64 rng(2);
  const double h = 1e-6;
  for (auto kind : {FunctionKind::F1, FunctionKind::F2}) {
    for (int d = 1; d <= 2; ++d) {
      const auto f = TestFunction::seeded(kind, d, 10.0, 7);
      for (int trial = 0; trial < 100; ++trial) {
        const Point x = test::random_point(rng, d);
        const Point g = f.gradient(x);
        double gnorm = 0.0;
        for (int j = 0; j < d; ++j) gnorm = std::max(gnorm, std::abs(g[static_cast<std::size_t>(j)]));
        for (int j = 0; j < d; ++j) {
          Point xp = x, xm = x;
          xp[static_cast<std::size_t>(j)] += h;
          xm[static_cast<std::size_t>(j)] -= h;
          const double fd = (f(xp) - f(xm)) / (2 * h);
          CHECK(std::abs(fd - g[static_cast<std::size_t>(j)]) <= 1e-6 * std::max(gnorm, 1.0));
        }
      }
    }
  }
}

TEST_CASE("closed-form integrals over the cube") {
  const TestFunction f1(FunctionKind::F1, 1, 1.0, {make_point(0.0)});
  CHECK(f1.exact_integral() == doctest::Approx(std::numbers::pi / 2).epsilon(1e-15));
  const double a = 1e6;
  const TestFunction sharp(FunctionKind::F2, 1, a, {make_point(0.3)});
  CHECK(test::rel_diff(sharp.exact_integral(), std::sqrt(std::numbers::pi / a)) <= 1e-6);
  CHECK(TestFunction(FunctionKind::Linear, 2, 1.0, {}).exact_integral() == 0.0);

  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> loga(0.0, 3.0);
  for (int trial = 0; trial < 20; ++trial) {
    const double av = std::pow(10.0, loga(rng));
    for (auto kind : {FunctionKind::F1, FunctionKind::F2}) {
      const TestFunction g1(kind, 1, av, {test::random_point(rng, 1, -0.99, 0.99)});
      const double q1 = integrate_interval([&](double x) { return g1(make_point(x)); }, -1.0, 1.0, 1e-15, 1e-14);
      CHECK(test::rel_diff(g1.exact_integral(), q1) <= 1e-11);
    }
    const TestFunction g2(FunctionKind::F2, 2, av, {test::random_point(rng, 2, -0.99, 0.99)});
    const double q2 = integrate_interval(
        [&](double y) {
          return integrate_interval([&](double x) { return g2(make_point(x, y)); }, -1.0, 1.0, 1e-16, 1e-14);
        },
        -1.0, 1.0, 1e-15, 1e-13);
    CHECK(test::rel_diff(g2.exact_integral(), q2) <= 1e-11);
  }
}

TEST_CASE("f1 over the square matches the stored reference values") {
  for (const auto& ref : fixtures::kF1SquareIntegrals) {
    const TestFunction origin(FunctionKind::F1, 2, ref.a, {make_point(0.0, 0.0)});
    CHECK(test::rel_diff(origin.exact_integral(), ref.origin) <= 1e-12);
    const TestFunction four(FunctionKind::F1, 2, ref.a, fixtures::kQuad2dShifts);
    CHECK(test::rel_diff(four.exact_integral(), ref.quad2d_four) <= 1e-12);
  }
}

TEST_CASE("cell integrals") {
  const auto unit = Cell::triangle(make_point(0, 0), make_point(1, 0), make_point(0, 1));
  const TestFunction f1(FunctionKind::F1, 2, 10.0, {make_point(0.2, 0.3)});
  const TestFunction f2(FunctionKind::F2, 2, 10.0, {make_point(0.2, 0.3)});
  CHECK(test::rel_diff(f1.exact_integral(unit), fixtures::kF1UnitTriangle) <= 1e-12);
  CHECK(test::rel_diff(f2.exact_integral(unit), fixtures::kF2UnitTriangle) <= 1e-12);

  const TestFunction g(FunctionKind::F2, 1, 1000.0, fixtures::kQuad1dShifts);
  double sum = 0.0;
  for (int i = 0; i < 9; ++i) sum += g.exact_integral(Cell::interval(-1.0 + i * 2.0 / 9, -1.0 + (i + 1) * 2.0 / 9));
  CHECK(test::rel_diff(sum, g.exact_integral()) <= 1e-13);

  const TestFunction lin(FunctionKind::Linear, 2, 1.0, {});
  CHECK(lin.exact_integral(unit) == doctest::Approx(1.0 / 3).epsilon(1e-15));
}

TEST_CASE("Taylor series of an f1 term has radius 1 / sqrt(a)") {
  // 1 / (1 + a r^2) = sum_j (-a r^2)^j about the shift.
  const double a = 100.0;
  auto partial = [&](double r, int terms) {
    double s = 0.0, t = 1.0;
    for (int j = 0; j < terms; ++j) {
      s += t;
      t *= -a * r * r;
    }
    return s;
  };
  const TestFunction f(FunctionKind::F1, 1, a, {make_point(0.0)});
  const double inside = 0.5 / std::sqrt(a);
  const double outside = 2.0 / std::sqrt(a);
  CHECK(std::abs(partial(inside, 31) - f(make_point(inside))) < 1e-15);
  CHECK(std::abs(partial(outside, 31) - f(make_point(outside))) > 1e15);
  CHECK(std::abs(partial(outside, 31)) > std::abs(partial(outside, 21)));
}

}
