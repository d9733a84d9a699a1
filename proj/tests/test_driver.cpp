#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "phsadapt/adaptive_driver.hpp"
#include "phsadapt/errors.hpp"
#include "phsadapt/fixtures.hpp"
#include "phsadapt/test_functions.hpp"

using namespace phsadapt;

namespace {

AdaptiveConfig config_for(int dim, Family family, int m, double eps) {
  AdaptiveConfig c;
  c.dim = dim;
  c.family = family;
  c.m = m;
  c.eps = eps;
  return c;
}

ExactOracle oracle_for(const TestFunction& f) {
  return {[&f](const Cell& c) { return f.exact_integral(c); }, [&f](const Point& x) { return f.gradient(x); },
          f.exact_integral()};
}

std::vector<std::size_t> ids_of(const AdaptiveReport& r) {
  std::vector<std::size_t> ids;
  for (const auto& rec : r.records) ids.push_back(rec.id);
  return ids;
}

std::string first_line(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);
  return line;
}

}  // namespace

TEST_SUITE("adaptive_driver") {

TEST_CASE("config validation") {
  auto c = config_for(1, Family::Quadrature, 1, 1e-5);
  CHECK(c.stencil_size() == 4);
  c.mu = 0;
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
  c = config_for(2, Family::Quadrature, 4, 1e-5);
  CHECK(c.stencil_size() == 28);
  c.n = 20;
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
  c = config_for(1, Family::Quadrature, 1, 0.0);
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
  c = config_for(3, Family::Quadrature, 1, 1e-5);
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
}

TEST_CASE("polynomials of degree <= m converge at level 0") {
  struct Case {
    int dim;
    Family family;
    int m;
  };
  for (const Case k : {Case{1, Family::Quadrature, 2}, Case{1, Family::Differentiation, 2}, Case{2, Family::Quadrature, 2},
                       Case{2, Family::Differentiation, 4}}) {
    CAPTURE(k.dim);
    CAPTURE(k.m);
    const auto f = [](const Point& x) { return 1.0 + 2.0 * x[0] - x[1] + 0.5 * x[0] * x[1] - x[0] * x[0]; };
    const auto r = run_adaptive(f, config_for(k.dim, k.family, k.m, 1e-8));
    CHECK(r.reason == Termination::Converged);
    CHECK(r.final_nodes == (k.dim == 1 ? 10u : 100u));
    CHECK(r.levels.size() == 2);
    CHECK(r.levels.back().recomputed == 0);
    for (const auto& rec : r.records) CHECK(rec.estimate <= 1e-10);
  }
}

TEST_CASE("evaluate_final") {
  const TestFunction lin(FunctionKind::Linear, 2, 1.0, {});
  const auto r = run_adaptive([&](const Point& x) { return lin(x); }, config_for(2, Family::Differentiation, 2, 1e-6));
  const auto ids = ids_of(r);
  const auto vals = evaluate_final(r, ids);
  REQUIRE(vals.size() == ids.size());
  for (const auto& v : vals) {
    REQUIRE(v.value.size() == 2);
    CHECK(v.value(0) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(v.value(1) == doctest::Approx(1.0).epsilon(1e-10));
  }
  const std::vector<std::size_t> bad{123456};
  CHECK_THROWS_AS(evaluate_final(r, bad), InvalidArgument);

  const TestFunction g(FunctionKind::F2, 1, 1000.0, fixtures::kQuad1dShifts);
  const auto oracle = oracle_for(g);
  const auto q = run_adaptive([&](const Point& x) { return g(x); }, config_for(1, Family::Quadrature, 1, 1e-5), &oracle);
  double sum = 0.0;
  for (const auto& v : evaluate_final(q, ids_of(q))) sum += v.value(0);
  CHECK(sum == doctest::Approx(q.global_value).epsilon(1e-14));
  CHECK(q.global_error == doctest::Approx(std::abs(sum - g.exact_integral())).epsilon(1e-9));
}

TEST_CASE("1D derivatives of f2 against the analytic gradient") {
  const TestFunction g(FunctionKind::F2, 1, 100.0, random_shifts(1, 3));
  const auto oracle = oracle_for(g);
  const double eps = 1e-3;
  const auto r = run_adaptive([&](const Point& x) { return g(x); }, config_for(1, Family::Differentiation, 2, eps), &oracle);
  CHECK(r.reason == Termination::Converged);
  double worst = 0.0;
  for (const auto& v : evaluate_final(r, ids_of(r))) worst = std::max(worst, std::abs(v.value(0) - g.gradient(v.x)[0]));
  CHECK(worst == doctest::Approx(r.global_error).epsilon(1e-12));
  CHECK(worst <= 2 * eps);
}

TEST_CASE("level statistics and refinement bookkeeping") {
  const TestFunction g(FunctionKind::F2, 2, 100.0, random_shifts(2, 1));
  const auto r = run_adaptive([&](const Point& x) { return g(x); }, config_for(2, Family::Quadrature, 2, 1e-6));
  CHECK(r.reason == Termination::Converged);
  for (std::size_t l = 1; l < r.levels.size(); ++l) CHECK(r.levels[l].nodes >= r.levels[l - 1].nodes);
  for (const auto& s : r.levels) CHECK(s.refined <= s.recomputed);
  CHECK(r.levels.back().recomputed == 0);
  CHECK(r.final_nodes == r.state.nodes.size());
  CHECK(r.records.size() == r.state.tessellation.active_count());
  CHECK(r.state.tessellation.total_measure() == doctest::Approx(4.0).epsilon(1e-9));
  CHECK(std::is_sorted(r.records.begin(), r.records.end(), [](const auto& a, const auto& b) { return a.id < b.id; }));
  for (const auto& rec : r.records) CHECK(std::isnan(rec.actual));
}

TEST_CASE("level limit and node cap finish with an evaluation pass") {
  const TestFunction g(FunctionKind::F2, 1, 1000.0, fixtures::kQuad1dShifts);
  auto c = config_for(1, Family::Quadrature, 1, 1e-9);
  c.l_max = 2;
  const auto r = run_adaptive([&](const Point& x) { return g(x); }, c);
  CHECK(r.reason == Termination::LevelLimit);
  CHECK(r.levels_used == 3);
  CHECK(r.records.size() == r.state.tessellation.active_count());

  c.l_max = 60;
  c.n_cap = 30;
  const auto capped = run_adaptive([&](const Point& x) { return g(x); }, c);
  CHECK(capped.reason == Termination::NodeCap);
  CHECK(capped.final_nodes > 30);
  CHECK(capped.records.size() == capped.state.tessellation.active_count());
}

TEST_CASE("runs are deterministic across worker counts") {
  const TestFunction g(FunctionKind::F1, 2, 100.0, random_shifts(2, 9));
  auto c = config_for(2, Family::Differentiation, 2, 1e-2);
  c.workers = 1;
  const auto a = run_adaptive([&](const Point& x) { return g(x); }, c);
  c.workers = 4;
  const auto b = run_adaptive([&](const Point& x) { return g(x); }, c);
  REQUIRE(a.records.size() == b.records.size());
  CHECK(a.final_nodes == b.final_nodes);
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    CHECK(a.records[i].x == b.records[i].x);
    CHECK(a.records[i].estimate == b.records[i].estimate);
  }
}

TEST_CASE("violators-only updating") {
  const TestFunction g(FunctionKind::F2, 1, 1000.0, fixtures::kQuad1dShifts);
  auto c = config_for(1, Family::Quadrature, 1, 1e-5);
  const auto full = run_adaptive([&](const Point& x) { return g(x); }, c);
  c.violators_only = true;
  const auto lazy = run_adaptive([&](const Point& x) { return g(x); }, c);
  CHECK(lazy.reason == Termination::Converged);
  std::size_t full_work = 0, lazy_work = 0;
  for (const auto& s : full.levels) full_work += s.recomputed;
  for (const auto& s : lazy.levels) lazy_work += s.recomputed;
  CHECK(lazy_work <= full_work);
}

TEST_CASE("strict policy reports the failing stencil") {
  const TestFunction g(FunctionKind::F2, 2, 1000.0, fixtures::kQuad2dShifts);
  auto c = config_for(2, Family::Quadrature, 4, 1e-6);
  c.singular = SingularPolicy::Strict;
  try {
    run_adaptive([&](const Point& x) { return g(x); }, c);
    FAIL("expected an exception");
  } catch (const DegenerateExtension& e) {
    CHECK(std::string(e.what()).find("level 0") != std::string::npos);
  } catch (const SingularSystem& e) {
    CHECK(std::string(e.what()).find("level 0") != std::string::npos);
  }
}

TEST_CASE("CSV output") {
  const auto dir = std::filesystem::temp_directory_path() / "phsadapt_driver_csv";
  std::filesystem::create_directories(dir);
  const TestFunction g(FunctionKind::F2, 2, 10.0, random_shifts(2, 2));
  const auto oracle = oracle_for(g);
  const auto r = run_adaptive([&](const Point& x) { return g(x); }, config_for(2, Family::Quadrature, 1, 1e-4), &oracle);
  write_errors_csv(dir / "errors.csv", r);
  write_summary_csv(dir / "summary.csv", r);
  write_levels_csv(dir / "levels.csv", r);
  CHECK(first_line(dir / "errors.csv") == "id,x,y,estimate,actual,level");
  CHECK(first_line(dir / "summary.csv") == "reason,N,levels,global_value,global_error");
  CHECK(first_line(dir / "levels.csv") == "level,N,K,recomputed,refined");
  std::ifstream in(dir / "summary.csv");
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  CHECK(row.rfind("converged," + std::to_string(r.final_nodes) + ",", 0) == 0);
  std::filesystem::remove_all(dir);
}

}
