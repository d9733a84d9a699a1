#include "phsadapt/harness.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include <fmt/format.h>
#include <fmt/os.h>

#include "phsadapt/basis.hpp"
#include "phsadapt/errors.hpp"
#include "phsadapt/kdtree.hpp"
#include "phsadapt/local_interp.hpp"

namespace phsadapt {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw InvalidArgument(fmt::format("{}: '{}' is not a number", key, v));
  }
}

template <class Int>
Int to_int(const std::string& key, const std::string& v) {
  Int x{};
  const auto* end = v.data() + v.size();
  auto [p, ec] = std::from_chars(v.data(), end, x);
  if (ec != std::errc() || p != end) throw InvalidArgument(fmt::format("{}: '{}' is not an integer", key, v));
  return x;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw InvalidArgument(fmt::format("{}: '{}' is not a boolean", key, v));
}

AdaptiveConfig adaptive_config(const RunConfig& c, Family family, int dim) {
  AdaptiveConfig a;
  a.dim = dim;
  a.family = family;
  a.m = c.m;
  a.mu = c.mu;
  a.n = c.n;
  a.eps = c.eps;
  a.l_max = c.l_max;
  a.n_cap = c.n_cap;
  a.violators_only = c.violators_only;
  a.singular = c.singular;
  a.workers = c.workers;
  return a;
}

double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  if (v.size() % 2 == 1) return *mid;
  const double hi = *mid;
  const double lo = *std::max_element(v.begin(), mid);
  return 0.5 * (lo + hi);
}

}  // namespace

void apply_setting(RunConfig& c, const std::string& key_in, const std::string& value_in) {
  const std::string key = trim(key_in);
  const std::string v = trim(value_in);
  if (key == "function") {
    c.function = parse_function_kind(v);
  } else if (key == "a") {
    c.a = to_double(key, v);
  } else if (key == "m") {
    c.m = to_int<int>(key, v);
  } else if (key == "mu") {
    c.mu = to_int<int>(key, v);
  } else if (key == "n") {
    c.n = to_int<std::size_t>(key, v);
  } else if (key == "eps") {
    c.eps = to_double(key, v);
  } else if (key == "seed") {
    c.seed = to_int<std::uint64_t>(key, v);
  } else if (key == "shifts") {
    c.shifts = parse_shifts(v);
  } else if (key == "l_max") {
    c.l_max = to_int<int>(key, v);
  } else if (key == "n_cap") {
    c.n_cap = to_int<std::size_t>(key, v);
  } else if (key == "out_dir") {
    c.out_dir = v;
  } else if (key == "workers") {
    c.workers = to_int<unsigned>(key, v);
  } else if (key == "violators_only") {
    c.violators_only = to_bool(key, v);
  } else if (key == "singular") {
    if (v == "strict") {
      c.singular = SingularPolicy::Strict;
    } else if (v == "least_squares") {
      c.singular = SingularPolicy::LeastSquares;
    } else {
      throw InvalidArgument(fmt::format("singular: '{}' (expected strict or least_squares)", v));
    }
  } else {
    throw InvalidArgument(fmt::format("unknown setting '{}'", key));
  }
  if (c.a <= 0.0) throw InvalidArgument("a must be positive");
  if (c.eps <= 0.0) throw InvalidArgument("eps must be positive");
}

std::map<std::string, std::string> read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument(fmt::format("cannot open config file '{}'", path.string()));
  std::map<std::string, std::string> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw InvalidArgument(fmt::format("{}:{}: expected key = value", path.string(), lineno));
    }
    out[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return out;
}

std::vector<Point> parse_shifts(const std::string& text) {
  std::vector<Point> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ';')) {
    item = trim(item);
    if (item.empty()) continue;
    Point p{0.0, 0.0, 0.0};
    std::stringstream cs(item);
    std::string coord;
    std::size_t j = 0;
    while (std::getline(cs, coord, ',')) {
      if (j >= 2) throw InvalidArgument(fmt::format("shifts: too many coordinates in '{}'", item));
      p[j++] = to_double("shifts", trim(coord));
    }
    out.push_back(p);
  }
  if (out.empty()) throw InvalidArgument("shifts: empty list");
  return out;
}

TestFunction make_test_function(const RunConfig& c, int dim) {
  if (c.function == FunctionKind::Linear) return TestFunction(FunctionKind::Linear, dim, 1.0, {});
  if (!c.shifts.empty()) return TestFunction(c.function, dim, c.a, c.shifts);
  return TestFunction::seeded(c.function, dim, c.a, c.seed);
}

ExperimentResult run_experiment(const RunConfig& c, Family family, int dim, bool write_files) {
  const TestFunction tf = make_test_function(c, dim);
  ExactOracle oracle;
  oracle.cell_integral = [&](const Cell& cell) { return tf.exact_integral(cell); };
  oracle.gradient = [&](const Point& x) { return tf.gradient(x); };
  oracle.total_integral = tf.exact_integral();

  ExperimentResult res;
  res.report = run_adaptive([&](const Point& x) { return tf(x); }, adaptive_config(c, family, dim), &oracle);
  std::vector<double> ratios;
  for (const auto& r : res.report.records) {
    res.max_error = std::max(res.max_error, r.actual);
    if (r.actual > 1e-14) ratios.push_back(r.estimate / r.actual);
  }
  res.median_ratio = median(std::move(ratios));

  if (write_files) {
    std::filesystem::create_directories(c.out_dir);
    write_nodes_csv(c.out_dir / "nodes.csv", res.report.state.nodes);
    if (family == Family::Quadrature) write_cells_csv(c.out_dir / "cells.csv", res.report.state.tessellation, dim);
    write_errors_csv(c.out_dir / "errors.csv", res.report);
    write_summary_csv(c.out_dir / "summary.csv", res.report);
    write_levels_csv(c.out_dir / "levels.csv", res.report);
  }
  return res;
}

std::vector<SweepCell> run_sweep(const SweepConfig& sc, bool write_files) {
  if (sc.seeds < 1) throw InvalidArgument("sweep: seeds must be positive");
  std::vector<SweepCell> cells;
  std::optional<fmt::ostream> runs;
  if (write_files) {
    std::filesystem::create_directories(sc.base.out_dir);
    runs.emplace(fmt::output_file((sc.base.out_dir / "sweep_runs.csv").string()));
    runs->print("a,eps,seed,N,levels,reason,global_error,max_error\n");
  }
  for (double a : sc.a_values) {
    for (double eps : sc.eps_values) {
      SweepCell cell{a, eps, 0.0, 0.0, 0.0};
      for (int s = 0; s < sc.seeds; ++s) {
        RunConfig c = sc.base;
        c.a = a;
        c.eps = eps;
        c.seed = sc.base.seed + static_cast<std::uint64_t>(s);
        c.shifts.clear();
        const ExperimentResult r = run_experiment(c, sc.family, sc.dim, false);
        cell.mean_nodes += static_cast<double>(r.report.final_nodes);
        cell.mean_max_error += r.max_error;
        cell.mean_global_error += r.report.global_error;
        if (runs) {
          runs->print("{:.17g},{:.17g},{},{},{},{},{:.17g},{:.17g}\n", a, eps, c.seed, r.report.final_nodes,
                      r.report.levels_used, to_string(r.report.reason), r.report.global_error, r.max_error);
        }
      }
      cell.mean_nodes /= sc.seeds;
      cell.mean_max_error /= sc.seeds;
      cell.mean_global_error /= sc.seeds;
      cells.push_back(cell);
    }
  }
  if (write_files) {
    runs->close();
    auto out = fmt::output_file((sc.base.out_dir / "sweep.csv").string());
    out.print("a,eps,mean_N,log10_mean_N,mean_max_error,mean_global_error\n");
    for (const auto& c : cells) {
      out.print("{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", c.a, c.eps, c.mean_nodes,
                std::log10(c.mean_nodes), c.mean_max_error, c.mean_global_error);
    }
  }
  return cells;
}

Stencil random_stencil(int dim, int m, int mu, std::size_t n, std::uint64_t seed) {
  if (dim < 1 || dim > 3) throw InvalidArgument("random_stencil: dimension not in 1..3");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  auto draw = [&](double scale) {
    Point p{0.0, 0.0, 0.0};
    for (int j = 0; j < dim; ++j) p[static_cast<std::size_t>(j)] = scale * u(rng);
    return p;
  };
  // Jittered lattice: quasi-uniform like the adaptive node sets, without the
  // near-coincident pairs of a uniform cloud.
  const std::size_t target = std::max<std::size_t>(4 * n, 64);
  std::size_t per_axis = 2;
  while (static_cast<std::size_t>(std::pow(static_cast<double>(per_axis), dim)) < target) ++per_axis;
  const double spacing = 2.0 / static_cast<double>(per_axis - 1);
  std::vector<Point> cloud;
  std::array<std::size_t, 3> ijk{};
  for (;;) {
    Point p{0.0, 0.0, 0.0};
    for (int j = 0; j < dim; ++j) {
      const auto a = static_cast<std::size_t>(j);
      p[a] = std::clamp(-1.0 + spacing * static_cast<double>(ijk[a]) + 0.3 * spacing * u(rng), -1.0, 1.0);
    }
    cloud.push_back(p);
    int j = 0;
    while (j < dim && ++ijk[static_cast<std::size_t>(j)] == per_axis) ijk[static_cast<std::size_t>(j++)] = 0;
    if (j == dim) break;
  }
  Stencil s;
  s.dim = dim;
  s.m = m;
  s.mu = mu;
  s.center = draw(0.25);
  const KdTree tree(cloud, dim);
  for (NodeId id : tree.nearest(s.center, n)) s.nodes.push_back(cloud[id]);
  return s;
}

std::vector<TimingRow> bench_timing(const std::vector<int>& dims, const std::vector<int>& ms,
                                    const std::vector<int>& mus, int reps, std::uint64_t seed) {
  if (reps < 1) throw InvalidArgument("bench_timing: reps must be positive");
  using Clock = std::chrono::steady_clock;
  std::vector<TimingRow> rows;
  std::uint64_t stream = seed;
  for (int d : dims) {
    for (int m : ms) {
      for (int mu : mus) {
        const std::size_t n = count_monomials(d, m + mu);
        const OperatorSpec op = OperatorSpec::derivative(MultiIndex::unit(d, 0));
        TimingRow row{d, m, mu, n, 0.0, 0.0, 0.0};
        double sink = 0.0;
        for (int r = 0; r < reps; ++r) {
          Stencil s;
          // Redraw until the stencil is unisolvent for degree m + mu.
          for (;;) {
            s = random_stencil(d, m, mu, n, stream++);
            try {
              const auto sys = assemble_system(s);
              extend_weights(sys, solve_weights(sys, op, s), op, s, mu);
              break;
            } catch (const Error&) {
            }
          }
          const auto t0 = Clock::now();
          const SaddleSystem sys_m = assemble_system(s, m);
          const Eigen::MatrixXd w_m = solve_weights(sys_m, op, s);
          const auto t1 = Clock::now();
          const SaddleSystem sys_full = assemble_system(s, m + mu);
          const Eigen::MatrixXd w_full = solve_weights(sys_full, op, s);
          const auto t2 = Clock::now();
          const Eigen::MatrixXd w_ext = extend_weights(sys_m, w_m, op, s, mu);
          const auto t3 = Clock::now();
          row.tau_m += std::chrono::duration<double>(t1 - t0).count();
          row.tau_mmu += std::chrono::duration<double>(t2 - t1).count();
          row.tau_ext += std::chrono::duration<double>(t3 - t2).count();
          sink += w_full(0, 0) + w_ext(0, 0);
        }
        row.tau_m /= reps;
        row.tau_mmu /= reps;
        row.tau_ext /= reps;
        if (!std::isfinite(sink)) throw SingularSystem("bench_timing: non-finite weights");
        rows.push_back(row);
      }
    }
  }
  return rows;
}

void write_timing_csv(const std::filesystem::path& path, const std::vector<TimingRow>& rows) {
  auto out = fmt::output_file(path.string());
  out.print("d,m,mu,n,tau_m,tau_mmu,tau_ext,ratio_full,ratio_ext\n");
  for (const auto& r : rows) {
    out.print("{},{},{},{},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", r.d, r.m, r.mu, r.n, r.tau_m, r.tau_mmu,
              r.tau_ext, r.tau_mmu / r.tau_m, r.tau_ext / r.tau_m);
  }
}

TrapezoidRun run_trapezoid(const RunConfig& c, bool write_files) {
  const TestFunction tf = make_test_function(c, 1);
  TrapezoidRun run;
  run.result = adaptive_trapezoid([&](double x) { return tf(make_point(x)); }, -1.0, 1.0, c.eps);
  run.exact = tf.exact_integral();
  run.error = std::abs(run.result.value - run.exact);
  const auto& bp = run.result.breakpoints;
  for (std::size_t i = 0; i + 1 < bp.size(); ++i) {
    const double lo = bp[i];
    const double hi = bp[i + 1];
    const double trap = 0.5 * (hi - lo) * (tf(make_point(lo)) + tf(make_point(hi)));
    run.max_error = std::max(run.max_error, std::abs(trap - tf.exact_integral(Cell::interval(lo, hi))));
  }
  if (write_files) {
    std::filesystem::create_directories(c.out_dir);
    auto out = fmt::output_file((c.out_dir / "trapz_summary.csv").string());
    out.print("N,intervals,value,exact,error,max_error\n");
    out.print("{},{},{:.17g},{:.17g},{:.17g},{:.17g}\n", run.result.nodes, run.result.intervals, run.result.value,
              run.exact, run.error, run.max_error);
  }
  return run;
}

}  // namespace phsadapt
