#include <cstdlib>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "phsadapt/errors.hpp"
#include "phsadapt/harness.hpp"

namespace {

using namespace phsadapt;

constexpr int kConfigError = 2;
constexpr int kSingular = 3;

// Raw option values by setting key; only options given on the command line
// are applied, on top of the config file and the environment.
struct RunOptions {
  std::string config_file;
  std::map<std::string, std::string> raw;
  std::map<std::string, CLI::Option*> given;

  void attach(CLI::App* cmd) {
    cmd->add_option("-c,--config", config_file, "key = value config file");
    const std::vector<std::pair<std::string, std::string>> keys{
        {"function", "f1, f2 or linear"},
        {"a", "sharpness a"},
        {"m", "polynomial degree m"},
        {"mu", "degree extension mu"},
        {"n", "stencil size (0: M_{d,m+mu})"},
        {"eps", "tolerance"},
        {"seed", "shift seed"},
        {"shifts", "explicit shifts, 'x;x' or 'x,y;x,y'"},
        {"l_max", "maximum refinement level"},
        {"n_cap", "node cap"},
        {"out_dir", "output directory"},
        {"workers", "worker threads (0: all cores)"},
        {"violators_only", "recompute only tolerance violators"},
        {"singular", "non-unisolvent stencils: strict or least_squares"},
    };
    for (const auto& [key, help] : keys) {
      std::string flag = "--" + key;
      for (auto& ch : flag)
        if (ch == '_') ch = '-';
      given[key] = cmd->add_option(flag, raw[key], help);
    }
  }

  RunConfig resolve() const {
    RunConfig c;
    if (!config_file.empty()) {
      for (const auto& [k, v] : read_config_file(config_file)) apply_setting(c, k, v);
    }
    if (const char* env = std::getenv("PHSADAPT_OUT_DIR"); env && *env) c.out_dir = env;
    for (const auto& [k, opt] : given) {
      if (opt->count() > 0) apply_setting(c, k, raw.at(k));
    }
    return c;
  }
};

void print_run(const std::string& name, const ExperimentResult& r, const RunConfig& c) {
  const auto& rep = r.report;
  fmt::print("{}: N = {}, levels = {}, reason = {}\n", name, rep.final_nodes, rep.levels_used, to_string(rep.reason));
  fmt::print("  global value = {:.15g}, global error = {:.3e}, max point error = {:.3e}\n", rep.global_value,
             rep.global_error, r.max_error);
  fmt::print("  median estimate/actual = {:.3g}, rank-deficient stencils = {}, ill-conditioned = {}\n",
             r.median_ratio, rep.rank_deficient_count, rep.ill_conditioned_count);
  fmt::print("  output: {}\n", c.out_dir.string());
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    const auto next = s.find(',', pos);
    const std::string item = s.substr(pos, next == std::string::npos ? std::string::npos : next - pos);
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw InvalidArgument(fmt::format("'{}' is not a number list", s));
    }
    if (next == std::string::npos) break;
    pos = next + 1;
  }
  return out;
}

std::vector<int> to_ints(const std::vector<double>& v) {
  std::vector<int> out;
  for (double x : v) out.push_back(static_cast<int>(x));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive meshfree quadrature and differentiation with polyharmonic splines"};
  app.require_subcommand(1);

  struct RunCommand {
    const char* name;
    Family family;
    int dim;
    const char* help;
  };
  const std::vector<RunCommand> run_commands{
      {"quad1d", Family::Quadrature, 1, "adaptive quadrature on [-1, 1]"},
      {"diff1d", Family::Differentiation, 1, "adaptive differentiation on [-1, 1]"},
      {"quad2d", Family::Quadrature, 2, "adaptive quadrature on [-1, 1]^2"},
      {"diff2d", Family::Differentiation, 2, "adaptive gradient on [-1, 1]^2"},
  };
  std::vector<RunOptions> run_opts(run_commands.size());
  std::vector<CLI::App*> run_apps;
  for (std::size_t i = 0; i < run_commands.size(); ++i) {
    auto* cmd = app.add_subcommand(run_commands[i].name, run_commands[i].help);
    run_opts[i].attach(cmd);
    run_apps.push_back(cmd);
  }

  RunOptions sweep_opts;
  auto* sweep = app.add_subcommand("sweep", "node counts over an (a, eps) grid and several seeds");
  sweep_opts.attach(sweep);
  int sweep_dim = 1;
  std::string sweep_family = "quad";
  std::string sweep_a = "1,10,100,1000";
  std::string sweep_eps = "1e-7,1e-6,1e-5,1e-4";
  int sweep_seeds = 10;
  sweep->add_option("--dim", sweep_dim, "dimension (1 or 2)");
  sweep->add_option("--family", sweep_family, "quad or diff");
  sweep->add_option("--a-values", sweep_a, "comma-separated a grid");
  sweep->add_option("--eps-values", sweep_eps, "comma-separated eps grid");
  sweep->add_option("--seeds", sweep_seeds, "seeds per grid cell");

  auto* bench = app.add_subcommand("bench-timing", "timing of degree-m, direct and extended solves");
  std::string bench_dims = "1,2,3";
  std::string bench_ms = "1,2,3,4";
  std::string bench_mus = "1,2,3";
  int bench_reps = 1000;
  std::uint64_t bench_seed = 1;
  std::string bench_out = ".";
  bench->add_option("--dims", bench_dims, "comma-separated dimensions");
  bench->add_option("--ms", bench_ms, "comma-separated m values");
  bench->add_option("--mus", bench_mus, "comma-separated mu values");
  bench->add_option("--reps", bench_reps, "stencils per configuration");
  bench->add_option("--seed", bench_seed, "seed");
  auto* bench_out_opt = bench->add_option("--out-dir", bench_out, "output directory");

  RunOptions trapz_opts;
  auto* trapz = app.add_subcommand("trapz-baseline", "adaptive trapezoid rule on the 1D test function");
  trapz_opts.attach(trapz);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  try {
    for (std::size_t i = 0; i < run_apps.size(); ++i) {
      if (!run_apps[i]->parsed()) continue;
      const RunConfig c = run_opts[i].resolve();
      const auto r = run_experiment(c, run_commands[i].family, run_commands[i].dim);
      print_run(run_commands[i].name, r, c);
      return 0;
    }
    if (sweep->parsed()) {
      SweepConfig sc;
      sc.base = sweep_opts.resolve();
      if (sweep_dim < 1 || sweep_dim > 2) throw InvalidArgument("--dim must be 1 or 2");
      if (sweep_family != "quad" && sweep_family != "diff") throw InvalidArgument("--family must be quad or diff");
      sc.dim = sweep_dim;
      sc.family = sweep_family == "quad" ? Family::Quadrature : Family::Differentiation;
      sc.a_values = parse_list(sweep_a);
      sc.eps_values = parse_list(sweep_eps);
      sc.seeds = sweep_seeds;
      const auto cells = run_sweep(sc);
      for (const auto& cell : cells) {
        fmt::print("a = {:<8g} eps = {:<8g} mean N = {:.1f}\n", cell.a, cell.eps, cell.mean_nodes);
      }
      return 0;
    }
    if (bench->parsed()) {
      std::filesystem::path out = bench_out;
      if (const char* env = std::getenv("PHSADAPT_OUT_DIR"); env && *env && bench_out_opt->count() == 0) out = env;
      const auto rows = bench_timing(to_ints(parse_list(bench_dims)), to_ints(parse_list(bench_ms)),
                                     to_ints(parse_list(bench_mus)), bench_reps, bench_seed);
      std::filesystem::create_directories(out);
      write_timing_csv(out / "timing.csv", rows);
      for (const auto& r : rows) {
        fmt::print("d={} m={} mu={} n={:<3} tau_m={:.3e} tau_full={:.3e} tau_ext={:.3e}\n", r.d, r.m, r.mu, r.n,
                   r.tau_m, r.tau_mmu, r.tau_ext);
      }
      return 0;
    }
    if (trapz->parsed()) {
      const RunConfig c = trapz_opts.resolve();
      const auto r = run_trapezoid(c);
      fmt::print("trapz-baseline: N = {}, value = {:.15g}, error = {:.3e}, max interval error = {:.3e}\n",
                 r.result.nodes, r.result.value, r.error, r.max_error);
      return 0;
    }
  } catch (const InvalidArgument& e) {
    fmt::print(stderr, "config error: {}\n", e.what());
    return kConfigError;
  } catch (const SingularSystem& e) {
    fmt::print(stderr, "singular system: {}\n", e.what());
    return kSingular;
  } catch (const DegenerateExtension& e) {
    fmt::print(stderr, "singular system: {}\n", e.what());
    return kSingular;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 1;
  }
  return 0;
}
