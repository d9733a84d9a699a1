#include "phsadapt/adaptive_driver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

#include <fmt/format.h>
#include <fmt/os.h>

#include "parallel.hpp"
#include "phsadapt/basis.hpp"
#include "phsadapt/errors.hpp"
#include "phsadapt/local_interp.hpp"

namespace phsadapt {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string where(const Point& x, int dim) {
  return dim == 1 ? fmt::format("({:.17g})", x[0]) : fmt::format("({:.17g}, {:.17g})", x[0], x[1]);
}

}  // namespace

std::string to_string(Termination t) {
  switch (t) {
    case Termination::Converged:
      return "converged";
    case Termination::LevelLimit:
      return "level_limit";
    case Termination::NodeCap:
      return "node_cap";
  }
  return "?";
}

std::size_t AdaptiveConfig::stencil_size() const {
  return n > 0 ? n : count_monomials(dim, m + mu);
}

void AdaptiveConfig::validate() const {
  if (dim < 1 || dim > 2) throw InvalidArgument(fmt::format("dimension {} not in 1..2", dim));
  if (m < 0) throw InvalidArgument("m must be non-negative");
  if (mu < 1) throw InvalidArgument("mu must be at least 1");
  if (m + mu > 12) throw InvalidArgument("m + mu must not exceed 12");
  if (family == Family::Differentiation && m < 1) throw InvalidArgument("differentiation needs m >= 1");
  if (!(eps > 0.0)) throw InvalidArgument("eps must be positive");
  if (l_max < 0) throw InvalidArgument("l_max must be non-negative");
  if (count_per_axis < 2) throw InvalidArgument("count_per_axis must be at least 2");
  if (n != 0 && n < count_monomials(dim, m + mu)) {
    throw InvalidArgument(fmt::format("n = {} is below M_(d, m+mu) = {}", n, count_monomials(dim, m + mu)));
  }
}

AdaptiveReport run_adaptive(const ScalarField& f, const AdaptiveConfig& config, const ExactOracle* oracle) {
  config.validate();
  const std::size_t n = config.stencil_size();
  const unsigned workers = detail::resolve_workers(config.workers);

  AdaptiveReport report;
  report.config = config;
  RefinementState& state = report.state;
  state = make_initial_state(config.dim, config.family, config.count_per_axis);
  if (state.nodes.size() < n) {
    throw InsufficientNodes(fmt::format("initial grid has {} nodes, stencil needs {}", state.nodes.size(), n));
  }

  std::vector<double> fvals;
  std::unordered_map<std::size_t, PointRecord> records;
  std::unordered_map<std::size_t, std::vector<NodeId>> previous;  // sorted neighbor ids
  bool cap_hit = false;

  for (;;) {
    state.nodes.rebuild_index();
    const std::size_t known = fvals.size();
    fvals.resize(state.nodes.size());
    detail::parallel_for(fvals.size() - known, workers,
                         [&](std::size_t i) { fvals[known + i] = f(state.nodes[known + i]); });

    const std::vector<EvalPoint> eval = state.evaluation_points();
    std::vector<std::vector<NodeId>> hoods(eval.size());
    detail::parallel_for(eval.size(), workers,
                         [&](std::size_t i) { hoods[i] = state.nodes.nearest_neighbors(eval[i].x, n); });

    std::vector<std::size_t> dirty;  // indices into eval
    state.neighborhoods.clear();
    for (std::size_t i = 0; i < eval.size(); ++i) {
      std::vector<NodeId> sorted = hoods[i];
      std::sort(sorted.begin(), sorted.end());
      const std::size_t id = eval[i].id;
      auto it = previous.find(id);
      bool recompute = state.level == 0 || it == previous.end() || it->second != sorted;
      if (recompute && config.violators_only && state.level > 0 && it != previous.end()) {
        recompute = records.at(id).estimate > config.eps;
      }
      if (recompute) dirty.push_back(i);
      previous[id] = std::move(sorted);
      state.neighborhoods[id] = hoods[i];
    }
    state.dirty.clear();
    for (std::size_t i : dirty) state.dirty.push_back(eval[i].id);

    LevelStats stats{state.level, state.nodes.size(), eval.size(), dirty.size(), 0};
    if (dirty.empty()) {
      report.reason = Termination::Converged;
      report.levels.push_back(stats);
      break;
    }

    std::vector<PointRecord> fresh(dirty.size());
    detail::parallel_for(dirty.size(), workers, [&](std::size_t j) {
      const EvalPoint& ep = eval[dirty[j]];
      const std::vector<NodeId>& hood = hoods[dirty[j]];
      Stencil st;
      st.dim = config.dim;
      st.center = ep.x;
      st.m = config.m;
      st.mu = config.mu;
      st.nodes.reserve(hood.size());
      Eigen::VectorXd fv(static_cast<Eigen::Index>(hood.size()));
      for (std::size_t q = 0; q < hood.size(); ++q) {
        st.nodes.push_back(state.nodes[hood[q]]);
        fv(static_cast<Eigen::Index>(q)) = fvals[hood[q]];
      }
      const OperatorSpec op = config.family == Family::Quadrature
                                  ? OperatorSpec::integral(state.tessellation[ep.id].geometry)
                                  : OperatorSpec::gradient();
      WeightPair pair;
      try {
        pair = compute_weight_pair(st, op, config.singular);
      } catch (const SingularSystem& e) {
        throw SingularSystem(fmt::format("level {}, point {} at {}: {}", state.level, ep.id,
                                         where(ep.x, config.dim), e.what()));
      } catch (const DegenerateExtension& e) {
        throw DegenerateExtension(fmt::format("level {}, point {} at {}: {}", state.level, ep.id,
                                              where(ep.x, config.dim), e.what()));
      }
      PointRecord& r = fresh[j];
      r.id = ep.id;
      r.x = ep.x;
      r.level = state.level;
      r.value = apply_weights(pair.w_m, fv);
      r.estimate = error_estimate(pair, fv);
      r.actual = kNaN;
      r.ill_conditioned = pair.ill_conditioned;
      r.rank_deficient = pair.rank_deficient;
    });
    for (auto& r : fresh) records[r.id] = std::move(r);

    if (state.level > config.l_max || cap_hit) {
      report.reason = cap_hit ? Termination::NodeCap : Termination::LevelLimit;
      report.levels.push_back(stats);
      break;
    }

    for (std::size_t i : dirty) {
      const std::size_t id = eval[i].id;
      if (records.at(id).estimate <= config.eps) continue;
      ++stats.refined;
      if (config.family == Family::Quadrature) {
        refine_quadrature_cell(state, id);
        records.erase(id);
        previous.erase(id);
      } else {
        refine_differentiation_point(state, id);
      }
    }
    report.levels.push_back(stats);
    ++state.level;
    cap_hit = state.nodes.size() > config.n_cap;
  }

  const std::vector<EvalPoint> final_points = state.evaluation_points();
  report.records.reserve(final_points.size());
  for (const auto& ep : final_points) report.records.push_back(records.at(ep.id));

  if (oracle) {
    detail::parallel_for(report.records.size(), workers, [&](std::size_t i) {
      PointRecord& r = report.records[i];
      if (config.family == Family::Quadrature) {
        if (oracle->cell_integral) r.actual = std::abs(r.value(0) - oracle->cell_integral(state.tessellation[r.id].geometry));
      } else if (oracle->gradient) {
        const Point g = oracle->gradient(r.x);
        double s = 0.0;
        for (int j = 0; j < config.dim; ++j) {
          const double d = r.value(j) - g[static_cast<std::size_t>(j)];
          s += d * d;
        }
        r.actual = std::sqrt(s);
      }
    });
  }

  report.final_nodes = state.nodes.size();
  report.levels_used = state.level;
  report.global_error = kNaN;
  for (const auto& r : report.records) {
    if (r.ill_conditioned) ++report.ill_conditioned_count;
    if (r.rank_deficient) ++report.rank_deficient_count;
  }
  if (config.family == Family::Quadrature) {
    double sum = 0.0;
    for (const auto& r : report.records) sum += r.value(0);
    report.global_value = sum;
    if (oracle && oracle->total_integral) report.global_error = std::abs(sum - *oracle->total_integral);
  } else {
    double worst = 0.0;
    for (const auto& r : report.records) worst = std::max(worst, r.estimate);
    report.global_value = worst;
    if (oracle && oracle->gradient) {
      double worst_actual = 0.0;
      for (const auto& r : report.records) worst_actual = std::max(worst_actual, r.actual);
      report.global_error = worst_actual;
    }
  }
  return report;
}

std::vector<PointRecord> evaluate_final(const AdaptiveReport& report, std::span<const std::size_t> ids) {
  std::vector<PointRecord> out;
  out.reserve(ids.size());
  for (std::size_t id : ids) {
    auto it = std::lower_bound(report.records.begin(), report.records.end(), id,
                               [](const PointRecord& r, std::size_t v) { return r.id < v; });
    if (it == report.records.end() || it->id != id) {
      throw InvalidArgument(fmt::format("evaluate_final: no evaluation point {}", id));
    }
    out.push_back(*it);
  }
  return out;
}

void write_errors_csv(const std::filesystem::path& path, const AdaptiveReport& report) {
  const int dim = report.config.dim;
  auto out = fmt::output_file(path.string());
  out.print("{}", dim == 1 ? "id,x,estimate,actual,level\n" : "id,x,y,estimate,actual,level\n");
  for (const auto& r : report.records) {
    if (dim == 1) {
      out.print("{},{:.17g},{:.17g},{:.17g},{}\n", r.id, r.x[0], r.estimate, r.actual, r.level);
    } else {
      out.print("{},{:.17g},{:.17g},{:.17g},{:.17g},{}\n", r.id, r.x[0], r.x[1], r.estimate, r.actual, r.level);
    }
  }
}

void write_summary_csv(const std::filesystem::path& path, const AdaptiveReport& report) {
  auto out = fmt::output_file(path.string());
  out.print("reason,N,levels,global_value,global_error\n");
  out.print("{},{},{},{:.17g},{:.17g}\n", to_string(report.reason), report.final_nodes, report.levels_used,
            report.global_value, report.global_error);
}

void write_levels_csv(const std::filesystem::path& path, const AdaptiveReport& report) {
  auto out = fmt::output_file(path.string());
  out.print("level,N,K,recomputed,refined\n");
  for (const auto& l : report.levels) {
    out.print("{},{},{},{},{}\n", l.level, l.nodes, l.eval_points, l.recomputed, l.refined);
  }
}

}  // namespace phsadapt
