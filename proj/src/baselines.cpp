#include "phsadapt/baselines.hpp"

#include <cmath>

#include <fmt/format.h>

#include "phsadapt/basis.hpp"
#include "phsadapt/errors.hpp"
#include "phsadapt/quadrature.hpp"

namespace phsadapt {

namespace {

constexpr int kMaxTrapezoidDepth = 60;

struct TrapezoidWalk {
  const std::function<double(double)>& f;
  double eps;
  double length;
  TrapezoidResult result;

  void visit(double lo, double hi, double flo, double fhi, int depth) {
    const double mid = 0.5 * (lo + hi);
    const double fmid = f(mid);
    const double h = hi - lo;
    const double trap = 0.5 * h * (flo + fhi);
    const double simpson = h / 6.0 * (flo + 4.0 * fmid + fhi);
    if (std::abs(simpson - trap) <= eps * h / length) {
      result.value += trap;
      ++result.intervals;
      result.breakpoints.push_back(hi);
      return;
    }
    if (depth >= kMaxTrapezoidDepth) {
      throw MaxDepthExceeded(fmt::format("adaptive_trapezoid: no convergence on [{}, {}]", lo, hi));
    }
    visit(lo, mid, flo, fmid, depth + 1);
    visit(mid, hi, fmid, fhi, depth + 1);
  }
};

}  // namespace

TrapezoidResult adaptive_trapezoid(const std::function<double(double)>& f, double a, double b, double eps) {
  if (!(b > a)) throw InvalidArgument("adaptive_trapezoid: need a < b");
  if (!(eps > 0.0)) throw InvalidArgument("adaptive_trapezoid: eps must be positive");
  TrapezoidWalk walk{f, eps, b - a, {}};
  walk.result.breakpoints.push_back(a);
  walk.visit(a, b, f(a), f(b), 0);
  walk.result.nodes = walk.result.intervals + 1;
  return walk.result;
}

Eigen::MatrixXd oracle_full_solve(const Stencil& stencil, const OperatorSpec& op, int degree) {
  using Real = long double;
  using MatrixR = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;
  const auto n = static_cast<Eigen::Index>(stencil.nodes.size());
  const MultiIndexBasis basis = enumerate_basis(stencil.dim, degree);
  const auto mp = static_cast<Eigen::Index>(basis.size());
  const Eigen::Index size = n + mp;

  auto node = [&](Eigen::Index i) -> const Point& { return stencil.nodes[static_cast<std::size_t>(i)]; };
  MatrixR s = MatrixR::Zero(size, size);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      Real r2 = 0;
      for (std::size_t k = 0; k < 3; ++k) {
        const Real d = static_cast<Real>(node(i)[k]) - static_cast<Real>(node(j)[k]);
        r2 += d * d;
      }
      const Real r = std::sqrt(r2);
      s(i, j) = r * r * r;
    }
    for (Eigen::Index l = 0; l < mp; ++l) {
      Real v = 1;
      for (int k = 0; k < stencil.dim; ++k) {
        const auto kk = static_cast<std::size_t>(k);
        const Real t = static_cast<Real>(node(i)[kk]) - static_cast<Real>(stencil.center[kk]);
        for (int e = 0; e < basis[static_cast<std::size_t>(l)][k]; ++e) v *= t;
      }
      s(i, n + l) = v;
      s(n + l, i) = v;
    }
  }

  const int comps = op.components(stencil.dim);
  Eigen::MatrixXd rhs(size, comps);
  rhs.topRows(n) = kernel_rhs(op, stencil);
  rhs.bottomRows(mp) = monomial_rhs(op, basis, stencil.center, 0, basis.size());

  Eigen::FullPivLU<MatrixR> lu(s);
  if (!lu.isInvertible()) throw SingularSystem("oracle_full_solve: singular saddle matrix");
  const MatrixR sol = lu.solve(rhs.cast<Real>());
  return sol.topRows(n).cast<double>();
}

double oracle_integral(const std::function<double(const Point&)>& f, const Cell& cell) {
  return integrate_cell(f, cell, 1e-15, 1e-12);
}

}  // namespace phsadapt
