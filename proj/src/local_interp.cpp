#include "phsadapt/local_interp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "phsadapt/errors.hpp"

namespace phsadapt {

namespace {

using Index = Eigen::Index;

// Relative eigenvalue (or pivot) level below which the reduced extension
// matrix counts as singular.
constexpr double kReducedCutoff = 1e-10;

Index idx(std::size_t i) { return static_cast<Index>(i); }

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void check_operator(const OperatorSpec& op, int dim) {
  std::visit(Overloaded{
                 [dim](const Derivative& d) {
                   if (d.alpha.dim() != dim) throw InvalidArgument("operator: derivative dimension mismatch");
                 },
                 [](const Gradient&) {},
                 [dim](const IntegralOver& c) {
                   if (c.cell.dim() != dim) throw InvalidArgument("operator: cell dimension mismatch");
                 },
             },
             op.kind());
}

double derivative_of_kernel(const Point& node, const Point& center, const MultiIndex& alpha) {
  if (alpha.degree() == 0) return kernel_eval(node, center);
  return kernel_derivative(node, center, alpha);
}

}  // namespace

Eigen::MatrixXd SaddleSystem::solve(const Eigen::MatrixXd& rhs) const {
  if (cod_) return scale_.asDiagonal() * cod_->solve(scale_.asDiagonal() * rhs);
  return scale_.asDiagonal() * lu_.solve(scale_.asDiagonal() * rhs);
}

void validate_stencil(const Stencil& s) {
  if (s.dim < 1 || s.dim > 3) throw InvalidArgument("stencil: dimension must be 1, 2 or 3");
  if (s.m < 0) throw InvalidArgument("stencil: m must be non-negative");
  if (s.mu < 1) throw InvalidArgument("stencil: mu must be >= 1");
  if (s.nodes.empty()) throw InvalidArgument("stencil: no nodes");
  double diam = 0.0;
  for (std::size_t i = 0; i < s.nodes.size(); ++i) {
    for (std::size_t j = i + 1; j < s.nodes.size(); ++j) diam = std::max(diam, distance(s.nodes[i], s.nodes[j]));
  }
  const double tol = 1e-14 * std::max(diam, 1e-300);
  for (std::size_t i = 0; i < s.nodes.size(); ++i) {
    for (std::size_t j = i + 1; j < s.nodes.size(); ++j) {
      if (distance(s.nodes[i], s.nodes[j]) <= tol) {
        throw SingularSystem("stencil: nodes " + std::to_string(i) + " and " + std::to_string(j) + " coincide");
      }
    }
  }
}

SaddleSystem assemble_system(const Stencil& stencil, int degree, SingularPolicy policy) {
  validate_stencil(stencil);
  const auto n = stencil.size();
  SaddleSystem sys;
  sys.basis_ = enumerate_basis(stencil.dim, degree);
  sys.n_ = n;
  const auto mcount = sys.basis_.size();
  if (n < mcount) {
    throw SingularSystem("assemble_system: " + std::to_string(n) + " nodes cannot be unisolvent for " +
                         std::to_string(mcount) + " monomials");
  }

  const Eigen::MatrixXd p = vandermonde(sys.basis_, stencil.center, stencil.nodes);

  // Unisolvency check on the column-scaled Vandermonde; scaling columns does
  // not change the rank but makes the threshold independent of the spacing.
  double h = 0.0;
  for (const auto& x : stencil.nodes) h = std::max(h, distance(x, stencil.center));
  bool unisolvent = true;
  if (h > 0.0) {
    Eigen::MatrixXd ps = p;
    for (std::size_t l = 0; l < mcount; ++l) ps.col(idx(l)) /= std::pow(h, sys.basis_[l].degree());
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(ps);
    qr.setThreshold(1e-10);
    unisolvent = qr.rank() == idx(mcount);
    if (!unisolvent && policy == SingularPolicy::Strict) {
      throw SingularSystem("assemble_system: nodes are not unisolvent for degree " + std::to_string(degree));
    }
  }

  const auto size = n + mcount;
  sys.matrix_ = Eigen::MatrixXd::Zero(idx(size), idx(size));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = kernel_eval(stencil.nodes[j], stencil.nodes[i]);
      sys.matrix_(idx(i), idx(j)) = v;
      sys.matrix_(idx(j), idx(i)) = v;
    }
  }
  sys.matrix_.block(0, idx(n), idx(n), idx(mcount)) = p;
  sys.matrix_.block(idx(n), 0, idx(mcount), idx(n)) = p.transpose();

  // Symmetric scaling brings the Phi block (~h^3) and each monomial column
  // (~h^|alpha|) to unit size. The weights are unchanged; the factorization
  // and the rank and condition tests become independent of the spacing.
  sys.scale_ = Eigen::VectorXd::Ones(idx(size));
  if (h > 0.0) {
    for (std::size_t i = 0; i < n; ++i) sys.scale_(idx(i)) = std::pow(h, -1.5);
    for (std::size_t l = 0; l < mcount; ++l) sys.scale_(idx(n + l)) = std::pow(h, 1.5 - sys.basis_[l].degree());
  }
  const Eigen::MatrixXd scaled = sys.scale_.asDiagonal() * sys.matrix_ * sys.scale_.asDiagonal();

  if (!unisolvent) {
    auto& cod = sys.cod_.emplace();
    cod.setThreshold(1e-11);
    cod.compute(scaled);
    const auto& r = cod.matrixQTZ();
    const Index rank = cod.rank();
    double rmax = 0.0;
    double rmin = std::numeric_limits<double>::infinity();
    for (Index i = 0; i < rank; ++i) {
      rmax = std::max(rmax, std::abs(r(i, i)));
      rmin = std::min(rmin, std::abs(r(i, i)));
    }
    sys.condition_ = rank > 0 ? rmax / rmin : std::numeric_limits<double>::infinity();
    return sys;
  }

  sys.lu_.compute(scaled);
  const double rcond = sys.lu_.rcond();
  const auto& lu = sys.lu_.matrixLU();
  bool finite = std::isfinite(rcond);
  for (Index i = 0; i < lu.rows() && finite; ++i) finite = lu(i, i) != 0.0 && std::isfinite(lu(i, i));
  if (!finite) throw SingularSystem("assemble_system: zero pivot in the saddle system");
  sys.condition_ = rcond > 0.0 ? 1.0 / rcond : std::numeric_limits<double>::infinity();
  return sys;
}

Eigen::MatrixXd kernel_rhs(const OperatorSpec& op, const Stencil& stencil) {
  check_operator(op, stencil.dim);
  const auto n = stencil.size();
  const int comps = op.components(stencil.dim);
  Eigen::MatrixXd out(idx(n), comps);
  std::visit(Overloaded{
                 [&](const Derivative& d) {
                   for (std::size_t j = 0; j < n; ++j)
                     out(idx(j), 0) = derivative_of_kernel(stencil.nodes[j], stencil.center, d.alpha);
                 },
                 [&](const Gradient&) {
                   for (int c = 0; c < comps; ++c) {
                     const auto e = MultiIndex::unit(stencil.dim, c);
                     for (std::size_t j = 0; j < n; ++j)
                       out(idx(j), c) = kernel_derivative(stencil.nodes[j], stencil.center, e);
                   }
                 },
                 [&](const IntegralOver& c) {
                   for (std::size_t j = 0; j < n; ++j) out(idx(j), 0) = kernel_moment(stencil.nodes[j], c.cell);
                 },
             },
             op.kind());
  return out;
}

Eigen::MatrixXd monomial_rhs(const OperatorSpec& op, const MultiIndexBasis& basis, const Point& center,
                             std::size_t first, std::size_t last) {
  check_operator(op, basis.dim());
  if (first > last || last > basis.size()) throw InvalidArgument("monomial_rhs: range out of bounds");
  const int comps = op.components(basis.dim());
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(idx(last - first), comps);
  // Derivatives of shifted monomials at their own center vanish unless the
  // multi-indices match, where the value is alpha!.
  std::visit(Overloaded{
                 [&](const Derivative& d) {
                   for (std::size_t l = first; l < last; ++l)
                     if (basis[l] == d.alpha) out(idx(l - first), 0) = d.alpha.factorial();
                 },
                 [&](const Gradient&) {
                   for (int c = 0; c < comps; ++c) {
                     const auto e = MultiIndex::unit(basis.dim(), c);
                     for (std::size_t l = first; l < last; ++l)
                       if (basis[l] == e) out(idx(l - first), c) = 1.0;
                   }
                 },
                 [&](const IntegralOver& c) {
                   for (std::size_t l = first; l < last; ++l)
                     out(idx(l - first), 0) = monomial_moment(center, basis[l], c.cell);
                 },
             },
             op.kind());
  return out;
}

Eigen::MatrixXd solve_weights(const SaddleSystem& system, const OperatorSpec& op, const Stencil& stencil) {
  const auto n = system.node_count();
  if (stencil.size() != n) throw InvalidArgument("solve_weights: stencil does not match the system");
  const auto mcount = system.poly_count();
  const int comps = op.components(stencil.dim);
  Eigen::MatrixXd rhs(idx(n + mcount), comps);
  rhs.topRows(idx(n)) = kernel_rhs(op, stencil);
  rhs.bottomRows(idx(mcount)) = monomial_rhs(op, system.basis(), stencil.center, 0, mcount);
  // The polynomial block of the solution is discarded.
  return system.solve(rhs).topRows(idx(n));
}

Eigen::MatrixXd monomial_kernel_coefficients(const SaddleSystem& system, const Stencil& stencil, int mu) {
  if (mu < 1) throw InvalidArgument("monomial_kernel_coefficients: mu must be >= 1");
  const auto n = system.node_count();
  const auto low = system.poly_count();
  const auto high_basis = enumerate_basis(stencil.dim, system.degree() + mu);
  const auto high = high_basis.size();
  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(idx(n + low), idx(high - low));
  rhs.topRows(idx(n)) = vandermonde(high_basis, stencil.center, stencil.nodes, low, high);
  return system.solve(rhs).topRows(idx(n));
}

Eigen::MatrixXd extend_weights(const SaddleSystem& system, const Eigen::MatrixXd& w_m, const OperatorSpec& op,
                               const Stencil& stencil, int mu, SingularPolicy mode, bool* rank_deficient) {
  if (mu < 1) throw InvalidArgument("extend_weights: mu must be >= 1");
  if (rank_deficient) *rank_deficient = false;
  const auto n = system.node_count();
  const auto high_basis = enumerate_basis(stencil.dim, system.degree() + mu);
  const auto low = system.poly_count();
  const auto high = high_basis.size();
  if (n < high) {
    throw DegenerateExtension("extend_weights: n = " + std::to_string(n) + " < M_{d,m+mu} = " +
                              std::to_string(high));
  }
  if (w_m.rows() != idx(n)) throw InvalidArgument("extend_weights: w_m does not match the system");

  // The degree-(m+mu) system is S bordered by E = [P~; 0]. Eliminating the
  // new polynomial block y gives
  //   w_{m+mu} = w_m - Lambda (P~^T Lambda)^{-1} (P~^T w_m - L Pi~).
  const Eigen::MatrixXd p_high = vandermonde(high_basis, stencil.center, stencil.nodes, low, high);
  Eigen::MatrixXd border = Eigen::MatrixXd::Zero(idx(n + low), idx(high - low));
  border.topRows(idx(n)) = p_high;
  const Eigen::MatrixXd g = system.solve(border);  // top rows: Lambda
  const Eigen::MatrixXd lambda = g.topRows(idx(n));

  // Column l of P~ scales like h^|alpha_l| with h the stencil radius; undo
  // that first so that the singularity tests below are scale free.
  double h = 0.0;
  for (const auto& x : stencil.nodes) h = std::max(h, distance(x, stencil.center));
  if (!(h > 0.0)) throw DegenerateExtension("extend_weights: stencil has zero radius");
  Eigen::VectorXd scale(idx(high - low));
  for (std::size_t l = low; l < high; ++l) scale(idx(l - low)) = std::pow(h, -high_basis[l].degree());
  const Eigen::MatrixXd reduced = scale.asDiagonal() * (p_high.transpose() * lambda) * scale.asDiagonal();

  // For m >= 1 the reduced matrix is symmetric positive semidefinite and
  // definite exactly when the nodes are unisolvent for degree m+mu.
  const double dmax = reduced.diagonal().cwiseAbs().maxCoeff();
  bool regular = std::isfinite(dmax) && dmax > 0.0;
  Eigen::VectorXd jacobi = Eigen::VectorXd::Ones(reduced.rows());
  for (Index i = 0; regular && i < reduced.rows(); ++i) {
    const double dii = std::abs(reduced(i, i));
    if (!(dii > 1e-12 * dmax)) regular = false;
    else jacobi(i) = 1.0 / std::sqrt(dii);
  }
  // Pivoted LDL^T of the symmetrized matrix reveals (near) singularity more
  // reliably than an LU condition estimate.
  Eigen::LDLT<Eigen::MatrixXd> ldlt;
  if (regular) {
    const Eigen::MatrixXd scaled = jacobi.asDiagonal() * reduced * jacobi.asDiagonal();
    ldlt.compute(0.5 * (scaled + scaled.transpose()));
    const Eigen::VectorXd pivots = ldlt.vectorD();
    regular = ldlt.info() == Eigen::Success && pivots.minCoeff() > kReducedCutoff * pivots.cwiseAbs().maxCoeff();
  }
  if (!regular && (mode == SingularPolicy::Strict || !std::isfinite(dmax))) {
    throw DegenerateExtension("extend_weights: reduced matrix is numerically singular");
  }

  // Rank-deficient: minimum-norm least-squares solves from the
  // eigen-decomposition of the symmetrized matrix.
  Eigen::MatrixXd pinv;
  if (!regular) {
    if (rank_deficient) *rank_deficient = true;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (reduced + reduced.transpose()));
    const Eigen::VectorXd& ev = eig.eigenvalues();
    const double cutoff = kReducedCutoff * ev.cwiseAbs().maxCoeff();
    Eigen::VectorXd inv(ev.size());
    for (Index i = 0; i < ev.size(); ++i) inv(i) = std::abs(ev(i)) > cutoff ? 1.0 / ev(i) : 0.0;
    pinv = eig.eigenvectors() * inv.asDiagonal() * eig.eigenvectors().transpose();
  }
  const Eigen::VectorXd outer = regular ? Eigen::VectorXd(scale.cwiseProduct(jacobi)) : scale;
  auto reduced_solve = [&](const Eigen::MatrixXd& r) -> Eigen::MatrixXd {
    const Eigen::MatrixXd rs = outer.asDiagonal() * r;
    return outer.asDiagonal() * (regular ? Eigen::MatrixXd(ldlt.solve(rs)) : Eigen::MatrixXd(pinv * rs));
  };

  // Start from x = [w_m; 0], y = 0. The first correction sweep reproduces the
  // formula above (and recovers the degree-m polynomial block); the second
  // is one step of residual correction on the bordered system, which keeps
  // the result as accurate as a direct solve when P~^T Lambda is poorly
  // conditioned.
  const int comps = op.components(stencil.dim);
  if (w_m.cols() != comps) throw InvalidArgument("extend_weights: w_m does not match the operator");
  Eigen::MatrixXd b(idx(n + low), comps);
  b.topRows(idx(n)) = kernel_rhs(op, stencil);
  b.bottomRows(idx(low)) = monomial_rhs(op, system.basis(), stencil.center, 0, low);
  const Eigen::MatrixXd c = monomial_rhs(op, high_basis, stencil.center, low, high);
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(idx(n + low), comps);
  x.topRows(idx(n)) = w_m;
  Eigen::MatrixXd y = Eigen::MatrixXd::Zero(idx(high - low), comps);
  for (int sweep = 0; sweep < 2; ++sweep) {
    const Eigen::MatrixXd r1 = b - system.matrix() * x - border * y;
    const Eigen::MatrixXd r2 = c - p_high.transpose() * x.topRows(idx(n));
    Eigen::MatrixXd dx = system.solve(r1);
    const Eigen::MatrixXd dy = reduced_solve(p_high.transpose() * dx.topRows(idx(n)) - r2);
    dx -= g * dy;
    x += dx;
    y += dy;
  }
  if (!x.allFinite()) throw DegenerateExtension("extend_weights: non-finite weights");
  return x.topRows(idx(n));
}

WeightPair compute_weight_pair(const Stencil& stencil, const OperatorSpec& op, SingularPolicy mode) {
  const auto system = assemble_system(stencil, stencil.m, mode);
  WeightPair pair;
  pair.w_m = solve_weights(system, op, stencil);
  bool extension_deficient = false;
  pair.w_mmu = extend_weights(system, pair.w_m, op, stencil, stencil.mu, mode, &extension_deficient);
  pair.rank_deficient = system.rank_deficient() || extension_deficient;
  pair.ill_conditioned = system.ill_conditioned();
  return pair;
}

Eigen::VectorXd apply_weights(const Eigen::MatrixXd& weights, const Eigen::VectorXd& f_values) {
  if (weights.rows() != f_values.size()) throw InvalidArgument("apply_weights: size mismatch");
  return weights.transpose() * f_values;
}

double error_estimate(const WeightPair& pair, const Eigen::VectorXd& f_values) {
  return apply_weights(pair.estimator_weights(), f_values).norm();
}

}  // namespace phsadapt
