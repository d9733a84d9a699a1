#pragma once

#include <cstddef>
#include <optional>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "phsadapt/basis.hpp"
#include "phsadapt/kernel_ops.hpp"
#include "phsadapt/types.hpp"

namespace phsadapt {

/// A center x_{k,0} and its n nearest nodes, with the polynomial degree m of
/// the primary interpolant and the extension mu used for the estimate.
struct Stencil {
  int dim = 1;
  Point center{};
  std::vector<Point> nodes;
  int m = 1;
  int mu = 2;

  std::size_t size() const { return nodes.size(); }
};

struct Derivative {
  MultiIndex alpha;
};
struct Gradient {};
struct IntegralOver {
  Cell cell;
};

/// The local functional L_k: a (partial) derivative at the center, the full
/// gradient at the center, or the integral over a cell.
class OperatorSpec {
 public:
  using Kind = std::variant<Derivative, Gradient, IntegralOver>;

  static OperatorSpec derivative(const MultiIndex& alpha) { return OperatorSpec(Derivative{alpha}); }
  static OperatorSpec gradient() { return OperatorSpec(Gradient{}); }
  static OperatorSpec integral(const Cell& cell) { return OperatorSpec(IntegralOver{cell}); }

  const Kind& kind() const { return kind_; }
  /// Number of output components: d for the gradient, 1 otherwise.
  int components(int dim) const { return std::holds_alternative<Gradient>(kind_) ? dim : 1; }

 private:
  explicit OperatorSpec(Kind k) : kind_(std::move(k)) {}
  Kind kind_;
};

/// What to do with stencils whose nodes are not unisolvent for the requested
/// degree (for instance the nearest points of a regular lattice).
enum class SingularPolicy {
  /// Throw SingularSystem / DegenerateExtension.
  Strict,
  /// Minimum-norm least-squares solutions: the weights reproduce every
  /// polynomial the nodes can distinguish.
  LeastSquares,
};

/// The factorized matrix [Phi P; P^T 0] of a stencil at polynomial degree m.
class SaddleSystem {
 public:
  const MultiIndexBasis& basis() const { return basis_; }
  std::size_t node_count() const { return n_; }
  std::size_t poly_count() const { return basis_.size(); }
  int degree() const { return basis_.max_degree(); }
  const Eigen::MatrixXd& matrix() const { return matrix_; }
  /// Condition estimate of the symmetrically scaled matrix: 1 / rcond of its
  /// LU factors, or the R-diagonal ratio on the least-squares path.
  double condition_estimate() const { return condition_; }
  bool ill_conditioned() const { return condition_ > 1e14; }
  /// Factorized by the least-squares path because P is rank deficient.
  bool rank_deficient() const { return cod_.has_value(); }

  /// Solves S X = rhs for any number of right-hand sides.
  Eigen::MatrixXd solve(const Eigen::MatrixXd& rhs) const;

 private:
  friend SaddleSystem assemble_system(const Stencil&, int, SingularPolicy);

  MultiIndexBasis basis_;
  std::size_t n_ = 0;
  Eigen::MatrixXd matrix_;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
  std::optional<Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd>> cod_;
  Eigen::VectorXd scale_;  // the factorized matrix is diag(scale_) S diag(scale_)
  double condition_ = 0.0;
};

/// Throws SingularSystem for coincident nodes and InvalidArgument for
/// inconsistent dimensions or degrees.
void validate_stencil(const Stencil& stencil);

/// Assembles and factorizes S_{k,n,degree}. Throws SingularSystem when the
/// nodes are duplicated, or when they are not unisolvent for the degree
/// (e.g. collinear 2D neighborhoods) and the policy is Strict.
SaddleSystem assemble_system(const Stencil& stencil, int degree, SingularPolicy policy = SingularPolicy::Strict);
inline SaddleSystem assemble_system(const Stencil& stencil) { return assemble_system(stencil, stencil.m); }

/// L_k applied to each kernel translate phi(|x - x_j|); n x components.
Eigen::MatrixXd kernel_rhs(const OperatorSpec& op, const Stencil& stencil);

/// L_k applied to the basis monomials [first, last); rows are monomials.
Eigen::MatrixXd monomial_rhs(const OperatorSpec& op, const MultiIndexBasis& basis, const Point& center,
                             std::size_t first, std::size_t last);

/// Weights w_{k,n,m} (one column per component) with w . f(nodes) = L_k s_{k,n,m}[f].
Eigen::MatrixXd solve_weights(const SaddleSystem& system, const OperatorSpec& op, const Stencil& stencil);

/// Kernel coefficient vectors of the degree-m interpolants of the monomials
/// of degree m+1 .. m+mu, one per column (the matrix Lambda).
Eigen::MatrixXd monomial_kernel_coefficients(const SaddleSystem& system, const Stencil& stencil, int mu);

/// Degree-(m+mu) weights from the degree-m solution by block elimination,
/// reusing the factorization of S_{k,n,m}. In Strict mode throws
/// DegenerateExtension when the reduced matrix is numerically singular.
/// `rank_deficient`, when given, reports whether the least-squares path ran.
Eigen::MatrixXd extend_weights(const SaddleSystem& system, const Eigen::MatrixXd& w_m, const OperatorSpec& op,
                               const Stencil& stencil, int mu, SingularPolicy mode = SingularPolicy::Strict,
                               bool* rank_deficient = nullptr);

struct WeightPair {
  Eigen::MatrixXd w_m;
  Eigen::MatrixXd w_mmu;
  bool ill_conditioned = false;
  /// A least-squares path was taken for the degree-m system or the extension.
  bool rank_deficient = false;

  Eigen::MatrixXd estimator_weights() const { return w_m - w_mmu; }
};

/// Assemble, solve and extend in one go.
WeightPair compute_weight_pair(const Stencil& stencil, const OperatorSpec& op,
                               SingularPolicy mode = SingularPolicy::Strict);

/// Component values w^T f.
Eigen::VectorXd apply_weights(const Eigen::MatrixXd& weights, const Eigen::VectorXd& f_values);

/// ||(w_m - w_mmu)^T f||_2 over the operator components.
double error_estimate(const WeightPair& pair, const Eigen::VectorXd& f_values);

}  // namespace phsadapt
