#include "phsadapt/basis.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "phsadapt/errors.hpp"

namespace phsadapt {

namespace {

constexpr int kMaxFactorialDegree = 12;

double small_factorial(int k) {
  double r = 1.0;
  for (int i = 2; i <= k; ++i) r *= i;
  return r;
}

// Shared solve for the null-space vectors: V^T d = alpha_l! e_l, done on the
// column-scaled matrix so the rank test does not depend on the stencil size.
Eigen::MatrixXd solve_fd_columns(std::span<const Point> nodes, const Point& center,
                                 const MultiIndexBasis& basis, std::size_t first,
                                 std::size_t last) {
  const auto n = nodes.size();
  if (n == 0) throw InvalidArgument("fd_nullspace: empty node set");
  if (basis.size() < n) {
    throw InvalidArgument("fd_nullspace: basis has " + std::to_string(basis.size()) +
                          " entries but " + std::to_string(n) + " nodes were given");
  }
  if (first > last || last > n) throw InvalidArgument("fd_nullspace: column range out of bounds");

  double h = 0.0;
  for (const auto& p : nodes) h = std::max(h, distance(p, center));
  if (h == 0.0) throw SingularVandermonde("fd_nullspace: all nodes coincide with the center");

  Eigen::MatrixXd v = vandermonde(basis, center, nodes, 0, n);
  for (std::size_t l = 0; l < n; ++l) v.col(static_cast<Eigen::Index>(l)) /= std::pow(h, basis[l].degree());

  Eigen::FullPivLU<Eigen::MatrixXd> lu(v.transpose());
  lu.setThreshold(1e-12);
  if (lu.rank() < static_cast<Eigen::Index>(n)) {
    throw SingularVandermonde("fd_nullspace: nodes are not unisolvent (rank " +
                              std::to_string(lu.rank()) + " < " + std::to_string(n) + ")");
  }

  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n),
                                              static_cast<Eigen::Index>(last - first));
  for (std::size_t l = first; l < last; ++l) {
    rhs(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(l - first)) =
        basis[l].factorial() / std::pow(h, basis[l].degree());
  }
  return lu.solve(rhs);
}

}  // namespace

MultiIndex::MultiIndex(std::initializer_list<int> exponents) {
  if (exponents.size() < 1 || exponents.size() > 3) {
    throw InvalidArgument("MultiIndex: dimension must be 1, 2 or 3");
  }
  dim_ = static_cast<int>(exponents.size());
  std::size_t j = 0;
  for (int e : exponents) {
    if (e < 0) throw InvalidArgument("MultiIndex: negative exponent");
    exponents_[j++] = e;
    degree_ += e;
  }
}

MultiIndex::MultiIndex(int dim, const std::array<int, 3>& exponents) : dim_(dim) {
  if (dim < 1 || dim > 3) throw InvalidArgument("MultiIndex: dimension must be 1, 2 or 3");
  for (int j = 0; j < dim; ++j) {
    if (exponents[static_cast<std::size_t>(j)] < 0) throw InvalidArgument("MultiIndex: negative exponent");
    exponents_[static_cast<std::size_t>(j)] = exponents[static_cast<std::size_t>(j)];
    degree_ += exponents_[static_cast<std::size_t>(j)];
  }
}

MultiIndex MultiIndex::unit(int dim, int j) {
  std::array<int, 3> e{};
  e[static_cast<std::size_t>(j)] = 1;
  return MultiIndex(dim, e);
}

MultiIndex MultiIndex::zero(int dim) { return MultiIndex(dim, {0, 0, 0}); }

double MultiIndex::factorial() const {
  if (degree_ > kMaxFactorialDegree) {
    throw InvalidArgument("MultiIndex::factorial: degree " + std::to_string(degree_) +
                          " exceeds the supported maximum of 12");
  }
  double r = 1.0;
  for (int j = 0; j < dim_; ++j) r *= small_factorial(exponents_[static_cast<std::size_t>(j)]);
  return r;
}

MultiIndexBasis::MultiIndexBasis(int dim, int max_degree, std::vector<MultiIndex> indices)
    : dim_(dim), max_degree_(max_degree), indices_(std::move(indices)) {}

std::size_t count_monomials(int dim, int max_degree) {
  if (dim < 1) throw InvalidArgument("count_monomials: dimension must be positive");
  if (max_degree < 0) throw InvalidArgument("count_monomials: degree must be non-negative");
  // binomial(m + d, d) built incrementally; every partial product is itself a
  // binomial coefficient, so the division is exact.
  std::size_t result = 1;
  for (int i = 1; i <= dim; ++i) {
    const auto num = static_cast<std::size_t>(max_degree) + static_cast<std::size_t>(i);
    if (result > std::numeric_limits<std::size_t>::max() / num) {
      throw InvalidArgument("count_monomials: result overflows");
    }
    result = result * num / static_cast<std::size_t>(i);
  }
  return result;
}

MultiIndexBasis enumerate_basis(int dim, int max_degree) {
  if (dim < 1 || dim > 3) throw InvalidArgument("enumerate_basis: dimension must be 1, 2 or 3");
  if (max_degree < 0 || max_degree > kMaxFactorialDegree) {
    throw InvalidArgument("enumerate_basis: degree must be in [0, 12]");
  }
  std::vector<MultiIndex> out;
  out.reserve(count_monomials(dim, max_degree));
  for (int g = 0; g <= max_degree; ++g) {
    if (dim == 1) {
      out.emplace_back(1, std::array<int, 3>{g, 0, 0});
    } else if (dim == 2) {
      for (int a = g; a >= 0; --a) out.emplace_back(2, std::array<int, 3>{a, g - a, 0});
    } else {
      for (int a = g; a >= 0; --a) {
        for (int b = g - a; b >= 0; --b) out.emplace_back(3, std::array<int, 3>{a, b, g - a - b});
      }
    }
  }
  return MultiIndexBasis(dim, max_degree, std::move(out));
}

Eigen::VectorXd eval_monomials(const MultiIndexBasis& basis, const Point& center, const Point& x) {
  const int d = basis.dim();
  const int m = basis.max_degree();
  // powers[j][p] = (x_j - c_j)^p
  std::array<std::array<double, kMaxFactorialDegree + 1>, 3> powers{};
  for (int j = 0; j < d; ++j) {
    const double t = x[static_cast<std::size_t>(j)] - center[static_cast<std::size_t>(j)];
    auto& pj = powers[static_cast<std::size_t>(j)];
    pj[0] = 1.0;
    for (int p = 1; p <= m; ++p) pj[static_cast<std::size_t>(p)] = pj[static_cast<std::size_t>(p - 1)] * t;
  }
  Eigen::VectorXd out(static_cast<Eigen::Index>(basis.size()));
  for (std::size_t l = 0; l < basis.size(); ++l) {
    double v = 1.0;
    for (int j = 0; j < d; ++j) v *= powers[static_cast<std::size_t>(j)][static_cast<std::size_t>(basis[l][j])];
    out(static_cast<Eigen::Index>(l)) = v;
  }
  return out;
}

Eigen::MatrixXd vandermonde(const MultiIndexBasis& basis, const Point& center,
                            std::span<const Point> nodes, std::size_t first_col,
                            std::size_t last_col) {
  if (first_col > last_col || last_col > basis.size()) {
    throw InvalidArgument("vandermonde: column range out of bounds");
  }
  Eigen::MatrixXd p(static_cast<Eigen::Index>(nodes.size()),
                    static_cast<Eigen::Index>(last_col - first_col));
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const Eigen::VectorXd row = eval_monomials(basis, center, nodes[i]);
    p.row(static_cast<Eigen::Index>(i)) =
        row.segment(static_cast<Eigen::Index>(first_col), static_cast<Eigen::Index>(last_col - first_col))
            .transpose();
  }
  return p;
}

Eigen::VectorXd fd_nullspace_vector(std::span<const Point> nodes, const Point& center,
                                    const MultiIndexBasis& basis, std::size_t l) {
  if (l >= nodes.size()) throw InvalidArgument("fd_nullspace_vector: index out of range");
  return solve_fd_columns(nodes, center, basis, l, l + 1).col(0);
}

Eigen::MatrixXd fd_nullspace_matrix(std::span<const Point> nodes, const Point& center, int dim,
                                    int m, int mu) {
  if (mu < 1) throw InvalidArgument("fd_nullspace_matrix: mu must be >= 1");
  const auto n_low = count_monomials(dim, m);
  const auto n_high = count_monomials(dim, m + mu);
  if (nodes.size() != n_high) {
    throw InvalidArgument("fd_nullspace_matrix: expected n = M_{d,m+mu} = " + std::to_string(n_high) +
                          " nodes, got " + std::to_string(nodes.size()));
  }
  const auto basis = enumerate_basis(dim, m + mu);
  return solve_fd_columns(nodes, center, basis, n_low, n_high);
}

}  // namespace phsadapt
