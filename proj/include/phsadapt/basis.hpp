#pragma once

#include <array>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "phsadapt/types.hpp"

namespace phsadapt {

/// Exponent vector of a d-variate monomial, d <= 3.
class MultiIndex {
 public:
  MultiIndex() = default;
  MultiIndex(std::initializer_list<int> exponents);
  MultiIndex(int dim, const std::array<int, 3>& exponents);

  /// Unit multi-index e_j in dimension dim.
  static MultiIndex unit(int dim, int j);
  static MultiIndex zero(int dim);

  int dim() const { return dim_; }
  int degree() const { return degree_; }
  int operator[](int j) const { return exponents_[static_cast<std::size_t>(j)]; }
  const std::array<int, 3>& exponents() const { return exponents_; }

  /// alpha! = prod_j alpha_j!, guarded to degree <= 12.
  double factorial() const;

  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;

 private:
  int dim_ = 0;
  int degree_ = 0;
  std::array<int, 3> exponents_{};
};

/// Graded-lexicographic list of all monomial exponents of total degree <= m.
/// Within a degree, larger leading exponents come first, so the degree-m'
/// basis is always a prefix of the degree-m basis for m' <= m.
class MultiIndexBasis {
 public:
  MultiIndexBasis() = default;
  MultiIndexBasis(int dim, int max_degree, std::vector<MultiIndex> indices);

  int dim() const { return dim_; }
  int max_degree() const { return max_degree_; }
  std::size_t size() const { return indices_.size(); }
  const MultiIndex& operator[](std::size_t l) const { return indices_[l]; }
  const std::vector<MultiIndex>& indices() const { return indices_; }

  auto begin() const { return indices_.begin(); }
  auto end() const { return indices_.end(); }

 private:
  int dim_ = 0;
  int max_degree_ = 0;
  std::vector<MultiIndex> indices_;
};

/// M_{d,m} = binomial(m + d, d). Throws InvalidArgument on d < 1, m < 0 or
/// if the result does not fit in size_t.
std::size_t count_monomials(int dim, int max_degree);

/// Throws InvalidArgument unless dim in {1,2,3} and 0 <= max_degree <= 12.
MultiIndexBasis enumerate_basis(int dim, int max_degree);

/// Values (x - center)^alpha_l for every entry of the basis.
Eigen::VectorXd eval_monomials(const MultiIndexBasis& basis, const Point& center, const Point& x);

/// Rows are nodes, columns are basis entries [first_col, last_col).
Eigen::MatrixXd vandermonde(const MultiIndexBasis& basis, const Point& center,
                            std::span<const Point> nodes, std::size_t first_col,
                            std::size_t last_col);

inline Eigen::MatrixXd vandermonde(const MultiIndexBasis& basis, const Point& center,
                                   std::span<const Point> nodes) {
  return vandermonde(basis, center, nodes, 0, basis.size());
}

/// Finite-difference weights d with d . f(nodes) = d^{alpha_l} q(center),
/// q being the polynomial interpolant on the first n = |nodes| basis
/// entries. Requires basis.size() >= n. Throws SingularVandermonde if the
/// nodes are not unisolvent for those monomials.
Eigen::VectorXd fd_nullspace_vector(std::span<const Point> nodes, const Point& center,
                                    const MultiIndexBasis& basis, std::size_t l);

/// Columns l = M_{d,m} .. n-1 of the null-space vectors above, for
/// n = |nodes| = M_{d,m+mu}. Every column is annihilated by P_{m}^T.
Eigen::MatrixXd fd_nullspace_matrix(std::span<const Point> nodes, const Point& center, int dim,
                                    int m, int mu);

}  // namespace phsadapt
