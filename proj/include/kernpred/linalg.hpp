#pragma once

// Dense factorizations used by the predictors. Inner loops go through the
// dispatched kernels in simd.hpp.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "kernpred/matrix.hpp"

namespace kernpred {

/// Lower Cholesky factor A = L L^T of a symmetric matrix.
class Cholesky {
 public:
  /// Default relative pivot floor used by solvers: pivots must exceed
  /// this times the largest diagonal entry.
  static constexpr double kSolverTolerance = 1e-14;

  /// Throws FactorizationError naming the first pivot that is not above
  /// `rel_tol * max|a_ii|`.
  explicit Cholesky(const Matrix& a, double rel_tol = kSolverTolerance);

  /// Returns the index of the failing pivot instead of throwing.
  static std::optional<std::size_t> first_failing_pivot(const Matrix& a, double rel_tol);

  std::size_t size() const noexcept { return l_.rows(); }
  const Matrix& lower() const noexcept { return l_; }

  Vector solve(std::span<const double> b) const;
  Matrix solve(const Matrix& b) const;
  Matrix inverse() const;

  /// L x; maps a unit-norm x onto the boundary of {f : f^T A^{-1} f <= 1}.
  Vector lower_times(std::span<const double> x) const;
  /// L^T x.
  Vector upper_times(std::span<const double> x) const;

  /// (max L_ii / min L_ii)^2, a cheap lower bound on the 2-norm condition number.
  double condition_estimate() const noexcept;

 private:
  Cholesky() = default;
  static std::optional<std::size_t> factor(const Matrix& a, double rel_tol, Matrix& l);

  Matrix l_;
};

/// Symmetric-indefinite factorization P A P^T = L D L^T with Bunch-Kaufman
/// partial pivoting (1x1 and 2x2 diagonal blocks).
class BunchKaufman {
 public:
  static constexpr double kSingularTolerance = 1e-13;

  /// Throws FactorizationError when a pivot column is numerically zero
  /// (below `rel_tol * max|a_ij|`).
  explicit BunchKaufman(const Matrix& a, double rel_tol = kSingularTolerance);

  std::size_t size() const noexcept { return l_.rows(); }
  Vector solve(std::span<const double> b) const;

  /// Number of negative eigenvalues of A (Sylvester's law of inertia on D).
  std::size_t negative_eigenvalues() const noexcept;

  /// 1 for a 1x1 pivot at k, 2 for the first index of a 2x2 block, 0 for
  /// the second index of a 2x2 block.
  std::span<const int> block_sizes() const noexcept { return blocks_; }

 private:
  Matrix l_;                       // unit lower triangular
  Matrix d_;                       // block diagonal (only tridiagonal band used)
  std::vector<std::size_t> perm_;  // row i of P A P^T is row perm_[i] of A
  std::vector<int> blocks_;
};

/// Householder QR with optional column pivoting: A P = Q R.
class HouseholderQR {
 public:
  explicit HouseholderQR(Matrix a, bool column_pivoting = true);

  std::size_t rows() const noexcept { return m_; }
  std::size_t cols() const noexcept { return n_; }

  /// Number of |R_ii| above `rel_tol * |R_00|`.
  std::size_t rank(double rel_tol = 1e-10) const noexcept;

  /// Full m x m orthogonal factor.
  Matrix q() const;
  /// min(m,n) x n upper-triangular factor (columns in pivoted order).
  Matrix r() const;
  /// Column j of A P is column permutation()[j] of A.
  std::span<const std::size_t> permutation() const noexcept { return perm_; }

  /// Q^T x.
  Vector apply_qt(std::span<const double> x) const;
  /// Q x.
  Vector apply_q(std::span<const double> x) const;

 private:
  std::size_t m_ = 0, n_ = 0;
  Matrix qr_;                      // R in the upper triangle, reflectors below
  std::vector<Vector> reflectors_; // unit Householder vectors, reflector k acts on rows k..m-1
  std::vector<std::size_t> perm_;
};

/// Solve a tridiagonal system with the Thomas algorithm. `sub` and `super`
/// have length n-1. Requires a nonsingular system that needs no pivoting
/// (e.g. strictly diagonally dominant).
Vector solve_tridiagonal(std::span<const double> sub, std::span<const double> diag,
                         std::span<const double> super, std::span<const double> rhs);

}  // namespace kernpred
