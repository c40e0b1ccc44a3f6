#pragma once

// Orthonormal re-parametrization of trend constraints. Constraints
// P_n^T w = p_{n+1} are equivalent to (P_n T)^T w = T^T p_{n+1} for any
// invertible T; choosing T = Pi R^{-1} from a pivoted QR of P_n makes the
// constraint rows orthonormal, which keeps raw-year trends well scaled.

#include <cstddef>

#include "kernpred/linalg.hpp"
#include "kernpred/matrix.hpp"

namespace kernpred::detail {

inline constexpr double kTrendRankTolerance = 1e-10;

struct TrendBasis {
  std::size_t rows_used = 0;  // n
  std::size_t count = 0;      // q
  HouseholderQR qr;           // of the first n rows of the trend
  Matrix transform;           // T (q x q)
};

/// Factor the first `rows_used` rows of `columns`; throws ConstraintError
/// when they are rank deficient or q > rows_used.
TrendBasis factor_trend(const Matrix& columns, std::size_t rows_used);

/// Solve y R = x for a row vector x, R upper triangular (q x q).
Vector solve_upper_row(const Matrix& r, std::span<const double> x);

}  // namespace kernpred::detail
