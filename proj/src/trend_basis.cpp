#include "trend_basis.hpp"

#include <cmath>
#include <string>

#include "kernpred/error.hpp"

namespace kernpred::detail {

Vector solve_upper_row(const Matrix& r, std::span<const double> x) {
  // y R = x  <=>  R^T y^T = x^T, forward substitution.
  const std::size_t q = r.rows();
  Vector y(q);
  for (std::size_t j = 0; j < q; ++j) {
    double s = x[j];
    for (std::size_t i = 0; i < j; ++i) s -= y[i] * r(i, j);
    y[j] = s / r(j, j);
  }
  return y;
}

TrendBasis factor_trend(const Matrix& columns, std::size_t rows_used) {
  const std::size_t q = columns.cols();
  if (rows_used > columns.rows()) throw StructuralError("trend has fewer rows than required");
  if (q > rows_used)
    throw ConstraintError("trend has " + std::to_string(q) + " columns but only " + std::to_string(rows_used) +
                          " constrained points");
  TrendBasis tb{rows_used, q, HouseholderQR(columns.leading(rows_used, q), true), Matrix(q, q)};
  const std::size_t rank = tb.qr.rank(kTrendRankTolerance);
  if (rank < q)
    throw ConstraintError("trend columns are rank deficient on the first " + std::to_string(rows_used) +
                          " points (rank " + std::to_string(rank) + " < " + std::to_string(q) + ")");
  // T = Pi R^{-1}: row perm[j] of T is row j of R^{-1}.
  const Matrix r = tb.qr.r().leading(q, q);
  const auto perm = tb.qr.permutation();
  for (std::size_t c = 0; c < q; ++c) {
    // column c of R^{-1}: back substitution
    Vector e(q, 0.0), x(q);
    e[c] = 1.0;
    for (std::size_t i = q; i-- > 0;) {
      double s = e[i];
      for (std::size_t k = i + 1; k < q; ++k) s -= r(i, k) * x[k];
      x[i] = s / r(i, i);
    }
    for (std::size_t j = 0; j < q; ++j) tb.transform(perm[j], c) = x[j];
  }
  return tb;
}

}  // namespace kernpred::detail
