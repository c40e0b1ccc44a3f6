#include "kernpred/kernels.hpp"

#include <string>

#include "kernpred/error.hpp"
#include "kernpred/linalg.hpp"
#include "kernpred/simd.hpp"
#include "trend_basis.hpp"

namespace kernpred {

std::string_view to_string(Definiteness d) noexcept {
  switch (d) {
    case Definiteness::PositiveDefinite: return "PositiveDefinite";
    case Definiteness::ConditionallyPositive: return "ConditionallyPositive";
    case Definiteness::Indefinite: return "Indefinite";
  }
  return "Indefinite";
}

void require_symmetric(const Matrix& matrix, const char* what) {
  if (!matrix.square())
    throw StructuralError(std::string(what) + " must be square, got " + std::to_string(matrix.rows()) + "x" +
                          std::to_string(matrix.cols()));
  if (asymmetry(matrix) > 1e-12) throw StructuralError(std::string(what) + " is not symmetric");
}

Definiteness validate_kernel(const Matrix& matrix, double tol) {
  require_symmetric(matrix, "kernel");
  if (matrix.rows() == 0) throw StructuralError("kernel is empty");
  return Cholesky::first_failing_pivot(matrix, tol) ? Definiteness::Indefinite : Definiteness::PositiveDefinite;
}

Definiteness validate_kernel(const Matrix& matrix, const Trend& trend, double tol) {
  if (validate_kernel(matrix, tol) == Definiteness::PositiveDefinite) {
    // PD implies conditional positivity, but the trend precondition still applies.
    if (!trend.empty()) {
      if (trend.points() != matrix.rows()) throw StructuralError("trend and kernel sizes differ");
      detail::factor_trend(trend.columns(), matrix.rows() - 1);
    }
    return Definiteness::PositiveDefinite;
  }
  if (trend.empty()) return Definiteness::Indefinite;
  if (trend.points() != matrix.rows()) throw StructuralError("trend and kernel sizes differ");
  const std::size_t n1 = matrix.rows();
  detail::factor_trend(trend.columns(), n1 - 1);

  // Orthonormal basis Z of {c in R^{n+1} : trend^T c = 0}.
  HouseholderQR full(trend.columns(), true);
  const Matrix q = full.q();
  const std::size_t k = trend.count();
  if (k >= n1) return Definiteness::Indefinite;
  Matrix z(n1, n1 - k);
  for (std::size_t i = 0; i < n1; ++i)
    for (std::size_t j = k; j < n1; ++j) z(i, j - k) = q(i, j);

  const Matrix projected = congruence(z, matrix);
  // Pivot floor is taken relative to the original kernel's diagonal so that a
  // projected form that is zero up to rounding is not mistaken for definite.
  const double floor = tol * matrix.max_abs_diagonal();
  const double pscale = projected.max_abs_diagonal();
  const double rel = pscale > 0.0 ? floor / pscale : 1.0;
  if (pscale <= floor) return Definiteness::Indefinite;
  return Cholesky::first_failing_pivot(projected, rel) ? Definiteness::Indefinite
                                                       : Definiteness::ConditionallyPositive;
}

Kernel make_kernel(Matrix matrix, std::string label, double tol) {
  const Definiteness d = validate_kernel(matrix, tol);
  return Kernel{std::move(matrix), d, std::move(label)};
}

Kernel make_kernel(Matrix matrix, std::string label, const Trend& trend, double tol) {
  const Definiteness d = validate_kernel(matrix, trend, tol);
  return Kernel{std::move(matrix), d, std::move(label)};
}

DualFunctional residual_functional(std::span<const double> weights) {
  DualFunctional mu{Vector(weights.size() + 1)};
  for (std::size_t i = 0; i < weights.size(); ++i) mu.coefficients[i] = -weights[i];
  mu.coefficients.back() = 1.0;
  return mu;
}

double dual_norm_sq(const Matrix& kernel, const DualFunctional& mu) {
  if (!kernel.square() || kernel.rows() != mu.coefficients.size())
    throw StructuralError("functional has " + std::to_string(mu.coefficients.size()) + " coefficients for a " +
                          std::to_string(kernel.rows()) + "x" + std::to_string(kernel.cols()) + " kernel");
  return simd::quad_form(kernel.data(), kernel.rows(), mu.coefficients);
}

double worst_case_error(const Matrix& kernel, std::span<const double> weights) {
  if (kernel.rows() != weights.size() + 1)
    throw StructuralError("expected " + std::to_string(kernel.rows() - 1) + " weights, got " +
                          std::to_string(weights.size()));
  return dual_norm_sq(kernel, residual_functional(weights));
}

}  // namespace kernpred
