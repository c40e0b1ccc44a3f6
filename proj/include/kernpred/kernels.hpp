#pragma once

// Quadratic-form machinery shared by every predictor: kernel validation,
// dual functionals, and the worst-case error of a linear predictor.

#include <span>
#include <string>
#include <string_view>

#include "kernpred/grid.hpp"
#include "kernpred/matrix.hpp"

namespace kernpred {

enum class Definiteness { PositiveDefinite, ConditionallyPositive, Indefinite };

std::string_view to_string(Definiteness d) noexcept;

/// Relative pivot threshold used when classifying kernels.
inline constexpr double kDefinitenessTolerance = 1e-10;

/// Symmetric kernel matrix over n+1 points together with its classification.
struct Kernel {
  Matrix matrix;
  Definiteness classification = Definiteness::Indefinite;
  std::string label;

  std::size_t size() const noexcept { return matrix.rows(); }
};

/// Validates and classifies `matrix`. Throws StructuralError if it is not
/// square and symmetric to 1e-12 relative.
Kernel make_kernel(Matrix matrix, std::string label, double tol = kDefinitenessTolerance);
Kernel make_kernel(Matrix matrix, std::string label, const Trend& trend, double tol = kDefinitenessTolerance);

/// PositiveDefinite if Cholesky succeeds with every pivot above
/// tol * max|K_ii|; otherwise Indefinite.
Definiteness validate_kernel(const Matrix& matrix, double tol = kDefinitenessTolerance);

/// As above, and additionally ConditionallyPositive when K restricted to
/// {c : trend^T c = 0} is positive definite. The trend must have full column
/// rank on its first n rows (ConstraintError otherwise).
Definiteness validate_kernel(const Matrix& matrix, const Trend& trend, double tol = kDefinitenessTolerance);

/// Throws StructuralError unless `matrix` is square and symmetric.
void require_symmetric(const Matrix& matrix, const char* what);

/// mu = sum_i c_i delta_{x_i}.
struct DualFunctional {
  Vector coefficients;
};

/// delta_{x_{n+1}} - sum_i w_i delta_{x_i}, i.e. (-w_1, ..., -w_n, 1).
DualFunctional residual_functional(std::span<const double> weights);

/// c^T K c.
double dual_norm_sq(const Matrix& kernel, const DualFunctional& mu);

/// (-w, 1) K (-w, 1)^T: the largest squared prediction error over the unit
/// ball of the norm f -> sqrt(f^T K^{-1} f).
double worst_case_error(const Matrix& kernel, std::span<const double> weights);

}  // namespace kernpred
