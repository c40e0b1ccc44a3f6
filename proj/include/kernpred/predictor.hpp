#pragma once

// Predictors of f(x_{n+1}) from f(x_1..x_n) given a kernel over the n+1
// points. Kernel arguments are (n+1) x (n+1); weights and observations have
// length n.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kernpred/grid.hpp"
#include "kernpred/kernels.hpp"
#include "kernpred/matrix.hpp"

namespace kernpred {

struct SolveOptions {
  /// Adds jitter * I to the leading n x n block. Off unless set.
  std::optional<double> jitter;
  /// Condition estimates above this add a diagnostic to the result.
  double condition_warning = 1e12;
};

struct PredictionResult {
  Vector weights;                 // w*, length n
  Vector multipliers;             // lambda*, length q (empty when unconstrained)
  std::optional<double> predicted;
  double worst_error = 0.0;       // (-w*, 1) K (-w*, 1)^T
  std::optional<Vector> alpha;    // interpolant coefficients, when computed
  std::vector<std::string> diagnostics;
};

/// Unconstrained min-max weights: K_n w = k_{n+1}. Throws
/// FactorizationError naming the failing pivot when K_n is not positive
/// definite.
PredictionResult minmax_weights(const Matrix& kernel, const SolveOptions& options = {});

/// sum_i w_i f_i.
double predict(std::span<const double> weights, std::span<const double> values);

/// PredictionResult with `predicted` filled in.
PredictionResult predict_with(PredictionResult result, std::span<const double> values);

/// alpha solving K_n alpha = f.
Vector interpolant_coefficients(const Matrix& kernel, std::span<const double> values,
                                const SolveOptions& options = {});

/// sum_j alpha_j k(x_{n+1}, x_j).
double interpolant_predict(const Matrix& kernel, std::span<const double> alpha);

/// f(x_{n+1}) - f*(x_{n+1}) computed from the last row of K^{-1}:
/// [(K^{-1} f)_{n+1}] * [k(x_{n+1},x_{n+1}) - sum_i w*_i k(x_i,x_{n+1})].
/// `values` has all n+1 entries. Requires the full kernel positive definite.
double interpolation_error(const Matrix& kernel, std::span<const double> values);

/// Min-max weights under sum_i w_i p_k(x_i) = p_k(x_{n+1}), from the
/// saddle system [K_n P_n; P_n^T 0][w; lambda] = [k_{n+1}; p_{n+1}].
PredictionResult constrained_weights(const Matrix& kernel, const Trend& trend, const SolveOptions& options = {});

/// Solutions of the trend constraints: w = particular + homogeneous * w~.
struct ConstraintSolutionSpace {
  Vector particular;   // minimum-norm solution z^(1), length n
  Matrix homogeneous;  // n x (n - q), orthonormal columns
};

ConstraintSolutionSpace constraint_solution_space(const Trend& trend);

/// The (n+1-q) x (n+1-q) kernel of the functionals mu_l = sum_i z_il delta_i
/// and mu_{n+1-q} = delta_{n+1} - sum_i z^(1)_i delta_i.
struct ReducedKernel {
  Matrix matrix;
};

/// Coefficient vectors of mu_1..mu_{n+1-q} as columns of an
/// (n+1) x (n+1-q) matrix.
Matrix reduced_functionals(const ConstraintSolutionSpace& space);

ReducedKernel reduced_kernel(const Matrix& kernel, const ConstraintSolutionSpace& space);

/// Full weights z^(1) + Z w~* from the reduced problem.
Vector reduced_weights(const ReducedKernel& reduced, const ConstraintSolutionSpace& space);

double reduced_predict(const ReducedKernel& reduced, const ConstraintSolutionSpace& space,
                       std::span<const double> values);

/// Semi-norm Q(f, f) = u^T form u, where f = null_basis * theta +
/// complement_basis * u.
struct SemiKernel {
  Matrix form;              // (n+1-q) x (n+1-q), symmetric positive definite
  Matrix null_basis;        // (n+1) x q
  Matrix complement_basis;  // (n+1) x (n+1-q)
};

/// Semi-kernel induced by a kernel that is conditionally positive w.r.t.
/// the trend: form = K~, complement columns K * mu_l.
SemiKernel semikernel_from_kernel(const Matrix& kernel, const Trend& trend);

/// (-w, 1) R form^{-1} R^T (-w, 1)^T with R the complement basis. Throws
/// ConstraintError when w violates the null-basis constraints.
double semikernel_worst_error(const SemiKernel& semikernel, std::span<const double> weights);

/// Best linear unbiased predictor. Its variance objective is the
/// worst-case-error form, so this is the constrained predictor.
double blup_predict(const Matrix& covariance, const Trend& trend, std::span<const double> values);

/// var(Y_{n+1} - sum_i w_i Y_i) for covariance K.
double blup_variance(const Matrix& covariance, std::span<const double> weights);

}  // namespace kernpred
