#include "kernpred/predictor.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "kernpred/error.hpp"
#include "kernpred/linalg.hpp"
#include "kernpred/simd.hpp"
#include "trend_basis.hpp"

namespace kernpred {

namespace {

std::size_t observed_count(const Matrix& kernel) {
  require_symmetric(kernel, "kernel");
  if (kernel.rows() < 2) throw StructuralError("kernel must cover at least two points");
  return kernel.rows() - 1;
}

void require_values(std::span<const double> values, std::size_t n) {
  if (values.size() != n)
    throw StructuralError("expected " + std::to_string(n) + " values, got " + std::to_string(values.size()));
}

Matrix leading_block(const Matrix& kernel, std::size_t n, const SolveOptions& options) {
  Matrix kn = kernel.principal(n);
  if (options.jitter) {
    for (std::size_t i = 0; i < n; ++i) kn(i, i) += *options.jitter;
  }
  return kn;
}

Vector cross_column(const Matrix& kernel, std::size_t n) {
  Vector k(n);
  for (std::size_t i = 0; i < n; ++i) k[i] = kernel(i, n);
  return k;
}

std::string condition_note(double estimate) {
  std::ostringstream os;
  os << "leading block is ill-conditioned (condition estimate " << estimate << ")";
  return os.str();
}

}  // namespace

PredictionResult minmax_weights(const Matrix& kernel, const SolveOptions& options) {
  const std::size_t n = observed_count(kernel);
  const Cholesky chol(leading_block(kernel, n, options));
  PredictionResult result;
  result.weights = chol.solve(cross_column(kernel, n));
  result.worst_error = worst_case_error(kernel, result.weights);
  if (const double c = chol.condition_estimate(); c > options.condition_warning)
    result.diagnostics.push_back(condition_note(c));
  return result;
}

double predict(std::span<const double> weights, std::span<const double> values) {
  require_values(values, weights.size());
  return simd::dot(weights, values);
}

PredictionResult predict_with(PredictionResult result, std::span<const double> values) {
  result.predicted = predict(result.weights, values);
  return result;
}

Vector interpolant_coefficients(const Matrix& kernel, std::span<const double> values, const SolveOptions& options) {
  const std::size_t n = observed_count(kernel);
  require_values(values, n);
  return Cholesky(leading_block(kernel, n, options)).solve(values);
}

double interpolant_predict(const Matrix& kernel, std::span<const double> alpha) {
  const std::size_t n = observed_count(kernel);
  require_values(alpha, n);
  return simd::dot(alpha, kernel.row(n).first(n));
}

double interpolation_error(const Matrix& kernel, std::span<const double> values) {
  const std::size_t n = observed_count(kernel);
  require_values(values, n + 1);
  const Cholesky full(kernel);
  const double coordinate = full.solve(values)[n];
  const PredictionResult mm = minmax_weights(kernel);
  const double gap = kernel(n, n) - simd::dot(mm.weights, cross_column(kernel, n));
  return coordinate * gap;
}

PredictionResult constrained_weights(const Matrix& kernel, const Trend& trend, const SolveOptions& options) {
  const std::size_t n = observed_count(kernel);
  const std::size_t q = trend.count();
  if (q == 0) return minmax_weights(kernel, options);
  if (trend.points() != n + 1)
    throw StructuralError("trend has " + std::to_string(trend.points()) + " points, kernel has " +
                          std::to_string(n + 1));

  const detail::TrendBasis tb = detail::factor_trend(trend.columns(), n);
  // Orthonormalized trend, scaled to the kernel's magnitude so both blocks of
  // the saddle matrix are comparable.
  const Matrix basis = trend.columns() * tb.transform;
  const Matrix kn = leading_block(kernel, n, options);
  double sigma = kn.max_abs();
  if (!(sigma > 0.0)) sigma = 1.0;

  Matrix saddle(n + q, n + q);
  Vector rhs(n + q);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) saddle(i, j) = kn(i, j);
    for (std::size_t k = 0; k < q; ++k) {
      saddle(i, n + k) = sigma * basis(i, k);
      saddle(n + k, i) = sigma * basis(i, k);
    }
    rhs[i] = kernel(i, n);
  }
  for (std::size_t k = 0; k < q; ++k) rhs[n + k] = sigma * basis(n, k);

  const BunchKaufman bk(saddle);
  const Vector sol = bk.solve(rhs);

  PredictionResult result;
  result.weights.assign(sol.begin(), sol.begin() + static_cast<std::ptrdiff_t>(n));
  Vector scaled(q);
  for (std::size_t k = 0; k < q; ++k) scaled[k] = sigma * sol[n + k];
  result.multipliers = tb.transform * scaled;
  result.worst_error = worst_case_error(kernel, result.weights);

  if (bk.negative_eigenvalues() != q)
    result.diagnostics.push_back("kernel is not conditionally positive w.r.t. the trend (saddle matrix has " +
                                 std::to_string(bk.negative_eigenvalues()) + " negative eigenvalues, expected " +
                                 std::to_string(q) + ")");
  for (std::size_t k = 0; k < q; ++k) {
    const Vector col = trend.columns().column(k);
    const double resid = simd::dot(result.weights, std::span<const double>(col).first(n)) - col[n];
    if (std::abs(resid) > 1e-8 * std::max(1.0, max_abs(col)))
      result.diagnostics.push_back("trend constraint " + std::to_string(k) + " residual " + std::to_string(resid));
  }
  return result;
}

ConstraintSolutionSpace constraint_solution_space(const Trend& trend) {
  if (trend.points() < 2) throw StructuralError("trend must cover at least two points");
  const std::size_t n = trend.points() - 1;
  const std::size_t q = trend.count();
  const detail::TrendBasis tb = detail::factor_trend(trend.columns(), n);
  const Matrix qfull = tb.qr.q();

  // P_n Pi = Q R  =>  P_n^T z = p  <=>  R^T (Q_q^T z) = Pi^T p.
  const auto perm = tb.qr.permutation();
  const Matrix r = tb.qr.r().leading(q, q);
  Vector rhs(q);
  for (std::size_t j = 0; j < q; ++j) rhs[j] = trend.columns()(n, perm[j]);
  const Vector y = detail::solve_upper_row(r, rhs);

  ConstraintSolutionSpace space{Vector(n, 0.0), Matrix(n, n - q)};
  for (std::size_t j = 0; j < q; ++j)
    for (std::size_t i = 0; i < n; ++i) space.particular[i] += qfull(i, j) * y[j];
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = q; j < n; ++j) space.homogeneous(i, j - q) = qfull(i, j);
  return space;
}

Matrix reduced_functionals(const ConstraintSolutionSpace& space) {
  const std::size_t n = space.particular.size();
  const std::size_t m = space.homogeneous.cols();
  if (space.homogeneous.rows() != n && m > 0) throw StructuralError("inconsistent constraint solution space");
  Matrix mu(n + 1, m + 1);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t l = 0; l < m; ++l) mu(i, l) = space.homogeneous(i, l);
    mu(i, m) = -space.particular[i];
  }
  mu(n, m) = 1.0;
  return mu;
}

ReducedKernel reduced_kernel(const Matrix& kernel, const ConstraintSolutionSpace& space) {
  const std::size_t n = observed_count(kernel);
  if (space.particular.size() != n)
    throw StructuralError("constraint space is for " + std::to_string(space.particular.size()) +
                          " points, kernel observes " + std::to_string(n));
  return ReducedKernel{congruence(reduced_functionals(space), kernel)};
}

Vector reduced_weights(const ReducedKernel& reduced, const ConstraintSolutionSpace& space) {
  const std::size_t m = space.homogeneous.cols();
  if (reduced.matrix.rows() != m + 1 || !reduced.matrix.square())
    throw StructuralError("reduced kernel does not match the constraint space");
  Vector w = space.particular;
  if (m == 0) return w;
  Vector rhs(m);
  for (std::size_t l = 0; l < m; ++l) rhs[l] = reduced.matrix(l, m);
  const Vector wt = Cholesky(reduced.matrix.principal(m)).solve(rhs);
  const Vector shift = space.homogeneous * wt;
  simd::axpy(1.0, shift, w);
  return w;
}

double reduced_predict(const ReducedKernel& reduced, const ConstraintSolutionSpace& space,
                       std::span<const double> values) {
  const std::size_t n = space.particular.size();
  require_values(values, n);
  const std::size_t m = space.homogeneous.cols();
  double pred = simd::dot(space.particular, values);
  if (m == 0) return pred;
  if (reduced.matrix.rows() != m + 1) throw StructuralError("reduced kernel does not match the constraint space");
  Vector rhs(m);
  for (std::size_t l = 0; l < m; ++l) rhs[l] = reduced.matrix(l, m);
  const Vector wt = Cholesky(reduced.matrix.principal(m)).solve(rhs);
  const Vector projected = transpose_times(space.homogeneous, values);
  return pred + simd::dot(wt, projected);
}

SemiKernel semikernel_from_kernel(const Matrix& kernel, const Trend& trend) {
  const ConstraintSolutionSpace space = constraint_solution_space(trend);
  const Matrix mu = reduced_functionals(space);
  SemiKernel sk;
  sk.form = congruence(mu, kernel);
  sk.null_basis = trend.columns();
  sk.complement_basis = kernel * mu;
  return sk;
}

double semikernel_worst_error(const SemiKernel& semikernel, std::span<const double> weights) {
  const std::size_t n1 = semikernel.complement_basis.rows();
  if (weights.size() + 1 != n1 || semikernel.null_basis.rows() != n1)
    throw StructuralError("semi-kernel covers " + std::to_string(n1) + " points, got " +
                          std::to_string(weights.size()) + " weights");
  const std::size_t n = weights.size();
  for (std::size_t k = 0; k < semikernel.null_basis.cols(); ++k) {
    const Vector col = semikernel.null_basis.column(k);
    const double resid = simd::dot(weights, std::span<const double>(col).first(n)) - col[n];
    if (std::abs(resid) > 1e-8 * std::max(1.0, max_abs(col)))
      throw ConstraintError("weights violate null-space constraint " + std::to_string(k) + " (residual " +
                            std::to_string(resid) + ")");
  }
  const DualFunctional c = residual_functional(weights);
  const Vector r = transpose_times(semikernel.complement_basis, c.coefficients);
  const Vector s = Cholesky(semikernel.form).solve(r);
  return simd::dot(r, s);
}

double blup_predict(const Matrix& covariance, const Trend& trend, std::span<const double> values) {
  return predict(constrained_weights(covariance, trend).weights, values);
}

double blup_variance(const Matrix& covariance, std::span<const double> weights) {
  return worst_case_error(covariance, weights);
}

}  // namespace kernpred
