#pragma once

// Cubic splines on a knot grid and the three kernels derived from them.
//
// A spline is stored by its knot data: values p_i, first derivatives q_i,
// second derivatives u_i (i = 1..n+1) and right third derivatives v_i
// (i = 1..n). On [t_i, t_{i+1}):
//   s(t) = p_i + q_i d + u_i d^2 / 2 + v_i d^3 / 6,   d = t - t_i.

#include <span>

#include "kernpred/grid.hpp"
#include "kernpred/kernels.hpp"
#include "kernpred/matrix.hpp"
#include "kernpred/predictor.hpp"

namespace kernpred {

struct SplineModel {
  KnotGrid grid;
  Vector p;  // n+1
  Vector q;  // n+1
  Vector u;  // n+1
  Vector v;  // n

  bool natural() const noexcept { return u.front() == 0.0 && u.back() == 0.0; }
};

/// Spline from the parameters (p_1, p_2, u_1..u_{n+1}) by forward recursion
/// of the C^2 continuity relations.
SplineModel spline_from_002(const KnotGrid& grid, double p1, double p2, std::span<const double> u);

/// (n+1) x (n+3) matrix whose column j holds the knot values of the spline
/// built from the j-th unit parameter vector (p_1, p_2, u_1, ..., u_{n+1}).
Matrix basis_002(const KnotGrid& grid);

/// Natural C^2 cubic spline through (t_i, p_i).
SplineModel natural_interpolant(const KnotGrid& grid, std::span<const double> values);

/// U: (n-1) x (n+1) map from knot values to interior second derivatives of
/// the natural interpolant.
Matrix second_derivative_map(const KnotGrid& grid);

/// Q: (n-1) x (n-1) tridiagonal matrix with u^T Q u = int |s''|^2 for a
/// natural spline with interior second derivatives u.
Matrix energy_matrix(const KnotGrid& grid);

/// int_{t_1}^{t_{n+1}} |s''(t)|^2 dt, integrated exactly interval by interval.
double bending_energy(const SplineModel& model);

/// P = U^T Q U.
Matrix penalty_matrix(const Matrix& energy, const Matrix& second_derivatives);

/// Q0[i][j] = int L_i L_j over [t_1, t_{n+1}], L_i the cardinal natural splines.
Matrix gram_l2(const KnotGrid& grid);

/// s(t) for t in [t_1, t_{n+1}]; DomainError otherwise. Exact at knots.
double evaluate(const SplineModel& model, double t);

/// Largest violation of the value, slope and curvature continuity relations
/// at interior knots, relative to the model's magnitude.
double continuity_residual(const SplineModel& model);

struct SplineKernelSet {
  KnotGrid grid;
  Matrix Q;   // (n-1) x (n-1) bending energy
  Matrix U;   // (n-1) x (n+1)
  Matrix P;   // (n+1) x (n+1), U^T Q U
  Matrix R;   // (n+1) x (n-1), natural-spline columns for u_2..u_n
  Matrix Q0;  // (n+1) x (n+1), L2 Gram matrix
  Matrix K0;  // Q0^{-1}
  Matrix K1;  // R Q^{-1} R^T
  Matrix K2;  // R Q R^T
  Trend trend;  // {1, t}
};

/// Builds every matrix for the grid and checks their structural invariants;
/// throws InvariantError (or FactorizationError) when one fails.
SplineKernelSet kernel_set(const KnotGrid& grid);

/// Which of the three spline kernels.
enum class SplineKernel { K0, K1, K2 };

const Matrix& kernel_matrix(const SplineKernelSet& set, SplineKernel which) noexcept;
/// K0 is used without a trend, K1 and K2 with {1, t}.
bool uses_affine_trend(SplineKernel which) noexcept;

/// Semi-kernel with form Q, null space {1, t} and complement basis R.
SemiKernel spline_semikernel(const SplineKernelSet& set);

/// argmin over f_{n+1} of f^T P f with f_1..f_n fixed:
/// -(sum_{j<=n} P[n+1][j] f_j) / P[n+1][n+1].
double pspline_predict(const Matrix& penalty, std::span<const double> values);

}  // namespace kernpred
