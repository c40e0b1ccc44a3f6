#include "kernpred/spline.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "kernpred/error.hpp"
#include "kernpred/linalg.hpp"
#include "kernpred/simd.hpp"

namespace kernpred {

namespace {

// Per-interval slope and cubic coefficient from knot values and second
// derivatives.
SplineModel from_knot_data(const KnotGrid& grid, Vector p, Vector u) {
  const std::size_t n = grid.intervals();
  SplineModel m{grid, std::move(p), Vector(n + 1), std::move(u), Vector(n)};
  for (std::size_t i = 0; i < n; ++i) {
    const double h = grid.gap(i);
    m.v[i] = (m.u[i + 1] - m.u[i]) / h;
    m.q[i] = (m.p[i + 1] - m.p[i]) / h - m.u[i] * h / 2.0 - m.v[i] * h * h / 6.0;
  }
  const double h = grid.gap(n - 1);
  m.q[n] = m.q[n - 1] + m.u[n - 1] * h + m.v[n - 1] * h * h / 2.0;
  return m;
}

// Right-hand side of the natural-spline system, 6 * (second divided differences).
Vector curvature_rhs(const KnotGrid& grid, std::span<const double> p) {
  const std::size_t n = grid.intervals();
  Vector rhs(n - 1);
  for (std::size_t j = 0; j + 1 < n; ++j)
    rhs[j] = 6.0 * ((p[j + 2] - p[j + 1]) / grid.gap(j + 1) - (p[j + 1] - p[j]) / grid.gap(j));
  return rhs;
}

struct Tridiagonal {
  Vector sub, diag, super;
};

// The natural-spline system matrix, which equals 6 * Q.
Tridiagonal natural_system(const KnotGrid& grid) {
  const std::size_t n = grid.intervals();
  Tridiagonal t{Vector(n - 2), Vector(n - 1), Vector(n - 2)};
  for (std::size_t j = 0; j + 1 < n; ++j) {
    t.diag[j] = 2.0 * (grid.gap(j) + grid.gap(j + 1));
    if (j + 2 < n) {
      t.super[j] = grid.gap(j + 1);
      t.sub[j] = grid.gap(j + 1);
    }
  }
  return t;
}

void require_spline_grid(const KnotGrid& grid) { grid.require_at_least(3, "cubic spline construction"); }

constexpr std::array<double, 4> kGaussNodes{-0.8611363115940526, -0.3399810435848563, 0.3399810435848563,
                                            0.8611363115940526};
constexpr std::array<double, 4> kGaussWeights{0.3478548451374538, 0.6521451548625461, 0.6521451548625461,
                                              0.3478548451374538};

}  // namespace

SplineModel spline_from_002(const KnotGrid& grid, double p1, double p2, std::span<const double> u) {
  const std::size_t n = grid.intervals();
  if (u.size() != n + 1)
    throw StructuralError("expected " + std::to_string(n + 1) + " second derivatives, got " + std::to_string(u.size()));
  SplineModel m{grid, Vector(n + 1), Vector(n + 1), Vector(u.begin(), u.end()), Vector(n)};
  for (std::size_t i = 0; i < n; ++i) m.v[i] = (m.u[i + 1] - m.u[i]) / grid.gap(i);
  const double h1 = grid.gap(0);
  m.p[0] = p1;
  m.p[1] = p2;
  m.q[0] = (p2 - p1) / h1 - m.u[0] * h1 / 2.0 - m.v[0] * h1 * h1 / 6.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double h = grid.gap(i);
    if (i > 0) m.p[i + 1] = m.p[i] + m.q[i] * h + m.u[i] * h * h / 2.0 + m.v[i] * h * h * h / 6.0;
    m.q[i + 1] = m.q[i] + m.u[i] * h + m.v[i] * h * h / 2.0;
  }
  return m;
}

Matrix basis_002(const KnotGrid& grid) {
  const std::size_t n = grid.intervals();
  Matrix b(n + 1, n + 3);
  Vector u(n + 1, 0.0);
  b.set_column(0, spline_from_002(grid, 1.0, 0.0, u).p);
  b.set_column(1, spline_from_002(grid, 0.0, 1.0, u).p);
  for (std::size_t i = 0; i <= n; ++i) {
    u[i] = 1.0;
    b.set_column(2 + i, spline_from_002(grid, 0.0, 0.0, u).p);
    u[i] = 0.0;
  }
  return b;
}

SplineModel natural_interpolant(const KnotGrid& grid, std::span<const double> values) {
  const std::size_t n = grid.intervals();
  if (values.size() != n + 1)
    throw StructuralError("expected " + std::to_string(n + 1) + " values, got " + std::to_string(values.size()));
  Vector u(n + 1, 0.0);
  if (n >= 2) {
    const Tridiagonal t = natural_system(grid);
    const Vector interior = solve_tridiagonal(t.sub, t.diag, t.super, curvature_rhs(grid, values));
    std::copy(interior.begin(), interior.end(), u.begin() + 1);
  }
  return from_knot_data(grid, Vector(values.begin(), values.end()), std::move(u));
}

Matrix second_derivative_map(const KnotGrid& grid) {
  require_spline_grid(grid);
  const std::size_t n = grid.intervals();
  const Tridiagonal t = natural_system(grid);
  Matrix u(n - 1, n + 1);
  Vector e(n + 1, 0.0);
  for (std::size_t c = 0; c <= n; ++c) {
    e[c] = 1.0;
    u.set_column(c, solve_tridiagonal(t.sub, t.diag, t.super, curvature_rhs(grid, e)));
    e[c] = 0.0;
  }
  return u;
}

Matrix energy_matrix(const KnotGrid& grid) {
  require_spline_grid(grid);
  const std::size_t n = grid.intervals();
  Matrix q(n - 1, n - 1);
  for (std::size_t j = 0; j + 1 < n; ++j) {
    q(j, j) = (grid.gap(j) + grid.gap(j + 1)) / 3.0;
    if (j + 2 < n) {
      q(j, j + 1) = grid.gap(j + 1) / 6.0;
      q(j + 1, j) = grid.gap(j + 1) / 6.0;
    }
  }
  return q;
}

double bending_energy(const SplineModel& model) {
  double e = 0.0;
  for (std::size_t i = 0; i < model.grid.intervals(); ++i) {
    const double h = model.grid.gap(i);
    const double a = model.u[i], b = model.v[i];
    e += a * a * h + a * b * h * h + b * b * h * h * h / 3.0;
  }
  return e;
}

Matrix penalty_matrix(const Matrix& energy, const Matrix& second_derivatives) {
  return congruence(second_derivatives, energy);
}

Matrix gram_l2(const KnotGrid& grid) {
  require_spline_grid(grid);
  const std::size_t n = grid.intervals();
  const Matrix umap = second_derivative_map(grid);
  // Full second derivatives of every cardinal spline: row k holds u_k for
  // all n+1 cardinals (rows 0 and n are zero).
  Matrix ufull(n + 1, n + 1);
  for (std::size_t k = 1; k < n; ++k)
    for (std::size_t i = 0; i <= n; ++i) ufull(k, i) = umap(k - 1, i);

  // Cardinal values at the quadrature nodes, pre-multiplied by sqrt(weight).
  Matrix e(n + 1, 4 * n);
  for (std::size_t k = 0; k < n; ++k) {
    const double h = grid.gap(k);
    for (std::size_t g = 0; g < 4; ++g) {
      const double tau = 0.5 * (kGaussNodes[g] + 1.0);
      const double a = 1.0 - tau, b = tau;
      const double ca = (a * a * a - a) * h * h / 6.0;
      const double cb = (b * b * b - b) * h * h / 6.0;
      const double sw = std::sqrt(0.5 * h * kGaussWeights[g]);
      const std::size_t col = 4 * k + g;
      for (std::size_t i = 0; i <= n; ++i) {
        double s = ca * ufull(k, i) + cb * ufull(k + 1, i);
        if (i == k) s += a;
        if (i == k + 1) s += b;
        e(i, col) = sw * s;
      }
    }
  }
  Matrix q0(n + 1, n + 1);
  for (std::size_t i = 0; i <= n; ++i)
    for (std::size_t j = i; j <= n; ++j) {
      const double v = simd::dot(e.row(i), e.row(j));
      q0(i, j) = v;
      q0(j, i) = v;
    }
  return q0;
}

double evaluate(const SplineModel& model, double t) {
  const auto knots = model.grid.knots();
  if (!(t >= knots.front() && t <= knots.back()))
    throw DomainError("evaluation point " + std::to_string(t) + " outside [" + std::to_string(knots.front()) + ", " +
                      std::to_string(knots.back()) + "]");
  if (t == knots.back()) return model.p.back();
  const auto it = std::upper_bound(knots.begin(), knots.end(), t);
  const std::size_t i = static_cast<std::size_t>(it - knots.begin()) - 1;
  const double d = t - knots[i];
  return model.p[i] + d * (model.q[i] + d * (model.u[i] / 2.0 + d * model.v[i] / 6.0));
}

double continuity_residual(const SplineModel& model) {
  double worst = 0.0;
  auto rel = [](double resid, std::initializer_list<double> terms) {
    double scale = 0.0;
    for (double t : terms) scale = std::max(scale, std::abs(t));
    return scale > 0.0 ? std::abs(resid) / scale : std::abs(resid);
  };
  for (std::size_t i = 0; i < model.grid.intervals(); ++i) {
    const double h = model.grid.gap(i);
    const double t0 = model.p[i], t1 = model.q[i] * h, t2 = model.u[i] * h * h / 2.0, t3 = model.v[i] * h * h * h / 6.0;
    worst = std::max(worst, rel(t0 + t1 + t2 + t3 - model.p[i + 1], {t0, t1, t2, t3, model.p[i + 1]}));
    const double s1 = model.u[i] * h, s2 = model.v[i] * h * h / 2.0;
    worst = std::max(worst, rel(model.q[i] + s1 + s2 - model.q[i + 1], {model.q[i], s1, s2, model.q[i + 1]}));
    worst = std::max(worst, rel(model.v[i] * h - (model.u[i + 1] - model.u[i]), {model.v[i] * h, model.u[i + 1], model.u[i]}));
  }
  return worst;
}

SplineKernelSet kernel_set(const KnotGrid& grid) {
  require_spline_grid(grid);
  const std::size_t n = grid.intervals();

  SplineKernelSet set{grid, energy_matrix(grid), second_derivative_map(grid), {}, Matrix(n + 1, n - 1), gram_l2(grid),
                      {}, {}, {}, Trend::affine(grid.knots())};
  set.P = penalty_matrix(set.Q, set.U);
  const Matrix b = basis_002(grid);
  for (std::size_t i = 0; i <= n; ++i)
    for (std::size_t j = 0; j + 1 < n; ++j) set.R(i, j) = b(i, 3 + j);

  auto require_spd = [](const Matrix& m, const char* name) {
    if (validate_kernel(m) != Definiteness::PositiveDefinite)
      throw InvariantError(std::string(name) + " is not symmetric positive definite");
  };
  require_spd(set.Q, "Q");
  require_spd(set.Q0, "Q0");

  const Cholesky qchol(set.Q);
  set.K0 = Cholesky(set.Q0).inverse();
  set.K1 = set.R * qchol.solve(set.R.transpose());
  symmetrize(set.K1);
  set.K2 = congruence(set.R.transpose(), set.Q);

  // P must annihilate {1, t}.
  double prow = 0.0;
  for (std::size_t i = 0; i <= n; ++i) {
    double s = 0.0;
    for (double x : set.P.row(i)) s += std::abs(x);
    prow = std::max(prow, s);
  }
  for (std::size_t k = 0; k < 2; ++k) {
    const Vector col = set.trend.columns().column(k);
    const Vector pc = set.P * col;
    if (max_abs(pc) > 1e-10 * prow * max_abs(col))
      throw InvariantError("P does not annihilate the affine trend");
  }
  if (HouseholderQR(set.R, true).rank() != n - 1) throw InvariantError("R does not have full column rank");
  require_spd(set.K0, "K0");
  for (const auto* k : {&set.K1, &set.K2})
    if (validate_kernel(*k, set.trend) != Definiteness::ConditionallyPositive)
      throw InvariantError(std::string(k == &set.K1 ? "K1" : "K2") +
                           " is not conditionally positive w.r.t. the affine trend");
  return set;
}

const Matrix& kernel_matrix(const SplineKernelSet& set, SplineKernel which) noexcept {
  switch (which) {
    case SplineKernel::K0: return set.K0;
    case SplineKernel::K1: return set.K1;
    case SplineKernel::K2: return set.K2;
  }
  return set.K0;
}

bool uses_affine_trend(SplineKernel which) noexcept { return which != SplineKernel::K0; }

SemiKernel spline_semikernel(const SplineKernelSet& set) {
  return SemiKernel{set.Q, set.trend.columns(), set.R};
}

double pspline_predict(const Matrix& penalty, std::span<const double> values) {
  require_symmetric(penalty, "penalty matrix");
  const std::size_t n = penalty.rows() - 1;
  if (values.size() != n)
    throw StructuralError("expected " + std::to_string(n) + " values, got " + std::to_string(values.size()));
  if (!(penalty(n, n) > 0.0)) throw DomainError("penalty matrix has no curvature at the predicted point");
  return -simd::dot(penalty.row(n).first(n), values) / penalty(n, n);
}

}  // namespace kernpred
