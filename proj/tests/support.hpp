#pragma once

// Random instance generators and Eigen-based reference computations shared
// by the unit tests and the acceptance binary.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "kernpred/grid.hpp"
#include "kernpred/matrix.hpp"

namespace testing_support {

using kernpred::Matrix;
using kernpred::Vector;
using Rng = std::mt19937_64;

inline Eigen::MatrixXd to_eigen(const Matrix& m) {
  Eigen::MatrixXd e(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) e(i, j) = m(i, j);
  return e;
}

inline Eigen::VectorXd to_eigen(const Vector& v) { return Eigen::Map<const Eigen::VectorXd>(v.data(), v.size()); }

inline Matrix from_eigen(const Eigen::MatrixXd& e) {
  Matrix m(e.rows(), e.cols());
  for (Eigen::Index i = 0; i < e.rows(); ++i)
    for (Eigen::Index j = 0; j < e.cols(); ++j) m(i, j) = e(i, j);
  return m;
}

inline Vector from_eigen_vec(const Eigen::VectorXd& e) { return Vector(e.data(), e.data() + e.size()); }

inline double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
inline double gauss(Rng& rng, double sigma = 1.0) { return std::normal_distribution<double>(0.0, sigma)(rng); }
inline std::size_t pick(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

inline Vector random_vector(Rng& rng, std::size_t n, double sigma = 1.0) {
  Vector v(n);
  for (auto& x : v) x = gauss(rng, sigma);
  return v;
}

/// A A^T + shift I with Gaussian A.
inline Matrix random_spd(Rng& rng, std::size_t n, double shift = 0.5) {
  Eigen::MatrixXd a(n, n);
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) a(i, j) = gauss(rng);
  Eigen::MatrixXd k = a * a.transpose() / static_cast<double>(n);
  k.diagonal().array() += shift;
  return from_eigen(0.5 * (k + k.transpose()));
}

/// Strictly increasing knots with gaps drawn from [lo, hi].
inline std::vector<double> random_knots(Rng& rng, std::size_t count, double start = 0.0, double lo = 0.3,
                                        double hi = 2.0) {
  std::vector<double> t(count);
  t[0] = start;
  for (std::size_t i = 1; i < count; ++i) t[i] = t[i - 1] + uniform(rng, lo, hi);
  return t;
}

/// Kernel conditionally positive w.r.t. {1, t}: |x - y|^3 (polyharmonic,
/// order two) plus a random positive semidefinite perturbation.
inline Matrix random_conditionally_positive(Rng& rng, std::span<const double> t) {
  const std::size_t n = t.size();
  Matrix k(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) k(i, j) = std::pow(std::abs(t[i] - t[j]), 3);
  Eigen::MatrixXd a(n, 2);
  for (std::size_t i = 0; i < n; ++i) {
    a(i, 0) = gauss(rng);
    a(i, 1) = gauss(rng);
  }
  const Eigen::MatrixXd psd = a * a.transpose();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) k(i, j) = psd(i, j) + k(i, j);
  return k;
}

inline double rel_diff(double a, double b) { return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)}); }

// Dense spline oracle: coefficients (a, b, c, d) per interval of
// s(t) = a + b d + c d^2 + d d^3, d = t - t_i, from a 4n x 4n linear system.
struct DenseSpline {
  std::vector<double> knots;
  Eigen::VectorXd coef;

  double operator()(double t) const {
    std::size_t i = 0;
    while (i + 2 < knots.size() && t >= knots[i + 1]) ++i;
    const double d = t - knots[i];
    return coef[4 * i] + d * (coef[4 * i + 1] + d * (coef[4 * i + 2] + d * coef[4 * i + 3]));
  }
  double second(std::size_t knot) const {
    const std::size_t n = knots.size() - 1;
    if (knot < n) return 2.0 * coef[4 * knot + 2];
    const double h = knots[n] - knots[n - 1];
    return 2.0 * coef[4 * (n - 1) + 2] + 6.0 * coef[4 * (n - 1) + 3] * h;
  }
  std::vector<double> knot_values() const {
    std::vector<double> v;
    for (double t : knots) v.push_back((*this)(t));
    const std::size_t n = knots.size() - 1;
    const double h = knots[n] - knots[n - 1];
    const auto* c = &coef[4 * (n - 1)];
    v.back() = c[0] + h * (c[1] + h * (c[2] + h * c[3]));
    return v;
  }
};

namespace detail {

struct Rows {
  Eigen::MatrixXd a;
  Eigen::VectorXd b;
  Eigen::Index next = 0;
  void add(std::initializer_list<std::pair<Eigen::Index, double>> entries, double rhs) {
    for (auto [j, x] : entries) a(next, j) += x;
    b(next++) = rhs;
  }
};

// Continuity rows at interior knots: value (c0), slope, curvature (c2).
inline void continuity(Rows& r, const std::vector<double>& t, bool c0, bool c2) {
  const std::size_t n = t.size() - 1;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double h = t[i + 1] - t[i];
    const Eigen::Index c = 4 * i, d = 4 * (i + 1);
    if (c0) r.add({{c, 1}, {c + 1, h}, {c + 2, h * h}, {c + 3, h * h * h}, {d, -1}}, 0.0);
    r.add({{c + 1, 1}, {c + 2, 2 * h}, {c + 3, 3 * h * h}, {d + 1, -1}}, 0.0);
    if (c2) r.add({{c + 2, 2}, {c + 3, 6 * h}, {d + 2, -2}}, 0.0);
  }
}

}  // namespace detail

/// Spline with s(t_1) = p1, s(t_2) = p2 and s''(t_i) = u_i, C^1 at the knots.
inline DenseSpline dense_spline_002(const std::vector<double>& t, double p1, double p2, const std::vector<double>& u) {
  const std::size_t n = t.size() - 1;
  detail::Rows r{Eigen::MatrixXd::Zero(4 * n, 4 * n), Eigen::VectorXd::Zero(4 * n)};
  const double h0 = t[1] - t[0];
  r.add({{0, 1}}, p1);
  r.add({{0, 1}, {1, h0}, {2, h0 * h0}, {3, h0 * h0 * h0}}, p2);
  for (std::size_t i = 0; i < n; ++i) {
    const double h = t[i + 1] - t[i];
    const Eigen::Index c = 4 * i;
    r.add({{c + 2, 2}}, u[i]);
    r.add({{c + 2, 2}, {c + 3, 6 * h}}, u[i + 1]);
  }
  detail::continuity(r, t, true, false);
  return {t, r.a.fullPivLu().solve(r.b)};
}

/// Natural C^2 interpolant through (t_i, p_i).
inline DenseSpline dense_natural(const std::vector<double>& t, const std::vector<double>& p) {
  const std::size_t n = t.size() - 1;
  detail::Rows r{Eigen::MatrixXd::Zero(4 * n, 4 * n), Eigen::VectorXd::Zero(4 * n)};
  for (std::size_t i = 0; i < n; ++i) {
    const double h = t[i + 1] - t[i];
    const Eigen::Index c = 4 * i;
    r.add({{c, 1}}, p[i]);
    r.add({{c, 1}, {c + 1, h}, {c + 2, h * h}, {c + 3, h * h * h}}, p[i + 1]);
  }
  detail::continuity(r, t, false, true);
  const double hn = t[n] - t[n - 1];
  r.add({{2, 2}}, 0.0);
  r.add({{4 * (n - 1) + 2, 2}, {4 * (n - 1) + 3, 6 * hn}}, 0.0);
  return {t, r.a.fullPivLu().solve(r.b)};
}

/// Composite Simpson over each knot interval with `m` (even) panels.
template <class F>
double simpson(const std::vector<double>& t, F&& f, int m = 64) {
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < t.size(); ++i) {
    const double a = t[i], h = (t[i + 1] - t[i]) / m;
    double s = f(a) + f(t[i + 1]);
    for (int k = 1; k < m; ++k) s += (k % 2 ? 4.0 : 2.0) * f(a + k * h);
    total += s * h / 3.0;
  }
  return total;
}

}  // namespace testing_support
