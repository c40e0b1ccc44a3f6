#include "kernpred/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "kernpred/error.hpp"
#include "kernpred/simd.hpp"

namespace kernpred {

namespace {

void require_square(const Matrix& a, const char* what) {
  if (!a.square())
    throw StructuralError(std::string(what) + " needs a square matrix, got " + std::to_string(a.rows()) + "x" +
                          std::to_string(a.cols()));
}

void require_length(std::size_t got, std::size_t want) {
  if (got != want)
    throw StructuralError("right-hand side has length " + std::to_string(got) + ", expected " + std::to_string(want));
}

}  // namespace

// ---------------------------------------------------------------- Cholesky

std::optional<std::size_t> Cholesky::factor(const Matrix& a, double rel_tol, Matrix& l) {
  require_square(a, "Cholesky");
  const std::size_t n = a.rows();
  l = Matrix(n, n);
  const double floor = rel_tol * a.max_abs_diagonal();
  for (std::size_t j = 0; j < n; ++j) {
    auto lj = l.row(j);
    for (std::size_t k = 0; k < j; ++k) {
      const double s = simd::dot(lj.first(k), l.row(k).first(k));
      lj[k] = (a(j, k) - s) / l(k, k);
    }
    const double d = a(j, j) - simd::dot(lj.first(j), lj.first(j));
    if (!(d > floor) || !(d > 0.0)) return j;
    lj[j] = std::sqrt(d);
  }
  return std::nullopt;
}

Cholesky::Cholesky(const Matrix& a, double rel_tol) {
  if (auto bad = factor(a, rel_tol, l_))
    throw FactorizationError("matrix is not numerically positive definite", *bad);
}

std::optional<std::size_t> Cholesky::first_failing_pivot(const Matrix& a, double rel_tol) {
  Matrix scratch;
  return factor(a, rel_tol, scratch);
}

Vector Cholesky::solve(std::span<const double> b) const {
  const std::size_t n = size();
  require_length(b.size(), n);
  Vector y(b.begin(), b.end());
  for (std::size_t i = 0; i < n; ++i) {
    const auto li = l_.row(i);
    y[i] = (y[i] - simd::dot(li.first(i), std::span<const double>(y).first(i))) / li[i];
  }
  for (std::size_t i = n; i-- > 0;) {
    y[i] /= l_(i, i);
    simd::axpy(-y[i], l_.row(i).first(i), std::span<double>(y).first(i));
  }
  return y;
}

Matrix Cholesky::solve(const Matrix& b) const {
  Matrix x(b.rows(), b.cols());
  for (std::size_t j = 0; j < b.cols(); ++j) x.set_column(j, solve(b.column(j)));
  return x;
}

Matrix Cholesky::inverse() const {
  Matrix inv = solve(Matrix::identity(size()));
  symmetrize(inv);
  return inv;
}

Vector Cholesky::lower_times(std::span<const double> x) const {
  require_length(x.size(), size());
  Vector y(size());
  for (std::size_t i = 0; i < size(); ++i) y[i] = simd::dot(l_.row(i).first(i + 1), x.first(i + 1));
  return y;
}

Vector Cholesky::upper_times(std::span<const double> x) const {
  require_length(x.size(), size());
  Vector y(size(), 0.0);
  for (std::size_t i = 0; i < size(); ++i) simd::axpy(x[i], l_.row(i).first(i + 1), std::span<double>(y).first(i + 1));
  return y;
}

double Cholesky::condition_estimate() const noexcept {
  if (size() == 0) return 1.0;
  double lo = l_(0, 0), hi = l_(0, 0);
  for (std::size_t i = 1; i < size(); ++i) {
    lo = std::min(lo, l_(i, i));
    hi = std::max(hi, l_(i, i));
  }
  const double r = hi / lo;
  return r * r;
}

// ------------------------------------------------------------ Bunch-Kaufman

BunchKaufman::BunchKaufman(const Matrix& input, double rel_tol) {
  require_square(input, "Bunch-Kaufman");
  if (asymmetry(input) > 1e-12) throw StructuralError("Bunch-Kaufman needs a symmetric matrix");
  const std::size_t n = input.rows();
  Matrix a = input;
  l_ = Matrix::identity(n);
  d_ = Matrix(n, n);
  perm_.resize(n);
  std::iota(perm_.begin(), perm_.end(), std::size_t{0});
  blocks_.assign(n, 0);

  const double alpha = (1.0 + std::sqrt(17.0)) / 8.0;
  const double thresh = rel_tol * input.max_abs();

  auto swap_sym = [&](std::size_t p, std::size_t q, std::size_t k) {
    for (std::size_t j = 0; j < n; ++j) std::swap(a(p, j), a(q, j));
    for (std::size_t i = 0; i < n; ++i) std::swap(a(i, p), a(i, q));
    for (std::size_t j = 0; j < k; ++j) std::swap(l_(p, j), l_(q, j));
    std::swap(perm_[p], perm_[q]);
  };

  Vector c1, c2;
  std::size_t k = 0;
  while (k < n) {
    const double absakk = std::abs(a(k, k));
    std::size_t imax = k;
    double colmax = 0.0;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(a(i, k)) > colmax) {
        colmax = std::abs(a(i, k));
        imax = i;
      }
    if (std::max(absakk, colmax) <= thresh) throw FactorizationError("symmetric indefinite matrix is singular", k);

    std::size_t kstep = 1;
    std::size_t kp = k;
    if (absakk < alpha * colmax) {
      double rowmax = 0.0;
      for (std::size_t j = k; j < n; ++j)
        if (j != imax) rowmax = std::max(rowmax, std::abs(a(imax, j)));
      if (absakk * rowmax >= alpha * colmax * colmax) {
        kp = k;
      } else if (std::abs(a(imax, imax)) >= alpha * rowmax) {
        kp = imax;
      } else {
        kp = imax;
        kstep = 2;
      }
    }
    const std::size_t kk = k + kstep - 1;
    if (kp != kk) swap_sym(kk, kp, k);

    const std::size_t first = k + kstep;
    const std::size_t rest = n - first;
    if (kstep == 1) {
      const double dk = a(k, k);
      d_(k, k) = dk;
      blocks_[k] = 1;
      c1.resize(rest);
      for (std::size_t i = 0; i < rest; ++i) c1[i] = a(first + i, k);
      for (std::size_t i = 0; i < rest; ++i) {
        const double li = c1[i] / dk;
        l_(first + i, k) = li;
        simd::axpy(-li, c1, a.row(first + i).subspan(first));
      }
    } else {
      const double p = a(k, k), q = a(k + 1, k), r = a(k + 1, k + 1);
      const double det = p * r - q * q;
      d_(k, k) = p;
      d_(k + 1, k) = q;
      d_(k, k + 1) = q;
      d_(k + 1, k + 1) = r;
      blocks_[k] = 2;
      blocks_[k + 1] = 0;
      c1.resize(rest);
      c2.resize(rest);
      for (std::size_t i = 0; i < rest; ++i) {
        c1[i] = a(first + i, k);
        c2[i] = a(first + i, k + 1);
      }
      for (std::size_t i = 0; i < rest; ++i) {
        const double l1 = (c1[i] * r - c2[i] * q) / det;
        const double l2 = (c2[i] * p - c1[i] * q) / det;
        l_(first + i, k) = l1;
        l_(first + i, k + 1) = l2;
        auto row = a.row(first + i).subspan(first);
        simd::axpy(-l1, c1, row);
        simd::axpy(-l2, c2, row);
      }
    }
    k += kstep;
  }
}

Vector BunchKaufman::solve(std::span<const double> b) const {
  const std::size_t n = size();
  require_length(b.size(), n);
  Vector y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = b[perm_[i]];
  for (std::size_t i = 0; i < n; ++i) y[i] -= simd::dot(l_.row(i).first(i), std::span<const double>(y).first(i));
  for (std::size_t i = 0; i < n;) {
    if (blocks_[i] == 1) {
      y[i] /= d_(i, i);
      i += 1;
    } else {
      const double p = d_(i, i), q = d_(i + 1, i), r = d_(i + 1, i + 1);
      const double det = p * r - q * q;
      const double y0 = y[i], y1 = y[i + 1];
      y[i] = (r * y0 - q * y1) / det;
      y[i + 1] = (p * y1 - q * y0) / det;
      i += 2;
    }
  }
  for (std::size_t i = n; i-- > 0;) simd::axpy(-y[i], l_.row(i).first(i), std::span<double>(y).first(i));
  Vector x(n);
  for (std::size_t i = 0; i < n; ++i) x[perm_[i]] = y[i];
  return x;
}

std::size_t BunchKaufman::negative_eigenvalues() const noexcept {
  std::size_t neg = 0;
  for (std::size_t i = 0; i < size();) {
    if (blocks_[i] == 1) {
      neg += d_(i, i) < 0.0 ? 1 : 0;
      i += 1;
    } else {
      const double p = d_(i, i), q = d_(i + 1, i), r = d_(i + 1, i + 1);
      const double det = p * r - q * q;
      if (det < 0.0)
        neg += 1;
      else if (p + r < 0.0)
        neg += 2;
      i += 2;
    }
  }
  return neg;
}

// ------------------------------------------------------------ Householder QR

HouseholderQR::HouseholderQR(Matrix a, bool column_pivoting) : m_(a.rows()), n_(a.cols()), qr_(std::move(a)) {
  perm_.resize(n_);
  std::iota(perm_.begin(), perm_.end(), std::size_t{0});
  const std::size_t steps = std::min(m_, n_);
  reflectors_.reserve(steps);
  Vector w;
  for (std::size_t k = 0; k < steps; ++k) {
    if (column_pivoting) {
      std::size_t best = k;
      double best_norm = -1.0;
      for (std::size_t j = k; j < n_; ++j) {
        double s = 0.0;
        for (std::size_t i = k; i < m_; ++i) s += qr_(i, j) * qr_(i, j);
        if (s > best_norm) {
          best_norm = s;
          best = j;
        }
      }
      if (best != k) {
        for (std::size_t i = 0; i < m_; ++i) std::swap(qr_(i, k), qr_(i, best));
        std::swap(perm_[k], perm_[best]);
      }
    }
    Vector v(m_ - k);
    for (std::size_t i = k; i < m_; ++i) v[i - k] = qr_(i, k);
    const double xnorm = norm2(v);
    if (xnorm == 0.0) {
      reflectors_.push_back(Vector(m_ - k, 0.0));
      continue;
    }
    const double alpha = v[0] >= 0.0 ? -xnorm : xnorm;
    v[0] -= alpha;
    const double vnorm = norm2(v);
    simd::scale(1.0 / vnorm, v);

    // rows k..m-1, columns k..n-1: A <- A - 2 v (v^T A)
    w.assign(n_ - k, 0.0);
    for (std::size_t i = 0; i < v.size(); ++i) simd::axpy(v[i], qr_.row(k + i).subspan(k), w);
    for (std::size_t i = 0; i < v.size(); ++i) simd::axpy(-2.0 * v[i], w, qr_.row(k + i).subspan(k));
    qr_(k, k) = alpha;
    for (std::size_t i = k + 1; i < m_; ++i) qr_(i, k) = 0.0;
    reflectors_.push_back(std::move(v));
  }
}

std::size_t HouseholderQR::rank(double rel_tol) const noexcept {
  const std::size_t steps = std::min(m_, n_);
  if (steps == 0) return 0;
  const double lead = std::abs(qr_(0, 0));
  if (lead == 0.0) return 0;
  std::size_t r = 0;
  for (std::size_t i = 0; i < steps; ++i)
    if (std::abs(qr_(i, i)) > rel_tol * lead) ++r;
  return r;
}

Vector HouseholderQR::apply_qt(std::span<const double> x) const {
  require_length(x.size(), m_);
  Vector y(x.begin(), x.end());
  for (std::size_t k = 0; k < reflectors_.size(); ++k) {
    const auto& v = reflectors_[k];
    auto tail = std::span<double>(y).subspan(k);
    simd::axpy(-2.0 * simd::dot(v, tail), v, tail);
  }
  return y;
}

Vector HouseholderQR::apply_q(std::span<const double> x) const {
  require_length(x.size(), m_);
  Vector y(x.begin(), x.end());
  for (std::size_t k = reflectors_.size(); k-- > 0;) {
    const auto& v = reflectors_[k];
    auto tail = std::span<double>(y).subspan(k);
    simd::axpy(-2.0 * simd::dot(v, tail), v, tail);
  }
  return y;
}

Matrix HouseholderQR::q() const {
  Matrix q(m_, m_);
  Vector e(m_, 0.0);
  for (std::size_t j = 0; j < m_; ++j) {
    e[j] = 1.0;
    q.set_column(j, apply_q(e));
    e[j] = 0.0;
  }
  return q;
}

Matrix HouseholderQR::r() const {
  const std::size_t steps = std::min(m_, n_);
  Matrix r(steps, n_);
  for (std::size_t i = 0; i < steps; ++i)
    for (std::size_t j = i; j < n_; ++j) r(i, j) = qr_(i, j);
  return r;
}

// ------------------------------------------------------------- tridiagonal

Vector solve_tridiagonal(std::span<const double> sub, std::span<const double> diag, std::span<const double> super,
                         std::span<const double> rhs) {
  const std::size_t n = diag.size();
  if (rhs.size() != n || (n > 0 && (sub.size() != n - 1 || super.size() != n - 1)))
    throw StructuralError("tridiagonal system has inconsistent band lengths");
  if (n == 0) return {};
  Vector c(n), x(n);
  double denom = diag[0];
  if (denom == 0.0) throw FactorizationError("tridiagonal system is singular", 0);
  c[0] = n > 1 ? super[0] / denom : 0.0;
  x[0] = rhs[0] / denom;
  for (std::size_t i = 1; i < n; ++i) {
    denom = diag[i] - sub[i - 1] * c[i - 1];
    if (denom == 0.0) throw FactorizationError("tridiagonal system is singular", i);
    c[i] = i + 1 < n ? super[i] / denom : 0.0;
    x[i] = (rhs[i] - sub[i - 1] * x[i - 1]) / denom;
  }
  for (std::size_t i = n - 1; i-- > 0;) x[i] -= c[i] * x[i + 1];
  return x;
}

}  // namespace kernpred
