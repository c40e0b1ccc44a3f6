#include "kernpred/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "kernpred/error.hpp"
#include "kernpred/simd.hpp"

namespace kernpred {

namespace {

std::string dims(const Matrix& m) { return std::to_string(m.rows()) + "x" + std::to_string(m.cols()); }

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows_ ? rows.begin()->size() : 0;
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw StructuralError("ragged matrix initializer");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::from_columns(std::span<const Vector> columns) {
  if (columns.empty()) return {};
  Matrix m(columns.front().size(), columns.size());
  for (std::size_t j = 0; j < columns.size(); ++j) m.set_column(j, columns[j]);
  return m;
}

Vector Matrix::column(std::size_t j) const {
  Vector v(rows_);
  for (std::size_t i = 0; i < rows_; ++i) v[i] = (*this)(i, j);
  return v;
}

void Matrix::set_column(std::size_t j, std::span<const double> v) {
  if (v.size() != rows_) throw StructuralError("column length " + std::to_string(v.size()) + " != " + std::to_string(rows_));
  for (std::size_t i = 0; i < rows_; ++i) (*this)(i, j) = v[i];
}

Matrix Matrix::transpose() const {
  Matrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

Matrix Matrix::leading(std::size_t rows, std::size_t cols) const {
  if (rows > rows_ || cols > cols_) throw StructuralError("leading block larger than matrix " + dims(*this));
  Matrix b(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) std::copy_n(data_.begin() + i * cols_, cols, b.row(i).begin());
  return b;
}

double Matrix::max_abs() const noexcept { return kernpred::max_abs(data_); }

double Matrix::max_abs_diagonal() const noexcept {
  double m = 0.0;
  for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) m = std::max(m, std::abs((*this)(i, i)));
  return m;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw StructuralError("cannot multiply " + dims(a) + " by " + dims(b));
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto ci = c.row(i);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik != 0.0) simd::axpy(aik, b.row(k), ci);
    }
  }
  return c;
}

Vector operator*(const Matrix& a, std::span<const double> x) {
  if (a.cols() != x.size()) throw StructuralError("cannot multiply " + dims(a) + " by vector of length " + std::to_string(x.size()));
  Vector y(a.rows());
  simd::gemv(a.data(), a.rows(), a.cols(), x, y);
  return y;
}

Matrix operator*(double s, const Matrix& a) {
  Matrix c = a;
  simd::scale(s, c.data());
  return c;
}

Matrix operator+(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw StructuralError("cannot add " + dims(a) + " and " + dims(b));
  Matrix c = a;
  simd::axpy(1.0, b.data(), c.data());
  return c;
}

Matrix operator-(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw StructuralError("cannot subtract " + dims(b) + " from " + dims(a));
  Matrix c = a;
  simd::axpy(-1.0, b.data(), c.data());
  return c;
}

Vector transpose_times(const Matrix& a, std::span<const double> x) {
  if (a.rows() != x.size()) throw StructuralError("cannot multiply transpose of " + dims(a) + " by vector of length " + std::to_string(x.size()));
  Vector y(a.cols(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i)
    if (x[i] != 0.0) simd::axpy(x[i], a.row(i), y);
  return y;
}

Matrix congruence(const Matrix& a, const Matrix& b) {
  if (!b.square() || b.rows() != a.rows()) throw StructuralError("congruence needs square " + std::to_string(a.rows()) + "-matrix, got " + dims(b));
  Matrix c = a.transpose() * (b * a);
  symmetrize(c);
  return c;
}

double asymmetry(const Matrix& a) noexcept {
  const double scale = a.max_abs();
  if (scale == 0.0 || !a.square()) return 0.0;
  double worst = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = i + 1; j < a.cols(); ++j) worst = std::max(worst, std::abs(a(i, j) - a(j, i)));
  return worst / scale;
}

void symmetrize(Matrix& a) noexcept {
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = i + 1; j < a.cols(); ++j) {
      const double m = 0.5 * (a(i, j) + a(j, i));
      a(i, j) = m;
      a(j, i) = m;
    }
}

double norm2(std::span<const double> x) { return std::sqrt(simd::dot(x, x)); }

double max_abs(std::span<const double> x) noexcept {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace kernpred
