#pragma once

// Dense row-major matrix. Sizes in this library stay in the low hundreds,
// so everything is stored contiguously and copied by value.

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace kernpred {

using Vector = std::vector<double>;

class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);
  static Matrix from_columns(std::span<const Vector> columns);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return rows_ == 0 || cols_ == 0; }
  bool square() const noexcept { return rows_ == cols_; }

  double& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) noexcept { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const noexcept { return {data_.data() + i * cols_, cols_}; }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }

  Vector column(std::size_t j) const;
  void set_column(std::size_t j, std::span<const double> v);

  Matrix transpose() const;
  /// Top-left `rows x cols` block.
  Matrix leading(std::size_t rows, std::size_t cols) const;
  /// Top-left `n x n` principal block.
  Matrix principal(std::size_t n) const { return leading(n, n); }

  double max_abs() const noexcept;
  double max_abs_diagonal() const noexcept;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix operator*(const Matrix& a, const Matrix& b);
Vector operator*(const Matrix& a, std::span<const double> x);
Matrix operator*(double s, const Matrix& a);
Matrix operator+(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);

/// A^T x without forming the transpose.
Vector transpose_times(const Matrix& a, std::span<const double> x);
/// A^T B A for square B.
Matrix congruence(const Matrix& a, const Matrix& b);

/// Largest |a_ij - a_ji| relative to max |a_ij|; 0 for an all-zero matrix.
double asymmetry(const Matrix& a) noexcept;
/// Average the matrix with its transpose in place.
void symmetrize(Matrix& a) noexcept;

double norm2(std::span<const double> x);
double max_abs(std::span<const double> x) noexcept;

}  // namespace kernpred
