#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "kernpred/matrix.hpp"

namespace kernpred {

/// Strictly increasing time points t_1 < ... < t_{n+1}.
class KnotGrid {
 public:
  /// Throws StructuralError unless there are at least two finite, strictly
  /// increasing knots.
  explicit KnotGrid(std::vector<double> knots);

  std::size_t size() const noexcept { return knots_.size(); }
  /// Number of intervals, i.e. n for n+1 knots.
  std::size_t intervals() const noexcept { return knots_.size() - 1; }

  std::span<const double> knots() const noexcept { return knots_; }
  double operator[](std::size_t i) const noexcept { return knots_[i]; }
  double front() const noexcept { return knots_.front(); }
  double back() const noexcept { return knots_.back(); }

  /// h_i = t_{i+1} - t_i, length n.
  Vector gaps() const;
  double gap(std::size_t i) const noexcept { return knots_[i + 1] - knots_[i]; }

  /// First `count` knots.
  KnotGrid prefix(std::size_t count) const;
  /// Grid with one more knot appended.
  KnotGrid extended(double next) const;
  /// t -> (t - shift) / scale.
  KnotGrid mapped(double shift, double scale) const;

  /// Throws StructuralError unless the grid has at least `min_knots` knots.
  void require_at_least(std::size_t min_knots, const char* what) const;

 private:
  std::vector<double> knots_;
};

/// Trend columns p_1..p_q evaluated at every grid point, as an
/// (n+1) x q matrix.
class Trend {
 public:
  Trend() = default;
  explicit Trend(Matrix columns) : columns_(std::move(columns)) {}

  static Trend constant(std::size_t points);
  /// Columns {1, t}.
  static Trend affine(std::span<const double> times);

  const Matrix& columns() const noexcept { return columns_; }
  std::size_t points() const noexcept { return columns_.rows(); }
  std::size_t count() const noexcept { return columns_.cols(); }
  bool empty() const noexcept { return columns_.cols() == 0; }

  /// Trend restricted to the first `points` grid points.
  Trend prefix(std::size_t points) const { return Trend(columns_.leading(points, columns_.cols())); }

 private:
  Matrix columns_;
};

}  // namespace kernpred
