#pragma once

// Rolling-origin evaluation of kernels and the three comparison criteria:
// mean squared error, maximum error, and pairwise win fractions.

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kernpred/grid.hpp"
#include "kernpred/matrix.hpp"
#include "kernpred/predictor.hpp"
#include "kernpred/spline.hpp"

namespace kernpred {

enum class TrendMode { None, Affine, Custom };

/// How the kernel for the first r+1 points is obtained.
enum class RollingMode {
  Submatrix,  // principal submatrix of the full-grid kernel
  Rebuild,    // rebuilt from scratch on the first r+1 knots
};

struct KernelSpec {
  std::string label;
  Matrix kernel;  // over every grid point
  TrendMode trend = TrendMode::None;
  Matrix custom_trend;  // grid points x q, used when trend == Custom
  /// Needed for RollingMode::Rebuild.
  std::function<Matrix(const KnotGrid&)> rebuild;
};

/// Trend of `spec` restricted to the first `points` grid points.
Trend spec_trend(const KernelSpec& spec, const KnotGrid& grid, std::size_t points);

/// Weights for predicting the last grid point from the others, using the
/// spec's kernel (leading principal block when it covers more points).
PredictionResult spec_weights(const KernelSpec& spec, const KnotGrid& grid);

/// K0 without trend, K1/K2 with {1, t}; rebuildable on any prefix grid.
KernelSpec spline_spec(const SplineKernelSet& set, SplineKernel which);

struct RollingRecord {
  std::size_t r = 0;       // observations used; predicts values[r] (0-based)
  double predicted = 0.0;  // NaN when failed
  double actual = 0.0;
  double abs_error = 0.0;  // NaN when failed
  std::optional<std::string> failure;

  bool ok() const noexcept { return !failure.has_value(); }
};

struct RollingRun {
  std::string kernel_label;
  std::size_t r_min = 2;
  std::vector<RollingRecord> records;  // one per r = r_min..N-1, in order

  std::size_t successes() const noexcept;
  std::size_t failures() const noexcept { return records.size() - successes(); }
};

struct RollingOptions {
  std::size_t r_min = 2;
  RollingMode mode = RollingMode::Submatrix;
  /// 0 picks the hardware concurrency.
  std::size_t threads = 0;
};

/// Predicts values[r] from values[0..r) for every r in [r_min, N-1]. Per-r
/// solver failures are recorded, not thrown.
RollingRun rolling_predict(std::span<const double> values, const KnotGrid& grid, const KernelSpec& spec,
                           const RollingOptions& options = {});

/// Mean squared error over successful records. Throws on an empty run.
double mspe(const RollingRun& run);
/// Largest absolute error over successful records. Throws on an empty run.
double maxpe(const RollingRun& run);

struct PairwiseOutcome {
  std::size_t wins = 0;    // e_a < e_b - tie_tol
  std::size_t losses = 0;  // e_b < e_a - tie_tol
  std::size_t ties = 0;
  std::size_t common = 0;  // r where both runs succeeded

  double fraction() const noexcept;
  bool better() const noexcept { return fraction() > 0.5; }
};

/// Throws StructuralError when the runs cover different r.
PairwiseOutcome statistical_compare(const RollingRun& a, const RollingRun& b, double tie_tol = 0.0);

struct CriteriaReport {
  std::vector<std::string> labels;
  std::vector<RollingRun> runs;
  std::vector<double> mspe;
  std::vector<double> maxpe;
  std::vector<std::size_t> predictions;  // successful records per kernel
  // k x k, row-major: wins[a * k + b] counts r where a strictly beat b.
  std::vector<std::size_t> wins;
  std::vector<std::size_t> ties;
  std::vector<std::size_t> common;
  double tie_tol = 0.0;

  std::size_t size() const noexcept { return labels.size(); }
  std::size_t win_count(std::size_t a, std::size_t b) const { return wins.at(a * size() + b); }
  std::size_t tie_count(std::size_t a, std::size_t b) const { return ties.at(a * size() + b); }
  std::size_t common_count(std::size_t a, std::size_t b) const { return common.at(a * size() + b); }
  /// W[a, b]; 0 when a == b or nothing in common.
  double win_fraction(std::size_t a, std::size_t b) const;
  double tie_fraction(std::size_t a, std::size_t b) const;
  /// Index of the smallest MSPE (first on ties).
  std::size_t mspe_winner() const;
};

/// Rolling runs for every spec plus all three criteria. Requires >= 2 specs.
CriteriaReport tournament(std::span<const double> values, const KnotGrid& grid, std::span<const KernelSpec> specs,
                          const RollingOptions& options = {}, double tie_tol = 0.0);

}  // namespace kernpred
