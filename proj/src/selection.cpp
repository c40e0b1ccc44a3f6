#include "kernpred/selection.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

#include "kernpred/error.hpp"
#include "kernpred/predictor.hpp"

namespace kernpred {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

RollingRecord predict_one(std::span<const double> values, const KnotGrid& grid, const KernelSpec& spec,
                          RollingMode mode, std::size_t r) {
  RollingRecord rec;
  rec.r = r;
  rec.actual = values[r];
  try {
    const KnotGrid prefix = grid.prefix(r + 1);
    const Matrix kernel = mode == RollingMode::Submatrix ? spec.kernel.principal(r + 1) : spec.rebuild(prefix);
    const Trend trend = spec_trend(spec, prefix, r + 1);
    const PredictionResult res = trend.empty() ? minmax_weights(kernel) : constrained_weights(kernel, trend);
    rec.predicted = predict(res.weights, values.first(r));
    rec.abs_error = std::abs(rec.actual - rec.predicted);
  } catch (const Error& e) {
    rec.predicted = kNaN;
    rec.abs_error = kNaN;
    rec.failure = e.what();
  }
  return rec;
}

void validate_inputs(std::span<const double> values, const KnotGrid& grid, const KernelSpec& spec,
                     const RollingOptions& options) {
  const std::size_t n = values.size();
  if (grid.size() != n)
    throw StructuralError("grid has " + std::to_string(grid.size()) + " points, series has " + std::to_string(n));
  if (options.r_min < 2) throw StructuralError("r_min must be at least 2");
  if (n <= options.r_min)
    throw StructuralError("series of " + std::to_string(n) + " values leaves nothing to predict with r_min " +
                          std::to_string(options.r_min));
  if (options.mode == RollingMode::Submatrix && (spec.kernel.rows() != n || !spec.kernel.square()))
    throw StructuralError("kernel '" + spec.label + "' is " + std::to_string(spec.kernel.rows()) + "x" +
                          std::to_string(spec.kernel.cols()) + ", series has " + std::to_string(n) + " points");
  if (options.mode == RollingMode::Rebuild && !spec.rebuild)
    throw StructuralError("kernel '" + spec.label + "' cannot be rebuilt on a prefix grid");
  if (spec.trend == TrendMode::Custom && spec.custom_trend.rows() != n)
    throw StructuralError("custom trend for '" + spec.label + "' has " + std::to_string(spec.custom_trend.rows()) +
                          " rows, series has " + std::to_string(n));
}

}  // namespace

Trend spec_trend(const KernelSpec& spec, const KnotGrid& grid, std::size_t points) {
  switch (spec.trend) {
    case TrendMode::None: return Trend();
    case TrendMode::Affine: return Trend::affine(grid.knots().first(points));
    case TrendMode::Custom:
      if (spec.custom_trend.rows() < points)
        throw StructuralError("custom trend for '" + spec.label + "' covers " +
                              std::to_string(spec.custom_trend.rows()) + " points, need " + std::to_string(points));
      return Trend(spec.custom_trend.leading(points, spec.custom_trend.cols()));
  }
  return Trend();
}

PredictionResult spec_weights(const KernelSpec& spec, const KnotGrid& grid) {
  const std::size_t n1 = grid.size();
  if (spec.kernel.rows() < n1 || !spec.kernel.square())
    throw StructuralError("kernel '" + spec.label + "' is " + std::to_string(spec.kernel.rows()) + "x" +
                          std::to_string(spec.kernel.cols()) + ", need at least " + std::to_string(n1) + " points");
  const Matrix kernel = spec.kernel.rows() == n1 ? spec.kernel : spec.kernel.principal(n1);
  const Trend trend = spec_trend(spec, grid, n1);
  return trend.empty() ? minmax_weights(kernel) : constrained_weights(kernel, trend);
}

KernelSpec spline_spec(const SplineKernelSet& set, SplineKernel which) {
  KernelSpec spec;
  spec.label = which == SplineKernel::K0 ? "K0" : which == SplineKernel::K1 ? "K1" : "K2";
  spec.kernel = kernel_matrix(set, which);
  spec.trend = uses_affine_trend(which) ? TrendMode::Affine : TrendMode::None;
  spec.rebuild = [which](const KnotGrid& g) { return kernel_matrix(kernel_set(g), which); };
  return spec;
}

std::size_t RollingRun::successes() const noexcept {
  return static_cast<std::size_t>(std::count_if(records.begin(), records.end(), [](const auto& r) { return r.ok(); }));
}

RollingRun rolling_predict(std::span<const double> values, const KnotGrid& grid, const KernelSpec& spec,
                           const RollingOptions& options) {
  validate_inputs(values, grid, spec, options);
  const std::size_t n = values.size();
  RollingRun run{spec.label, options.r_min, std::vector<RollingRecord>(n - options.r_min)};

  std::size_t threads = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, run.records.size());

  std::atomic<std::size_t> next{options.r_min};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (std::size_t r = next++; r < n; r = next++) {
      try {
        run.records[r - options.r_min] = predict_one(values, grid, spec, options.mode, r);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (first_error) std::rethrow_exception(first_error);
  return run;
}

namespace {

void require_successes(const RollingRun& run, const char* what) {
  if (run.successes() == 0)
    throw DomainError(std::string(what) + " of '" + run.kernel_label + "' is undefined: no successful predictions");
}

}  // namespace

double mspe(const RollingRun& run) {
  require_successes(run, "MSPE");
  double sum = 0.0;
  std::size_t count = 0;
  for (const auto& rec : run.records)
    if (rec.ok()) {
      sum += rec.abs_error * rec.abs_error;
      ++count;
    }
  return sum / static_cast<double>(count);
}

double maxpe(const RollingRun& run) {
  require_successes(run, "MAXPE");
  double m = 0.0;
  for (const auto& rec : run.records)
    if (rec.ok()) m = std::max(m, rec.abs_error);
  return m;
}

double PairwiseOutcome::fraction() const noexcept {
  return common == 0 ? 0.0 : static_cast<double>(wins) / static_cast<double>(common);
}

PairwiseOutcome statistical_compare(const RollingRun& a, const RollingRun& b, double tie_tol) {
  if (!(tie_tol >= 0.0)) throw DomainError("tie tolerance must be non-negative");
  if (a.records.size() != b.records.size())
    throw StructuralError("runs '" + a.kernel_label + "' and '" + b.kernel_label + "' cover different r");
  PairwiseOutcome out;
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    const auto& ra = a.records[i];
    const auto& rb = b.records[i];
    if (ra.r != rb.r)
      throw StructuralError("runs '" + a.kernel_label + "' and '" + b.kernel_label + "' are misaligned at r = " +
                            std::to_string(ra.r));
    if (!ra.ok() || !rb.ok()) continue;
    ++out.common;
    if (ra.abs_error < rb.abs_error - tie_tol)
      ++out.wins;
    else if (rb.abs_error < ra.abs_error - tie_tol)
      ++out.losses;
    else
      ++out.ties;
  }
  return out;
}

double CriteriaReport::win_fraction(std::size_t a, std::size_t b) const {
  const std::size_t c = common_count(a, b);
  return c == 0 ? 0.0 : static_cast<double>(win_count(a, b)) / static_cast<double>(c);
}

double CriteriaReport::tie_fraction(std::size_t a, std::size_t b) const {
  const std::size_t c = common_count(a, b);
  return c == 0 ? 0.0 : static_cast<double>(tie_count(a, b)) / static_cast<double>(c);
}

std::size_t CriteriaReport::mspe_winner() const {
  if (mspe.empty()) throw StructuralError("empty report");
  return static_cast<std::size_t>(std::min_element(mspe.begin(), mspe.end()) - mspe.begin());
}

CriteriaReport tournament(std::span<const double> values, const KnotGrid& grid, std::span<const KernelSpec> specs,
                          const RollingOptions& options, double tie_tol) {
  if (specs.size() < 2) throw StructuralError("a tournament needs at least two kernels");
  if (!(tie_tol >= 0.0)) throw DomainError("tie tolerance must be non-negative");
  const std::size_t k = specs.size();
  CriteriaReport rep;
  rep.tie_tol = tie_tol;
  for (const auto& spec : specs) {
    rep.labels.push_back(spec.label);
    rep.runs.push_back(rolling_predict(values, grid, spec, options));
    const RollingRun& run = rep.runs.back();
    rep.predictions.push_back(run.successes());
    rep.mspe.push_back(run.successes() ? mspe(run) : kNaN);
    rep.maxpe.push_back(run.successes() ? maxpe(run) : kNaN);
  }
  rep.wins.assign(k * k, 0);
  rep.ties.assign(k * k, 0);
  rep.common.assign(k * k, 0);
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = 0; b < k; ++b) {
      if (a == b) continue;
      const PairwiseOutcome o = statistical_compare(rep.runs[a], rep.runs[b], tie_tol);
      rep.wins[a * k + b] = o.wins;
      rep.ties[a * k + b] = o.ties;
      rep.common[a * k + b] = o.common;
    }
  return rep;
}

}  // namespace kernpred
