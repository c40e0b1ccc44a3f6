#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "io.hpp"
#include "kernpred/error.hpp"
#include "kernpred/grid.hpp"
#include "kernpred/kernels.hpp"
#include "kernpred/predictor.hpp"
#include "kernpred/selection.hpp"
#include "kernpred/spline.hpp"

namespace kernpred::cli {

namespace {

using Json = nlohmann::ordered_json;

const std::vector<std::string> kDefaultKernels{"K0", "K1", "K2"};

std::optional<SplineKernel> spline_kernel_named(const std::string& name) {
  if (name == "K0") return SplineKernel::K0;
  if (name == "K1") return SplineKernel::K1;
  if (name == "K2") return SplineKernel::K2;
  return std::nullopt;
}

std::optional<std::string> file_argument(const std::string& value) {
  if (value.starts_with("file:") && value.size() > 5) return value.substr(5);
  return std::nullopt;
}

const std::vector<std::string>& kernel_names(const RunConfig& c) { return c.kernels.empty() ? kDefaultKernels : c.kernels; }

bool uses_spline_kernels(const RunConfig& c) {
  const auto& names = kernel_names(c);
  return std::any_of(names.begin(), names.end(), [](const auto& n) { return spline_kernel_named(n).has_value(); });
}

/// Computational grid: the given times, optionally mapped onto [0, 1].
KnotGrid compute_grid(const std::vector<double>& times, bool rescale) {
  KnotGrid g(times);
  return rescale ? g.mapped(g.front(), g.back() - g.front()) : g;
}

void require_series(const Series& s, const RunConfig& c, std::size_t minimum) {
  if (uses_spline_kernels(c)) minimum = std::max<std::size_t>(minimum, 4);
  if (s.values.size() < minimum)
    throw StructuralError("series has " + std::to_string(s.values.size()) + " rows, need at least " +
                          std::to_string(minimum));
}

std::vector<KernelSpec> resolve_kernels(const RunConfig& c, const KnotGrid& grid) {
  std::optional<SplineKernelSet> set;
  std::optional<Matrix> trend_file;
  if (const auto path = file_argument(c.trend)) trend_file = read_matrix(*path);

  std::vector<KernelSpec> specs;
  for (const auto& name : kernel_names(c)) {
    KernelSpec spec;
    if (const auto which = spline_kernel_named(name)) {
      if (!set) set = kernel_set(grid);
      spec = spline_spec(*set, *which);
    } else if (const auto path = file_argument(name)) {
      spec.label = name;
      spec.kernel = read_matrix(*path);
      require_symmetric(spec.kernel, name.c_str());
    } else {
      throw StructuralError("unknown kernel '" + name + "'");
    }
    if (c.trend == "none") {
      spec.trend = TrendMode::None;
    } else if (c.trend == "affine") {
      spec.trend = TrendMode::Affine;
    } else if (trend_file) {
      spec.trend = TrendMode::Custom;
      spec.custom_trend = *trend_file;
    }
    specs.push_back(std::move(spec));
  }
  return specs;
}

// Rethrows `e` with the kernel label prepended, preserving its type.
template <class F>
auto labeled(const std::string& label, F&& f) -> decltype(f()) {
  const std::string prefix = "kernel " + label + ": ";
  try {
    return f();
  } catch (const FactorizationError& e) {
    std::string m = e.what();
    m = m.substr(0, m.rfind(" (pivot "));
    throw FactorizationError(prefix + m, e.pivot());
  } catch (const ConstraintError& e) {
    throw ConstraintError(prefix + e.what());
  } catch (const DomainError& e) {
    throw DomainError(prefix + e.what());
  } catch (const InvariantError& e) {
    throw InvariantError(prefix + e.what());
  } catch (const StructuralError& e) {
    throw StructuralError(prefix + e.what());
  }
}

void warn(std::ostream& err, const std::string& label, const std::vector<std::string>& diagnostics) {
  for (const auto& d : diagnostics) err << "warning: kernel " << label << ": " << d << '\n';
}

// --- output -----------------------------------------------------------------

class Sink {
 public:
  Sink(const RunConfig& c, std::ostream& fallback) : stream_(&fallback) {
    if (c.output.empty()) return;
    std::filesystem::path path(c.output);
    if (path.is_relative())
      if (const char* dir = std::getenv(kOutputDirEnv); dir && *dir) path = std::filesystem::path(dir) / path;
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    file_.open(path);
    if (!file_) throw Error("cannot write " + path.string());
    stream_ = &file_;
  }
  std::ostream& operator*() { return *stream_; }

 private:
  std::ofstream file_;
  std::ostream* stream_;
};

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

void render(const Table& t, const std::string& format, std::ostream& os) {
  if (format == "csv") {
    auto line = [&](const std::vector<std::string>& cells) {
      for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << cells[i];
      os << '\n';
    };
    line(t.header);
    for (const auto& r : t.rows) line(r);
    return;
  }
  std::vector<std::size_t> width(t.header.size());
  for (std::size_t i = 0; i < width.size(); ++i) width[i] = t.header[i].size();
  for (const auto& r : t.rows)
    for (std::size_t i = 0; i < r.size(); ++i) width[i] = std::max(width[i], r[i].size());
  auto line = [&](const std::vector<std::string>& cells) {
    std::string s;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) s += "  ";
      const std::string pad(width[i] - cells[i].size(), ' ');
      s += i == 0 ? cells[i] + pad : pad + cells[i];
    }
    while (!s.empty() && s.back() == ' ') s.pop_back();
    os << s << '\n';
  };
  line(t.header);
  for (const auto& r : t.rows) line(r);
}

Json json_real(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

Json json_matrix(const Matrix& m) {
  Json rows = Json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) rows.push_back(Json(std::vector<double>(m.row(i).begin(), m.row(i).end())));
  return rows;
}

void emit_json(const Json& j, std::ostream& os) { os << j.dump(2) << '\n'; }

std::string optional_real(const std::optional<double>& x) { return x ? format_real(*x) : ""; }

// --- shared prediction step ---------------------------------------------------

struct StepPrediction {
  std::string label;
  std::size_t step = 1;
  double time = 0.0;  // original units
  Matrix kernel;  // over the observed points plus the predicted one
  bool has_trend = false;
  PredictionResult result;
  double predicted = 0.0;
  std::optional<double> truth;
  std::optional<double> realized_error;
  std::optional<double> realized_error_formula;
  std::string note;
};

std::vector<StepPrediction> predict_step(const RunConfig& c, const std::vector<double>& times,
                                         const std::vector<double>& values, double next, std::size_t step,
                                         std::ostream& err) {
  std::vector<double> all_times = times;
  all_times.push_back(next);
  const KnotGrid grid = compute_grid(all_times, c.rescale);
  const std::vector<KernelSpec> specs = resolve_kernels(c, grid);
  std::vector<StepPrediction> out;
  for (const auto& spec : specs) {
    StepPrediction p;
    p.label = spec.label;
    p.step = step;
    p.time = next;
    p.kernel = spec.kernel.principal(grid.size());
    p.has_trend = spec.trend != TrendMode::None;
    p.result = labeled(spec.label, [&] { return spec_weights(spec, grid); });
    p.predicted = predict(p.result.weights, values);
    warn(err, spec.label, p.result.diagnostics);
    out.push_back(std::move(p));
  }
  return out;
}

double default_next(const std::vector<double>& times) { return times.back() + (times.back() - times[times.size() - 2]); }

double resolve_next(const RunConfig& c, const Series& s) {
  const double next = c.next_time.value_or(default_next(s.times));
  if (!(next > s.times.back()))
    throw DomainError("next time " + format_real(next) + " must be after the last observed time " +
                      format_real(s.times.back()));
  return next;
}

}  // namespace

// --- verbs --------------------------------------------------------------------

int cmd_kernels(const RunConfig& c, std::ostream& out, std::ostream&) {
  const Series s = read_series(c.series);
  if (s.values.size() < 4) throw StructuralError("series has " + std::to_string(s.values.size()) + " rows, need at least 4");
  const SplineKernelSet set = kernel_set(compute_grid(s.times, c.rescale));

  struct Entry {
    const char* name;
    const Matrix* m;
    bool trend;
  };
  const Entry entries[] = {{"Q", &set.Q, false},   {"U", &set.U, false},   {"P", &set.P, true},
                           {"R", &set.R, false},   {"Q0", &set.Q0, false}, {"K0", &set.K0, false},
                           {"K1", &set.K1, true},  {"K2", &set.K2, true}};
  auto classify = [&](const Entry& e) -> std::string {
    if (!e.m->square()) return "rectangular";
    return std::string(to_string(e.trend ? validate_kernel(*e.m, set.trend) : validate_kernel(*e.m)));
  };

  Sink sink(c, out);
  if (c.format == "json") {
    Json j;
    j["knots"] = s.times;
    j["rescaled"] = c.rescale;
    j["matrices"] = Json::array();
    for (const auto& e : entries)
      j["matrices"].push_back(Json{{"name", e.name},
                                   {"rows", e.m->rows()},
                                   {"cols", e.m->cols()},
                                   {"classification", classify(e)},
                                   {"data", json_matrix(*e.m)}});
    emit_json(j, *sink);
    return kOk;
  }
  bool first = true;
  for (const auto& e : entries) {
    if (!first) *sink << '\n';
    first = false;
    *sink << "# matrix " << e.name << ' ' << e.m->rows() << 'x' << e.m->cols() << ' ' << classify(e) << '\n';
    if (c.format == "csv") {
      write_matrix_csv(*sink, *e.m);
    } else {
      Table t;
      for (std::size_t i = 0; i < e.m->rows(); ++i) {
        std::vector<std::string> row;
        for (std::size_t j = 0; j < e.m->cols(); ++j) row.push_back(format_real((*e.m)(i, j)));
        if (i == 0)
          t.header = std::move(row);
        else
          t.rows.push_back(std::move(row));
      }
      render(t, "table", *sink);
    }
  }
  return kOk;
}

int cmd_predict(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const Series s = read_series(c.series);
  require_series(s, c, 2);
  const double next = resolve_next(c, s);
  if (c.chain == "true" && !c.truth) throw StructuralError("--chain true needs --truth");

  std::vector<StepPrediction> preds = predict_step(c, s.times, s.values, next, 1, err);
  for (auto& p : preds) {
    if (!c.truth) continue;
    p.truth = c.truth;
    p.realized_error = *c.truth - p.predicted;
    // Closed form through the inverse kernel; defined for positive definite
    // kernels without a trend.
    if (!p.has_trend) {
      std::vector<double> full = s.values;
      full.push_back(*c.truth);
      try {
        p.realized_error_formula = interpolation_error(p.kernel, full);
      } catch (const FactorizationError&) {
      }
    }
  }

  if (!c.chain.empty()) {
    const double later = c.chain_time.value_or(next + (next - s.times.back()));
    if (!(later > next)) throw DomainError("chain time must be after the next time");
    std::vector<double> times = s.times;
    times.push_back(next);
    const std::size_t count = preds.size();
    for (std::size_t k = 0; k < count; ++k) {
      std::vector<double> values = s.values;
      values.push_back(c.chain == "true" ? *c.truth : preds[k].predicted);
      auto second = predict_step(c, times, values, later, 2, err);
      StepPrediction p = std::move(second.at(k));
      p.note = "chained (" + c.chain + ")";
      preds.push_back(std::move(p));
    }
  }

  Sink sink(c, out);
  if (c.format == "json") {
    Json j;
    j["predictions"] = Json::array();
    for (const auto& p : preds) {
      Json e{{"kernel", p.label},
             {"step", p.step},
             {"time", p.time},
             {"predicted", json_real(p.predicted)},
             {"worst_error", json_real(p.result.worst_error)}};
      e["truth"] = p.truth ? Json(*p.truth) : Json(nullptr);
      e["realized_error"] = p.realized_error ? json_real(*p.realized_error) : Json(nullptr);
      e["realized_error_formula"] = p.realized_error_formula ? json_real(*p.realized_error_formula) : Json(nullptr);
      e["chained"] = p.note.empty() ? Json(false) : Json(c.chain);
      e["weights"] = p.result.weights;
      e["multipliers"] = p.result.multipliers;
      e["diagnostics"] = p.result.diagnostics;
      j["predictions"].push_back(std::move(e));
    }
    emit_json(j, *sink);
    return kOk;
  }
  Table t{{"kernel", "step", "time", "predicted", "worst_error", "truth", "realized_error", "note"}, {}};
  for (const auto& p : preds)
    t.rows.push_back({p.label, std::to_string(p.step), format_real(p.time), format_real(p.predicted),
                      format_real(p.result.worst_error), optional_real(p.truth), optional_real(p.realized_error),
                      p.note});
  render(t, c.format, *sink);
  return kOk;
}

int cmd_evaluate(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const Series s = read_series(c.series);
  require_series(s, c, c.r_min + 2);
  const KnotGrid grid = compute_grid(s.times, c.rescale);
  const std::vector<KernelSpec> specs = resolve_kernels(c, grid);
  RollingOptions opts;
  opts.r_min = c.r_min;
  opts.mode = c.rolling == "rebuild" ? RollingMode::Rebuild : RollingMode::Submatrix;
  opts.threads = c.threads;

  CriteriaReport rep;
  if (specs.size() >= 2) {
    rep = tournament(s.values, grid, specs, opts, c.tie_tol);
  } else {
    const RollingRun run = rolling_predict(s.values, grid, specs.front(), opts);
    rep.labels = {run.kernel_label};
    rep.predictions = {run.successes()};
    rep.mspe = {run.successes() ? mspe(run) : std::nan("")};
    rep.maxpe = {run.successes() ? maxpe(run) : std::nan("")};
    rep.wins = rep.ties = rep.common = {0};
    rep.tie_tol = c.tie_tol;
    rep.runs = {run};
  }
  for (const auto& run : rep.runs)
    for (const auto& rec : run.records)
      if (!rec.ok()) err << "warning: kernel " << run.kernel_label << ": r = " << rec.r << " failed: " << *rec.failure << '\n';

  const std::size_t k = rep.size();
  Sink sink(c, out);
  if (c.format == "json") {
    Json j;
    j["r_min"] = c.r_min;
    j["tie_tol"] = c.tie_tol;
    j["rolling"] = c.rolling;
    j["kernels"] = Json::array();
    for (std::size_t a = 0; a < k; ++a)
      j["kernels"].push_back(Json{{"kernel", rep.labels[a]},
                                  {"predictions", rep.predictions[a]},
                                  {"failures", rep.runs[a].failures()},
                                  {"mspe", json_real(rep.mspe[a])},
                                  {"maxpe", json_real(rep.maxpe[a])}});
    j["pairs"] = Json::array();
    for (std::size_t a = 0; a < k; ++a)
      for (std::size_t b = 0; b < k; ++b)
        if (a != b)
          j["pairs"].push_back(Json{{"kernel", rep.labels[a]},
                                    {"other", rep.labels[b]},
                                    {"wins", rep.win_count(a, b)},
                                    {"ties", rep.tie_count(a, b)},
                                    {"common", rep.common_count(a, b)},
                                    {"win_fraction", rep.win_fraction(a, b)},
                                    {"better", rep.win_fraction(a, b) > 0.5}});
    if (c.records) {
      j["records"] = Json::array();
      for (const auto& run : rep.runs)
        for (const auto& rec : run.records)
          j["records"].push_back(Json{{"kernel", run.kernel_label},
                                      {"r", rec.r},
                                      {"time", s.times[rec.r]},
                                      {"predicted", json_real(rec.predicted)},
                                      {"actual", rec.actual},
                                      {"abs_error", json_real(rec.abs_error)},
                                      {"failure", rec.failure ? Json(*rec.failure) : Json(nullptr)}});
    }
    emit_json(j, *sink);
    return kOk;
  }

  if (c.format == "csv") {
    Table t{{"kind", "kernel", "other", "predictions", "failures", "mspe", "maxpe", "wins", "ties", "common",
             "win_fraction", "better"},
            {}};
    for (std::size_t a = 0; a < k; ++a)
      t.rows.push_back({"kernel", rep.labels[a], "", std::to_string(rep.predictions[a]),
                        std::to_string(rep.runs[a].failures()), format_real(rep.mspe[a]), format_real(rep.maxpe[a]), "",
                        "", "", "", ""});
    for (std::size_t a = 0; a < k; ++a)
      for (std::size_t b = 0; b < k; ++b)
        if (a != b)
          t.rows.push_back({"pair", rep.labels[a], rep.labels[b], "", "", "", "", std::to_string(rep.win_count(a, b)),
                            std::to_string(rep.tie_count(a, b)), std::to_string(rep.common_count(a, b)),
                            format_real(rep.win_fraction(a, b)), rep.win_fraction(a, b) > 0.5 ? "yes" : "no"});
    if (c.records)
      for (const auto& run : rep.runs)
        for (const auto& rec : run.records)
          t.rows.push_back({"record", run.kernel_label, std::to_string(rec.r), format_real(s.times[rec.r]), "",
                            format_real(rec.predicted), format_real(rec.actual), format_real(rec.abs_error), "", "",
                            "", rec.failure.value_or("")});
    render(t, "csv", *sink);
    return kOk;
  }

  Table kt{{"kernel", "predictions", "failures", "MSPE", "MAXPE"}, {}};
  for (std::size_t a = 0; a < k; ++a)
    kt.rows.push_back({rep.labels[a], std::to_string(rep.predictions[a]), std::to_string(rep.runs[a].failures()),
                       format_real(rep.mspe[a]), format_real(rep.maxpe[a])});
  render(kt, "table", *sink);
  if (k >= 2) {
    *sink << '\n';
    Table pt{{"kernel", "vs", "wins", "ties", "common", "win_fraction", "better"}, {}};
    for (std::size_t a = 0; a < k; ++a)
      for (std::size_t b = 0; b < k; ++b)
        if (a != b)
          pt.rows.push_back({rep.labels[a], rep.labels[b], std::to_string(rep.win_count(a, b)),
                             std::to_string(rep.tie_count(a, b)), std::to_string(rep.common_count(a, b)),
                             format_real(rep.win_fraction(a, b)), rep.win_fraction(a, b) > 0.5 ? "yes" : "no"});
    render(pt, "table", *sink);
  }
  if (c.records) {
    *sink << '\n';
    Table rt{{"kernel", "r", "time", "predicted", "actual", "abs_error", "failure"}, {}};
    for (const auto& run : rep.runs)
      for (const auto& rec : run.records)
        rt.rows.push_back({run.kernel_label, std::to_string(rec.r), format_real(s.times[rec.r]),
                           format_real(rec.predicted), format_real(rec.actual), format_real(rec.abs_error),
                           rec.failure.value_or("")});
    render(rt, "table", *sink);
  }
  return kOk;
}

int cmd_splinefit(const RunConfig& c, std::ostream& out, std::ostream& err) {
  if (c.samples_per_interval == 0) throw StructuralError("samples per interval must be positive");
  const Series s = read_series(c.series);
  require_series(s, c, 2);
  const double next = resolve_next(c, s);
  const std::vector<StepPrediction> preds = predict_step(c, s.times, s.values, next, 1, err);

  std::vector<double> times = s.times;
  times.push_back(next);
  const KnotGrid grid(times);
  const std::size_t spi = c.samples_per_interval;

  struct Curve {
    std::string label;
    double predicted;
    std::vector<std::pair<double, double>> samples;
  };
  std::vector<Curve> curves;
  for (const auto& p : preds) {
    std::vector<double> values = s.values;
    values.push_back(p.predicted);
    const SplineModel model = natural_interpolant(grid, values);
    Curve curve{p.label, p.predicted, {}};
    for (std::size_t i = 0; i < grid.intervals(); ++i)
      for (std::size_t k = 0; k < spi; ++k) {
        const double t = k == 0 ? grid[i] : grid[i] + grid.gap(i) * static_cast<double>(k) / static_cast<double>(spi);
        curve.samples.emplace_back(t, evaluate(model, t));
      }
    curve.samples.emplace_back(grid.back(), evaluate(model, grid.back()));
    curves.push_back(std::move(curve));
  }

  Sink sink(c, out);
  if (c.format == "json") {
    Json j;
    j["curves"] = Json::array();
    for (const auto& cv : curves) {
      Json samples = Json::array();
      for (const auto& [t, v] : cv.samples) samples.push_back(Json::array({t, v}));
      j["curves"].push_back(Json{{"kernel", cv.label}, {"next_time", next}, {"predicted", cv.predicted},
                                 {"samples", std::move(samples)}});
    }
    emit_json(j, *sink);
    return kOk;
  }
  Table t{{"kernel", "t", "s"}, {}};
  for (const auto& cv : curves)
    for (const auto& [x, v] : cv.samples) t.rows.push_back({cv.label, format_real(x), format_real(v)});
  render(t, c.format, *sink);
  return kOk;
}

int cmd_weights(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const Series s = read_series(c.series);
  require_series(s, c, 2);
  const double next = resolve_next(c, s);
  const std::vector<StepPrediction> preds = predict_step(c, s.times, s.values, next, 1, err);

  Sink sink(c, out);
  if (c.format == "json") {
    Json j;
    j["next_time"] = next;
    j["kernels"] = Json::array();
    for (const auto& p : preds)
      j["kernels"].push_back(Json{{"kernel", p.label},
                                  {"times", s.times},
                                  {"weights", p.result.weights},
                                  {"predicted", p.predicted},
                                  {"worst_error", p.result.worst_error}});
    emit_json(j, *sink);
    return kOk;
  }
  Table t{{"kernel", "index", "time", "weight"}, {}};
  for (const auto& p : preds)
    for (std::size_t i = 0; i < p.result.weights.size(); ++i)
      t.rows.push_back({p.label, std::to_string(i + 1), format_real(s.times[i]), format_real(p.result.weights[i])});
  render(t, c.format, *sink);
  return kOk;
}

// --- entry point --------------------------------------------------------------

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Min-max linear prediction of time series with cubic-spline kernels", "kernpred"};
  app.require_subcommand(1);
  RunConfig c;

  const auto kernel_check = CLI::Validator(
      [](std::string& v) -> std::string {
        if (spline_kernel_named(v) || file_argument(v)) return {};
        return "expected K0, K1, K2 or file:PATH, got '" + v + "'";
      },
      "K0|K1|K2|file:PATH");
  const auto trend_check = CLI::Validator(
      [](std::string& v) -> std::string {
        if (v == "auto" || v == "none" || v == "affine" || file_argument(v)) return {};
        return "expected auto, none, affine or file:PATH, got '" + v + "'";
      },
      "auto|none|affine|file:PATH");

  auto common = [&](CLI::App* sub) {
    sub->add_option("series", c.series, "time,value CSV file ('-' reads stdin)")->required();
    sub->add_option("--format", c.format, "Output format")
        ->check(CLI::IsMember({"table", "csv", "json"}))
        ->capture_default_str();
    sub->add_option("-o,--output", c.output, std::string("Output file (relative paths resolve against $") +
                                                 kOutputDirEnv + " when set)");
    sub->add_flag("--rescale", c.rescale, "Map times onto [0, 1] before building kernels");
  };
  auto kernel_options = [&](CLI::App* sub) {
    sub->add_option("-k,--kernel", c.kernels, "Kernel: K0, K1, K2 or file:PATH (repeatable; default all three)")
        ->expected(1)
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll)
        ->delimiter(',')
        ->check(kernel_check);
    sub->add_option("--trend", c.trend, "Trend: auto (none for K0, {1,t} otherwise), none, affine or file:PATH")
        ->check(trend_check)
        ->capture_default_str();
  };
  auto next_options = [&](CLI::App* sub) {
    sub->add_option("--next-time", c.next_time, "Time of the predicted point (default: last time + last gap)");
  };

  CLI::App* kernels = app.add_subcommand("kernels", "Export Q, U, P, R, Q0, K0, K1, K2 for the series' knots");
  common(kernels);

  CLI::App* predict_cmd = app.add_subcommand("predict", "One-step prediction per kernel");
  common(predict_cmd);
  kernel_options(predict_cmd);
  next_options(predict_cmd);
  predict_cmd->add_option("--truth", c.truth, "True next value; reports the realized error");
  predict_cmd->add_option("--chain", c.chain, "Predict one more step after appending the predicted or true value")
      ->check(CLI::IsMember({"predicted", "true"}));
  predict_cmd->add_option("--chain-time", c.chain_time, "Time of the chained prediction (default: next + last gap)");

  CLI::App* evaluate = app.add_subcommand("evaluate", "Rolling-origin MSPE, MAXPE and pairwise win fractions");
  common(evaluate);
  kernel_options(evaluate);
  evaluate->add_option("--r-min", c.r_min, "First number of observations used")
      ->check(CLI::Range(std::size_t{2}, std::numeric_limits<std::size_t>::max()))
      ->capture_default_str();
  evaluate->add_option("--tie-tol", c.tie_tol, "Errors closer than this count as ties")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  evaluate->add_option("--rolling", c.rolling, "Kernel per step: submatrix of the full kernel, or rebuild")
      ->check(CLI::IsMember({"submatrix", "rebuild"}))
      ->capture_default_str();
  bool rebuild_flag = false;
  evaluate->add_flag("--rebuild-kernel", rebuild_flag, "Same as --rolling rebuild");
  evaluate->add_option("--threads", c.threads, "Worker threads (0: hardware concurrency)")->capture_default_str();
  evaluate->add_flag("--records", c.records, "Also emit every per-step prediction");

  CLI::App* splinefit = app.add_subcommand("splinefit", "Sample the natural spline through data plus each prediction");
  common(splinefit);
  kernel_options(splinefit);
  next_options(splinefit);
  splinefit->add_option("--samples-per-interval", c.samples_per_interval, "Samples per knot interval")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  CLI::App* weights = app.add_subcommand("weights", "Optimal weights per kernel as (index, time, weight) rows");
  common(weights);
  kernel_options(weights);
  next_options(weights);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kParseError;
  }
  if (rebuild_flag) c.rolling = "rebuild";

  try {
    if (kernels->parsed()) return cmd_kernels(c, out, err);
    if (predict_cmd->parsed()) return cmd_predict(c, out, err);
    if (evaluate->parsed()) return cmd_evaluate(c, out, err);
    if (splinefit->parsed()) return cmd_splinefit(c, out, err);
    if (weights->parsed()) return cmd_weights(c, out, err);
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kParseError;
  } catch (const FactorizationError& e) {
    err << "error: " << e.what() << '\n';
    return kSolverError;
  } catch (const StructuralError& e) {
    err << "error: " << e.what() << '\n';
    return kInvariantError;
  } catch (const ConstraintError& e) {
    err << "error: " << e.what() << '\n';
    return kInvariantError;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kInvariantError;
  } catch (const InvariantError& e) {
    err << "error: " << e.what() << '\n';
    return kInvariantError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kOtherError;
  }
  return kOtherError;
}

}  // namespace kernpred::cli
