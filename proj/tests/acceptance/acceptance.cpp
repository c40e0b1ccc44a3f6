// Acceptance runner: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. An optional argument names a series file used by the
// smoke test instead of the generated one.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <unistd.h>

#include <json.hpp>

#include "commands.hpp"
#include "io.hpp"
#include "kernpred/kernels.hpp"
#include "kernpred/predictor.hpp"
#include "kernpred/selection.hpp"
#include "kernpred/simd.hpp"
#include "kernpred/spline.hpp"
#include "support.hpp"

using namespace kernpred;
using namespace testing_support;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  double limit_seconds;  // 0 means no runtime bound
  std::function<Outcome()> body;
};

std::string fmt_e(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

std::string series_path;

// Knot values of a natural cubic spline with random curvature.
std::vector<double> natural_values(Rng& rng, const std::vector<double>& t, double scale = 1.0) {
  std::vector<double> u(t.size(), 0.0);
  for (std::size_t i = 1; i + 1 < t.size(); ++i) u[i] = gauss(rng, scale);
  return dense_spline_002(t, gauss(rng), gauss(rng), u).knot_values();
}

Outcome two_path_identity() {
  Rng rng(1001);
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    const std::size_t n = pick(rng, 3, 20);
    const Matrix k = random_spd(rng, n + 1);
    const Vector f = random_vector(rng, n);
    const double weight_form = predict(minmax_weights(k).weights, f);
    const double interp_form = interpolant_predict(k, interpolant_coefficients(k, f));
    worst = std::max(worst, rel_diff(weight_form, interp_form));
  }
  return {worst <= 1e-10, "max rel diff " + fmt_e(worst)};
}

Outcome error_formula() {
  Rng rng(1002);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const std::size_t n = pick(rng, 3, 20);
    const Matrix k = random_spd(rng, n + 1);
    const Vector f = random_vector(rng, n + 1);
    // Residual from an Eigen solve of K_n w = k_{n+1}.
    const Eigen::MatrixXd e = to_eigen(k);
    const Eigen::VectorXd w = e.topLeftCorner(n, n).lu().solve(e.col(n).head(n));
    const double direct = f[n] - w.dot(to_eigen(f).head(n));
    worst = std::max(worst, rel_diff(interpolation_error(k, f), direct));
  }
  return {worst <= 1e-9, "max rel diff " + fmt_e(worst)};
}

Outcome worst_case_tightness() {
  Rng rng(1003);
  double excess = -1e300, ratio = 1e300;
  for (int i = 0; i < 50; ++i) {
    const std::size_t n1 = pick(rng, 3, 15);
    const Matrix k = random_spd(rng, n1);
    const Vector w = random_vector(rng, n1 - 1, 0.5);
    const double bound = worst_case_error(k, w);
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(to_eigen(k));
    const Eigen::MatrixXd v = eig.eigenvectors();
    const Eigen::VectorXd lam = eig.eigenvalues();
    Eigen::VectorXd c(n1);
    for (std::size_t j = 0; j + 1 < n1; ++j) c[j] = -w[j];
    c[n1 - 1] = 1.0;
    // Unit ball of the kernel norm: f = V diag(sqrt(lambda)) g, |g| <= 1.
    const Eigen::MatrixXd root = v * lam.cwiseSqrt().asDiagonal();
    for (int s = 0; s < 1000; ++s) {
      Eigen::VectorXd g = to_eigen(random_vector(rng, n1));
      g *= std::pow(uniform(rng, 0.0, 1.0), 1.0 / static_cast<double>(n1)) / g.norm();
      const double err = c.dot(root * g);
      excess = std::max(excess, err * err - bound);
    }
    const Eigen::VectorXd fstar = v * (lam.asDiagonal() * (v.transpose() * c)) / std::sqrt(bound);
    ratio = std::min(ratio, std::pow(c.dot(fstar), 2) / bound);
  }
  return {excess <= 1e-9 && ratio >= 1.0 - 1e-8,
          "max sampled excess " + fmt_e(excess) + ", maximiser ratio " + fmt_e(ratio)};
}

Outcome constrained_exactness() {
  Rng rng(1004);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const std::size_t n = pick(rng, 3, 25);
    const std::vector<double> t = random_knots(rng, n + 1, uniform(rng, -10.0, 2000.0));
    const Matrix k = i % 2 == 0 ? random_spd(rng, n + 1) : random_conditionally_positive(rng, t);
    const double a = gauss(rng, 5.0), b = gauss(rng);
    Vector f(n);
    for (std::size_t j = 0; j < n; ++j) f[j] = a + b * t[j];
    const double truth = a + b * t[n];
    const double got = predict(constrained_weights(k, Trend::affine(t)).weights, f);
    worst = std::max(worst, std::abs(got - truth) / (1.0 + std::abs(truth)));
  }
  return {worst <= 1e-8, "max scaled error " + fmt_e(worst)};
}

Outcome lagrange_vs_reduced() {
  Rng rng(1005);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const std::size_t n = pick(rng, 3, 20);
    const std::vector<double> t = random_knots(rng, n + 1, uniform(rng, -5.0, 5.0));
    const Matrix k = random_conditionally_positive(rng, t);
    const Trend trend = Trend::affine(t);
    const Vector f = random_vector(rng, n);
    const ConstraintSolutionSpace sp = constraint_solution_space(trend);
    const double reduced = reduced_predict(reduced_kernel(k, sp), sp, f);
    const double lagrange = predict(constrained_weights(k, trend).weights, f);
    worst = std::max(worst, rel_diff(reduced, lagrange));
  }
  return {worst <= 1e-9, "max rel diff " + fmt_e(worst)};
}

std::size_t eigen_rank(const Matrix& m, double tol) {
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(to_eigen(m));
  const double top = eig.eigenvalues().cwiseAbs().maxCoeff();
  return static_cast<std::size_t>((eig.eigenvalues().array().abs() > tol * top).count());
}

Outcome spline_structure() {
  Rng rng(1006);
  std::size_t bad = 0;
  double worst_annihilation = 0.0;
  std::string first;
  for (int i = 0; i < 50; ++i) {
    const std::size_t n = pick(rng, 3, 30);
    const std::vector<double> t = random_knots(rng, n + 1, uniform(rng, -5.0, 2000.0), 0.5, 1.5);
    const SplineKernelSet set = kernel_set(KnotGrid(t));
    const Trend trend = Trend::affine(t);
    double pmax = 0.0;
    for (std::size_t r = 0; r <= n; ++r)
      for (std::size_t c = 0; c <= n; ++c) pmax = std::max(pmax, std::abs(set.P(r, c)));
    for (std::size_t r = 0; r <= n; ++r) {
      double s0 = 0.0, s1 = 0.0;
      for (std::size_t c = 0; c <= n; ++c) {
        s0 += set.P(r, c);
        s1 += set.P(r, c) * t[c];
      }
      worst_annihilation = std::max({worst_annihilation, std::abs(s0) / pmax, std::abs(s1) / (pmax * t.back())});
    }
    const bool ok = validate_kernel(set.Q) == Definiteness::PositiveDefinite &&
                    validate_kernel(set.Q0) == Definiteness::PositiveDefinite &&
                    validate_kernel(set.K1, trend) == Definiteness::ConditionallyPositive &&
                    validate_kernel(set.K2, trend) == Definiteness::ConditionallyPositive &&
                    eigen_rank(set.P, 1e-10) == n - 1 && eigen_rank(set.K1, 1e-9) == n - 1 &&
                    eigen_rank(set.K2, 1e-9) == n - 1;
    if (!ok && bad++ == 0) first = "grid " + std::to_string(i) + " (n=" + std::to_string(n) + ")";
  }
  const bool pass = bad == 0 && worst_annihilation <= 1e-10;
  return {pass, std::to_string(bad) + " bad grids" + (first.empty() ? "" : ", first " + first) +
                    ", max relative P{1,t} " + fmt_e(worst_annihilation)};
}

Outcome energy_identity() {
  Rng rng(1007);
  double worst_energy = 0.0, worst_l2 = 0.0;
  for (int i = 0; i < 100; ++i) {
    const std::vector<double> t = random_knots(rng, pick(rng, 4, 25), uniform(rng, -5.0, 5.0));
    const KnotGrid g(t);
    const SplineModel m = natural_interpolant(g, random_vector(rng, t.size()));
    const Vector interior(m.u.begin() + 1, m.u.end() - 1);
    const double matrix_path = simd::quad_form(energy_matrix(g).data(), interior.size(), interior);
    worst_energy = std::max(worst_energy, rel_diff(matrix_path, bending_energy(m)));
  }
  for (int i = 0; i < 50; ++i) {
    const std::vector<double> t = random_knots(rng, pick(rng, 3, 15), uniform(rng, -5.0, 5.0));
    const Vector p = random_vector(rng, t.size());
    const DenseSpline oracle = dense_natural(t, p);
    const double numeric = simpson(t, [&](double x) { return oracle(x) * oracle(x); }, 1024);
    const Matrix q0 = gram_l2(KnotGrid(t));
    worst_l2 = std::max(worst_l2, rel_diff(simd::quad_form(q0.data(), t.size(), p), numeric));
  }
  return {worst_energy <= 1e-10 && worst_l2 <= 1e-8,
          "energy max rel diff " + fmt_e(worst_energy) + ", L2 max rel diff " + fmt_e(worst_l2)};
}

Outcome pspline_equivalence() {
  Rng rng(1008);
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const std::size_t n = pick(rng, 3, 30);
    const std::vector<double> t = random_knots(rng, n + 1, uniform(rng, -5.0, 2000.0), 0.5, 1.5);
    const SplineKernelSet set = kernel_set(KnotGrid(t));
    const Vector f = random_vector(rng, n, 3.0);
    const double closed = pspline_predict(set.P, f);
    const double k1 = predict(constrained_weights(set.K1, set.trend).weights, f);
    worst = std::max(worst, rel_diff(closed, k1));
  }
  return {worst <= 1e-8, "max rel diff " + fmt_e(worst)};
}

Outcome natural_extension() {
  Rng rng(1009);
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const std::size_t n = pick(rng, 4, 30);
    const std::vector<double> t = random_knots(rng, n + 1, uniform(rng, -5.0, 5.0));
    // Natural spline on t_1..t_n; past t_n it continues as its tangent line.
    const std::vector<double> head(t.begin(), t.end() - 1);
    const std::vector<double> f = natural_values(rng, head);
    const DenseSpline s = dense_natural(head, f);
    const std::size_t last = head.size() - 2;
    const double h = head.back() - head[last];
    const double slope = s.coef[4 * last + 1] + h * (2.0 * s.coef[4 * last + 2] + 3.0 * h * s.coef[4 * last + 3]);
    const double truth = f.back() + slope * (t.back() - head.back());
    const Matrix p = penalty_matrix(energy_matrix(KnotGrid(t)), second_derivative_map(KnotGrid(t)));
    worst = std::max(worst, rel_diff(pspline_predict(p, f), truth));
  }
  return {worst <= 1e-7, "max rel diff " + fmt_e(worst)};
}

std::string write_temp_series(const std::vector<double>& t, const std::vector<double>& f) {
  const auto path = std::filesystem::temp_directory_path() /
                    ("kernpred_acceptance_" + std::to_string(::getpid()) + ".csv");
  std::ofstream out(path);
  out << "year,value\n";
  for (std::size_t i = 0; i < t.size(); ++i) out << cli::format_real(t[i]) << ',' << cli::format_real(f[i]) << '\n';
  return path.string();
}

Outcome smoke_test() {
  std::string path = series_path;
  bool temporary = false;
  if (path.empty()) {
    Rng rng(1010);
    std::vector<double> t(115);
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = 1901.0 + static_cast<double>(i);
    std::vector<double> f = natural_values(rng, t, 0.05);
    for (std::size_t i = 0; i < t.size(); ++i) f[i] += 12.0 + 0.01 * (t[i] - 1901.0) + gauss(rng, 0.5);
    path = write_temp_series(t, f);
    temporary = true;
  }
  const std::vector<std::string> args{"kernpred", "evaluate", path, "--format", "json"};
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const auto start = std::chrono::steady_clock::now();
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (temporary) std::filesystem::remove(path);
  if (code != 0) return {false, "evaluate exited " + std::to_string(code) + ": " + err.str()};

  const auto doc = nlohmann::json::parse(out.str());
  std::map<std::string, std::size_t> index;
  bool complete = doc["kernels"].size() == 3;
  for (const auto& k : doc["kernels"]) {
    index[k["kernel"].get<std::string>()] = index.size();
    complete = complete && k["predictions"].get<std::size_t>() > 0 && k["mspe"].is_number() &&
               k["maxpe"].is_number();
  }
  complete = complete && index.size() == 3 && index.count("K0") && index.count("K1") && index.count("K2") &&
             doc["pairs"].size() == 6;
  std::map<std::pair<std::string, std::string>, nlohmann::json> pairs;
  for (const auto& p : doc["pairs"]) pairs[{p["kernel"].get<std::string>(), p["other"].get<std::string>()}] = p;
  bool antisymmetric = true;
  for (const auto& [key, p] : pairs) {
    const auto it = pairs.find({key.second, key.first});
    if (it == pairs.end()) {
      antisymmetric = false;
      continue;
    }
    const auto& q = it->second;
    complete = complete && p["win_fraction"].is_number();
    antisymmetric = antisymmetric && p["ties"] == q["ties"] && p["common"] == q["common"] &&
                    p["wins"].get<std::size_t>() + q["wins"].get<std::size_t>() + p["ties"].get<std::size_t>() ==
                        p["common"].get<std::size_t>();
  }
  const bool pass = complete && antisymmetric && seconds < 30.0;
  return {pass, std::string(series_path.empty() ? "generated" : "supplied") + " series, evaluate " +
                    fmt_e(seconds) + " s, criteria " + (complete ? "complete" : "incomplete") + ", antisymmetry " +
                    (antisymmetric ? "exact" : "violated")};
}

Outcome selection_sanity() {
  std::vector<double> t(115);
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = 1901.0 + static_cast<double>(i);
  const KnotGrid grid(t);
  const SplineKernelSet set = kernel_set(grid);
  const std::vector<KernelSpec> specs{spline_spec(set, SplineKernel::K0), spline_spec(set, SplineKernel::K1),
                                      spline_spec(set, SplineKernel::K2)};
  std::map<std::string, int> winners;
  for (int seed = 0; seed < 20; ++seed) {
    Rng rng(2000 + static_cast<std::uint64_t>(seed));
    std::vector<double> f = natural_values(rng, t, 0.05);
    for (auto& x : f) x += gauss(rng, 0.3);
    const CriteriaReport report = tournament(f, grid, specs);
    ++winners[report.labels[report.mspe_winner()]];
  }
  std::string best;
  int count = 0;
  std::string tally;
  for (const auto& [label, c] : winners) {
    tally += (tally.empty() ? "" : " ") + label + "=" + std::to_string(c);
    if (c > count) best = label, count = c;
  }
  return {count >= 16, "MSPE winners " + tally + ", most frequent " + best};
}

}  // namespace

int main(int argc, char** argv) {
  if (argc > 1) series_path = argv[1];
  const std::vector<Criterion> criteria{
      {1, "two-path prediction identity", 5.0, two_path_identity},
      {2, "error formula exactness", 2.0, error_formula},
      {3, "worst-case error tightness", 10.0, worst_case_tightness},
      {4, "constrained exactness", 0.0, constrained_exactness},
      {5, "Lagrange vs reduced kernel", 0.0, lagrange_vs_reduced},
      {6, "spline kernel structure", 0.0, spline_structure},
      {7, "energy identity", 0.0, energy_identity},
      {8, "P-spline equivalence", 0.0, pspline_equivalence},
      {9, "natural-extension recovery", 0.0, natural_extension},
      {10, "115-point smoke test", 30.0, smoke_test},
      {11, "selection sanity", 0.0, selection_sanity},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    try {
      o = c.body();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.limit_seconds > 0.0 && seconds >= c.limit_seconds) {
      o.pass = false;
      o.detail += ", over time limit";
    }
    if (!o.pass) ++failed;
    std::printf("criterion %2d: %s  %s (%s; %.3f s)\n", c.id, o.pass ? "PASS" : "FAIL", c.name.c_str(),
                o.detail.c_str(), seconds);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
