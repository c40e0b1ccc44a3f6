#pragma once

#include <cstddef>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace kernpred::cli {

enum ExitCode : int {
  kOk = 0,
  kOtherError = 1,
  kParseError = 2,
  kInvariantError = 3,  // structural, constraint, domain or invariant violation
  kSolverError = 4,
};

/// Environment variable naming the directory that relative --output paths
/// are resolved against.
inline constexpr const char* kOutputDirEnv = "KERNPRED_OUTPUT_DIR";

struct RunConfig {
  std::string series;
  std::vector<std::string> kernels;  // K0, K1, K2 or file:PATH
  std::string trend = "auto";        // auto, none, affine or file:PATH
  std::size_t r_min = 2;
  double tie_tol = 0.0;
  std::string rolling = "submatrix";
  bool rescale = false;
  std::string format = "table";
  std::string output;
  std::size_t threads = 0;
  bool records = false;

  std::optional<double> next_time;
  std::optional<double> truth;
  std::string chain;  // empty, "predicted" or "true"
  std::optional<double> chain_time;
  std::size_t samples_per_interval = 10;
};

int cmd_kernels(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_predict(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_evaluate(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_splinefit(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_weights(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Parses arguments, runs the verb, and maps errors to exit codes.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace kernpred::cli
