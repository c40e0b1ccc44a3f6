#pragma once

// Text input and output for the command-line tool.

#include <filesystem>
#include <istream>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "kernpred/error.hpp"
#include "kernpred/matrix.hpp"

namespace kernpred::cli {

/// Malformed input text. The message carries the source and line number.
class ParseError : public Error {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& what)
      : Error(source + ":" + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

struct Series {
  std::vector<double> times;
  std::vector<double> values;
};

/// Two-column `time,value` CSV; `#` starts a comment; an optional
/// non-numeric header row is skipped. Times must be strictly increasing.
Series parse_series(std::istream& in, const std::string& source);
Series read_series(const std::filesystem::path& path);

struct NamedMatrix {
  std::string name;
  Matrix matrix;
};

/// Comma-separated rows; `#` comments. A comment of the form
/// `# matrix NAME ...` starts a new named section.
std::vector<NamedMatrix> parse_matrices(std::istream& in, const std::string& source);
/// The file must hold exactly one matrix.
Matrix read_matrix(const std::filesystem::path& path);

/// Shortest text that round-trips, at most 17 significant digits.
std::string format_real(double x);

void write_matrix_csv(std::ostream& out, const Matrix& m);

}  // namespace kernpred::cli
