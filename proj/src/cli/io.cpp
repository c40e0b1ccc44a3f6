#include "io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include <fmt/format.h>

namespace kernpred::cli {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

bool parse_real(std::string_view field, double& out) {
  if (field.empty()) return false;
  if (field.front() == '+') field.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), out);
  return ec == std::errc() && ptr == field.data() + field.size() && std::isfinite(out);
}

std::ifstream open(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string(), 0, "cannot open file");
  return in;
}

}  // namespace

Series parse_series(std::istream& in, const std::string& source) {
  Series s;
  std::string raw;
  std::size_t lineno = 0;
  bool seen_row = false;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto fields = split_fields(line);
    if (fields.size() != 2)
      throw ParseError(source, lineno, "expected 2 fields (time,value), got " + std::to_string(fields.size()));
    double t = 0.0, v = 0.0;
    const bool t_ok = parse_real(fields[0], t);
    const bool v_ok = parse_real(fields[1], v);
    if (!seen_row && !t_ok && !v_ok) {
      seen_row = true;  // header
      continue;
    }
    seen_row = true;
    if (!t_ok) throw ParseError(source, lineno, "invalid time '" + std::string(fields[0]) + "'");
    if (!v_ok) throw ParseError(source, lineno, "invalid value '" + std::string(fields[1]) + "'");
    if (!s.times.empty() && t <= s.times.back())
      throw ParseError(source, lineno,
                       t == s.times.back() ? "duplicate time " + format_real(t)
                                           : "time " + format_real(t) + " is not after " + format_real(s.times.back()));
    s.times.push_back(t);
    s.values.push_back(v);
  }
  if (s.times.size() < 2) throw ParseError(source, lineno, "series needs at least 2 rows");
  return s;
}

Series read_series(const std::filesystem::path& path) {
  if (path == "-") return parse_series(std::cin, "<stdin>");
  auto in = open(path);
  return parse_series(in, path.string());
}

std::vector<NamedMatrix> parse_matrices(std::istream& in, const std::string& source) {
  std::vector<NamedMatrix> out;
  std::vector<std::vector<double>> rows;
  std::string name;
  std::size_t start_line = 0;

  auto flush = [&](std::size_t lineno) {
    if (rows.empty()) {
      if (!name.empty()) throw ParseError(source, lineno, "matrix '" + name + "' has no rows");
      return;
    }
    Matrix m(rows.size(), rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i) std::copy(rows[i].begin(), rows[i].end(), m.row(i).begin());
    out.push_back({name, std::move(m)});
    rows.clear();
  };

  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string_view line = trim(raw);
    if (line.starts_with('#')) {
      std::istringstream header{std::string(line.substr(1))};
      std::string tag, next_name;
      if (header >> tag >> next_name && tag == "matrix") {
        flush(start_line);
        name = next_name;
        start_line = lineno;
      }
      continue;
    }
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = trim(line.substr(0, hash));
    if (line.empty()) continue;
    std::vector<double> row;
    for (const auto field : split_fields(line)) {
      double x = 0.0;
      if (!parse_real(field, x)) throw ParseError(source, lineno, "invalid number '" + std::string(field) + "'");
      row.push_back(x);
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw ParseError(source, lineno,
                       "row has " + std::to_string(row.size()) + " entries, expected " +
                           std::to_string(rows.front().size()));
    rows.push_back(std::move(row));
  }
  flush(start_line);
  return out;
}

Matrix read_matrix(const std::filesystem::path& path) {
  auto in = open(path);
  auto all = parse_matrices(in, path.string());
  if (all.size() != 1)
    throw ParseError(path.string(), 0, "expected exactly one matrix, found " + std::to_string(all.size()));
  return std::move(all.front().matrix);
}

std::string format_real(double x) {
  if (std::isnan(x)) return "nan";
  // Shortest representation that round-trips; never more than 17 digits.
  for (int digits = 15; digits <= 17; ++digits) {
    std::string s = fmt::format("{:.{}g}", x, digits);
    double back = 0.0;
    std::from_chars(s.data(), s.data() + s.size(), back);
    if (back == x || digits == 17) return s;
  }
  return fmt::format("{:.17g}", x);
}

void write_matrix_csv(std::ostream& out, const Matrix& m) {
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << format_real(m(i, j));
    }
    out << '\n';
  }
}

}  // namespace kernpred::cli
