#include "kernpred/grid.hpp"

#include <cmath>
#include <string>

#include "kernpred/error.hpp"

namespace kernpred {

KnotGrid::KnotGrid(std::vector<double> knots) : knots_(std::move(knots)) {
  if (knots_.size() < 2) throw StructuralError("a knot grid needs at least two knots");
  for (std::size_t i = 0; i < knots_.size(); ++i) {
    if (!std::isfinite(knots_[i])) throw StructuralError("knot " + std::to_string(i) + " is not finite");
    if (i > 0 && !(knots_[i] > knots_[i - 1]))
      throw StructuralError("knots must be strictly increasing (knot " + std::to_string(i) + ")");
  }
}

Vector KnotGrid::gaps() const {
  Vector h(intervals());
  for (std::size_t i = 0; i < h.size(); ++i) h[i] = gap(i);
  return h;
}

KnotGrid KnotGrid::prefix(std::size_t count) const {
  if (count > size()) throw StructuralError("grid prefix longer than grid");
  return KnotGrid(std::vector<double>(knots_.begin(), knots_.begin() + static_cast<std::ptrdiff_t>(count)));
}

KnotGrid KnotGrid::extended(double next) const {
  std::vector<double> k = knots_;
  k.push_back(next);
  return KnotGrid(std::move(k));
}

KnotGrid KnotGrid::mapped(double shift, double scale) const {
  if (!(scale > 0.0)) throw StructuralError("grid rescale factor must be positive");
  std::vector<double> k(knots_.size());
  for (std::size_t i = 0; i < k.size(); ++i) k[i] = (knots_[i] - shift) / scale;
  return KnotGrid(std::move(k));
}

void KnotGrid::require_at_least(std::size_t min_knots, const char* what) const {
  if (size() < min_knots)
    throw StructuralError(std::string(what) + " needs at least " + std::to_string(min_knots) + " knots, got " +
                          std::to_string(size()));
}

Trend Trend::constant(std::size_t points) { return Trend(Matrix(points, 1, 1.0)); }

Trend Trend::affine(std::span<const double> times) {
  Matrix m(times.size(), 2);
  for (std::size_t i = 0; i < times.size(); ++i) {
    m(i, 0) = 1.0;
    m(i, 1) = times[i];
  }
  return Trend(std::move(m));
}

}  // namespace kernpred
