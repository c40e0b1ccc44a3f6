#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "kernpred/error.hpp"
#include "kernpred/simd.hpp"

namespace kernpred::simd {

std::string_view backend_name(Backend b) noexcept {
  switch (b) {
    case Backend::Scalar: return "scalar";
    case Backend::Avx2: return "avx2";
    case Backend::Neon: return "neon";
  }
  return "unknown";
}

std::optional<Backend> parse_backend(std::string_view name) noexcept {
  if (name == "scalar") return Backend::Scalar;
  if (name == "avx2") return Backend::Avx2;
  if (name == "neon") return Backend::Neon;
  return std::nullopt;
}

bool supported(Backend b) noexcept {
  switch (b) {
    case Backend::Scalar: return true;
    case Backend::Avx2:
#if defined(KERNPRED_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
      return detail::avx2_table() != nullptr && __builtin_cpu_supports("avx2") &&
             __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Backend::Neon: return detail::neon_table() != nullptr;
  }
  return false;
}

std::vector<Backend> available_backends() {
  std::vector<Backend> out{Backend::Scalar};
  for (Backend b : {Backend::Avx2, Backend::Neon})
    if (supported(b)) out.push_back(b);
  return out;
}

const KernelTable& table(Backend b) {
  if (!supported(b))
    throw std::invalid_argument("SIMD backend '" + std::string(backend_name(b)) + "' is not available");
  switch (b) {
    case Backend::Avx2: return *detail::avx2_table();
    case Backend::Neon: return *detail::neon_table();
    case Backend::Scalar: break;
  }
  return detail::scalar_table();
}

namespace {

Backend pick_default() {
  if (const char* env = std::getenv("KERNPRED_SIMD")) {
    if (auto b = parse_backend(env); b && supported(*b)) return *b;
  }
  return available_backends().back();
}

std::atomic<const KernelTable*>& current() {
  static std::atomic<const KernelTable*> t{&table(pick_default())};
  return t;
}

inline const KernelTable& active() { return *current().load(std::memory_order_relaxed); }

void check_same(std::size_t a, std::size_t b) {
  if (a != b) throw StructuralError("vector length mismatch: " + std::to_string(a) + " vs " + std::to_string(b));
}

}  // namespace

Backend active_backend() { return active().backend; }

void set_backend(Backend b) { current().store(&table(b), std::memory_order_relaxed); }

double dot(std::span<const double> x, std::span<const double> y) {
  check_same(x.size(), y.size());
  return active().dot(x.data(), y.data(), x.size());
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
  check_same(x.size(), y.size());
  active().axpy(a, x.data(), y.data(), x.size());
}

void scale(double a, std::span<double> x) { active().scale(a, x.data(), x.size()); }

void gemv(std::span<const double> a, std::size_t rows, std::size_t cols, std::span<const double> x,
          std::span<double> y) {
  check_same(a.size(), rows * cols);
  check_same(x.size(), cols);
  check_same(y.size(), rows);
  active().gemv(a.data(), rows, cols, x.data(), y.data());
}

double quad_form(std::span<const double> a, std::size_t n, std::span<const double> x) {
  check_same(a.size(), n * n);
  check_same(x.size(), n);
  return active().quad_form(a.data(), n, x.data());
}

}  // namespace kernpred::simd
