// AArch64 NEON kernels. Advanced SIMD is mandatory on AArch64, so no runtime
// probe is needed beyond the compile-time guard.

#include "kernpred/simd.hpp"

#if defined(__aarch64__)

#include <arm_neon.h>

namespace kernpred::simd::detail {
namespace {

double dot_neon(const double* x, const double* y, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(x + i), vld1q_f64(y + i));
    acc1 = vfmaq_f64(acc1, vld1q_f64(x + i + 2), vld1q_f64(y + i + 2));
  }
  double s = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

void axpy_neon(double a, const double* x, double* y, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(a);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), va, vld1q_f64(x + i)));
  for (; i < n; ++i) y[i] += a * x[i];
}

void scale_neon(double a, double* x, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(a);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(x + i, vmulq_f64(va, vld1q_f64(x + i)));
  for (; i < n; ++i) x[i] *= a;
}

void gemv_neon(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y) {
  for (std::size_t i = 0; i < rows; ++i) y[i] = dot_neon(a + i * cols, x, cols);
}

double quad_form_neon(const double* a, std::size_t n, const double* x) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i] * dot_neon(a + i * n, x, n);
  return s;
}

constexpr KernelTable kNeon{Backend::Neon, dot_neon, axpy_neon, scale_neon, gemv_neon, quad_form_neon};

}  // namespace

const KernelTable* neon_table() noexcept { return &kNeon; }

}  // namespace kernpred::simd::detail

#else

namespace kernpred::simd::detail {
const KernelTable* neon_table() noexcept { return nullptr; }
}  // namespace kernpred::simd::detail

#endif
