#pragma once

// Runtime-dispatched dense kernels. Every backend computes the same
// quantities; only the summation order differs, so results agree to
// rounding, not bit for bit. Within one process the selected backend is
// fixed unless `set_backend` is called, which keeps runs deterministic.

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace kernpred::simd {

enum class Backend { Scalar, Avx2, Neon };

std::string_view backend_name(Backend b) noexcept;
std::optional<Backend> parse_backend(std::string_view name) noexcept;

/// Function table for one backend.
struct KernelTable {
  Backend backend;
  double (*dot)(const double* x, const double* y, std::size_t n);
  void (*axpy)(double a, const double* x, double* y, std::size_t n);
  void (*scale)(double a, double* x, std::size_t n);
  // y = A x for row-major A (rows x cols)
  void (*gemv)(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y);
  // x^T A x for row-major square A (n x n)
  double (*quad_form)(const double* a, std::size_t n, const double* x);
};

/// True when the running CPU can execute `b`.
bool supported(Backend b) noexcept;

/// Backends compiled into this build and supported by the CPU, scalar first.
std::vector<Backend> available_backends();

/// Table for a specific backend; throws std::invalid_argument if unavailable.
const KernelTable& table(Backend b);

/// Currently active backend. Chosen on first use: the KERNPRED_SIMD
/// environment variable if set and available, else the widest supported one.
Backend active_backend();

/// Override the active backend (tests, benchmarking).
void set_backend(Backend b);

double dot(std::span<const double> x, std::span<const double> y);
void axpy(double a, std::span<const double> x, std::span<double> y);
void scale(double a, std::span<double> x);
void gemv(std::span<const double> a, std::size_t rows, std::size_t cols,
          std::span<const double> x, std::span<double> y);
double quad_form(std::span<const double> a, std::size_t n, std::span<const double> x);

namespace detail {
const KernelTable& scalar_table() noexcept;
const KernelTable* avx2_table() noexcept;  // nullptr when not compiled in
const KernelTable* neon_table() noexcept;  // nullptr when not compiled in
}  // namespace detail

}  // namespace kernpred::simd
