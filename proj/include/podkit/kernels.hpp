#pragma once

// Dense double-precision inner loops used by the Gram-weighted inner products,
// snapshot sums, and per-snapshot error accumulations.
//
// Every kernel has a scalar reference implementation. Vector variants (AVX2+FMA
// on x86-64, NEON on aarch64) are compiled into separate translation units and
// chosen once at startup from the CPU feature bits. Setting the environment
// variable PODKIT_SIMD=scalar forces the reference path.

#include <cstddef>
#include <span>
#include <string_view>

namespace podkit::kernels {

enum class Isa { scalar, avx2, neon };

std::string_view isa_name(Isa isa) noexcept;

struct KernelTable {
  Isa isa;
  // sum_i x[i] * y[i]
  double (*dot)(const double* x, const double* y, std::size_t n);
  // y[i] += a * x[i]
  void (*axpy)(double a, const double* x, double* y, std::size_t n);
  // y = A x, A column-major rows x cols
  void (*gemv)(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y);
  // v^T A u, A column-major n x n
  double (*bilinear)(const double* a, std::size_t n, const double* u, const double* v);
};

const KernelTable& scalar_table() noexcept;
// nullptr when the variant was not compiled or the CPU lacks the feature.
const KernelTable* simd_table() noexcept;

// The table every other module calls through.
const KernelTable& active() noexcept;

// Test hook: pin the active table. Not thread-safe against concurrent calls.
void force_isa(Isa isa);
void reset_isa();

inline double dot(std::span<const double> x, std::span<const double> y) {
  return active().dot(x.data(), y.data(), x.size());
}

inline void axpy(double a, std::span<const double> x, std::span<double> y) {
  active().axpy(a, x.data(), y.data(), x.size());
}

}  // namespace podkit::kernels
