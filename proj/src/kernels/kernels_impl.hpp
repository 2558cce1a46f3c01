#pragma once

#include "podkit/kernels.hpp"

namespace podkit::kernels::detail {

double dot_scalar(const double* x, const double* y, std::size_t n);
void axpy_scalar(double a, const double* x, double* y, std::size_t n);
void gemv_scalar(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y);
double bilinear_scalar(const double* a, std::size_t n, const double* u, const double* v);

#if defined(PODKIT_HAVE_AVX2_TU)
double dot_avx2(const double* x, const double* y, std::size_t n);
void axpy_avx2(double a, const double* x, double* y, std::size_t n);
void gemv_avx2(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y);
double bilinear_avx2(const double* a, std::size_t n, const double* u, const double* v);
#endif

#if defined(PODKIT_HAVE_NEON_TU)
double dot_neon(const double* x, const double* y, std::size_t n);
void axpy_neon(double a, const double* x, double* y, std::size_t n);
void gemv_neon(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y);
double bilinear_neon(const double* a, std::size_t n, const double* u, const double* v);
#endif

}  // namespace podkit::kernels::detail
