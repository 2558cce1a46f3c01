#include "kernels_impl.hpp"

namespace podkit::kernels::detail {

double dot_scalar(const double* x, const double* y, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i] * y[i];
  return acc;
}

void axpy_scalar(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void gemv_scalar(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y) {
  for (std::size_t i = 0; i < rows; ++i) y[i] = 0.0;
  for (std::size_t j = 0; j < cols; ++j) axpy_scalar(x[j], a + j * rows, y, rows);
}

double bilinear_scalar(const double* a, std::size_t n, const double* u, const double* v) {
  double acc = 0.0;
  for (std::size_t j = 0; j < n; ++j) acc += u[j] * dot_scalar(a + j * n, v, n);
  return acc;
}

}  // namespace podkit::kernels::detail
