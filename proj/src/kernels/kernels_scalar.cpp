#include <cmath>

#include "finsent/kernels.hpp"

namespace finsent::kernels {

namespace {

double dot(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void gemv(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y) {
  for (std::size_t r = 0; r < rows; ++r) y[r] += dot(a + r * cols, x, cols);
}

void gemv_t(const double* a, std::size_t rows, std::size_t cols, const double* y, double* x) {
  for (std::size_t r = 0; r < rows; ++r) axpy(y[r], a + r * cols, x, cols);
}

void ger(double* a, std::size_t rows, std::size_t cols, const double* u, const double* v) {
  for (std::size_t r = 0; r < rows; ++r) axpy(u[r], v, a + r * cols, cols);
}

void adam(double* param, double* m, double* v, const double* grad, std::size_t n,
          const AdamCoefficients& c) {
  for (std::size_t i = 0; i < n; ++i) {
    const double g = grad[i];
    m[i] = c.beta1 * m[i] + (1.0 - c.beta1) * g;
    v[i] = c.beta2 * v[i] + (1.0 - c.beta2) * g * g;
    const double m_hat = m[i] / c.bias_correction1;
    const double v_hat = v[i] / c.bias_correction2;
    param[i] -= c.learning_rate * m_hat / (std::sqrt(v_hat) + c.epsilon);
  }
}

constexpr KernelTable kScalar{"scalar", dot, axpy, gemv, gemv_t, ger, adam};

}  // namespace

const KernelTable& scalar_table() noexcept { return kScalar; }

}  // namespace finsent::kernels
