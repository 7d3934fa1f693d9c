#include <arm_neon.h>

#include <cmath>

#include "finsent/kernels.hpp"

namespace finsent::kernels {

namespace {

double dot(const double* a, const double* b, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
    acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
  }
  double s = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(alpha);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), va, vld1q_f64(x + i)));
  for (; i < n; ++i) y[i] += alpha * x[i];
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
  const float64x2_t b1 = vdupq_n_f64(c.beta1);
  const float64x2_t b2 = vdupq_n_f64(c.beta2);
  const float64x2_t one_b1 = vdupq_n_f64(1.0 - c.beta1);
  const float64x2_t one_b2 = vdupq_n_f64(1.0 - c.beta2);
  const float64x2_t bc1 = vdupq_n_f64(c.bias_correction1);
  const float64x2_t bc2 = vdupq_n_f64(c.bias_correction2);
  const float64x2_t lr = vdupq_n_f64(c.learning_rate);
  const float64x2_t eps = vdupq_n_f64(c.epsilon);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t g = vld1q_f64(grad + i);
    const float64x2_t mi = vaddq_f64(vmulq_f64(b1, vld1q_f64(m + i)), vmulq_f64(one_b1, g));
    const float64x2_t vi = vaddq_f64(vmulq_f64(b2, vld1q_f64(v + i)), vmulq_f64(vmulq_f64(one_b2, g), g));
    vst1q_f64(m + i, mi);
    vst1q_f64(v + i, vi);
    const float64x2_t m_hat = vdivq_f64(mi, bc1);
    const float64x2_t v_hat = vdivq_f64(vi, bc2);
    const float64x2_t step = vdivq_f64(vmulq_f64(lr, m_hat), vaddq_f64(vsqrtq_f64(v_hat), eps));
    vst1q_f64(param + i, vsubq_f64(vld1q_f64(param + i), step));
  }
  for (; i < n; ++i) {
    const double g = grad[i];
    m[i] = c.beta1 * m[i] + (1.0 - c.beta1) * g;
    v[i] = c.beta2 * v[i] + (1.0 - c.beta2) * g * g;
    param[i] -= c.learning_rate * (m[i] / c.bias_correction1) /
                (std::sqrt(v[i] / c.bias_correction2) + c.epsilon);
  }
}

constexpr KernelTable kNeon{"neon", dot, axpy, gemv, gemv_t, ger, adam};

}  // namespace

const KernelTable* neon_table_compiled() noexcept { return &kNeon; }

}  // namespace finsent::kernels
