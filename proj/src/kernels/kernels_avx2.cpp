#include <immintrin.h>

#include <cmath>

#include "finsent/kernels.hpp"

namespace finsent::kernels {

namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d sh = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

double dot(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  }
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void gemv(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y) {
  std::size_t r = 0;
  // Four rows at a time share each load of x.
  for (; r + 4 <= rows; r += 4) {
    const double* a0 = a + r * cols;
    const double* a1 = a0 + cols;
    const double* a2 = a1 + cols;
    const double* a3 = a2 + cols;
    __m256d s0 = _mm256_setzero_pd(), s1 = _mm256_setzero_pd();
    __m256d s2 = _mm256_setzero_pd(), s3 = _mm256_setzero_pd();
    std::size_t c = 0;
    for (; c + 4 <= cols; c += 4) {
      const __m256d vx = _mm256_loadu_pd(x + c);
      s0 = _mm256_fmadd_pd(_mm256_loadu_pd(a0 + c), vx, s0);
      s1 = _mm256_fmadd_pd(_mm256_loadu_pd(a1 + c), vx, s1);
      s2 = _mm256_fmadd_pd(_mm256_loadu_pd(a2 + c), vx, s2);
      s3 = _mm256_fmadd_pd(_mm256_loadu_pd(a3 + c), vx, s3);
    }
    double t0 = hsum(s0), t1 = hsum(s1), t2 = hsum(s2), t3 = hsum(s3);
    for (; c < cols; ++c) {
      t0 += a0[c] * x[c];
      t1 += a1[c] * x[c];
      t2 += a2[c] * x[c];
      t3 += a3[c] * x[c];
    }
    y[r] += t0;
    y[r + 1] += t1;
    y[r + 2] += t2;
    y[r + 3] += t3;
  }
  for (; r < rows; ++r) y[r] += dot(a + r * cols, x, cols);
}

void gemv_t(const double* a, std::size_t rows, std::size_t cols, const double* y, double* x) {
  for (std::size_t r = 0; r < rows; ++r) axpy(y[r], a + r * cols, x, cols);
}

void ger(double* a, std::size_t rows, std::size_t cols, const double* u, const double* v) {
  for (std::size_t r = 0; r < rows; ++r) axpy(u[r], v, a + r * cols, cols);
}

void adam(double* param, double* m, double* v, const double* grad, std::size_t n,
          const AdamCoefficients& c) {
  const __m256d b1 = _mm256_set1_pd(c.beta1);
  const __m256d b2 = _mm256_set1_pd(c.beta2);
  const __m256d one_b1 = _mm256_set1_pd(1.0 - c.beta1);
  const __m256d one_b2 = _mm256_set1_pd(1.0 - c.beta2);
  const __m256d bc1 = _mm256_set1_pd(c.bias_correction1);
  const __m256d bc2 = _mm256_set1_pd(c.bias_correction2);
  const __m256d lr = _mm256_set1_pd(c.learning_rate);
  const __m256d eps = _mm256_set1_pd(c.epsilon);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d g = _mm256_loadu_pd(grad + i);
    const __m256d mi = _mm256_add_pd(_mm256_mul_pd(b1, _mm256_loadu_pd(m + i)), _mm256_mul_pd(one_b1, g));
    const __m256d vi = _mm256_add_pd(_mm256_mul_pd(b2, _mm256_loadu_pd(v + i)),
                                     _mm256_mul_pd(_mm256_mul_pd(one_b2, g), g));
    _mm256_storeu_pd(m + i, mi);
    _mm256_storeu_pd(v + i, vi);
    const __m256d m_hat = _mm256_div_pd(mi, bc1);
    const __m256d v_hat = _mm256_div_pd(vi, bc2);
    const __m256d step = _mm256_div_pd(_mm256_mul_pd(lr, m_hat), _mm256_add_pd(_mm256_sqrt_pd(v_hat), eps));
    _mm256_storeu_pd(param + i, _mm256_sub_pd(_mm256_loadu_pd(param + i), step));
  }
  for (; i < n; ++i) {
    const double g = grad[i];
    m[i] = c.beta1 * m[i] + (1.0 - c.beta1) * g;
    v[i] = c.beta2 * v[i] + (1.0 - c.beta2) * g * g;
    param[i] -= c.learning_rate * (m[i] / c.bias_correction1) /
                (std::sqrt(v[i] / c.bias_correction2) + c.epsilon);
  }
}

constexpr KernelTable kAvx2{"avx2", dot, axpy, gemv, gemv_t, ger, adam};

}  // namespace

const KernelTable* avx2_table_compiled() noexcept { return &kAvx2; }

}  // namespace finsent::kernels
