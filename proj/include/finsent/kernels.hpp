#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

// Dense double-precision kernels behind the LSTM. Every variant implements
// the same contract as the scalar reference; vector variants may differ from
// it only by floating-point reassociation. Matrices are row-major.
namespace finsent::kernels {

struct AdamCoefficients {
  double learning_rate;
  double beta1;
  double beta2;
  double epsilon;
  double bias_correction1;  // 1 - beta1^t
  double bias_correction2;  // 1 - beta2^t
};

struct KernelTable {
  const char* name;
  double (*dot)(const double* a, const double* b, std::size_t n);
  /// y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  /// y += A x, A is rows x cols
  void (*gemv)(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y);
  /// x += A^T y
  void (*gemv_t)(const double* a, std::size_t rows, std::size_t cols, const double* y, double* x);
  /// A += u v^T
  void (*ger)(double* a, std::size_t rows, std::size_t cols, const double* u, const double* v);
  /// In-place Adam moment and parameter update over n elements.
  void (*adam)(double* param, double* m, double* v, const double* grad, std::size_t n,
               const AdamCoefficients& c);
};

const KernelTable& scalar_table() noexcept;
/// nullptr when the variant was not compiled in or the CPU lacks it.
const KernelTable* avx2_table() noexcept;
const KernelTable* neon_table() noexcept;

/// Every variant usable on this machine, scalar first.
std::vector<const KernelTable*> available() noexcept;

/// The table used by the library. Chosen on first use: FINSENT_KERNELS=scalar|avx2|neon
/// forces a variant, otherwise the widest supported one.
const KernelTable& active() noexcept;
/// Returns false (and leaves the selection unchanged) for unknown or unsupported names.
bool select(std::string_view name) noexcept;

}  // namespace finsent::kernels
