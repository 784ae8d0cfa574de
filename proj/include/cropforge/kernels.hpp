#pragma once

// Dense double-precision kernels used by the MLP. Each instruction set
// provides the same table; the active one is picked once at startup.

#include <cstddef>
#include <span>
#include <string_view>

namespace cropforge::kernels {

struct KernelTable {
  std::string_view name;
  /// sum a[i] * b[i]
  double (*dot)(const double* a, const double* b, std::size_t n);
  /// y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  /// y = W x + bias, W row-major rows x cols. bias may be null.
  void (*gemv)(const double* w, const double* x, const double* bias, double* y, std::size_t rows,
               std::size_t cols);
  /// y = W^T g, W row-major rows x cols, y has cols entries.
  void (*gemv_t)(const double* w, const double* g, double* y, std::size_t rows, std::size_t cols);
  /// G += u v^T, G row-major rows x cols.
  void (*rank1)(double* g, const double* u, const double* v, std::size_t rows, std::size_t cols);
  /// x = max(x, 0)
  void (*relu)(double* x, std::size_t n);
  /// w -= lr * g
  void (*sgd_step)(double* w, const double* g, double lr, std::size_t n);
};

const KernelTable& scalar_kernels() noexcept;
/// Null when the build or the CPU lacks the instruction set.
const KernelTable* avx2_kernels() noexcept;
const KernelTable* neon_kernels() noexcept;

/// Best table for this CPU. CROPFORGE_SIMD=scalar forces the reference path.
const KernelTable& active() noexcept;

/// Every table usable on this machine, scalar first.
std::span<const KernelTable* const> available() noexcept;

}  // namespace cropforge::kernels
