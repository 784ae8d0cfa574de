// NEON kernels for aarch64, where Advanced SIMD is always present.
#include <arm_neon.h>

#include "cropforge/kernels.hpp"

namespace cropforge::kernels {

namespace {

double dot(const double* a, const double* b, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
    acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
  }
  double sum = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(alpha);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), va, vld1q_f64(x + i)));
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void gemv(const double* w, const double* x, const double* bias, double* y, std::size_t rows, std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) {
    y[r] = (bias ? bias[r] : 0.0) + dot(w + r * cols, x, cols);
  }
}

void gemv_t(const double* w, const double* g, double* y, std::size_t rows, std::size_t cols) {
  for (std::size_t c = 0; c < cols; ++c) y[c] = 0.0;
  for (std::size_t r = 0; r < rows; ++r) axpy(g[r], w + r * cols, y, cols);
}

void rank1(double* g, const double* u, const double* v, std::size_t rows, std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) axpy(u[r], v, g + r * cols, cols);
}

void relu(double* x, std::size_t n) {
  const float64x2_t zero = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(x + i, vmaxq_f64(vld1q_f64(x + i), zero));
  for (; i < n; ++i) x[i] = x[i] > 0.0 ? x[i] : 0.0;
}

void sgd_step(double* w, const double* g, double lr, std::size_t n) {
  const float64x2_t vlr = vdupq_n_f64(-lr);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(w + i, vfmaq_f64(vld1q_f64(w + i), vlr, vld1q_f64(g + i)));
  for (; i < n; ++i) w[i] -= lr * g[i];
}

}  // namespace

const KernelTable& neon_table() noexcept {
  static constexpr KernelTable table{"neon", dot, axpy, gemv, gemv_t, rank1, relu, sgd_step};
  return table;
}

}  // namespace cropforge::kernels
