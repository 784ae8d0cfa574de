#include <gtest/gtest.h>

#include <cmath>

#include "cropforge/kernels.hpp"
#include "cropforge/rng.hpp"

using namespace cropforge;
using kernels::KernelTable;

namespace {

std::vector<double> random_vector(Rng& rng, std::size_t n) {
  std::vector<double> v(n);
  for (double& x : v) x = rng.normal();
  return v;
}

// Tolerance for a reassociated sum of n products of size ~|a||b|.
double sum_tolerance(const std::vector<double>& a, const std::vector<double>& b) {
  double mag = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) mag += std::abs(a[i] * b[i]);
  return 1e-14 * (mag + 1.0) * static_cast<double>(a.size() + 1);
}

class KernelEquivalence : public ::testing::TestWithParam<const KernelTable*> {};

}  // namespace

TEST(Kernels, ScalarIsAlwaysAvailable) {
  const auto tables = kernels::available();
  ASSERT_FALSE(tables.empty());
  EXPECT_EQ(tables[0], &kernels::scalar_kernels());
  bool active_listed = false;
  for (const KernelTable* t : tables) active_listed |= t == &kernels::active();
  EXPECT_TRUE(active_listed);
}

TEST_P(KernelEquivalence, Dot) {
  const KernelTable& ref = kernels::scalar_kernels();
  const KernelTable& k = *GetParam();
  Rng rng(1);
  for (std::size_t n = 0; n < 70; ++n) {
    const auto a = random_vector(rng, n), b = random_vector(rng, n);
    EXPECT_NEAR(k.dot(a.data(), b.data(), n), ref.dot(a.data(), b.data(), n), sum_tolerance(a, b)) << n;
  }
}

TEST_P(KernelEquivalence, AxpyReluSgd) {
  const KernelTable& ref = kernels::scalar_kernels();
  const KernelTable& k = *GetParam();
  Rng rng(2);
  for (std::size_t n = 0; n < 70; ++n) {
    const auto x = random_vector(rng, n);
    auto y1 = random_vector(rng, n), y2 = y1;
    ref.axpy(0.37, x.data(), y1.data(), n);
    k.axpy(0.37, x.data(), y2.data(), n);
    for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(y1[i], y2[i], 1e-15 * (std::abs(y1[i]) + 1.0));

    ref.relu(y1.data(), n);
    k.relu(y2.data(), n);
    for (std::size_t i = 0; i < n; ++i) {
      EXPECT_GE(y2[i], 0.0);
      EXPECT_NEAR(y1[i], y2[i], 1e-15 * (std::abs(y1[i]) + 1.0));
    }

    auto w1 = random_vector(rng, n), w2 = w1;
    ref.sgd_step(w1.data(), x.data(), 5e-4, n);
    k.sgd_step(w2.data(), x.data(), 5e-4, n);
    for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(w1[i], w2[i], 1e-15 * (std::abs(w1[i]) + 1.0));
  }
}

TEST_P(KernelEquivalence, ReluKeepsExactValues) {
  const KernelTable& k = *GetParam();
  std::vector<double> v{-1.0, 0.0, -0.0, 2.5, -1e-300, 1e300, 3.0};
  k.relu(v.data(), v.size());
  EXPECT_EQ(v, (std::vector<double>{0.0, 0.0, 0.0, 2.5, 0.0, 1e300, 3.0}));
}

TEST_P(KernelEquivalence, MatrixKernels) {
  const KernelTable& ref = kernels::scalar_kernels();
  const KernelTable& k = *GetParam();
  Rng rng(3);
  for (std::size_t rows : {1u, 2u, 5u, 8u, 33u}) {
    for (std::size_t cols : {1u, 3u, 4u, 7u, 33u, 64u}) {
      const auto w = random_vector(rng, rows * cols);
      const auto x = random_vector(rng, cols), bias = random_vector(rng, rows), g = random_vector(rng, rows);
      std::vector<double> y1(rows), y2(rows);
      ref.gemv(w.data(), x.data(), bias.data(), y1.data(), rows, cols);
      k.gemv(w.data(), x.data(), bias.data(), y2.data(), rows, cols);
      for (std::size_t r = 0; r < rows; ++r) {
        const std::vector<double> row(w.begin() + static_cast<std::ptrdiff_t>(r * cols),
                                      w.begin() + static_cast<std::ptrdiff_t>((r + 1) * cols));
        EXPECT_NEAR(y1[r], y2[r], sum_tolerance(row, x) + 1e-15 * std::abs(bias[r]));
      }
      ref.gemv(w.data(), x.data(), nullptr, y1.data(), rows, cols);
      k.gemv(w.data(), x.data(), nullptr, y2.data(), rows, cols);
      for (std::size_t r = 0; r < rows; ++r) EXPECT_NEAR(y1[r], y2[r], 1e-12 * cols);

      std::vector<double> t1(cols), t2(cols);
      ref.gemv_t(w.data(), g.data(), t1.data(), rows, cols);
      k.gemv_t(w.data(), g.data(), t2.data(), rows, cols);
      for (std::size_t c = 0; c < cols; ++c) EXPECT_NEAR(t1[c], t2[c], 1e-12 * rows);

      auto m1 = random_vector(rng, rows * cols), m2 = m1;
      ref.rank1(m1.data(), g.data(), x.data(), rows, cols);
      k.rank1(m2.data(), g.data(), x.data(), rows, cols);
      for (std::size_t i = 0; i < m1.size(); ++i) EXPECT_NEAR(m1[i], m2[i], 1e-14 * (std::abs(m1[i]) + 1.0));
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Available, KernelEquivalence, ::testing::ValuesIn(kernels::available().begin(),
                                                                           kernels::available().end()),
                         [](const auto& info) { return std::string(info.param->name); });
