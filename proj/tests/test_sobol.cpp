#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <set>

#include "cropforge/error.hpp"
#include "cropforge/rng.hpp"
#include "cropforge/sobol.hpp"

using namespace cropforge;

namespace {

const std::map<int, std::vector<double>> kScipyRows = {
#include "sobol_reference.inc"
};

// Exact star discrepancy of a 2-D point set: worst anchored box over the
// grid of point coordinates, counting open and closed boxes.
double star_discrepancy(const std::vector<std::array<double, 2>>& pts) {
  std::vector<double> xs{1.0}, ys{1.0};
  for (const auto& p : pts) {
    xs.push_back(p[0]);
    ys.push_back(p[1]);
  }
  const double n = static_cast<double>(pts.size());
  double worst = 0.0;
  for (double x : xs) {
    for (double y : ys) {
      std::size_t open = 0, closed = 0;
      for (const auto& p : pts) {
        if (p[0] < x && p[1] < y) ++open;
        if (p[0] <= x && p[1] <= y) ++closed;
      }
      worst = std::max({worst, closed / n - x * y, x * y - open / n});
    }
  }
  return worst;
}

}  // namespace

TEST(Sobol, FirstPointsInOneDimension) {
  SobolSequence s(1);
  const std::vector<double> expected{0.5, 0.75, 0.25, 0.375, 0.875, 0.625, 0.125, 0.1875};
  for (double e : expected) EXPECT_EQ(s.next()[0], e);
  EXPECT_EQ(s.index(), expected.size());
}

TEST(Sobol, DyadicStratification) {
  for (int m = 1; m <= 10; ++m) {
    const std::size_t n = std::size_t{1} << m;
    SobolSequence s(1);
    // Skipping the origin shifts the net by one point; include it explicitly.
    std::vector<std::size_t> bins(n, 0);
    bins[0] = 1;
    for (std::size_t i = 0; i + 1 < n; ++i) bins[static_cast<std::size_t>(s.next()[0] * n)]++;
    for (std::size_t b : bins) EXPECT_EQ(b, 1u) << "m=" << m;
  }
}

TEST(Sobol, MatchesScipyReferenceRows) {
  SobolSequence s(64);
  std::vector<double> point(64);
  for (int r = 1; r <= 1000; ++r) {
    s.next(point);
    if (const auto it = kScipyRows.find(r); it != kScipyRows.end()) {
      ASSERT_EQ(point, it->second) << "point " << r;
    }
  }
}

TEST(Sobol, PrefixIndependentOfDimension) {
  SobolSequence small(7), big(33);
  for (int i = 0; i < 500; ++i) {
    const auto a = small.next();
    const auto b = big.next();
    EXPECT_TRUE(std::equal(a.begin(), a.end(), b.begin()));
  }
}

TEST(Sobol, CoordinatesInHalfOpenUnitInterval) {
  SobolSequence s(64);
  for (int i = 0; i < 5000; ++i) {
    for (double v : s.next()) {
      ASSERT_GE(v, 0.0);
      ASSERT_LT(v, 1.0);
    }
  }
}

TEST(Sobol, PointsAreDistinct) {
  SobolSequence s(3);
  std::set<std::vector<double>> seen;
  for (int i = 0; i < 4096; ++i) EXPECT_TRUE(seen.insert(s.next()).second);
}

TEST(Sobol, DimensionLimits) {
  EXPECT_THROW(SobolSequence(0), ValidationError);
  EXPECT_THROW(SobolSequence(65), ValidationError);
  SobolSequence s(2);
  std::vector<double> wrong(3);
  EXPECT_THROW(s.next(wrong), ValidationError);
}

TEST(Sobol, LowerDiscrepancyThanRandom) {
  SobolSequence s(2);
  std::vector<std::array<double, 2>> sobol(256);
  for (auto& p : sobol) {
    const auto v = s.next();
    p = {v[0], v[1]};
  }
  const double d_sobol = star_discrepancy(sobol);
  double worst_random = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    std::vector<std::array<double, 2>> pts(256);
    for (auto& p : pts) p = {rng.uniform(), rng.uniform()};
    worst_random = std::max(worst_random, star_discrepancy(pts));
  }
  EXPECT_LT(d_sobol, worst_random);
  EXPECT_LT(d_sobol, 0.05);
}
