#include <gtest/gtest.h>

#include <cmath>

#include "cropforge/error.hpp"
#include "cropforge/metrics.hpp"
#include "cropforge/rng.hpp"

using namespace cropforge;

namespace {

// tests/oracles/quantile_reference.py (mpmath, 50 digits)
const std::vector<std::pair<double, double>> kQuantiles = {
    {1e-10, -6.3613409024040562047},    {1e-6, -4.7534243088228989482},
    {0.001, -3.0902323061678135415},    {0.01, -2.3263478740408411009},
    {0.025, -1.9599639845400542355},    {0.1, -1.281551565544600467},
    {0.3, -0.52440051270804078404},     {0.5, 0.0},
    {0.7, 0.52440051270804078404},      {0.9, 1.281551565544600467},
    {0.975, 1.9599639845400542355},     {0.99, 2.3263478740408411009},
    {0.999999, 4.7534243088228989482},
};

std::vector<double> random_vector(Rng& rng, std::size_t n, double lo, double hi) {
  std::vector<double> v(n);
  for (double& x : v) x = lo + (hi - lo) * rng.uniform();
  return v;
}

long double mean_of(const std::vector<double>& v) {
  long double s = 0;
  for (double x : v) s += x;
  return s / v.size();
}

}  // namespace

TEST(Pearson, Examples) {
  const std::vector<double> a{1, 2, 3}, b{3, 2, 1};
  EXPECT_NEAR(pearson({a, a}), 1.0, 1e-15);
  EXPECT_NEAR(pearson({a, b}), -1.0, 1e-15);
  const std::vector<double> flat{2, 2, 2};
  EXPECT_THROW(pearson({flat, a}), ValidationError);
  EXPECT_THROW(pearson({a, flat}), ValidationError);
}

TEST(Pearson, MatchesDefinition) {
  Rng rng(1);
  const auto s = random_vector(rng, 100, 0, 10), o = random_vector(rng, 100, 0, 10);
  const long double ms = mean_of(s), mo = mean_of(o);
  long double cov = 0, vs = 0, vo = 0;
  for (std::size_t i = 0; i < 100; ++i) {
    cov += (s[i] - ms) * (o[i] - mo);
    vs += (s[i] - ms) * (s[i] - ms);
    vo += (o[i] - mo) * (o[i] - mo);
  }
  EXPECT_NEAR(pearson({s, o}), static_cast<double>(cov / std::sqrt(vs * vo)), 1e-12);
}

TEST(Pearson, AffineInvariance) {
  Rng rng(2);
  for (int t = 0; t < 50; ++t) {
    const auto s = random_vector(rng, 30, -5, 5), o = random_vector(rng, 30, -5, 5);
    const double a = 0.1 + 10 * rng.uniform(), b = rng.normal() * 100;
    std::vector<double> up(s.size()), down(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
      up[i] = a * s[i] + b;
      down[i] = -a * s[i] + b;
    }
    EXPECT_NEAR(pearson({up, o}), pearson({s, o}), 1e-12);
    EXPECT_NEAR(pearson({down, o}), -pearson({s, o}), 1e-12);
  }
}

TEST(Mape, Examples) {
  const std::vector<double> o{100, 100}, s{110, 90}, one_s{120}, one_o{100};
  EXPECT_EQ(mape({o, o}), 0.0);
  EXPECT_NEAR(mape({s, o}), 0.10, 1e-15);
  EXPECT_NEAR(mape({one_s, one_o}), 0.20, 1e-15);
  const std::vector<double> bad{100, 0};
  EXPECT_THROW(mape({s, bad}), ValidationError);
  const std::vector<double> shorter{1};
  EXPECT_THROW(mape({s, shorter}), ValidationError);
  EXPECT_THROW(mape({std::vector<double>{}, std::vector<double>{}}), ValidationError);
}

TEST(Prmse, Examples) {
  const std::vector<double> o{100, 100}, s{110, 90};
  EXPECT_EQ(prmse({o, o}), 0.0);
  EXPECT_NEAR(prmse({s, o}), 0.10, 1e-15);
  const std::vector<double> neg{-1, -1};
  EXPECT_THROW(prmse({s, neg}), ValidationError);
}

TEST(Prmse, MatchesDefinition) {
  Rng rng(3);
  const auto s = random_vector(rng, 200, 1000, 9000), o = random_vector(rng, 200, 1000, 9000);
  long double ss = 0;
  for (std::size_t i = 0; i < s.size(); ++i) ss += (s[i] - o[i]) * (s[i] - o[i]);
  const double expected = static_cast<double>(std::sqrt(ss / s.size()) / mean_of(o));
  EXPECT_NEAR(prmse({s, o}), expected, 1e-12);
  EXPECT_NEAR(rmsep({s, o}), static_cast<double>(std::sqrt(ss / s.size())), 1e-12 * 9000);
}

TEST(RSquared, Examples) {
  const std::vector<double> o{1, 2, 4, 8};
  EXPECT_EQ(r_squared({o, o}), 1.0);
  const double m = 15.0 / 4.0;
  const std::vector<double> flat(4, m);
  EXPECT_NEAR(r_squared({flat, o}), 0.0, 1e-15);
  const std::vector<double> same(4, 3.0);
  EXPECT_THROW(r_squared({o, same}), ValidationError);
}

TEST(RSquared, MatchesDefinitionAndLeastSquares) {
  Rng rng(4);
  const auto s = random_vector(rng, 100, 0, 1), o = random_vector(rng, 100, 0, 1);
  const long double mo = mean_of(o);
  long double res = 0, tot = 0;
  for (std::size_t i = 0; i < 100; ++i) {
    res += (s[i] - o[i]) * (s[i] - o[i]);
    tot += (o[i] - mo) * (o[i] - mo);
  }
  EXPECT_NEAR(r_squared({s, o}), static_cast<double>(1 - res / tot), 1e-12);

  // The least-squares affine fit of o on x attains R^2 = pearson^2.
  const auto x = random_vector(rng, 100, 0, 1);
  std::vector<double> y(100);
  for (std::size_t i = 0; i < 100; ++i) y[i] = 3 * x[i] + 0.5 * rng.normal();
  const long double mx = mean_of(x), my = mean_of(y);
  long double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < 100; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  const long double slope = sxy / sxx;
  std::vector<double> fit(100);
  for (std::size_t i = 0; i < 100; ++i) fit[i] = static_cast<double>(my + slope * (x[i] - mx));
  const double r = pearson({fit, y});
  EXPECT_NEAR(r_squared({fit, y}), r * r, 1e-12);
}

TEST(Scale, MapeAndPrmseInvariant) {
  Rng rng(5);
  for (int t = 0; t < 50; ++t) {
    const auto s = random_vector(rng, 20, 1, 10), o = random_vector(rng, 20, 1, 10);
    const double c = 0.01 + 100 * rng.uniform();
    std::vector<double> cs(s), co(o);
    for (double& v : cs) v *= c;
    for (double& v : co) v *= c;
    EXPECT_NEAR(mape({cs, co}), mape({s, o}), 1e-12);
    EXPECT_NEAR(prmse({cs, co}), prmse({s, o}), 1e-12);
  }
}

TEST(Normal, QuantileAgainstHighPrecision) {
  for (const auto& [p, z] : kQuantiles) {
    EXPECT_NEAR(normal_quantile(p), z, 1e-12 * std::max(1.0, std::abs(z))) << p;
  }
  EXPECT_THROW(normal_quantile(0.0), ValidationError);
  EXPECT_THROW(normal_quantile(1.0), ValidationError);
  EXPECT_THROW(normal_quantile(std::nan("")), ValidationError);
}

TEST(Normal, CdfInvertsQuantile) {
  for (int i = 1; i <= 99; ++i) {
    const double p = i / 100.0;
    EXPECT_LE(std::abs(normal_cdf(normal_quantile(p)) - p), 1e-10) << p;
  }
  EXPECT_NEAR(normal_cdf(0.0), 0.5, 1e-16);
  EXPECT_NEAR(normal_cdf(1.959963984540054), 0.975, 1e-15);
}

TEST(Reliability, PointMassAtMedian) {
  const std::vector<GaussianForecast> f{{1, 1}, {2, 0.5}, {3, 2}};
  const std::vector<double> y{1, 2, 3};
  for (const ReliabilityPoint& p : reliability_curve(f, y, decile_levels())) {
    EXPECT_EQ(p.empirical, p.nominal > 0.5 ? 1.0 : (p.nominal < 0.5 ? 0.0 : 1.0));
  }
}

TEST(Reliability, CalibratedForecastsCover) {
  Rng rng(6);
  std::vector<GaussianForecast> f(1000);
  std::vector<double> y(1000);
  for (std::size_t i = 0; i < f.size(); ++i) {
    f[i] = {rng.normal() * 100, 0.5 + 3 * rng.uniform()};
    y[i] = f[i].mu + f[i].sigma * rng.normal();
  }
  for (const ReliabilityPoint& p : reliability_curve(f, y, decile_levels())) {
    EXPECT_LE(std::abs(p.empirical - p.nominal), 0.05) << p.nominal;
  }
}

TEST(Reliability, MonotoneWithLimits) {
  Rng rng(7);
  for (int t = 0; t < 30; ++t) {
    std::vector<GaussianForecast> f(50);
    std::vector<double> y(50);
    for (std::size_t i = 0; i < f.size(); ++i) {
      f[i] = {rng.normal(), 0.1 + rng.uniform()};
      y[i] = 5 * rng.normal();
    }
    std::vector<double> levels{1e-12};
    for (int i = 1; i < 100; ++i) levels.push_back(i / 100.0);
    levels.push_back(1 - 1e-12);
    const auto curve = reliability_curve(f, y, levels);
    for (std::size_t i = 1; i < curve.size(); ++i) EXPECT_GE(curve[i].empirical, curve[i - 1].empirical);
    for (const auto& p : curve) {
      EXPECT_GE(p.empirical, 0.0);
      EXPECT_LE(p.empirical, 1.0);
    }
  }
  const std::vector<GaussianForecast> f{{0, 1}};
  const std::vector<double> y{0.0}, lv{0.5};
  const std::vector<GaussianForecast> bad{{0, 0}};
  EXPECT_THROW(reliability_curve(bad, y, lv), ValidationError);
  const std::vector<double> out_of_range{1.0};
  EXPECT_THROW(reliability_curve(f, y, out_of_range), ValidationError);
}

TEST(Reliability, DecileLevels) {
  const auto d = decile_levels();
  ASSERT_EQ(d.size(), 9u);
  EXPECT_DOUBLE_EQ(d.front(), 0.1);
  EXPECT_DOUBLE_EQ(d.back(), 0.9);
}
