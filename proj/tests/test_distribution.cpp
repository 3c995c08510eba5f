#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "compcx/distribution.hpp"
#include "compcx/quantile_experiments.hpp"

using namespace compcx;

TEST(Distribution, UniformBasics) {
  const SingleDist u(Uniform{2.0, 6.0});
  EXPECT_DOUBLE_EQ(u.cdf(3.0), 0.25);
  EXPECT_DOUBLE_EQ(u.quantile(0.75), 5.0);
  EXPECT_DOUBLE_EQ(u.mean(), 4.0);
  EXPECT_TRUE(u.atoms().empty());
}

TEST(Distribution, ExponentialBasics) {
  const SingleDist e(Exponential{2.0});
  EXPECT_NEAR(e.quantile(0.5), std::log(2.0) / 2.0, 1e-15);
  EXPECT_NEAR(e.cdf(1.0), 1.0 - std::exp(-2.0), 1e-15);
  EXPECT_TRUE(std::isinf(e.support_hi()));
}

TEST(Distribution, EqualRevenueBasics) {
  const SingleDist er(TruncatedEqualRevenue{100.0});
  EXPECT_DOUBLE_EQ(er.cdf(2.0), 0.5);
  EXPECT_DOUBLE_EQ(er.quantile(0.5), 2.0);
  EXPECT_NEAR(er.quantile(0.9), 10.0, 1e-12);
  EXPECT_DOUBLE_EQ(er.quantile(0.995), 100.0);
  EXPECT_DOUBLE_EQ(er.cdf(100.0), 1.0);
  EXPECT_NEAR(er.cdf_below(100.0), 0.99, 1e-15);
  const auto atoms = er.atoms();
  ASSERT_EQ(atoms.size(), 1u);
  EXPECT_DOUBLE_EQ(atoms[0].value, 100.0);
  EXPECT_NEAR(atoms[0].hi - atoms[0].lo, 0.01, 1e-15);
  EXPECT_NEAR(er.mean(), 1.0 + std::log(100.0), 1e-12);
}

TEST(Distribution, EqualRevenueAtomFrequency) {
  const SingleDist er(TruncatedEqualRevenue{4.0});
  Stream rng(21);
  const int N = 100000;
  int hits = 0;
  for (int i = 0; i < N; ++i) hits += er.sample(rng) == 4.0;
  const double se = std::sqrt(0.25 * 0.75 / N);
  EXPECT_NEAR(static_cast<double>(hits) / N, 0.25, 4.0 * se);
}

TEST(Distribution, DiscreteCdfAndQuantile) {
  const SingleDist d(FiniteDiscrete{{1.0, 3.0, 7.0}, {0.2, 0.5, 0.3}});
  EXPECT_DOUBLE_EQ(d.cdf(0.5), 0.0);
  EXPECT_DOUBLE_EQ(d.cdf(3.0), 0.7);
  EXPECT_DOUBLE_EQ(d.cdf_below(3.0), 0.2);
  EXPECT_DOUBLE_EQ(d.quantile(0.2), 1.0);
  EXPECT_DOUBLE_EQ(d.quantile(0.21), 3.0);
  EXPECT_DOUBLE_EQ(d.upper_quantile(0.2), 3.0);
  EXPECT_DOUBLE_EQ(d.quantile(1.0), 7.0);
  EXPECT_EQ(d.atoms().size(), 3u);
  EXPECT_NEAR(d.mean(), 0.2 + 1.5 + 2.1, 1e-12);
}

TEST(Distribution, QuantileInvertsCdf) {
  const std::vector<SingleDist> ds = {SingleDist(Uniform{-1.0, 4.0}), SingleDist(Exponential{0.5}),
                                      SingleDist(TruncatedEqualRevenue{1e4})};
  for (const auto& d : ds) {
    for (double q = 0.01; q < 0.99; q += 0.049) {
      EXPECT_NEAR(d.cdf(d.quantile(q)), q, 1e-12) << d.describe() << " q=" << q;
    }
  }
}

TEST(Distribution, CoupledQuantilesAreUniform) {
  // Kolmogorov-Smirnov distance of the stored quantiles against the DKW band
  const SingleDist d(FiniteDiscrete{{1.0, 2.0}, {0.5, 0.5}});
  Stream rng(8);
  const std::size_t N = 100000;
  std::vector<double> qs(N);
  for (auto& q : qs) {
    const auto draw = d.sample_coupled(rng);
    q = draw.quantile;
    ASSERT_EQ(draw.value, d.quantile(q));
  }
  std::sort(qs.begin(), qs.end());
  double ks = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    ks = std::max({ks, std::abs(qs[i] - static_cast<double>(i) / N), std::abs(qs[i] - static_cast<double>(i + 1) / N)});
  }
  EXPECT_LT(ks, dkw_epsilon(N, 1e-3));
}

TEST(Distribution, ParseSpecs) {
  EXPECT_TRUE(parse_dist("uniform:0,1").is<Uniform>());
  EXPECT_TRUE(parse_dist("exp:1").is<Exponential>());
  EXPECT_DOUBLE_EQ(parse_dist("er").support_hi(), 1e4);
  EXPECT_DOUBLE_EQ(parse_dist("er", 50.0).support_hi(), 50.0);
  EXPECT_DOUBLE_EQ(parse_dist("er:p=100").support_hi(), 100.0);
  EXPECT_DOUBLE_EQ(parse_dist("er:250").support_hi(), 250.0);
  EXPECT_DOUBLE_EQ(parse_dist("point:3").mean(), 3.0);
  EXPECT_NEAR(parse_dist("discrete:v=1,10;p=0.9,0.1").mean(), 1.9, 1e-12);
  EXPECT_EQ(parse_dist("discrete:v=1,10;p=0.9,0.1").describe(), "discrete:v=1,10;p=0.9,0.1");
}

TEST(Distribution, ParseRejectsBadInput) {
  EXPECT_THROW(parse_dist("gamma:1"), precondition_error);
  EXPECT_THROW(parse_dist("uniform:1"), precondition_error);
  EXPECT_THROW(parse_dist("uniform:2,1"), precondition_error);
  EXPECT_THROW(parse_dist("exp:-1"), precondition_error);
  EXPECT_THROW(parse_dist("exp:abc"), precondition_error);
  EXPECT_THROW(parse_dist("er:0.5"), precondition_error);
  EXPECT_THROW(parse_dist("er:inf"), precondition_error);
  EXPECT_THROW(parse_dist("discrete:v=1,2;p=0.5"), precondition_error);
  EXPECT_THROW(parse_dist("discrete:v=2,1;p=0.5,0.5"), precondition_error);
  EXPECT_THROW(parse_dist("discrete:v=1,2;p=0.5,0.6"), precondition_error);
  EXPECT_THROW(SingleDist(Uniform{0.0, 1.0}).quantile(1.5), precondition_error);
  EXPECT_THROW(ProductDist(std::vector<SingleDist>{}), precondition_error);
}
