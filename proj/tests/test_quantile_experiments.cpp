#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "compcx/quantile_experiments.hpp"

using namespace compcx;

namespace {

double simpson(const std::function<double(double)>& f, double a, double b, int n = 20000) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

// sup |empirical - F| over the sample
double ks_distance(std::vector<double> xs, const std::function<double(double)>& cdf) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = cdf(xs[i]);
    d = std::max({d, std::abs(f - i / n), std::abs(f - (i + 1) / n)});
  }
  return d;
}

template <class F>
RunningStats mean_of(F draw, int N, std::uint64_t seed) {
  Stream rng(seed);
  RunningStats s;
  for (int i = 0; i < N; ++i) s.push(draw(rng));
  return s;
}

}  // namespace

TEST(Samplers, MaxOfUniformsMean) {
  const auto s = mean_of([](Stream& r) { return sample_xs(2, 3, r); }, 200000, 1);
  EXPECT_NEAR(s.mean, 1.0 - 1.0 / 6.0, 4.0 * s.std_error());
}

TEST(Samplers, WMean) {
  for (std::size_t l : {1u, 2u, 4u}) {
    const std::size_t n = 6;
    const auto s = mean_of([&](Stream& r) { return sample_w(n, l, r).w; }, 200000, 2 + l);
    EXPECT_NEAR(s.mean, 1.0 - static_cast<double>(l) / (2.0 * (n + 1)), 4.0 * s.std_error()) << "l=" << l;
  }
  const auto one = mean_of([](Stream& r) { return sample_w(1, 1, r).w; }, 200000, 9);
  EXPECT_NEAR(one.mean, 0.75, 4.0 * one.std_error());
}

TEST(Samplers, WAtTwoIsDistributedLikeTheTop) {
  const std::size_t n = 5, N = 100000;
  Stream rng(3);
  std::vector<double> ws(N);
  for (auto& w : ws) {
    const auto d = sample_w(n, 2, rng);
    ASSERT_GE(d.w, d.lth);
    ASSERT_LE(d.lth, d.top);
    w = d.w;
  }
  EXPECT_LT(ks_distance(ws, [&](double x) { return std::pow(x, n); }), dkw_epsilon(N, 1e-3));
}

TEST(Samplers, XbCdfMatchesConditionalIntegral) {
  // Given X_(2) = r, X_(1) and W_2 are independent uniforms on [r, 1].
  const std::size_t n = 3, N = 100000;
  const double nd = static_cast<double>(n);
  auto cdf = [&](double x) {
    return simpson(
        [&](double r) {
          const double dens = nd * (nd - 1.0) * std::pow(r, nd - 2.0) * (1.0 - r);
          return dens * std::pow((x - r) / (1.0 - r), 2);
        },
        0.0, x, 2000);
  };
  Stream rng(4);
  std::vector<double> xs(N);
  for (auto& x : xs) x = sample_xb(n, 2, rng);
  std::sort(xs.begin(), xs.end());
  const double eps = dkw_epsilon(N, 1e-3);
  for (double probe : {0.3, 0.5, 0.7, 0.85, 0.95}) {
    const double emp = static_cast<double>(std::upper_bound(xs.begin(), xs.end(), probe) - xs.begin()) / N;
    EXPECT_NEAR(emp, cdf(probe), eps) << "x=" << probe;
  }
}

TEST(Samplers, PickExceedingIsUniformAboveX) {
  const double x = 0.6;
  Stream rng(5);
  std::vector<double> picks;
  int kept = 0;
  for (int i = 0; i < 100000; ++i) {
    const double y = detail::pick_exceeding(x, 5, rng);
    if (y == x) continue;
    ASSERT_GT(y, x);
    picks.push_back(y);
    ++kept;
  }
  const double none = std::pow(x, 5);
  EXPECT_NEAR(1.0 - kept / 100000.0, none, 4.0 * std::sqrt(none * (1 - none) / 100000.0));
  EXPECT_LT(ks_distance(picks, [&](double y) { return (y - x) / (1.0 - x); }),
            dkw_epsilon(picks.size(), 1e-3));
}

TEST(Samplers, XlReplay) {
  // Replays the documented draw order: n uniforms, then W on [X_(2), 1].
  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    for (std::size_t m : {1u, 4u}) {
      const std::size_t n = 3;
      Stream a(seed), b(seed);
      const double xl = sample_xl(n, m, a);
      std::vector<double> xs(n);
      for (auto& x : xs) x = b.uniform();
      std::sort(xs.rbegin(), xs.rend());
      const double w = b.uniform(xs[1], 1.0);
      if (m == 1) {
        ASSERT_EQ(xl, std::max(xs[0], w));
      } else {
        ASSERT_GE(xl, std::max(xs[0], w));
      }
    }
  }
}

TEST(Samplers, XlPrimeSingleItemIsTop) {
  Stream a(6), b(6);
  for (int i = 0; i < 100; ++i) ASSERT_EQ(sample_xl_prime(4, 1, a), sample_xs(4, 0, b));
}

TEST(Ystar, ClosedFormExamples) {
  for (double p : {0.0, 0.3, 0.8}) EXPECT_NEAR(ystar_tail(4, 2, p), 1.0 - p, 1e-15);
  for (std::size_t m : {2u, 3u, 7u}) {
    EXPECT_NEAR(ystar_tail(3, m, 0.0), 1.0, 1e-15);
    EXPECT_NEAR(ystar_tail(3, m, 1.0), 0.0, 1e-12);
  }
  EXPECT_THROW(ystar_tail(2, 1, 0.5), precondition_error);
  EXPECT_THROW(ystar_tail(2, 3, 1.5), precondition_error);
}

TEST(Ystar, MonteCarloAgrees) {
  const auto r = ystar_conditional_mc(2, 3, 0.5, 400000, 7);
  EXPECT_NEAR(r.estimate, ystar_tail(2, 3, 0.5), 4.0 * r.std_error);
  EXPECT_LT(std::abs(r.estimate - ystar_tail(2, 3, 0.5)), r.epsilon);
}

TEST(Dominance, MoreBiddersDominate) {
  auto more = [](Stream& r) { return sample_xs(5, 0, r); };
  auto fewer = [](Stream& r) { return sample_xs(2, 0, r); };
  const auto yes = dominance_test(more, fewer, 50000, 99, 1e-3, 8);
  EXPECT_TRUE(yes.dominates);
  const auto no = dominance_test(fewer, more, 50000, 99, 1e-3, 8);
  EXPECT_FALSE(no.dominates);
  EXPECT_GT(no.max_excess, 0.1);
  EXPECT_THROW(dominance_test(more, fewer, 100, 9, 1e-3, 0), precondition_error);
}

TEST(Dominance, ExtraBidderThresholds) {
  EXPECT_EQ(big_n_extra_bidders(10, 3), 20u);
  EXPECT_EQ(big_n_extra_bidders(20, 5), 20u);
  EXPECT_EQ(little_n_extra_bidders(1, 4), static_cast<std::size_t>(std::ceil(2.0 + std::log(5.0))));
  EXPECT_EQ(single_bidder_extra_bidders(8), static_cast<std::size_t>(std::ceil(2.0 + std::log(9.0))));
}

TEST(PropKey, MatchesBetaIntegral) {
  // X_(l)/p is Beta(n - l + 1, l) given X_(1) < p
  const std::size_t n = 10, l = 5;
  for (double p : {0.5, 0.9}) {
    const double a = static_cast<double>(n - l + 1), b = static_cast<double>(l);
    const double lognorm = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b);
    const double oracle = simpson(
        [&](double u) {
          if (u <= 0.0 || u >= 1.0) return 0.0;
          const double dens = std::exp(lognorm + (a - 1) * std::log(u) + (b - 1) * std::log1p(-u));
          return (1.0 - p) / (1.0 - p * u) * dens;
        },
        0.0, 1.0);
    const auto r = prop_key_conditional(n, l, 10, p, 200000, 10);
    EXPECT_NEAR(r.rhs, oracle, 4.0 * r.rhs_std_error + 1e-9) << "p=" << p;
    EXPECT_DOUBLE_EQ(r.lhs, 1.0 - std::pow(p, 10.0));
  }
}

TEST(PropKey, Preconditions) {
  EXPECT_THROW(prop_key_conditional(10, 1, 5, 0.5, 100, 0), precondition_error);
  EXPECT_THROW(prop_key_conditional(10, 11, 5, 0.5, 100, 0), precondition_error);
  EXPECT_THROW(prop_key_conditional(40, 5, 5, 0.5, 100, 0), precondition_error);
  EXPECT_THROW(prop_key_conditional(10, 5, 5, 1.0, 100, 0), precondition_error);
}
