#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <set>
#include <stdexcept>
#include <vector>

#include "compcx/monte_carlo.hpp"
#include "compcx/random.hpp"

using namespace compcx;

namespace {

// Restores the automatic worker count when a test ends.
struct WorkerGuard {
  ~WorkerGuard() { set_worker_count(0); }
};

double two_pass_mean(const std::vector<double>& xs) {
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double two_pass_cov(const std::vector<double>& a, const std::vector<double>& b) {
  const double ma = two_pass_mean(a), mb = two_pass_mean(b);
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - ma) * (b[i] - mb);
  return s / static_cast<double>(a.size() - 1);
}

}  // namespace

TEST(SplitSeed, DeterministicAndDistinct) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t i = 0; i < 2000; ++i) {
    EXPECT_EQ(split_seed(42, i), split_seed(42, i));
    seen.insert(split_seed(42, i));
  }
  EXPECT_EQ(seen.size(), 2000u);
  EXPECT_NE(split_seed(1, 0), split_seed(2, 0));
}

TEST(Stream, SameSeedSameSequence) {
  Stream a(7), b(7), c(8);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const double x = a.uniform();
    EXPECT_EQ(x, b.uniform());
    EXPECT_GE(x, 0.0);
    EXPECT_LT(x, 1.0);
    differs |= x != c.uniform();
  }
  EXPECT_TRUE(differs);
}

TEST(Stream, IndexIsUniform) {
  // chi-square with 6 df; 22.46 is the 0.999 quantile
  Stream rng(3);
  constexpr std::size_t k = 7;
  constexpr int draws = 70000;
  std::vector<int> counts(k, 0);
  for (int i = 0; i < draws; ++i) {
    const auto x = rng.index(k);
    ASSERT_LT(x, k);
    ++counts[x];
  }
  const double expected = static_cast<double>(draws) / k;
  double chi2 = 0.0;
  for (int c : counts) chi2 += (c - expected) * (c - expected) / expected;
  EXPECT_LT(chi2, 22.46);
}

TEST(Stream, ShuffleIsPermutation) {
  Stream rng(11);
  std::vector<int> v(50);
  std::iota(v.begin(), v.end(), 0);
  rng.shuffle(std::span<int>(v));
  auto sorted = v;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < 50; ++i) EXPECT_EQ(sorted[i], i);
  EXPECT_FALSE(std::is_sorted(v.begin(), v.end()));
}

TEST(RunningStats, MatchesTwoPassAndMerges) {
  Stream rng(5);
  std::vector<double> xs(1001);
  for (auto& x : xs) x = rng.uniform(-3.0, 10.0);
  RunningStats whole, left, right;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    whole.push(xs[i]);
    (i < 400 ? left : right).push(xs[i]);
  }
  left.merge(right);
  EXPECT_NEAR(whole.mean, two_pass_mean(xs), 1e-12);
  EXPECT_NEAR(whole.variance(), two_pass_cov(xs, xs), 1e-10);
  EXPECT_NEAR(left.mean, whole.mean, 1e-12);
  EXPECT_NEAR(left.variance(), whole.variance(), 1e-10);
  EXPECT_EQ(left.count, whole.count);
}

TEST(JointStats, MatchesTwoPassCovariance) {
  Stream rng(6);
  std::vector<double> a(777), b(777);
  JointStats whole(2), left(2), right(2);
  for (std::size_t i = 0; i < a.size(); ++i) {
    a[i] = rng.uniform();
    b[i] = a[i] * 2.0 + rng.uniform();
    const double row[2] = {a[i], b[i]};
    whole.push(row);
    (i < 300 ? left : right).push(row);
  }
  left.merge(right);
  EXPECT_NEAR(whole.mean(1), two_pass_mean(b), 1e-12);
  EXPECT_NEAR(whole.covariance(0, 1), two_pass_cov(a, b), 1e-12);
  EXPECT_NEAR(left.covariance(0, 1), whole.covariance(0, 1), 1e-12);
  std::vector<double> d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  EXPECT_NEAR(whole.std_error_of_difference(0, 1), std::sqrt(two_pass_cov(d, d) / 777.0), 1e-12);
}

TEST(Simulate, IndependentOfWorkerCount) {
  WorkerGuard guard;
  auto run = [] {
    return simulate(50000, 9, RunningStats{}, [](Stream& rng, std::uint64_t count, RunningStats& s) {
      for (std::uint64_t t = 0; t < count; ++t) s.push(rng.uniform());
    });
  };
  set_worker_count(1);
  const auto one = run();
  set_worker_count(3);
  const auto three = run();
  EXPECT_EQ(one.count, 50000u);
  EXPECT_EQ(one.mean, three.mean);
  EXPECT_EQ(one.m2, three.m2);
}

TEST(Simulate, BatchesUseSplitSeeds) {
  WorkerGuard guard;
  set_worker_count(1);
  const auto s = simulate(kBatchSize + 1, 4, RunningStats{}, [](Stream& rng, std::uint64_t count, RunningStats& st) {
    for (std::uint64_t t = 0; t < count; ++t) st.push(rng.uniform());
  });
  RunningStats manual;
  Stream b0(split_seed(4, 0)), b1(split_seed(4, 1));
  for (std::uint64_t t = 0; t < kBatchSize; ++t) manual.push(b0.uniform());
  manual.push(b1.uniform());
  EXPECT_EQ(s.count, manual.count);
  EXPECT_NEAR(s.mean, manual.mean, 1e-15);
}

TEST(Simulate, PropagatesExceptions) {
  WorkerGuard guard;
  set_worker_count(3);
  auto bad = [] {
    simulate(100000, 1, RunningStats{}, [](Stream&, std::uint64_t, RunningStats&) {
      throw std::runtime_error("boom");
    });
  };
  EXPECT_THROW(bad(), std::runtime_error);
}
