#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "compcx/benchmark.hpp"
#include "compcx/reproductions.hpp"

using namespace compcx;

namespace {

const SingleDist kUniform(Uniform{0.0, 1.0});

// Second, independent implementation of the obs1 bound.
double obs1_oracle(const ProductDist& pd, std::size_t n, std::uint64_t N, std::uint64_t seed, double& se) {
  std::vector<IronedVirtualMap> maps;
  for (const auto& d : pd.marginals()) maps.push_back(iron(d));
  const std::size_t m = pd.items();
  Stream rng(seed);
  RunningStats st;
  std::vector<std::vector<double>> q(n, std::vector<double>(m));
  for (std::uint64_t t = 0; t < N; ++t) {
    for (auto& row : q)
      for (auto& x : row) x = rng.uniform();
    double total = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      std::vector<std::pair<double, std::size_t>> col;
      for (std::size_t i = 0; i < n; ++i) col.emplace_back(q[i][j], i);
      std::sort(col.rbegin(), col.rend());
      const std::size_t top = col[0].second;
      const bool in_region = std::max_element(q[top].begin(), q[top].end()) - q[top].begin() ==
                             static_cast<std::ptrdiff_t>(j);
      const double v1 = pd[j].quantile(col[0].first);
      total += std::max({in_region ? 0.0 : v1, maps[j].at_quantile(col[0].first), pd[j].quantile(col[1].first)});
    }
    st.push(total);
  }
  se = st.std_error();
  return st.mean;
}

}  // namespace

TEST(Regions, ArgmaxWithLowerIndexTies) {
  ValuationProfile p;
  p.n = 3;
  p.m = 3;
  p.quantiles = {0.1, 0.9, 0.5, 0.7, 0.7, 0.2, 0.3, 0.3, 0.8};
  p.values = p.quantiles;
  const auto r = assign_regions(p);
  EXPECT_EQ(r.region, (std::vector<std::size_t>{1, 0, 2}));
}

TEST(Regions, FrequenciesAreUniformForIid) {
  // chi-square, 3 df, 0.999 quantile 16.27
  const std::size_t n = 3, N = 40000;
  const auto f = region_frequencies(ProductDist::iid(kUniform, 4), n, N, 1);
  const double total = static_cast<double>(n * N);
  double chi2 = 0.0;
  for (double x : f) chi2 += std::pow(x * total - total / 4.0, 2) / (total / 4.0);
  EXPECT_LT(chi2, 16.27);
}

TEST(Regions, ProfileCouplesValuesAndQuantiles) {
  const ProductDist pd({SingleDist(Exponential{1.0}), kUniform});
  Stream rng(2);
  const auto p = sample_profile(pd, 4, rng);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 2; ++j) EXPECT_EQ(p.value(i, j), pd[j].quantile(p.quantile(i, j)));
}

TEST(Efftw, SingleItemIsMyerson) {
  const auto pd = ProductDist::iid(kUniform, 1);
  const auto b = efftw_bound(pd, 3, 200000, 3);
  const auto r = myerson_item_revenue(kUniform, 3, 200000, 4);
  EXPECT_LE(std::abs(b.mean - r.mean), 4.0 * combined_std_error(b, r));
}

TEST(Efftw, UpperBoundsSellingSeparately) {
  const auto pd = ProductDist::iid(kUniform, 2);
  const auto b = efftw_bound(pd, 1, 200000, 5);
  EXPECT_GE(b.mean, 0.5);
}

TEST(Efftw, AcceptsUnboundedMarginals) {
  const ProductDist pd({SingleDist(Exponential{1.0}), kUniform});
  const auto b = efftw_bound(pd, 2, 20000, 6);
  EXPECT_TRUE(std::isfinite(b.mean));
  EXPECT_GT(b.mean, 0.0);
}

TEST(Efftw, ItemOrderDoesNotMatter) {
  const SingleDist e(Exponential{1.0});
  const auto ab = efftw_bound(ProductDist({kUniform, e}), 2, 200000, 7);
  const auto ba = efftw_bound(ProductDist({e, kUniform}), 2, 200000, 8);
  EXPECT_LE(std::abs(ab.mean - ba.mean), 4.0 * combined_std_error(ab, ba));
}

TEST(Obs1, DominatesEfftwAndMatchesOracle) {
  const auto pd = ProductDist::iid(kUniform, 3);
  const auto e = efftw_bound(pd, 2, 200000, 9);
  const auto o = obs1_bound(pd, 2, 200000, 9);  // same seed, same profiles
  EXPECT_GE(o.mean, e.mean);
  double se = 0.0;
  const double oracle = obs1_oracle(pd, 2, 200000, 99, se);
  EXPECT_LE(std::abs(o.mean - oracle), 4.0 * std::hypot(o.std_error, se));
}

TEST(Chains, LittleChainColumnsMatchStandaloneBounds) {
  const auto pd = ProductDist::iid(kUniform, 4);
  const std::size_t n = 2;
  const auto c = little_n_extra_bidders(n, 4);
  const auto chain = little_chain(pd, n, c, 200000, 10);
  ASSERT_EQ(chain.names, (std::vector<std::string>{"efftw", "obs1", "xl_prime", "xl", "srev_n_plus_c"}));
  EXPECT_TRUE(chain.all_hold);
  const auto e = efftw_bound(pd, n, 200000, 11);
  const auto xl = xl_chain_bound(pd, n, 200000, 12);
  const auto s = srev(pd, n + c, 200000, 13);
  EXPECT_LE(std::abs(chain.bounds[0].mean - e.mean), 4.0 * combined_std_error(chain.bounds[0], e));
  EXPECT_LE(std::abs(chain.bounds[3].mean - xl.mean), 4.0 * combined_std_error(chain.bounds[3], xl));
  EXPECT_LE(std::abs(chain.bounds[4].mean - s.mean), 4.0 * combined_std_error(chain.bounds[4], s) + 1e-3);
}

TEST(Chains, BigChainColumnsMatchStandaloneBounds) {
  const auto pd = ProductDist::iid(kUniform, 2);
  const std::size_t n = 16, l = 4;
  const auto c = big_n_extra_bidders(n, l);
  const auto chain = big_chain(pd, n, l, c, 100000, 14);
  EXPECT_TRUE(chain.all_hold);
  const auto xb = xb_chain_bound(pd, n, l, 100000, 15);
  EXPECT_LE(std::abs(chain.bounds[2].mean - xb.mean), 4.0 * combined_std_error(chain.bounds[2], xb));
  for (const auto& link : chain.links) EXPECT_EQ(link.holds, link.diff <= 3.0 * link.std_error);
}

TEST(Decomposition, MatchesGenericBenchmark) {
  const double p = 1e2;
  const auto dec = er_benchmark_decomposition(3, 2, 200000, 16, p);
  const auto gen = efftw_bound(ProductDist::iid(SingleDist(TruncatedEqualRevenue{p}), 2), 3, 200000, 17);
  EXPECT_LE(std::abs(dec.benchmark.mean - gen.mean), 4.0 * combined_std_error(dec.benchmark, gen));
}

TEST(Bounds, Preconditions) {
  const auto pd = ProductDist::iid(kUniform, 2);
  EXPECT_THROW(obs1_bound(pd, 1, 100, 0), precondition_error);
  EXPECT_THROW(xb_chain_bound(pd, 3, 1, 100, 0), precondition_error);
  EXPECT_THROW(little_chain(pd, 1, 2, 100, 0), precondition_error);
  EXPECT_THROW(big_chain(pd, 3, 4, 2, 100, 0), precondition_error);
}
