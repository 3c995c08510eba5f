#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "compcx/auction.hpp"
#include "compcx/benchmark.hpp"
#include "compcx/distribution.hpp"
#include "compcx/error.hpp"
#include "compcx/monte_carlo.hpp"
#include "compcx/quantile_experiments.hpp"
#include "compcx/virtual_value.hpp"

namespace compcx {

// One checked number. Two-sided rows pass iff |computed - target| <= tolerance,
// one-sided rows iff computed >= target - tolerance. Report-only rows always
// pass and carry a number worth looking at, not a contract.
struct ReproResult {
  std::string name;
  double computed = 0.0;
  double target = 0.0;
  double tolerance = 0.0;
  bool one_sided = false;
  bool report_only = false;
  bool pass = false;
  double runtime = 0.0;  // seconds, for the whole claim
  std::string details;

  static ReproResult two_sided(std::string name, double computed, double target, double tolerance,
                               std::string details = {}) {
    ReproResult r{std::move(name), computed, target, tolerance, false, false, false, 0.0, std::move(details)};
    r.pass = std::abs(computed - target) <= tolerance;
    return r;
  }
  static ReproResult at_least(std::string name, double computed, double target, double tolerance,
                              std::string details = {}) {
    ReproResult r{std::move(name), computed, target, tolerance, true, false, false, 0.0, std::move(details)};
    r.pass = computed >= target - tolerance;
    return r;
  }
  static ReproResult report(std::string name, double computed, double target, std::string details = {}) {
    return {std::move(name), computed, target, 0.0, false, true, true, 0.0, std::move(details)};
  }
  static ReproResult verdict(std::string name, bool got, bool expected, std::string details = {}) {
    return two_sided(std::move(name), got ? 1.0 : 0.0, expected ? 1.0 : 0.0, 0.0, std::move(details));
  }

  const char* mode() const { return report_only ? "report" : one_sided ? "at_least" : "two_sided"; }
};

// ---------------------------------------------------------------- ER order statistics

// x-th highest of y draws from ER truncated at p.
inline RevenueEstimate er_order_stat(std::size_t x, std::size_t y, std::uint64_t N, std::uint64_t seed,
                                     double p = 1e6) {
  expects(x != 1, "er_order_stat: x = 1 has infinite expectation under the untruncated law");
  expects(x >= 2 && x <= y, "er_order_stat: need 2 <= x <= y");
  expects(x >= 4 || p <= 1e6, "er_order_stat: need x >= 4 or truncation p <= 1e6 for finite variance");
  expects(N >= 2, "er_order_stat: need at least 2 samples");
  const SingleDist er(TruncatedEqualRevenue{p});
  auto s = simulate(N, seed, RunningStats{}, [&](Stream& rng, std::uint64_t count, RunningStats& st) {
    std::vector<double> us(y);
    for (std::uint64_t t = 0; t < count; ++t) {
      for (auto& u : us) u = rng.uniform();
      st.push(er.quantile(detail::lth_largest(us, x)));
    }
  });
  return RevenueEstimate::from(s, seed);
}

// ---------------------------------------------------------------- ER benchmark decomposition

struct ErDecomposition {
  RevenueEstimate benchmark;           // EFFTW bound on ER(p)^m
  RevenueEstimate nm_plus_offregion;   // nm + sum_j E[max_i v_ij I(i not in R_j)]
  RevenueEstimate gap;                 // benchmark - nm_plus_offregion
  RevenueEstimate offregion_per_item;  // sum_j E[...] / m
  double exact_in_region = 0.0;        // sum_j E[phi part], closed form
  double relative_gap = 0.0;           // |gap| / benchmark
};

// For ER(p) the ironed virtual value is 0 below the atom and p on it, so item
// j's benchmark term is max(phi_j, off_j) with phi_j = p when some bidder in
// R_j sits at the atom. E[phi_j] = p (1 - (1 - pi)^n) with
// pi = (1 - a^m)/m, a = 1 - 1/p, is known exactly; only
// E[off_j - min(phi_j, off_j)] is simulated.
inline ErDecomposition er_benchmark_decomposition(std::size_t n, std::size_t m, std::uint64_t N,
                                                  std::uint64_t seed, double p = 1e4) {
  expects(n >= 1 && m >= 1, "er_benchmark_decomposition: need n, m >= 1");
  expects(p > 1.0 && std::isfinite(p), "er_benchmark_decomposition: need a finite truncation p > 1");
  expects(N >= 2, "er_benchmark_decomposition: need at least 2 samples");
  const double nd = static_cast<double>(n);
  const double md = static_cast<double>(m);
  const double a = 1.0 - 1.0 / p;
  const double pi = -std::expm1(md * std::log1p(-1.0 / p)) / md;
  const double exact = md * p * -std::expm1(nd * std::log1p(-pi));
  const ProductDist pd = ProductDist::iid(SingleDist(TruncatedEqualRevenue{p}), m);

  auto s = simulate(N, seed, JointStats(4), [&](Stream& rng, std::uint64_t count, JointStats& st) {
    ValuationProfile prof;
    RegionAssignment reg;
    for (std::uint64_t t = 0; t < count; ++t) {
      sample_profile(pd, n, rng, prof);
      assign_regions(prof, reg);
      double off_sum = 0.0, min_sum = 0.0;
      for (std::size_t j = 0; j < m; ++j) {
        double phi = 0.0, off = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          if (reg.region[i] == j) {
            if (prof.quantile(i, j) >= a) phi = p;
          } else {
            off = std::max(off, prof.value(i, j));
          }
        }
        off_sum += off;
        min_sum += std::min(phi, off);
      }
      const double row[4] = {exact + off_sum - min_sum, nd * md + off_sum, exact - nd * md - min_sum, off_sum / md};
      st.push(row);
    }
  });
  ErDecomposition r;
  r.benchmark = RevenueEstimate::from(s, 0, seed);
  r.nm_plus_offregion = RevenueEstimate::from(s, 1, seed);
  r.gap = RevenueEstimate::from(s, 2, seed);
  r.offregion_per_item = RevenueEstimate::from(s, 3, seed);
  r.exact_in_region = exact;
  r.relative_gap = std::abs(r.gap.mean) / r.benchmark.mean;
  return r;
}

struct BignTightness {
  RevenueEstimate offregion_per_item;
  double offregion_target = 0.0;  // sqrt(nm)/14
  RevenueEstimate vcg_more;       // VCG with n + c bidders
  double vcg_target = 0.0;        // m (n + c)
  RevenueEstimate benchmark;
  double implied_c = 0.0;         // benchmark/m - n
  std::size_t c = 0;
};

// Off-region mass at n >= 4m against sqrt(nm)/14, and VCG with c extra
// bidders against m(n + c). Split 0 drives the decomposition, split 1 VCG.
inline BignTightness bign_tightness(std::size_t n, std::size_t m, std::optional<std::size_t> c, std::uint64_t N,
                                    std::uint64_t seed, double p = 1e5) {
  expects(n >= 4 * m, "bign_tightness: need n >= 4m");
  BignTightness r;
  const double root = std::sqrt(static_cast<double>(n * m));
  r.c = c ? *c : static_cast<std::size_t>(std::ceil(root / 14.0));
  const auto dec = er_benchmark_decomposition(n, m, N, split_seed(seed, 0), p);
  r.offregion_per_item = dec.offregion_per_item;
  r.offregion_target = root / 14.0;
  r.benchmark = dec.benchmark;
  r.implied_c = dec.benchmark.mean / static_cast<double>(m) - static_cast<double>(n);
  r.vcg_more = vcg(ProductDist::iid(SingleDist(TruncatedEqualRevenue{p}), m), n + r.c, N, split_seed(seed, 1));
  r.vcg_target = static_cast<double>(m * (n + r.c));
  return r;
}

// ---------------------------------------------------------------- two-item tail

// Pr[v1 + v2 >= 2q] for two independent untruncated ER draws.
inline double two_item_sum_tail(double q) {
  expects(q > 1.0, "two_item_sum_tail: need q > 1");
  const double s = 2.0 * q - 1.0;
  return 2.0 / s + ((q - 0.5) * std::log(s) - q) / (q * q * s);
}

inline ProbabilityEstimate two_item_sum_tail_mc(double q, std::uint64_t N, std::uint64_t seed, double p = 1e6,
                                                double delta = 1e-3) {
  expects(q > 1.0, "two_item_sum_tail_mc: need q > 1");
  expects(N >= 2, "two_item_sum_tail_mc: need at least 2 samples");
  const SingleDist er(TruncatedEqualRevenue{p});
  auto s = simulate(N, seed, RunningStats{}, [&](Stream& rng, std::uint64_t count, RunningStats& st) {
    for (std::uint64_t t = 0; t < count; ++t) {
      const double v1 = er.quantile(rng.uniform());
      const double v2 = er.quantile(rng.uniform());
      st.push(v1 + v2 >= 2.0 * q ? 1.0 : 0.0);
    }
  });
  return {s.mean, s.std_error(), dkw_epsilon(N, delta), s.count};
}

// ---------------------------------------------------------------- lower-bound mechanisms

struct ThreeTierSurplus {
  ThreeTierReport mechanism;
  double surplus = 0.0;         // revenue - 2n
  double surplus_target = 0.0;  // ln(n)/10
};

// Three-tier mechanism at q = sqrt(n), p = 1e8.
inline ThreeTierSurplus appendix_b_revenue(std::size_t n, std::uint64_t N, std::uint64_t seed) {
  expects(n >= 10000, "appendix_b_revenue: need n >= 1e4 so that q = sqrt(n) >= 100");
  ThreeTierParams prm;
  prm.n = n;
  prm.q = std::sqrt(static_cast<double>(n));
  prm.p = 1e8;
  ThreeTierSurplus r;
  r.mechanism = three_tier_mechanism(prm, N, seed);
  r.surplus = r.mechanism.revenue.mean - 2.0 * static_cast<double>(n);
  r.surplus_target = std::log(static_cast<double>(n)) / 10.0;
  return r;
}

struct LittleNTightness {
  PostedPriceReport mechanism;
  double implied_c = 0.0;     // revenue/m - n; VCG with n + c bidders earns m(n + c)
  std::size_t min_c = 0;      // smallest integer c >= 0 with m(n + c) >= revenue
};

inline LittleNTightness little_n_tightness(std::size_t n, std::size_t m, std::uint64_t N, std::uint64_t seed,
                                           double p = 1e4) {
  expects(m >= 4 * n, "little_n_tightness: need m >= 4n");
  PostedPriceParams prm;
  prm.n = n;
  prm.m = m;
  prm.trunc = p;
  LittleNTightness r;
  r.mechanism = feldman_posted_price(prm, N, seed);
  const double rev = r.mechanism.revenue.mean;
  r.implied_c = rev / static_cast<double>(m) - static_cast<double>(n);
  while (static_cast<double>(m * (n + r.min_c)) < rev) ++r.min_c;
  return r;
}

// ---------------------------------------------------------------- claim registry

struct Claim {
  std::string id;
  int criterion = 0;  // acceptance criterion, 0 for supplementary checks
  std::string summary;
  std::uint64_t samples = 0;  // canonical sample count
  std::function<std::vector<ReproResult>(std::uint64_t seed, std::uint64_t N)> run;
};

namespace detail {
inline std::string fmt(double x) { return format_number(x); }

inline double abs_z(double diff, double se) {
  if (se > 0.0) return std::abs(diff) / se;
  return diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
}

inline std::vector<ReproResult> claim_phi_conditional_mean(std::uint64_t seed, std::uint64_t N) {
  std::vector<ReproResult> out;
  struct Case {
    const char* name;
    SingleDist d;
    std::vector<double> vs;
  };
  std::vector<double> uv, ev;
  for (int k = 0; k < 20; ++k) {
    uv.push_back(k / 20.0);
    ev.push_back(std::pow(100.0, k / 20.0));
  }
  const Case cases[] = {{"phi_conditional_mean_uniform_max_abs_z", SingleDist(Uniform{0.0, 1.0}), uv},
                        {"phi_conditional_mean_er100_max_abs_z", SingleDist(TruncatedEqualRevenue{100.0}), ev}};
  std::uint64_t stream = 0;
  for (const auto& c : cases) {
    double worst = 0.0, at = 0.0;
    for (double v : c.vs) {
      const auto r = fact1_check(c.d, v, N, split_seed(seed, stream++));
      const double z = abs_z(r.estimate - v, r.std_error);
      if (z > worst) {
        worst = z;
        at = v;
      }
    }
    out.push_back(ReproResult::two_sided(c.name, worst, 0.0, 3.0, "values=20 worst_v=" + fmt(at)));
  }
  return out;
}

inline std::vector<ReproResult> claim_bulow_klemperer(std::uint64_t seed, std::uint64_t N) {
  std::vector<ReproResult> out;
  const std::pair<const char*, SingleDist> dists[] = {{"uniform", SingleDist(Uniform{0.0, 1.0})},
                                                      {"exp1", SingleDist(Exponential{1.0})},
                                                      {"er1e4", SingleDist(TruncatedEqualRevenue{1e4})}};
  std::uint64_t stream = 0;
  for (const auto& [name, d] : dists) {
    for (std::size_t n : {1, 2, 5}) {
      const auto bk = bulow_klemperer_check(d, n, N, split_seed(seed, stream++));
      out.push_back(ReproResult::at_least(std::string("bk_") + name + "_n" + std::to_string(n), bk.margin, 0.0,
                                          3.0 * bk.std_error,
                                          "vcg_n_plus_1=" + fmt(bk.vcg_more.mean) + " rev_n=" + fmt(bk.rev.mean)));
    }
  }
  return out;
}

inline std::vector<ReproResult> claim_er_revenue(std::uint64_t seed, std::uint64_t N) {
  std::vector<ReproResult> out;
  const auto map = iron(SingleDist(TruncatedEqualRevenue{1e4}));
  std::uint64_t stream = 0;
  for (std::size_t n : {1, 5, 10}) {
    const auto e = myerson_item_revenue(map, n, N, split_seed(seed, stream++));
    const double nd = static_cast<double>(n);
    out.push_back(ReproResult::two_sided("er_rev_n" + std::to_string(n), e.mean, nd, 0.02 * nd,
                                         "se=" + fmt(e.std_error)));
  }
  return out;
}

inline std::vector<ReproResult> claim_order_stats(std::uint64_t seed, std::uint64_t N) {
  std::vector<ReproResult> out;
  const std::pair<std::size_t, std::size_t> cases[] = {{4, 12}, {5, 20}, {12, 12}};
  std::uint64_t stream = 0;
  for (auto [x, y] : cases) {
    const auto e = er_order_stat(x, y, N, split_seed(seed, stream++));
    const double target = static_cast<double>(y) / static_cast<double>(x - 1);
    out.push_back(ReproResult::two_sided("er_order_stat_" + std::to_string(x) + "_of_" + std::to_string(y), e.mean,
                                         target, 3.0 * e.std_error, "se=" + fmt(e.std_error)));
  }
  return out;
}

inline ReproResult dominance_row(const std::string& name, const DominanceReport& r, bool expected) {
  return ReproResult::verdict(name, r.dominates, expected,
                              "max_excess=" + fmt(r.max_excess) + " allowance=" + fmt(2.0 * r.epsilon));
}

constexpr std::size_t kProbeGrid = 199;
constexpr double kDominanceDelta = 1e-3;

inline std::vector<ReproResult> claim_dominance_big_n(std::uint64_t seed, std::uint64_t N) {
  std::vector<ReproResult> out;
  const std::pair<std::size_t, std::size_t> cases[] = {{10, 3}, {20, 5}, {50, 11}};
  std::uint64_t stream = 0;
  for (auto [n, l] : cases) {
    const std::size_t c = big_n_extra_bidders(n, l);
    const auto r = dominance_test([n = n, c](Stream& g) { return sample_xs(n, c, g); },
                                  [n = n, l = l](Stream& g) { return sample_xb(n, l, g); }, N, kProbeGrid,
                                  kDominanceDelta, split_seed(seed, stream++));
    out.push_back(dominance_row("xs_" + std::to_string(n) + "_" + std::to_string(c) + "_dominates_xb_" +
                                    std::to_string(n) + "_" + std::to_string(l),
                                r, true));
  }
  const auto r = dominance_test([](Stream& g) { return sample_xs(10, 1, g); },
                                [](Stream& g) { return sample_xb(10, 3, g); }, N, kProbeGrid, kDominanceDelta,
                                split_seed(seed, stream++));
  out.push_back(dominance_row("xs_10_1_fails_to_dominate_xb_10_3", r, false));
  return out;
}

inline std::vector<ReproResult> claim_dominance_little_n(std::uint64_t seed, std::uint64_t N) {
  std::vector<ReproResult> out;
  const std::pair<std::size_t, std::size_t> cases[] = {{1, 4}, {2, 8}, {3, 16}};
  std::uint64_t stream = 0;
  for (auto [n, m] : cases) {
    const std::size_t c = little_n_extra_bidders(n, m);
    const auto r = dominance_test([n = n, c](Stream& g) { return sample_xs(n, c, g); },
                                  [n = n, m = m](Stream& g) { return sample_xl(n, m, g); }, N, kProbeGrid,
                                  kDominanceDelta, split_seed(seed, stream++));
    out.push_back(dominance_row("xs_" + std::to_string(n) + "_" + std::to_string(c) + "_dominates_xl_" +
                                    std::to_string(n) + "_" + std::to_string(m),
                                r, true));
  }
  for (std::size_t m : {2, 8, 32}) {
    const std::size_t c = single_bidder_extra_bidders(m);
    const auto r = dominance_test([c](Stream& g) { return sample_xs(1, c, g); },
                                  [m](Stream& g) { return sample_xl(1, m, g); }, N, kProbeGrid, kDominanceDelta,
                                  split_seed(seed, stream++));
    out.push_back(dominance_row("single_bidder_xs_1_" + std::to_string(c) + "_dominates_xl_1_" + std::to_string(m),
                                r, true));
  }
  return out;
}

inline std::vector<ReproResult> claim_ystar(std::uint64_t seed, std::uint64_t N) {
  std::vector<ReproResult> out;
  const std::pair<std::size_t, std::size_t> cases[] = {{2, 3}, {5, 4}};
  std::uint64_t stream = 0;
  for (auto [n, m] : cases) {
    double worst = 0.0, eps = 0.0, at = 0.0;
    for (int k = 1; k <= 9; ++k) {
      const double p = k / 10.0;
      const auto e = ystar_conditional_mc(n, m, p, N, split_seed(seed, stream++), kDominanceDelta);
      eps = e.epsilon;
      const double diff = std::abs(e.estimate - ystar_tail(n, m, p));
      if (diff > worst) {
        worst = diff;
        at = p;
      }
    }
    out.push_back(ReproResult::two_sided("ystar_tail_n" + std::to_string(n) + "_m" + std::to_string(m) +
                                             "_max_abs_diff",
                                         worst, 0.0, eps, "probes=9 worst_p=" + fmt(at)));
  }
  return out;
}

inline std::vector<ReproResult> chain_rows(const std::string& prefix, const ChainReport& r) {
  std::vector<ReproResult> out;
  for (std::size_t a = 0; a < r.links.size(); ++a) {
    const auto& l = r.links[a];
    // slack = mean(to) - mean(from) must not be below -3 se
    out.push_back(ReproResult::at_least(prefix + "_" + l.from + "_le_" + l.to, -l.diff, 0.0, 3.0 * l.std_error,
                                        "from=" + fmt(r.bounds[a].mean) + " to=" + fmt(r.bounds[a + 1].mean)));
  }
  return out;
}

inline std::vector<ReproResult> claim_chain_little(std::uint64_t seed, std::uint64_t N) {
  const std::size_t n = 2, m = 4;
  const auto pd = ProductDist::iid(SingleDist(Uniform{0.0, 1.0}), m);
  return chain_rows("little_chain", little_chain(pd, n, little_n_extra_bidders(n, m), N, seed));
}

inline std::vector<ReproResult> claim_chain_big(std::uint64_t seed, std::uint64_t N) {
  const std::size_t n = 16, m = 2;
  const auto l = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n) / m))) + 1;
  const double root = std::sqrt(static_cast<double>(n * m));
  const auto c = static_cast<std::size_t>(std::ceil(5.0 * root + 4.0 * (m - 1)));
  const auto pd = ProductDist::iid(SingleDist(Uniform{0.0, 1.0}), m);
  return chain_rows("big_chain", big_chain(pd, n, l, c, N, seed));
}

inline std::vector<ReproResult> claim_er_offregion(std::uint64_t seed, std::uint64_t N) {
  const std::size_t n = 16, m = 4;
  const auto r = bign_tightness(n, m, std::nullopt, N, seed, 1e5);
  std::vector<ReproResult> out;
  out.push_back(ReproResult::at_least("offregion_per_item_vs_sqrt_nm_over_14", r.offregion_per_item.mean,
                                      r.offregion_target, 3.0 * r.offregion_per_item.std_error,
                                      "se=" + fmt(r.offregion_per_item.std_error)));
  out.push_back(ReproResult::two_sided("vcg_n_plus_c_vs_m_times_n_plus_c", r.vcg_more.mean, r.vcg_target,
                                       0.02 * r.vcg_target,
                                       "c=" + std::to_string(r.c) + " se=" + fmt(r.vcg_more.std_error)));
  out.push_back(ReproResult::report("bign_tightness_implied_c", r.implied_c, r.offregion_target,
                                    "benchmark=" + fmt(r.benchmark.mean)));
  return out;
}

inline std::vector<ReproResult> claim_er_decomposition(std::uint64_t seed, std::uint64_t N) {
  std::vector<ReproResult> out;
  const std::size_t n = 4, m = 2;
  double prev = std::numeric_limits<double>::infinity(), prev_se = 0.0;
  std::size_t rises = 0;
  std::uint64_t stream = 0;
  ErDecomposition last;
  for (double p : {1e2, 1e3, 1e4}) {
    last = er_benchmark_decomposition(n, m, N, split_seed(seed, stream++), p);
    const double se = last.gap.std_error / last.benchmark.mean;
    out.push_back(ReproResult::report("er_decomposition_relative_gap_p" + fmt(p), last.relative_gap, 0.0,
                                      "benchmark=" + fmt(last.benchmark.mean) +
                                          " nm_plus_offregion=" + fmt(last.nm_plus_offregion.mean)));
    if (last.relative_gap > prev + 3.0 * std::hypot(se, prev_se)) ++rises;
    prev = last.relative_gap;
    prev_se = se;
  }
  out.push_back(ReproResult::two_sided("er_decomposition_gap_nonincreasing_in_p", static_cast<double>(rises), 0.0,
                                       0.0, "schedule=1e2,1e3,1e4"));
  out.push_back(ReproResult::two_sided("er_decomposition_relative_gap_within_5pct_at_p1e4", last.relative_gap, 0.0,
                                       0.05, "n=4 m=2"));
  return out;
}

inline std::vector<ReproResult> claim_three_tier(std::uint64_t seed, std::uint64_t N) {
  const auto r = appendix_b_revenue(10000, N, seed);
  const auto& mech = r.mechanism;
  std::vector<ReproResult> out;
  out.push_back(ReproResult::two_sided("three_tier_revenue_vs_2n_1_minus_1_over_k_plus_2q", mech.revenue.mean,
                                       mech.target, 3.0 * mech.revenue.std_error,
                                       "k=" + fmt(mech.k) + " se=" + fmt(mech.revenue.std_error) +
                                           " mean_medium=" + fmt(mech.mean_medium)));
  out.push_back(ReproResult::report("three_tier_surplus_over_2n", r.surplus, r.surplus_target,
                                    "target_is_ln_n_over_10"));
  return out;
}

inline std::vector<ReproResult> claim_two_item_tail(std::uint64_t seed, std::uint64_t N) {
  std::vector<ReproResult> out;
  std::uint64_t stream = 0;
  for (double q : {1.5, 5.0, 20.0, 100.0}) {
    const auto e = two_item_sum_tail_mc(q, N, split_seed(seed, stream++));
    out.push_back(ReproResult::two_sided("two_item_sum_tail_q" + fmt(q), e.estimate, two_item_sum_tail(q),
                                         e.epsilon, "dkw_delta=0.001"));
  }
  return out;
}

inline std::vector<ReproResult> claim_little_n_tightness(std::uint64_t seed, std::uint64_t N) {
  std::vector<ReproResult> out;
  const std::size_t n = 2;
  std::vector<double> implied;
  std::vector<double> ses;
  std::uint64_t stream = 0;
  for (std::size_t m : {32, 64, 128}) {
    const auto r = little_n_tightness(n, m, N, split_seed(seed, stream++));
    implied.push_back(r.implied_c);
    ses.push_back(r.mechanism.revenue.std_error / static_cast<double>(m));
    out.push_back(ReproResult::report("little_n_implied_c_m" + std::to_string(m), r.implied_c, 0.0,
                                      "min_integer_c=" + std::to_string(r.min_c) +
                                          " revenue=" + fmt(r.mechanism.revenue.mean)));
    out.push_back(ReproResult::at_least("posted_price_revenue_cap_m" + std::to_string(m), r.mechanism.revenue_cap,
                                        r.mechanism.max_observed, 0.0, "cap=n*price"));
  }
  std::size_t drops = 0;
  for (std::size_t t = 1; t < implied.size(); ++t) {
    if (implied[t] < implied[t - 1] - 3.0 * std::hypot(ses[t], ses[t - 1])) ++drops;
  }
  out.push_back(ReproResult::two_sided("little_n_implied_c_increasing_in_m", static_cast<double>(drops), 0.0, 0.0,
                                       "n=2 m=32,64,128"));
  return out;
}

inline std::vector<ReproResult> claim_tail_comparison(std::uint64_t seed, std::uint64_t N) {
  std::vector<ReproResult> out;
  std::uint64_t stream = 0;
  for (double p : {0.5, 0.8, 0.95}) {
    const auto r = prop_key_conditional(10, 5, 10, p, N, split_seed(seed, stream++));
    out.push_back(ReproResult::at_least("tail_comparison_n10_l5_c10_p" + fmt(p), r.lhs - r.rhs, 0.0,
                                        3.0 * r.rhs_std_error, "lhs=" + fmt(r.lhs) + " rhs=" + fmt(r.rhs)));
  }
  return out;
}
}  // namespace detail

inline const std::vector<Claim>& claim_registry() {
  static const std::vector<Claim> claims = {
      {"phi_conditional_mean", 1, "E[phi(w) | w >= v] = v for uniform and ER(100)", 100000, detail::claim_phi_conditional_mean},
      {"bulow_klemperer", 2, "VCG with n+1 bidders beats optimal revenue with n", 1000000,
       detail::claim_bulow_klemperer},
      {"er_single_item_revenue", 3, "optimal single-item revenue of ER(1e4) is n", 1000000, detail::claim_er_revenue},
      {"er_order_statistics", 4, "x-th highest of y ER draws has mean y/(x-1)", 1000000, detail::claim_order_stats},
      {"dominance_big_n", 5, "X_S(n, 4n/(l-1)) dominates X_B(n, l)", 1000000, detail::claim_dominance_big_n},
      {"dominance_little_n", 6, "X_S(n, n(2+ln(1+m/n))) dominates X_L(n, m)", 1000000,
       detail::claim_dominance_little_n},
      {"ystar_closed_form", 7, "closed-form conditional tail of Y*", 10000000, detail::claim_ystar},
      {"chain_little_n", 8, "little-n chain of upper bounds, uniform^4, n = 2", 1000000, detail::claim_chain_little},
      {"chain_big_n", 8, "big-n chain of upper bounds, uniform^2, n = 16", 1000000, detail::claim_chain_big},
      {"er_offregion_bound", 9, "ER^4 with 16 bidders: off-region mass and VCG with extra bidders", 1000000,
       detail::claim_er_offregion},
      {"er_benchmark_decomposition", 9, "ER benchmark approaches nm + off-region mass as p grows", 1000000,
       detail::claim_er_decomposition},
      {"three_tier_identity", 10, "three-tier revenue equals 2n(1-1/k) + 2q", 100000, detail::claim_three_tier},
      {"two_item_sum_tail", 10, "closed form of Pr[v1 + v2 >= 2q] under ER^2", 10000000, detail::claim_two_item_tail},
      {"little_n_tightness", 0, "posted-price revenue needs more extra bidders as m grows", 200000,
       detail::claim_little_n_tightness},
      {"conditional_tail_comparison", 0, "Pr[Z > p | X_(1) < p] >= Pr[W_l > p | X_(1) < p] at c = 4n/(l-1)", 1000000,
       detail::claim_tail_comparison},
  };
  return claims;
}

inline const Claim& find_claim(const std::string& id) {
  for (const auto& c : claim_registry()) {
    if (c.id == id) return c;
  }
  throw precondition_error("reproduce: unknown claim '" + id + "'");
}

// Runs one claim on its own sub-stream of the master seed.
inline std::vector<ReproResult> run_claim(const Claim& claim, std::uint64_t seed,
                                          std::optional<std::uint64_t> samples = std::nullopt) {
  const auto& reg = claim_registry();
  const auto index = static_cast<std::uint64_t>(&claim - reg.data());
  const std::uint64_t claim_seed = index < reg.size() ? split_seed(seed, index) : seed;
  const auto t0 = std::chrono::steady_clock::now();
  auto rows = claim.run(claim_seed, samples.value_or(claim.samples));
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  for (auto& r : rows) r.runtime = secs;
  return rows;
}

struct ClaimRun {
  const Claim* claim = nullptr;
  std::vector<ReproResult> rows;
};

inline std::vector<ClaimRun> run_all(std::uint64_t seed, std::optional<std::uint64_t> samples = std::nullopt) {
  std::vector<ClaimRun> out;
  for (const auto& c : claim_registry()) out.push_back({&c, run_claim(c, seed, samples)});
  return out;
}

inline bool all_pass(const std::vector<ReproResult>& rows) {
  return std::all_of(rows.begin(), rows.end(), [](const ReproResult& r) { return r.pass; });
}

}  // namespace compcx
