#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <vector>

#include "compcx/distribution.hpp"
#include "compcx/error.hpp"
#include "compcx/monte_carlo.hpp"
#include "compcx/virtual_value.hpp"

namespace compcx {

namespace detail {

// Highest and second-highest of n fresh uniforms (second is 0 when n == 1).
struct TopTwo {
  double first = 0.0;
  double second = 0.0;
};

inline TopTwo top_two_uniforms(Stream& rng, std::size_t n) {
  TopTwo t;
  for (std::size_t i = 0; i < n; ++i) {
    const double q = rng.uniform();
    if (q > t.first) {
      t.second = t.first;
      t.first = q;
    } else if (q > t.second) {
      t.second = q;
    }
  }
  return t;
}

}  // namespace detail

// Optimal single-item revenue E[max(phi_bar(top), 0)] with n bidders.
//
// Estimator: with A(q) the integral of max(phi_bar, 0) over [q, 1], each
// sample contributes A(q_(2)) + (n - 1) A(q_(1)). Its expectation is
// the integral of max(phi_bar, 0) against n t^(n-1) dt, i.e. exactly the
// target, but the variance stays bounded for heavy tails where the direct
// plug-in (myerson_item_revenue_direct) is hopeless.
inline RevenueEstimate myerson_item_revenue(const IronedVirtualMap& map, std::size_t n, std::uint64_t N,
                                            std::uint64_t seed) {
  expects(n >= 1, "myerson_item_revenue: need n >= 1");
  expects(N >= 2, "myerson_item_revenue: need at least 2 samples");
  const double extra = static_cast<double>(n - 1);
  auto s = simulate(N, seed, RunningStats{}, [&](Stream& rng, std::uint64_t count, RunningStats& st) {
    for (std::uint64_t t = 0; t < count; ++t) {
      const auto top = detail::top_two_uniforms(rng, n);
      st.push(map.positive_mass_above(top.second) + extra * map.positive_mass_above(top.first));
    }
  });
  return RevenueEstimate::from(s, seed);
}

inline RevenueEstimate myerson_item_revenue(const SingleDist& d, std::size_t n, std::uint64_t N,
                                            std::uint64_t seed) {
  return myerson_item_revenue(iron(d), n, N, seed);
}

// Plug-in estimate of the same quantity: average of max(phi_bar(top), 0).
inline RevenueEstimate myerson_item_revenue_direct(const IronedVirtualMap& map, std::size_t n, std::uint64_t N,
                                                   std::uint64_t seed) {
  expects(n >= 1, "myerson_item_revenue: need n >= 1");
  auto s = simulate(N, seed, RunningStats{}, [&](Stream& rng, std::uint64_t count, RunningStats& st) {
    for (std::uint64_t t = 0; t < count; ++t) {
      st.push(std::max(map.at_quantile(detail::top_two_uniforms(rng, n).first), 0.0));
    }
  });
  return RevenueEstimate::from(s, seed);
}

// Second-price revenue for one item: E[second-highest of n values].
inline RevenueEstimate vcg_item_revenue(const SingleDist& d, std::size_t n, std::uint64_t N, std::uint64_t seed) {
  expects(n >= 1, "vcg_item_revenue: need n >= 1");
  if (n == 1) return {0.0, 0.0, N, seed};
  expects(N >= 2, "vcg_item_revenue: need at least 2 samples");
  auto s = simulate(N, seed, RunningStats{}, [&](Stream& rng, std::uint64_t count, RunningStats& st) {
    for (std::uint64_t t = 0; t < count; ++t) st.push(d.quantile(detail::top_two_uniforms(rng, n).second));
  });
  return RevenueEstimate::from(s, seed);
}

// Second price, raw phi(top) and ironed phi_bar(top) on shared draws.
// For regular d all three expectations coincide.
struct VirtualSurplusCheck {
  RevenueEstimate second_price;
  RevenueEstimate raw_phi_of_max;
  RevenueEstimate ironed_phi_of_max;
  double raw_gap_std_error = 0.0;     // se of second_price - raw_phi_of_max
  double ironed_gap_std_error = 0.0;  // se of raw_phi_of_max - ironed_phi_of_max
};

inline VirtualSurplusCheck vcg_virtual_surplus_check(const SingleDist& d, std::size_t n, std::uint64_t N,
                                                     std::uint64_t seed) {
  expects(n >= 1, "vcg_virtual_surplus_check: need n >= 1");
  const auto map = iron(d);
  expects(map.regular(), "vcg_virtual_surplus_check: distribution must be regular");
  auto s = simulate(N, seed, JointStats(3), [&](Stream& rng, std::uint64_t count, JointStats& st) {
    for (std::uint64_t t = 0; t < count; ++t) {
      const auto top = detail::top_two_uniforms(rng, n);
      const double second = n >= 2 ? d.quantile(top.second) : 0.0;
      const double row[3] = {second, raw_virtual(d, d.quantile(top.first)), map.at_quantile(top.first)};
      st.push(row);
    }
  });
  return {RevenueEstimate::from(s, 0, seed), RevenueEstimate::from(s, 1, seed), RevenueEstimate::from(s, 2, seed),
          s.std_error_of_difference(0, 1), s.std_error_of_difference(1, 2)};
}

// Per-item sums over a product distribution. Item j draws from
// split_seed(seed, j); errors combine in quadrature.
inline RevenueEstimate sum_over_items(const ProductDist& pd, std::uint64_t N, std::uint64_t seed,
                                      const std::function<RevenueEstimate(const SingleDist&, std::uint64_t)>& item) {
  RevenueEstimate total{0.0, 0.0, N, seed};
  double var = 0.0;
  for (std::size_t j = 0; j < pd.items(); ++j) {
    const auto e = item(pd[j], split_seed(seed, j));
    total.mean += e.mean;
    var += e.std_error * e.std_error;
    total.samples = e.samples;
  }
  total.std_error = std::sqrt(var);
  return total;
}

inline RevenueEstimate srev(const ProductDist& pd, std::size_t n, std::uint64_t N, std::uint64_t seed) {
  return sum_over_items(pd, N, seed, [&](const SingleDist& d, std::uint64_t s) {
    return myerson_item_revenue(d, n, N, s);
  });
}

inline RevenueEstimate vcg(const ProductDist& pd, std::size_t n, std::uint64_t N, std::uint64_t seed) {
  return sum_over_items(pd, N, seed, [&](const SingleDist& d, std::uint64_t s) {
    return vcg_item_revenue(d, n, N, s);
  });
}

struct BulowKlemperer {
  RevenueEstimate vcg_more;   // second price with n + 1 bidders
  RevenueEstimate rev;        // optimal revenue with n bidders
  double margin = 0.0;        // vcg_more - rev
  double std_error = 0.0;
  bool holds = false;         // margin >= -3 se
};

inline BulowKlemperer bulow_klemperer_check(const SingleDist& d, std::size_t n, std::uint64_t N,
                                            std::uint64_t seed) {
  expects(n >= 1, "bulow_klemperer_check: need n >= 1");
  const auto map = iron(d);
  expects(map.regular(), "bulow_klemperer_check: distribution must be regular");
  BulowKlemperer out;
  out.vcg_more = vcg_item_revenue(d, n + 1, N, split_seed(seed, 0));
  out.rev = myerson_item_revenue(map, n, N, split_seed(seed, 1));
  out.margin = out.vcg_more.mean - out.rev.mean;
  out.std_error = combined_std_error(out.vcg_more, out.rev);
  out.holds = out.margin >= -3.0 * out.std_error;
  return out;
}

// One run of a mechanism.
struct MechanismOutcome {
  double revenue = 0.0;
  std::vector<int> winner;        // per item, -1 if unsold
  std::vector<double> payments;   // per bidder
};

// ---------------------------------------------------------------- posted price

struct PostedPriceParams {
  std::size_t n = 1;
  std::size_t m = 4;
  double trunc = 1e4;
  std::optional<double> price;  // default (m/8)(ln(m/n) + 1)

  std::size_t bundle() const { return m / (4 * n); }
  bool bundle_rounded() const { return m % (4 * n) != 0; }
  double posted_price() const {
    if (price) return *price;
    const double md = static_cast<double>(m);
    return md / 8.0 * (std::log(md / static_cast<double>(n)) + 1.0);
  }
  void validate() const {
    expects(n >= 1, "posted-price: need n >= 1");
    expects(m >= 4 * n, "posted-price: need m >= 4n");
  }
};

// Buyers are visited in index order (values are i.i.d., so the order is
// immaterial). Each takes the `bundle` most valuable remaining items and buys
// them iff their total value reaches the price.
inline MechanismOutcome feldman_posted_price_run(const PostedPriceParams& prm, Stream& rng) {
  prm.validate();
  const SingleDist er(TruncatedEqualRevenue{prm.trunc});
  const std::size_t k = prm.bundle();
  const double price = prm.posted_price();
  MechanismOutcome out{0.0, std::vector<int>(prm.m, -1), std::vector<double>(prm.n, 0.0)};
  std::vector<double> values(prm.m);
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < prm.n; ++i) {
    for (auto& v : values) v = er.sample(rng);
    order.clear();
    for (std::size_t j = 0; j < prm.m; ++j) {
      if (out.winner[j] < 0) order.push_back(j);
    }
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                      [&](std::size_t a, std::size_t b) { return values[a] > values[b] || (values[a] == values[b] && a < b); });
    double total = 0.0;
    for (std::size_t t = 0; t < k; ++t) total += values[order[t]];
    if (total >= price) {
      for (std::size_t t = 0; t < k; ++t) out.winner[order[t]] = static_cast<int>(i);
      out.payments[i] = price;
      out.revenue += price;
    }
  }
  return out;
}

struct PostedPriceReport {
  RevenueEstimate revenue;
  std::size_t bundle = 0;
  bool bundle_rounded = false;
  double price = 0.0;
  double purchase_rate = 0.0;  // fraction of visited buyers who bought
  double revenue_cap = 0.0;    // n * price
  double max_observed = 0.0;
};

struct PostedPriceState {
  RunningStats revenue;
  RunningStats buys;
  double max_revenue = 0.0;
  void merge(const PostedPriceState& o) {
    revenue.merge(o.revenue);
    buys.merge(o.buys);
    max_revenue = std::max(max_revenue, o.max_revenue);
  }
};

inline PostedPriceReport feldman_posted_price(const PostedPriceParams& prm, std::uint64_t N, std::uint64_t seed) {
  prm.validate();
  expects(N >= 2, "posted-price: need at least 2 samples");
  auto s = simulate(N, seed, PostedPriceState{}, [&](Stream& rng, std::uint64_t count, PostedPriceState& st) {
    for (std::uint64_t t = 0; t < count; ++t) {
      const auto o = feldman_posted_price_run(prm, rng);
      st.revenue.push(o.revenue);
      std::size_t bought = 0;
      for (double pay : o.payments) bought += pay > 0.0;
      st.buys.push(static_cast<double>(bought) / static_cast<double>(prm.n));
      st.max_revenue = std::max(st.max_revenue, o.revenue);
    }
  });
  PostedPriceReport r;
  r.revenue = RevenueEstimate::from(s.revenue, seed);
  r.bundle = prm.bundle();
  r.bundle_rounded = prm.bundle_rounded();
  r.price = prm.posted_price();
  r.purchase_rate = s.buys.mean;
  r.revenue_cap = static_cast<double>(prm.n) * r.price;
  r.max_observed = s.max_revenue;
  return r;
}

// ---------------------------------------------------------------- three tiers

struct ThreeTierParams {
  std::size_t n = 10000;
  double q = 100.0;           // medium price per item
  double p = 1e8;             // high price for both items
  double value_cap = 0.0;     // truncation of the bidders' values; 0 means 10 p
  bool force_low = false;     // every bidder declares low

  double k() const {
    const double nd = static_cast<double>(n);
    return nd / q + nd * std::log(q) / (8.0 * q * q);
  }
  double high_threshold() const { return p * k() / (k() - 1.0); }
  double medium_threshold() const { return 2.0 * q; }
  double cap() const { return value_cap > 0.0 ? value_cap : 10.0 * p; }
  // 2n(1 - 1/k) + 2q
  double target() const { return 2.0 * static_cast<double>(n) * (1.0 - 1.0 / k()) + 2.0 * q; }

  void validate() const {
    expects(n >= 1, "three-tier: need n >= 1");
    expects(q >= 100.0 && q * q <= static_cast<double>(n), "three-tier: need 100 <= q <= sqrt(n)");
    expects(p > 2.0 * q, "three-tier: high price p must exceed 2q");
    expects(cap() >= 1.0, "three-tier: value cap must be >= 1");
  }
};

// Bidders play the threshold profile: high iff v1 + v2 >= p k/(k-1),
// medium iff v1 + v2 >= 2q, low otherwise. Highs are processed first in
// random order (the first one takes both items for p), then mediums in random
// order, each taking a random remaining item for q.
struct ThreeTierRun {
  MechanismOutcome outcome;
  std::size_t high = 0;
  std::size_t medium = 0;
};

inline ThreeTierRun three_tier_run(const ThreeTierParams& prm, Stream& rng, bool trace = false) {
  const double cap = prm.cap();
  const double hi_t = prm.high_threshold();
  const double med_t = prm.medium_threshold();
  ThreeTierRun run;
  run.outcome.winner.assign(2, -1);
  if (trace) run.outcome.payments.assign(prm.n, 0.0);

  thread_local std::vector<std::size_t> highs, mediums;
  highs.clear();
  mediums.clear();
  for (std::size_t i = 0; i < prm.n; ++i) {
    const double v1 = std::min(1.0 / (1.0 - rng.uniform()), cap);
    const double v2 = std::min(1.0 / (1.0 - rng.uniform()), cap);
    if (prm.force_low) continue;
    const double total = v1 + v2;
    if (total >= hi_t) highs.push_back(i);
    else if (total >= med_t) mediums.push_back(i);
  }
  run.high = highs.size();
  run.medium = mediums.size();

  if (!highs.empty()) {
    const std::size_t w = highs[rng.index(highs.size())];
    run.outcome.winner = {static_cast<int>(w), static_cast<int>(w)};
    run.outcome.revenue = prm.p;
    if (trace) run.outcome.payments[w] = prm.p;
    return run;
  }
  if (mediums.empty()) return run;
  rng.shuffle(std::span<std::size_t>(mediums));
  const std::size_t first_item = rng.index(2);
  const std::size_t served = std::min<std::size_t>(mediums.size(), 2);
  for (std::size_t t = 0; t < served; ++t) {
    const std::size_t item = t == 0 ? first_item : 1 - first_item;
    run.outcome.winner[item] = static_cast<int>(mediums[t]);
    run.outcome.revenue += prm.q;
    if (trace) run.outcome.payments[mediums[t]] = prm.q;
  }
  return run;
}

struct ThreeTierReport {
  RevenueEstimate revenue;
  double k = 0.0;
  double target = 0.0;
  double mean_medium = 0.0;
  double mean_high = 0.0;
  double max_observed = 0.0;
};

struct ThreeTierState {
  RunningStats revenue;
  RunningStats medium;
  RunningStats high;
  double max_revenue = 0.0;
  void merge(const ThreeTierState& o) {
    revenue.merge(o.revenue);
    medium.merge(o.medium);
    high.merge(o.high);
    max_revenue = std::max(max_revenue, o.max_revenue);
  }
};

inline ThreeTierReport three_tier_mechanism(const ThreeTierParams& prm, std::uint64_t N, std::uint64_t seed) {
  prm.validate();
  expects(N >= 2, "three-tier: need at least 2 runs");
  auto s = simulate(N, seed, ThreeTierState{}, [&](Stream& rng, std::uint64_t count, ThreeTierState& st) {
    for (std::uint64_t t = 0; t < count; ++t) {
      const auto run = three_tier_run(prm, rng);
      st.revenue.push(run.outcome.revenue);
      st.medium.push(static_cast<double>(run.medium));
      st.high.push(static_cast<double>(run.high));
      st.max_revenue = std::max(st.max_revenue, run.outcome.revenue);
    }
  });
  return {RevenueEstimate::from(s.revenue, seed), prm.k(), prm.target(), s.medium.mean, s.high.mean,
          s.max_revenue};
}

}  // namespace compcx
