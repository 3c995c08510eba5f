#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "compcx/auction.hpp"
#include "compcx/distribution.hpp"
#include "compcx/error.hpp"
#include "compcx/monte_carlo.hpp"
#include "compcx/quantile_experiments.hpp"
#include "compcx/virtual_value.hpp"

namespace compcx {

// n x m values and coupled quantiles, row-major by bidder.
struct ValuationProfile {
  std::size_t n = 0;
  std::size_t m = 0;
  std::vector<double> values;
  std::vector<double> quantiles;

  double value(std::size_t i, std::size_t j) const { return values[i * m + j]; }
  double quantile(std::size_t i, std::size_t j) const { return quantiles[i * m + j]; }
};

// One uniform per (bidder, item) cell, bidder-major. The same uniform gives
// the value and the stored quantile, which also breaks ties at atoms.
inline void sample_profile(const ProductDist& pd, std::size_t n, Stream& rng, ValuationProfile& out) {
  out.n = n;
  out.m = pd.items();
  out.values.resize(n * out.m);
  out.quantiles.resize(n * out.m);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < out.m; ++j) {
      const double q = rng.uniform();
      out.quantiles[i * out.m + j] = q;
      out.values[i * out.m + j] = pd[j].quantile(q);
    }
  }
}

inline ValuationProfile sample_profile(const ProductDist& pd, std::size_t n, Stream& rng) {
  ValuationProfile p;
  sample_profile(pd, n, rng, p);
  return p;
}

struct RegionAssignment {
  std::vector<std::size_t> region;  // per bidder, 0-based item
};

// Item of each bidder's highest quantile; exact ties go to the lower index.
inline void assign_regions(const ValuationProfile& p, RegionAssignment& out) {
  expects(p.m >= 1, "assign_regions: need at least one item");
  out.region.resize(p.n);
  for (std::size_t i = 0; i < p.n; ++i) {
    std::size_t best = 0;
    for (std::size_t j = 1; j < p.m; ++j) {
      if (p.quantile(i, j) > p.quantile(i, best)) best = j;
    }
    out.region[i] = best;
  }
}

inline RegionAssignment assign_regions(const ValuationProfile& p) {
  RegionAssignment r;
  assign_regions(p, r);
  return r;
}

namespace detail {
inline std::vector<IronedVirtualMap> iron_all(const ProductDist& pd) {
  std::vector<IronedVirtualMap> maps;
  maps.reserve(pd.items());
  for (const auto& d : pd.marginals()) maps.push_back(iron(d));
  return maps;
}

// Benchmark contribution of item j on one profile.
inline double efftw_item(const ValuationProfile& p, const RegionAssignment& r, const IronedVirtualMap& map,
                         std::size_t j) {
  double best = 0.0;
  for (std::size_t i = 0; i < p.n; ++i) {
    const double x = r.region[i] == j ? std::max(map.at_quantile(p.quantile(i, j)), 0.0) : p.value(i, j);
    best = std::max(best, x);
  }
  return best;
}

struct TopBidders {
  std::size_t first = 0;   // bidder with the highest quantile for the item
  double q1 = 0.0;
  double q2 = 0.0;         // second-highest quantile, 0 if n == 1
};

inline TopBidders top_bidders(const ValuationProfile& p, std::size_t j) {
  TopBidders t;
  t.q1 = -1.0;
  for (std::size_t i = 0; i < p.n; ++i) {
    const double q = p.quantile(i, j);
    if (q > t.q1) {
      t.q2 = std::max(t.q1, 0.0);
      t.q1 = q;
      t.first = i;
    } else if (q > t.q2) {
      t.q2 = q;
    }
  }
  return t;
}

}  // namespace detail

// Sum over items of E[max_i {phi_bar_j(v_ij)^+ if i is in R_j, else v_ij}].
// ER marginals are always truncated (enforced by SingleDist), so every term
// has finite mean.
inline RevenueEstimate efftw_bound(const ProductDist& pd, std::size_t n, std::uint64_t N, std::uint64_t seed) {
  expects(n >= 1, "efftw_bound: need n >= 1");
  expects(N >= 2, "efftw_bound: need at least 2 samples");
  const auto maps = detail::iron_all(pd);
  auto s = simulate(N, seed, RunningStats{}, [&](Stream& rng, std::uint64_t count, RunningStats& st) {
    ValuationProfile prof;
    RegionAssignment reg;
    for (std::uint64_t t = 0; t < count; ++t) {
      sample_profile(pd, n, rng, prof);
      assign_regions(prof, reg);
      double total = 0.0;
      for (std::size_t j = 0; j < pd.items(); ++j) total += detail::efftw_item(prof, reg, maps[j], j);
      st.push(total);
    }
  });
  return RevenueEstimate::from(s, seed);
}

// Sum over items of E[max{v_(1)j I(top not in R_j), phi_bar_j(v_(1)j), v_(2)j}].
inline RevenueEstimate obs1_bound(const ProductDist& pd, std::size_t n, std::uint64_t N, std::uint64_t seed) {
  expects(n >= 2, "obs1_bound: need n >= 2");
  expects(N >= 2, "obs1_bound: need at least 2 samples");
  const auto maps = detail::iron_all(pd);
  auto s = simulate(N, seed, RunningStats{}, [&](Stream& rng, std::uint64_t count, RunningStats& st) {
    ValuationProfile prof;
    RegionAssignment reg;
    for (std::uint64_t t = 0; t < count; ++t) {
      sample_profile(pd, n, rng, prof);
      assign_regions(prof, reg);
      double total = 0.0;
      for (std::size_t j = 0; j < pd.items(); ++j) {
        const auto top = detail::top_bidders(prof, j);
        const double v1 = prof.value(top.first, j);
        const double off = reg.region[top.first] != j ? v1 : 0.0;
        total += std::max({off, maps[j].at_quantile(top.q1), pd[j].quantile(top.q2)});
      }
      st.push(total);
    }
  });
  return RevenueEstimate::from(s, seed);
}

// Sum over items of E[phi_bar_j(X_L(n, m))], items independent.
inline RevenueEstimate xl_chain_bound(const ProductDist& pd, std::size_t n, std::uint64_t N, std::uint64_t seed) {
  expects(n >= 2, "xl_chain_bound: need n >= 2");
  expects(N >= 2, "xl_chain_bound: need at least 2 samples");
  const std::size_t m = pd.items();
  return sum_over_items(pd, N, seed, [&](const SingleDist& d, std::uint64_t s) {
    const auto map = iron(d);
    auto st = simulate(N, s, RunningStats{}, [&](Stream& rng, std::uint64_t count, RunningStats& acc) {
      for (std::uint64_t t = 0; t < count; ++t) acc.push(map.at_quantile(sample_xl(n, m, rng)));
    });
    return RevenueEstimate::from(st, s);
  });
}

// Sum over items of E[phi_bar_j(X_B(n + (m-1)(l-1), l))], items independent.
inline RevenueEstimate xb_chain_bound(const ProductDist& pd, std::size_t n, std::size_t l, std::uint64_t N,
                                      std::uint64_t seed) {
  expects(l >= 2 && l <= n, "xb_chain_bound: need 2 <= l <= n");
  expects(N >= 2, "xb_chain_bound: need at least 2 samples");
  const std::size_t n_prime = n + (pd.items() - 1) * (l - 1);
  return sum_over_items(pd, N, seed, [&](const SingleDist& d, std::uint64_t s) {
    const auto map = iron(d);
    auto st = simulate(N, s, RunningStats{}, [&](Stream& rng, std::uint64_t count, RunningStats& acc) {
      for (std::uint64_t t = 0; t < count; ++t) acc.push(map.at_quantile(sample_xb(n_prime, l, rng)));
    });
    return RevenueEstimate::from(st, s);
  });
}

// ---------------------------------------------------------------- chains

struct ChainLink {
  std::string from;
  std::string to;
  double diff = 0.0;   // mean(from) - mean(to); should be <= 0
  double std_error = 0.0;
  bool holds = false;  // diff <= 3 se
};

struct ChainReport {
  std::vector<std::string> names;
  std::vector<RevenueEstimate> bounds;
  std::vector<ChainLink> links;
  std::size_t extra_bidders = 0;
  bool all_hold = false;
};

namespace detail {
inline ChainReport finish_chain(const JointStats& s, std::vector<std::string> names, std::size_t c,
                                std::uint64_t seed) {
  ChainReport r;
  r.extra_bidders = c;
  r.names = std::move(names);
  for (std::size_t a = 0; a < r.names.size(); ++a) r.bounds.push_back(RevenueEstimate::from(s, a, seed));
  r.all_hold = true;
  for (std::size_t a = 0; a + 1 < r.names.size(); ++a) {
    ChainLink l{r.names[a], r.names[a + 1], s.mean(a) - s.mean(a + 1), s.std_error_of_difference(a, a + 1), false};
    l.holds = l.diff <= 3.0 * l.std_error;
    r.all_hold = r.all_hold && l.holds;
    r.links.push_back(l);
  }
  return r;
}

inline double max_of_fresh(double start, std::size_t c, Stream& rng) {
  for (std::size_t k = 0; k < c; ++k) start = std::max(start, rng.uniform());
  return start;
}
}  // namespace detail

// Little-n chain on one shared stream of profiles:
//   efftw <= obs1 <= xl_prime <= xl <= srev_{n+c}.
// Per item, the other-item quantiles of the top bidder play the Y draws, so
// every column is a function of the same profile plus a few fresh uniforms.
inline ChainReport little_chain(const ProductDist& pd, std::size_t n, std::size_t c, std::uint64_t N,
                                std::uint64_t seed) {
  expects(n >= 2, "little_chain: need n >= 2");
  expects(N >= 2, "little_chain: need at least 2 samples");
  const auto maps = detail::iron_all(pd);
  const std::size_t m = pd.items();
  auto s = simulate(N, seed, JointStats(5), [&](Stream& rng, std::uint64_t count, JointStats& st) {
    ValuationProfile prof;
    RegionAssignment reg;
    std::vector<double> ys;
    for (std::uint64_t t = 0; t < count; ++t) {
      sample_profile(pd, n, rng, prof);
      assign_regions(prof, reg);
      double row[5] = {0, 0, 0, 0, 0};
      for (std::size_t j = 0; j < m; ++j) {
        const auto& map = maps[j];
        const auto top = detail::top_bidders(prof, j);
        const double v2 = pd[j].quantile(top.q2);
        row[0] += detail::efftw_item(prof, reg, map, j);
        const double off = reg.region[top.first] != j ? prof.value(top.first, j) : 0.0;
        row[1] += std::max({off, map.at_quantile(top.q1), v2});
        ys.clear();
        for (std::size_t k = 0; k < m; ++k) {
          if (k != j && prof.quantile(top.first, k) > top.q1) ys.push_back(prof.quantile(top.first, k));
        }
        const double xl_prime = ys.empty() ? top.q1 : ys[rng.index(ys.size())];
        row[2] += std::max(map.at_quantile(xl_prime), v2);
        const double w2 = rng.uniform(top.q2, 1.0);
        row[3] += map.at_quantile(std::max(xl_prime, w2));
        row[4] += std::max(map.at_quantile(detail::max_of_fresh(top.q1, c, rng)), 0.0);
      }
      st.push(row);
    }
  });
  return detail::finish_chain(s, {"efftw", "obs1", "xl_prime", "xl", "srev_n_plus_c"}, c, seed);
}

// Big-n chain: efftw <= w_top <= xb <= srev_{n+c}. The n + (m-1)(l-1) draws
// for item j are the item-j quantiles of all bidders plus the other-item
// quantiles of the l-1 bidders ranked highest on item j.
inline ChainReport big_chain(const ProductDist& pd, std::size_t n, std::size_t l, std::size_t c, std::uint64_t N,
                             std::uint64_t seed) {
  expects(l >= 2 && l <= n, "big_chain: need 2 <= l <= n");
  expects(N >= 2, "big_chain: need at least 2 samples");
  const auto maps = detail::iron_all(pd);
  const std::size_t m = pd.items();
  auto s = simulate(N, seed, JointStats(4), [&](Stream& rng, std::uint64_t count, JointStats& st) {
    ValuationProfile prof;
    RegionAssignment reg;
    std::vector<std::size_t> order(n);
    std::vector<double> ws;
    for (std::uint64_t t = 0; t < count; ++t) {
      sample_profile(pd, n, rng, prof);
      assign_regions(prof, reg);
      double row[4] = {0, 0, 0, 0};
      for (std::size_t j = 0; j < m; ++j) {
        const auto& map = maps[j];
        row[0] += detail::efftw_item(prof, reg, map, j);

        for (std::size_t i = 0; i < n; ++i) order[i] = i;
        std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(l - 1), order.end(),
                          [&](std::size_t a, std::size_t b) { return prof.quantile(a, j) > prof.quantile(b, j); });
        ws.clear();
        for (std::size_t i = 0; i < n; ++i) ws.push_back(prof.quantile(i, j));
        for (std::size_t r = 0; r + 1 < l; ++r) {
          for (std::size_t k = 0; k < m; ++k) {
            if (k != j) ws.push_back(prof.quantile(order[r], k));
          }
        }
        const double q1 = prof.quantile(order[0], j);
        const double w1 = *std::max_element(ws.begin(), ws.end());
        const double wl = detail::lth_largest(ws, l);
        row[1] += std::max(map.at_quantile(w1), pd[j].quantile(wl));
        row[2] += map.at_quantile(std::max(w1, rng.uniform(wl, 1.0)));
        row[3] += std::max(map.at_quantile(detail::max_of_fresh(q1, c, rng)), 0.0);
      }
      st.push(row);
    }
  });
  return detail::finish_chain(s, {"efftw", "w_top", "xb", "srev_n_plus_c"}, c, seed);
}

// Fraction of bidders whose region is each item.
inline std::vector<double> region_frequencies(const ProductDist& pd, std::size_t n, std::uint64_t N,
                                              std::uint64_t seed) {
  expects(n >= 1 && N >= 1, "region_frequencies: need n, N >= 1");
  const std::size_t m = pd.items();
  struct Counts {
    std::vector<std::uint64_t> c;
    void merge(const Counts& o) {
      for (std::size_t j = 0; j < c.size(); ++j) c[j] += o.c[j];
    }
  };
  auto s = simulate(N, seed, Counts{std::vector<std::uint64_t>(m, 0)},
                    [&](Stream& rng, std::uint64_t count, Counts& st) {
                      ValuationProfile prof;
                      RegionAssignment reg;
                      for (std::uint64_t t = 0; t < count; ++t) {
                        sample_profile(pd, n, rng, prof);
                        assign_regions(prof, reg);
                        for (auto r : reg.region) ++st.c[r];
                      }
                    });
  std::vector<double> f(m);
  const double total = static_cast<double>(N) * static_cast<double>(n);
  for (std::size_t j = 0; j < m; ++j) f[j] = static_cast<double>(s.c[j]) / total;
  return f;
}

}  // namespace compcx
