#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "compcx/error.hpp"
#include "compcx/monte_carlo.hpp"
#include "compcx/random.hpp"

namespace compcx {

struct ExperimentParams {
  std::size_t n = 1;   // bidders
  std::size_t m = 1;   // items
  std::size_t c = 0;   // extra bidders
  std::size_t l = 2;   // order index
};

// max of n + c uniforms
inline double sample_xs(std::size_t n, std::size_t c, Stream& rng) {
  expects(n + c >= 1, "sample_xs: need n + c >= 1");
  double best = 0.0;
  for (std::size_t i = 0; i < n + c; ++i) best = std::max(best, rng.uniform());
  return best;
}

struct WDraw {
  double w = 0.0;    // uniform on [lth, 1]
  double top = 0.0;  // X_(1)
  double lth = 0.0;  // X_(l)
};

namespace detail {
inline std::vector<double>& scratch() {
  thread_local std::vector<double> buf;
  return buf;
}

// l-th largest of xs (1-based); reorders xs.
inline double lth_largest(std::vector<double>& xs, std::size_t l) {
  auto nth = xs.begin() + static_cast<std::ptrdiff_t>(l - 1);
  std::nth_element(xs.begin(), nth, xs.end(), std::greater<>());
  return *nth;
}
}  // namespace detail

inline WDraw sample_w(std::size_t n, std::size_t l, Stream& rng) {
  expects(l >= 1 && l <= n, "sample_w: need 1 <= l <= n");
  auto& xs = detail::scratch();
  xs.resize(n);
  for (auto& x : xs) x = rng.uniform();
  WDraw d;
  d.top = *std::max_element(xs.begin(), xs.end());
  d.lth = detail::lth_largest(xs, l);
  d.w = rng.uniform(d.lth, 1.0);
  return d;
}

// max{X_(1), W_l}
inline double sample_xb(std::size_t n, std::size_t l, Stream& rng) {
  expects(l >= 2 && l <= n, "sample_xb: need 2 <= l <= n");
  const auto d = sample_w(n, l, rng);
  return std::max(d.top, d.w);
}

namespace detail {
// Uniformly random element of the ys exceeding x, or x itself if none do.
inline double pick_exceeding(double x, std::size_t count, Stream& rng) {
  auto& ys = scratch();
  ys.clear();
  for (std::size_t k = 0; k < count; ++k) {
    const double y = rng.uniform();
    if (y > x) ys.push_back(y);
  }
  if (ys.empty()) return x;
  return ys[rng.index(ys.size())];
}
}  // namespace detail

// X'_L(n, m): top of n quantiles, replaced by a random one of the m - 1 Y
// draws exceeding it when there is one.
inline double sample_xl_prime(std::size_t n, std::size_t m, Stream& rng) {
  expects(n >= 1 && m >= 1, "sample_xl_prime: need n, m >= 1");
  double top = 0.0;
  for (std::size_t i = 0; i < n; ++i) top = std::max(top, rng.uniform());
  return detail::pick_exceeding(top, m - 1, rng);
}

// X_L(n, m). For n >= 2 the output is max with W_2 drawn on [X_(2), 1]; the
// single-bidder variant has no W. Draw order: X's, W, Y's, index.
inline double sample_xl(std::size_t n, std::size_t m, Stream& rng) {
  expects(n >= 1 && m >= 1, "sample_xl: need n, m >= 1");
  if (n == 1) return sample_xl_prime(1, m, rng);
  double top = 0.0, second = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = rng.uniform();
    if (x > top) {
      second = top;
      top = x;
    } else if (x > second) {
      second = x;
    }
  }
  const double w = rng.uniform(second, 1.0);
  return std::max(detail::pick_exceeding(top, m - 1, rng), w);
}

// Pr[Y* > p | X_(1) < p] in closed form.
inline double ystar_tail(std::size_t n, std::size_t m, double p) {
  expects(m >= 2, "ystar_tail: need m >= 2");
  expects(n >= 1, "ystar_tail: need n >= 1");
  expects(p >= 0.0 && p <= 1.0, "ystar_tail: need p in [0,1]");
  const double nd = static_cast<double>(n);
  double out = 1.0 - nd * std::pow(p, static_cast<double>(m - 1)) / (nd + static_cast<double>(m) - 2.0);
  for (std::size_t i = 1; i + 2 <= m; ++i) {
    const double id = static_cast<double>(i);
    out -= nd * std::pow(p, id) / ((nd + id) * (nd + id - 1.0));
  }
  return out;
}

struct ProbabilityEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
  double epsilon = 0.0;   // DKW half-width at the requested delta
  std::uint64_t samples = 0;
};

inline double dkw_epsilon(std::uint64_t N, double delta) {
  return std::sqrt(std::log(2.0 / delta) / (2.0 * static_cast<double>(N)));
}

// Monte Carlo of Pr[Y* > p | X_(1) < p]. The conditioning event is sampled
// exactly: given X_(1) < p the n draws are i.i.d. uniform on [0, p).
inline ProbabilityEstimate ystar_conditional_mc(std::size_t n, std::size_t m, double p, std::uint64_t N,
                                                std::uint64_t seed, double delta = 1e-3) {
  expects(m >= 2 && n >= 1, "ystar_conditional_mc: need n >= 1, m >= 2");
  expects(p > 0.0 && p < 1.0, "ystar_conditional_mc: need p in (0,1)");
  auto s = simulate(N, seed, RunningStats{}, [&](Stream& rng, std::uint64_t count, RunningStats& st) {
    for (std::uint64_t t = 0; t < count; ++t) {
      double top = 0.0;
      for (std::size_t i = 0; i < n; ++i) top = std::max(top, rng.uniform(0.0, p));
      const double y = detail::pick_exceeding(top, m - 1, rng);
      st.push(y > p ? 1.0 : 0.0);
    }
  });
  return {s.mean, s.std_error(), dkw_epsilon(N, delta), s.count};
}

struct DominanceReport {
  std::vector<double> grid;
  std::vector<double> cdf_a;
  std::vector<double> cdf_b;
  double epsilon = 0.0;
  double max_excess = 0.0;  // max over the grid of cdf_a - cdf_b
  bool dominates = false;   // cdf_a <= cdf_b + 2 epsilon everywhere
  std::uint64_t samples = 0;
};

using QuantileSampler = std::function<double(Stream&)>;

namespace detail {
struct Histogram {
  std::vector<std::uint64_t> counts;
  void merge(const Histogram& o) {
    for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += o.counts[i];
  }
};

// Empirical cdf at the probes k/(G+1), k = 1..G.
inline std::vector<double> empirical_cdf(const QuantileSampler& sampler, std::size_t G, std::uint64_t N,
                                         std::uint64_t seed) {
  const double scale = static_cast<double>(G + 1);
  Histogram zero{std::vector<std::uint64_t>(G + 2, 0)};
  auto h = simulate(N, seed, zero, [&](Stream& rng, std::uint64_t count, Histogram& st) {
    for (std::uint64_t t = 0; t < count; ++t) {
      const double x = sampler(rng);
      // smallest probe index b with x <= b/(G+1)
      auto b = static_cast<std::size_t>(std::max(0.0, std::ceil(x * scale)));
      st.counts[std::min(b, G + 1)] += 1;
    }
  });
  std::vector<double> cdf(G);
  std::uint64_t running = h.counts[0];
  for (std::size_t k = 1; k <= G; ++k) {
    running += h.counts[k];
    cdf[k - 1] = static_cast<double>(running) / static_cast<double>(N);
  }
  return cdf;
}
}  // namespace detail

// Does A first-order stochastically dominate B? Decided on G probes with a
// DKW allowance of 2 epsilon. A draws from split 0 of the seed, B from split 1.
inline DominanceReport dominance_test(const QuantileSampler& a, const QuantileSampler& b, std::uint64_t N,
                                      std::size_t grid_size, double delta, std::uint64_t seed) {
  expects(N >= 10000, "dominance_test: need N >= 1e4");
  expects(delta > 0.0 && delta < 1.0, "dominance_test: need delta in (0,1)");
  expects(grid_size >= 1, "dominance_test: need at least one probe");
  DominanceReport r;
  r.samples = N;
  r.grid.resize(grid_size);
  for (std::size_t k = 0; k < grid_size; ++k) r.grid[k] = static_cast<double>(k + 1) / static_cast<double>(grid_size + 1);
  r.cdf_a = detail::empirical_cdf(a, grid_size, N, split_seed(seed, 0));
  r.cdf_b = detail::empirical_cdf(b, grid_size, N, split_seed(seed, 1));
  r.epsilon = dkw_epsilon(N, delta);
  r.max_excess = -1.0;
  for (std::size_t k = 0; k < grid_size; ++k) r.max_excess = std::max(r.max_excess, r.cdf_a[k] - r.cdf_b[k]);
  r.dominates = r.max_excess <= 2.0 * r.epsilon;
  return r;
}

// Smallest integer c meeting each dominance threshold.
inline std::size_t little_n_extra_bidders(std::size_t n, std::size_t m) {
  const double nd = static_cast<double>(n);
  return static_cast<std::size_t>(std::ceil(nd * (2.0 + std::log(1.0 + static_cast<double>(m) / nd))));
}
inline std::size_t big_n_extra_bidders(std::size_t n, std::size_t l) {
  return static_cast<std::size_t>(std::ceil(4.0 * static_cast<double>(n) / static_cast<double>(l - 1)));
}
inline std::size_t single_bidder_extra_bidders(std::size_t m) {
  return static_cast<std::size_t>(std::ceil(2.0 + std::log(static_cast<double>(m) + 1.0)));
}

struct PropKeyResult {
  double lhs = 0.0;          // Pr[Z_(1),c > p] = 1 - p^c, exact
  double rhs = 0.0;          // Pr[W_l > p | X_(1) < p], Monte Carlo
  double rhs_std_error = 0.0;
  bool holds = false;        // lhs >= rhs - 3 se
};

// Given X_(1) < p the n draws are i.i.d. uniform on [0, p) and are sampled
// that way. Given X_(l) = r, W_l exceeds p with probability (1-p)/(1-r);
// that conditional probability is averaged instead of a 0/1 indicator.
inline PropKeyResult prop_key_conditional(std::size_t n, std::size_t l, std::size_t c, double p, std::uint64_t N,
                                          std::uint64_t seed) {
  expects(p > 0.0 && p < 1.0, "prop_key_conditional: need p in (0,1)");
  expects(l >= 2 && l <= n, "prop_key_conditional: need 2 <= l <= n");
  expects(std::pow(p, static_cast<double>(n)) >= 1e-4, "prop_key_conditional: Pr[X_(1) < p] = p^n below 1e-4");
  auto s = simulate(N, seed, RunningStats{}, [&](Stream& rng, std::uint64_t count, RunningStats& st) {
    auto& xs = detail::scratch();
    for (std::uint64_t t = 0; t < count; ++t) {
      xs.resize(n);
      for (auto& x : xs) x = rng.uniform(0.0, p);
      const double r = detail::lth_largest(xs, l);
      st.push((1.0 - p) / (1.0 - r));
    }
  });
  PropKeyResult out;
  out.lhs = 1.0 - std::pow(p, static_cast<double>(c));
  out.rhs = s.mean;
  out.rhs_std_error = s.std_error();
  out.holds = out.lhs >= out.rhs - 3.0 * out.rhs_std_error;
  return out;
}

}  // namespace compcx
