#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "compcx/distribution.hpp"
#include "compcx/error.hpp"
#include "compcx/monte_carlo.hpp"

namespace compcx {

// phi(v) = v - (1 - F(v)) / f(v). Defined where a density exists, plus the
// truncation atom of the equal-revenue distribution where phi(p) = p.
inline double raw_virtual(const SingleDist& d, double v) {
  if (const auto* er = std::get_if<TruncatedEqualRevenue>(&d.kind())) {
    expects(v >= 1.0 && v <= er->p, "raw_virtual: value outside the equal-revenue support");
    return v >= er->p ? er->p : 0.0;
  }
  const auto f = d.density(v);
  expects(f.has_value() && *f > 0.0, "raw_virtual: no density at this value (atom or outside support)");
  if (const auto* u = std::get_if<Uniform>(&d.kind())) return 2.0 * v - u->hi;
  if (const auto* e = std::get_if<Exponential>(&d.kind())) return v - 1.0 / e->rate;
  return v - (1.0 - d.cdf(v)) / *f;
}

// R(q): revenue of the posted price whose sale probability is 1 - q, with q
// a value quantile. Inside an atom's quantile interval the seller randomizes
// between the two neighbouring prices, so R is linear there.
inline double revenue_curve(const SingleDist& d, double q, const std::vector<Atom>& atoms) {
  if (q >= 1.0) return 0.0;
  // Every price below the truncation point earns exactly 1.
  if (const auto* er = std::get_if<TruncatedEqualRevenue>(&d.kind()); er && q <= 1.0 - 1.0 / er->p) return 1.0;
  auto it = std::upper_bound(atoms.begin(), atoms.end(), q,
                             [](double x, const Atom& a) { return x < a.lo; });
  if (it != atoms.begin()) {
    const Atom& a = *(it - 1);
    if (q > a.lo && q < a.hi) {
      const double r_lo = (1.0 - a.lo) * a.value;
      const double r_hi = a.hi >= 1.0 ? 0.0 : (1.0 - a.hi) * d.upper_quantile(a.hi);
      return r_lo + (r_hi - r_lo) * (q - a.lo) / (a.hi - a.lo);
    }
  }
  return (1.0 - q) * d.upper_quantile(q);
}

inline double revenue_curve(const SingleDist& d, double q) { return revenue_curve(d, q, d.atoms()); }

// Ironed virtual value on a quantile grid: the negative slope of the least
// concave majorant of R, constant on each grid cell.
class IronedVirtualMap {
 public:
  IronedVirtualMap(SingleDist dist, std::vector<double> grid, std::vector<double> phi_bar,
                   std::vector<double> revenue, std::vector<double> hull, bool regular)
      : dist_(std::move(dist)),
        grid_(std::move(grid)),
        phi_bar_(std::move(phi_bar)),
        revenue_(std::move(revenue)),
        hull_(std::move(hull)),
        regular_(regular) {
    const std::size_t cells = phi_bar_.size();
    positive_suffix_.assign(cells + 1, 0.0);
    for (std::size_t c = cells; c-- > 0;) {
      positive_suffix_[c] = positive_suffix_[c + 1] + (grid_[c + 1] - grid_[c]) * std::max(phi_bar_[c], 0.0);
    }
  }

  const SingleDist& dist() const { return dist_; }
  const std::vector<double>& grid() const { return grid_; }
  const std::vector<double>& phi_bar() const { return phi_bar_; }
  const std::vector<double>& revenue() const { return revenue_; }
  const std::vector<double>& hull() const { return hull_; }
  bool regular() const { return regular_; }
  std::size_t cells() const { return phi_bar_.size(); }

  std::size_t cell_of(double q) const {
    auto it = std::upper_bound(grid_.begin(), grid_.end(), q);
    auto c = static_cast<std::ptrdiff_t>(it - grid_.begin()) - 1;
    return static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(c, 0, static_cast<std::ptrdiff_t>(cells()) - 1));
  }

  double at_quantile(double q) const { return phi_bar_[cell_of(q)]; }

  // Value-space lookup. An atom is evaluated at the middle of its quantile
  // interval.
  double at_value(double v) const {
    return at_quantile(0.5 * (dist_.cdf_below(v) + dist_.cdf(v)));
  }

  // Integral of max(phi_bar, 0) over [q, 1].
  double positive_mass_above(double q) const {
    if (q >= 1.0) return 0.0;
    if (q <= 0.0) return positive_suffix_[0];
    const std::size_t c = cell_of(q);
    return (grid_[c + 1] - q) * std::max(phi_bar_[c], 0.0) + positive_suffix_[c + 1];
  }

 private:
  SingleDist dist_;
  std::vector<double> grid_;
  std::vector<double> phi_bar_;
  std::vector<double> revenue_;
  std::vector<double> hull_;
  std::vector<double> positive_suffix_;
  bool regular_;
};

inline constexpr std::size_t kDefaultIronGrid = 4096;

// Grid: K uniform cells in quantile space plus every atom boundary, so atoms
// are ironed exactly.
inline IronedVirtualMap iron(const SingleDist& d, std::size_t K = kDefaultIronGrid) {
  expects(K >= 2, "iron: grid size K must be >= 2");
  const auto atoms = d.atoms();

  std::vector<double> grid;
  grid.reserve(K + 1 + 2 * atoms.size());
  for (std::size_t k = 0; k <= K; ++k) grid.push_back(static_cast<double>(k) / static_cast<double>(K));
  for (const auto& a : atoms) {
    grid.push_back(a.lo);
    grid.push_back(a.hi);
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  std::vector<double> revenue(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) revenue[i] = revenue_curve(d, grid[i], atoms);

  auto slope = [&](std::size_t a, std::size_t b) {
    return (revenue[b] - revenue[a]) / (grid[b] - grid[a]);
  };

  // Upper hull, monotone chain. Keeping the comparison on computed slopes
  // makes the stored slopes strictly decreasing, so phi_bar is exactly
  // monotone.
  std::vector<std::size_t> hull;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    while (hull.size() >= 2 && slope(hull[hull.size() - 2], hull.back()) <= slope(hull.back(), i)) {
      hull.pop_back();
    }
    hull.push_back(i);
  }

  std::vector<double> phi_bar(grid.size() - 1);
  std::vector<double> hull_value(grid.size());
  for (std::size_t h = 0; h + 1 < hull.size(); ++h) {
    const std::size_t a = hull[h];
    const std::size_t b = hull[h + 1];
    const double s = slope(a, b);
    for (std::size_t c = a; c < b; ++c) phi_bar[c] = -s + 0.0;
    for (std::size_t i = a; i <= b; ++i) {
      hull_value[i] = i == a ? revenue[a] : i == b ? revenue[b] : revenue[a] + s * (grid[i] - grid[a]);
    }
  }

  bool regular = true;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (hull_value[i] - revenue[i] > 1e-9 * std::max(1.0, std::abs(revenue[i]))) {
      regular = false;
      break;
    }
  }

  return IronedVirtualMap(d, std::move(grid), std::move(phi_bar), std::move(revenue), std::move(hull_value),
                          regular);
}

struct Fact1Result {
  double estimate = 0.0;
  double std_error = 0.0;
  std::uint64_t samples = 0;
};

// Monte Carlo E[phi(w) | w >= v]; for regular d this should equal v.
inline Fact1Result fact1_check(const SingleDist& d, double v, std::uint64_t N, std::uint64_t seed) {
  expects(v <= d.support_hi(), "fact1_check: v above the top of the support");
  const double lo = d.cdf_below(v);
  expects(lo < 1.0, "fact1_check: Pr[X >= v] must be positive");
  expects(N >= 2, "fact1_check: need at least 2 samples");
  auto stats = simulate(N, seed, RunningStats{}, [&](Stream& rng, std::uint64_t count, RunningStats& s) {
    for (std::uint64_t t = 0; t < count; ++t) {
      const double q = lo + (1.0 - lo) * rng.uniform();
      s.push(raw_virtual(d, d.quantile(q)));
    }
  });
  return {stats.mean, stats.std_error(), stats.count};
}

}  // namespace compcx
