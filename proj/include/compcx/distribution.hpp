#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <type_traits>
#include <variant>
#include <vector>

#include "compcx/error.hpp"
#include "compcx/random.hpp"

namespace compcx {

struct Uniform {
  double lo = 0.0;
  double hi = 1.0;
};

struct Exponential {
  double rate = 1.0;
};

// cdf 1 - 1/x on [1, p), atom of mass 1/p at p.
struct TruncatedEqualRevenue {
  double p = 1e4;
};

struct PointMass {
  double v = 0.0;
};

struct FiniteDiscrete {
  std::vector<double> values;  // strictly ascending
  std::vector<double> probs;
};

using DistKind = std::variant<Uniform, Exponential, TruncatedEqualRevenue, PointMass, FiniteDiscrete>;

// A value together with the quantile it was drawn at.
struct QuantileDraw {
  double value = 0.0;
  double quantile = 0.0;
};

// Point mass at `value` occupying quantiles [lo, hi].
struct Atom {
  double value = 0.0;
  double lo = 0.0;
  double hi = 0.0;
};

inline std::string format_number(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

class SingleDist {
 public:
  SingleDist() : SingleDist(Uniform{}) {}

  SingleDist(DistKind kind) : kind_(std::move(kind)) {  // NOLINT: implicit on purpose
    std::visit([this](const auto& k) { validate(k); }, kind_);
  }

  template <class K>
    requires std::is_constructible_v<DistKind, K> && (!std::is_same_v<std::decay_t<K>, DistKind>)
  SingleDist(K kind) : SingleDist(DistKind(std::move(kind))) {}  // NOLINT

  const DistKind& kind() const { return kind_; }

  template <class K>
  bool is() const { return std::holds_alternative<K>(kind_); }

  double support_lo() const {
    return std::visit(
        [&](const auto& k) -> double {
          using K = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<K, Uniform>) return k.lo;
          else if constexpr (std::is_same_v<K, Exponential>) return 0.0;
          else if constexpr (std::is_same_v<K, TruncatedEqualRevenue>) return 1.0;
          else if constexpr (std::is_same_v<K, PointMass>) return k.v;
          else return k.values.front();
        },
        kind_);
  }

  double support_hi() const {
    return std::visit(
        [&](const auto& k) -> double {
          using K = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<K, Uniform>) return k.hi;
          else if constexpr (std::is_same_v<K, Exponential>) return std::numeric_limits<double>::infinity();
          else if constexpr (std::is_same_v<K, TruncatedEqualRevenue>) return k.p;
          else if constexpr (std::is_same_v<K, PointMass>) return k.v;
          else return k.values.back();
        },
        kind_);
  }

  // Pr[X <= x]
  double cdf(double x) const {
    return std::visit(
        [&](const auto& k) -> double {
          using K = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<K, Uniform>) {
            if (x <= k.lo) return 0.0;
            if (x >= k.hi) return 1.0;
            return (x - k.lo) / (k.hi - k.lo);
          } else if constexpr (std::is_same_v<K, Exponential>) {
            return x <= 0.0 ? 0.0 : -std::expm1(-k.rate * x);
          } else if constexpr (std::is_same_v<K, TruncatedEqualRevenue>) {
            if (x < 1.0) return 0.0;
            if (x >= k.p) return 1.0;
            return 1.0 - 1.0 / x;
          } else if constexpr (std::is_same_v<K, PointMass>) {
            return x >= k.v ? 1.0 : 0.0;
          } else {
            auto it = std::upper_bound(k.values.begin(), k.values.end(), x);
            auto i = static_cast<std::size_t>(it - k.values.begin());
            return i == 0 ? 0.0 : cum_[i - 1];
          }
        },
        kind_);
  }

  // Pr[X < x]
  double cdf_below(double x) const {
    return std::visit(
        [&](const auto& k) -> double {
          using K = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<K, TruncatedEqualRevenue>) {
            if (x <= 1.0) return 0.0;
            if (x > k.p) return 1.0;
            return 1.0 - 1.0 / x;
          } else if constexpr (std::is_same_v<K, PointMass>) {
            return x > k.v ? 1.0 : 0.0;
          } else if constexpr (std::is_same_v<K, FiniteDiscrete>) {
            auto it = std::lower_bound(k.values.begin(), k.values.end(), x);
            auto i = static_cast<std::size_t>(it - k.values.begin());
            return i == 0 ? 0.0 : cum_[i - 1];
          } else {
            return cdf(x);
          }
        },
        kind_);
  }

  // inf{x : cdf(x) >= q}
  double quantile(double q) const {
    expects(q >= 0.0 && q <= 1.0, "quantile: q must lie in [0,1]");
    return std::visit(
        [&](const auto& k) -> double {
          using K = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<K, Uniform>) {
            return k.lo + (k.hi - k.lo) * q;
          } else if constexpr (std::is_same_v<K, Exponential>) {
            if (q >= 1.0) return std::numeric_limits<double>::infinity();
            return -std::log1p(-q) / k.rate;
          } else if constexpr (std::is_same_v<K, TruncatedEqualRevenue>) {
            if (q >= 1.0) return k.p;
            return std::min(1.0 / (1.0 - q), k.p);
          } else if constexpr (std::is_same_v<K, PointMass>) {
            return k.v;
          } else {
            auto it = std::lower_bound(cum_.begin(), cum_.end(), q);
            auto i = std::min(static_cast<std::size_t>(it - cum_.begin()), cum_.size() - 1);
            return k.values[i];
          }
        },
        kind_);
  }

  // inf{x : cdf(x) > q}; differs from quantile() only at the top of an atom
  // or across a gap in the support.
  double upper_quantile(double q) const {
    expects(q >= 0.0 && q <= 1.0, "upper_quantile: q must lie in [0,1]");
    if (q >= 1.0) return support_hi();
    return std::visit(
        [&](const auto& k) -> double {
          using K = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<K, PointMass>) {
            return k.v;
          } else if constexpr (std::is_same_v<K, FiniteDiscrete>) {
            auto it = std::upper_bound(cum_.begin(), cum_.end(), q);
            auto i = std::min(static_cast<std::size_t>(it - cum_.begin()), cum_.size() - 1);
            return k.values[i];
          } else {
            return quantile(q);
          }
        },
        kind_);
  }

  // Density where one exists; empty at atoms and outside the support.
  std::optional<double> density(double x) const {
    return std::visit(
        [&](const auto& k) -> std::optional<double> {
          using K = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<K, Uniform>) {
            if (x < k.lo || x > k.hi) return std::nullopt;
            return 1.0 / (k.hi - k.lo);
          } else if constexpr (std::is_same_v<K, Exponential>) {
            if (x < 0.0) return std::nullopt;
            return k.rate * std::exp(-k.rate * x);
          } else if constexpr (std::is_same_v<K, TruncatedEqualRevenue>) {
            if (x < 1.0 || x >= k.p) return std::nullopt;
            return 1.0 / (x * x);
          } else {
            return std::nullopt;
          }
        },
        kind_);
  }

  std::vector<Atom> atoms() const {
    return std::visit(
        [&](const auto& k) -> std::vector<Atom> {
          using K = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<K, TruncatedEqualRevenue>) {
            if (k.p <= 1.0) return {{k.p, 0.0, 1.0}};
            return {{k.p, 1.0 - 1.0 / k.p, 1.0}};
          } else if constexpr (std::is_same_v<K, PointMass>) {
            return {{k.v, 0.0, 1.0}};
          } else if constexpr (std::is_same_v<K, FiniteDiscrete>) {
            std::vector<Atom> out;
            double lo = 0.0;
            for (std::size_t i = 0; i < k.values.size(); ++i) {
              if (cum_[i] > lo) out.push_back({k.values[i], lo, cum_[i]});
              lo = cum_[i];
            }
            return out;
          } else {
            return {};
          }
        },
        kind_);
  }

  double mean() const {
    return std::visit(
        [&](const auto& k) -> double {
          using K = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<K, Uniform>) return 0.5 * (k.lo + k.hi);
          else if constexpr (std::is_same_v<K, Exponential>) return 1.0 / k.rate;
          else if constexpr (std::is_same_v<K, TruncatedEqualRevenue>) return 1.0 + std::log(k.p);
          else if constexpr (std::is_same_v<K, PointMass>) return k.v;
          else {
            double s = 0.0;
            for (std::size_t i = 0; i < k.values.size(); ++i) s += k.values[i] * k.probs[i];
            return s;
          }
        },
        kind_);
  }

  // One uniform per draw: it is both the quantile and, through quantile(),
  // the value. At an atom the quantile is therefore uniform on the atom's
  // interval, which is the randomized tie-break.
  QuantileDraw sample_coupled(Stream& rng) const {
    const double q = rng.uniform();
    return {quantile(q), q};
  }

  double sample(Stream& rng) const { return quantile(rng.uniform()); }

  // Canonical spec string, accepted back by parse_dist.
  std::string describe() const {
    return std::visit(
        [&](const auto& k) -> std::string {
          using K = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<K, Uniform>) {
            return "uniform:" + format_number(k.lo) + "," + format_number(k.hi);
          } else if constexpr (std::is_same_v<K, Exponential>) {
            return "exp:" + format_number(k.rate);
          } else if constexpr (std::is_same_v<K, TruncatedEqualRevenue>) {
            return "er:p=" + format_number(k.p);
          } else if constexpr (std::is_same_v<K, PointMass>) {
            return "point:" + format_number(k.v);
          } else {
            std::string s = "discrete:v=";
            for (std::size_t i = 0; i < k.values.size(); ++i) {
              if (i) s += ",";
              s += format_number(k.values[i]);
            }
            s += ";p=";
            for (std::size_t i = 0; i < k.probs.size(); ++i) {
              if (i) s += ",";
              s += format_number(k.probs[i]);
            }
            return s;
          }
        },
        kind_);
  }

 private:
  void validate(const Uniform& u) {
    expects(std::isfinite(u.lo) && std::isfinite(u.hi) && u.lo < u.hi, "uniform: need finite lo < hi");
  }
  void validate(const Exponential& e) {
    expects(std::isfinite(e.rate) && e.rate > 0.0, "exp: rate must be positive");
  }
  void validate(const TruncatedEqualRevenue& er) {
    expects(std::isfinite(er.p) && er.p >= 1.0, "er: truncation p must be finite and >= 1");
  }
  void validate(const PointMass& pm) { expects(std::isfinite(pm.v), "point: value must be finite"); }
  void validate(const FiniteDiscrete& fd) {
    expects(!fd.values.empty(), "discrete: need at least one value");
    expects(fd.values.size() == fd.probs.size(), "discrete: values and probs differ in length");
    double total = 0.0;
    for (std::size_t i = 0; i < fd.values.size(); ++i) {
      expects(std::isfinite(fd.values[i]), "discrete: values must be finite");
      if (i) expects(fd.values[i - 1] < fd.values[i], "discrete: values must be strictly ascending");
      expects(fd.probs[i] >= 0.0, "discrete: probs must be nonnegative");
      total += fd.probs[i];
      cum_.push_back(total);
    }
    expects(std::abs(total - 1.0) <= 1e-12, "discrete: probs must sum to 1");
    cum_.back() = 1.0;
  }

  DistKind kind_;
  std::vector<double> cum_;  // FiniteDiscrete only
};

// Additive valuation over independent items: one marginal per item.
class ProductDist {
 public:
  explicit ProductDist(std::vector<SingleDist> marginals) : marginals_(std::move(marginals)) {
    expects(!marginals_.empty(), "product distribution needs m >= 1 items");
  }

  static ProductDist iid(const SingleDist& d, std::size_t m) {
    expects(m >= 1, "product distribution needs m >= 1 items");
    return ProductDist(std::vector<SingleDist>(m, d));
  }

  std::size_t items() const { return marginals_.size(); }
  const SingleDist& operator[](std::size_t j) const { return marginals_[j]; }
  const std::vector<SingleDist>& marginals() const { return marginals_; }

  std::string describe() const {
    std::string s;
    for (std::size_t j = 0; j < marginals_.size(); ++j) {
      if (j) s += " x ";
      s += marginals_[j].describe();
    }
    return s;
  }

 private:
  std::vector<SingleDist> marginals_;
};

namespace detail {

inline double parse_number(std::string_view text, const std::string& context) {
  std::string s(text);
  while (!s.empty() && s.front() == ' ') s.erase(s.begin());
  while (!s.empty() && s.back() == ' ') s.pop_back();
  expects(!s.empty(), context + ": missing number");
  char* end = nullptr;
  const double x = std::strtod(s.c_str(), &end);
  expects(end == s.c_str() + s.size(), context + ": cannot parse number '" + s + "'");
  return x;
}

inline std::vector<double> parse_list(std::string_view text, const std::string& context) {
  std::vector<double> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = text.find(',', start);
    out.push_back(parse_number(text.substr(start, comma - start), context));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

inline std::string_view strip_key(std::string_view text, std::string_view key) {
  if (text.substr(0, key.size()) == key) return text.substr(key.size());
  return text;
}

}  // namespace detail

// Grammar: uniform:LO,HI | exp:RATE | er[:p=P] | er:P | point:V
//          | discrete:v=V1,V2,...;p=P1,P2,...
// A bare "er" uses `default_cap`.
inline SingleDist parse_dist(std::string_view spec, double default_cap = 1e4) {
  const auto colon = spec.find(':');
  const std::string_view name = spec.substr(0, colon);
  const std::string_view args = colon == std::string_view::npos ? std::string_view{} : spec.substr(colon + 1);
  const std::string ctx = "distribution '" + std::string(spec) + "'";

  if (name == "uniform") {
    auto xs = detail::parse_list(args, ctx);
    expects(xs.size() == 2, ctx + ": uniform takes lo,hi");
    return Uniform{xs[0], xs[1]};
  }
  if (name == "exp") {
    return Exponential{detail::parse_number(args, ctx)};
  }
  if (name == "er") {
    if (args.empty()) return TruncatedEqualRevenue{default_cap};
    return TruncatedEqualRevenue{detail::parse_number(detail::strip_key(args, "p="), ctx)};
  }
  if (name == "point") {
    return PointMass{detail::parse_number(args, ctx)};
  }
  if (name == "discrete") {
    const auto semi = args.find(';');
    expects(semi != std::string_view::npos, ctx + ": discrete needs v=...;p=...");
    const auto vpart = args.substr(0, semi);
    const auto ppart = args.substr(semi + 1);
    expects(vpart.substr(0, 2) == "v=" && ppart.substr(0, 2) == "p=", ctx + ": discrete needs v=...;p=...");
    return FiniteDiscrete{detail::parse_list(vpart.substr(2), ctx), detail::parse_list(ppart.substr(2), ctx)};
  }
  throw precondition_error(ctx + ": unknown kind '" + std::string(name) + "'");
}

}  // namespace compcx
