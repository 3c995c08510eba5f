#pragma once

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "compcx/auction.hpp"
#include "compcx/benchmark.hpp"
#include "compcx/distribution.hpp"
#include "compcx/error.hpp"
#include "compcx/monte_carlo.hpp"
#include "compcx/quantile_experiments.hpp"
#include "compcx/reproductions.hpp"
#include "compcx/virtual_value.hpp"

namespace compcx::cli {

using Json = nlohmann::ordered_json;

inline constexpr int kExitOk = 0;
inline constexpr int kExitClaimFailed = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitPrecondition = 3;

struct Table {
  std::string name;
  std::vector<Json> rows;
};

struct Emission {
  Json config = Json::object();
  std::vector<Table> tables;
  bool failed = false;  // a checked claim did not hold

  Table& table(const std::string& name) {
    for (auto& t : tables) {
      if (t.name == name) return t;
    }
    tables.push_back({name, {}});
    return tables.back();
  }
};

namespace detail {

inline std::string csv_cell(const Json& v) {
  if (v.is_null()) return "";
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_integer() || v.is_number_unsigned()) return v.dump();
  if (v.is_number()) return format_number(v.get<double>());
  std::string s = v.is_string() ? v.get<std::string>() : v.dump();
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char ch : s) {
    if (ch == '"') q += '"';
    q += ch;
  }
  return q + "\"";
}

// JSON has no infinities; they are written as strings.
inline Json num(double x) {
  if (std::isfinite(x)) return x;
  return std::isnan(x) ? "nan" : x > 0 ? "inf" : "-inf";
}

inline void write_csv(const Emission& e, std::ostream& out) {
  const bool many = e.tables.size() > 1;
  bool first = true;
  for (const auto& t : e.tables) {
    if (!first) out << '\n';
    first = false;
    if (many) out << "# " << t.name << '\n';
    if (t.rows.empty()) continue;
    bool lead = true;
    for (const auto& [k, v] : t.rows.front().items()) {
      out << (lead ? "" : ",") << k;
      lead = false;
    }
    out << '\n';
    for (const auto& row : t.rows) {
      lead = true;
      for (const auto& [k, v] : row.items()) {
        out << (lead ? "" : ",") << csv_cell(v);
        lead = false;
      }
      out << '\n';
    }
  }
}

inline void write_json(const Emission& e, std::ostream& out) {
  Json doc = Json::object();
  doc["config"] = e.config;
  for (const auto& t : e.tables) doc[t.name] = t.rows;
  out << doc.dump(2) << '\n';
}

inline Json estimate_json(const RevenueEstimate& r) {
  return Json{{"mean", num(r.mean)}, {"std_error", num(r.std_error)}, {"samples", r.samples}};
}

}  // namespace detail

// Operation -> the subcommand that reaches it, with a small invocation that
// exercises it. Every operation appears exactly once.
struct CommandEntry {
  std::string operation;
  std::vector<std::string> example;  // example[0] is the subcommand
};

inline const std::vector<CommandEntry>& command_table() {
  static const std::vector<CommandEntry> table = {
      {"cdf", {"virtual", "--dist", "er:p=10", "--cdf", "2"}},
      {"quantile", {"virtual", "--dist", "er:p=100", "--quantile", "0.5"}},
      {"sample_coupled", {"virtual", "--dist", "point:5", "--draw", "5"}},
      {"raw_virtual", {"virtual", "--dist", "uniform:0,1", "--at", "0.75"}},
      {"iron", {"virtual", "--dist", "discrete:v=1,10;p=0.9,0.1", "--grid", "16", "--dump"}},
      {"fact1_check", {"virtual", "--dist", "uniform:0,1", "--cond-mean", "0.5", "--samples", "20000"}},
      {"myerson_item_revenue", {"revenue", "--mech", "myerson", "--dist", "uniform:0,1", "-n", "1", "--samples", "20000"}},
      {"myerson_item_revenue_direct",
       {"revenue", "--mech", "myerson-direct", "--dist", "uniform:0,1", "-n", "2", "--samples", "20000"}},
      {"vcg_item_revenue", {"revenue", "--mech", "vcg", "--dist", "uniform:0,1", "-n", "2", "--samples", "20000"}},
      {"vcg_virtual_surplus_check",
       {"revenue", "--mech", "phi-check", "--dist", "uniform:0,1", "-n", "3", "--samples", "20000"}},
      {"srev", {"revenue", "--mech", "srev", "--dist", "uniform:0,1", "-m", "2", "-n", "1", "--samples", "20000"}},
      {"vcg", {"revenue", "--mech", "vcg", "--dist", "uniform:0,1", "-m", "2", "-n", "2", "--samples", "20000"}},
      {"bulow_klemperer_check", {"revenue", "--mech", "bk", "--dist", "uniform:0,1", "-n", "1", "--samples", "20000"}},
      {"feldman_posted_price", {"revenue", "--mech", "posted-price", "-n", "2", "-m", "64", "--samples", "2000"}},
      {"three_tier_mechanism",
       {"revenue", "--mech", "three-tier", "-n", "10000", "--q", "100", "--samples", "20"}},
      {"assign_regions", {"benchmark", "--dist", "uniform:0,1", "-m", "3", "-n", "2", "--regions", "--samples", "20000"}},
      {"efftw_bound", {"benchmark", "--dist", "uniform:0,1", "-m", "2", "-n", "1", "--bound", "efftw", "--samples", "20000"}},
      {"obs1_bound", {"benchmark", "--dist", "uniform:0,1", "-m", "3", "-n", "2", "--bound", "obs1", "--samples", "20000"}},
      {"xl_chain_bound", {"benchmark", "--dist", "uniform:0,1", "-m", "2", "-n", "2", "--bound", "xl", "--samples", "20000"}},
      {"xb_chain_bound",
       {"benchmark", "--dist", "uniform:0,1", "-m", "2", "-n", "4", "-l", "2", "--bound", "xb", "--samples", "20000"}},
      {"little_chain", {"benchmark", "--dist", "uniform:0,1", "-m", "4", "-n", "2", "--chain", "little", "--samples", "20000"}},
      {"big_chain", {"benchmark", "--dist", "uniform:0,1", "-m", "2", "-n", "16", "--chain", "big", "--samples", "20000"}},
      {"sample_xs", {"dominance", "--draw", "5", "--var", "xs", "-n", "2", "-c", "3"}},
      {"sample_w", {"dominance", "--draw", "5", "--var", "w", "-n", "5", "-l", "2"}},
      {"sample_xb", {"dominance", "--draw", "5", "--var", "xb", "-n", "5", "-l", "2"}},
      {"sample_xl", {"dominance", "--draw", "5", "--var", "xl", "-n", "2", "-m", "4"}},
      {"sample_xl_prime", {"dominance", "--draw", "5", "--var", "xl-prime", "-n", "2", "-m", "4"}},
      {"dominance_test", {"dominance", "--pair", "xs-xb", "-n", "10", "-l", "3", "--samples", "20000"}},
      {"ystar_tail", {"dominance", "--ystar", "0.5", "-n", "2", "-m", "3", "--samples", "20000"}},
      {"prop_key_conditional", {"dominance", "--tail-compare", "0.5", "-n", "10", "-l", "5", "--samples", "20000"}},
      {"er_order_stat", {"reproduce", "--driver", "er-order-stat", "-x", "4", "-y", "12", "--samples", "20000"}},
      {"er_benchmark_decomposition",
       {"reproduce", "--driver", "er-decomposition", "-n", "4", "-m", "2", "--samples", "20000"}},
      {"bign_tightness", {"reproduce", "--driver", "bign-tightness", "-n", "16", "-m", "4", "--samples", "20000"}},
      {"two_item_sum_tail", {"reproduce", "--driver", "two-item-tail", "--q", "5", "--samples", "20000"}},
      {"appendix_b_revenue", {"reproduce", "--driver", "three-tier-surplus", "-n", "10000", "--samples", "20"}},
      {"little_n_tightness", {"reproduce", "--driver", "little-n", "-n", "2", "-m", "64", "--samples", "2000"}},
      {"run_claim", {"reproduce", "--claim", "er_order_statistics", "--samples", "20000"}},
  };
  return table;
}

// Options shared by every subcommand.
struct Globals {
  std::string out = "csv";
  std::uint64_t seed = 0;
  std::uint64_t samples = 0;  // 0: command default
  double trunc = 1e4;
  unsigned workers = 0;
  bool samples_given() const { return samples != 0; }
  std::uint64_t samples_or(std::uint64_t fallback) const { return samples_given() ? samples : fallback; }
};

inline constexpr std::uint64_t kDefaultSamples = 1000000;

namespace detail {

inline Json globals_json(const Globals& g, const std::string& command) {
  Json c = Json::object();
  c["command"] = command;
  c["seed"] = g.seed;
  c["samples"] = g.samples_given() ? Json(g.samples) : Json(nullptr);
  c["trunc"] = g.trunc;
  c["out"] = g.out;
  return c;
}

inline ProductDist product_from(const std::vector<std::string>& specs, std::size_t m, double trunc) {
  expects(!specs.empty(), "need at least one --dist");
  std::vector<SingleDist> ds;
  for (const auto& s : specs) ds.push_back(parse_dist(s, trunc));
  if (ds.size() == 1) return ProductDist::iid(ds.front(), m);
  expects(m == 1 || m == ds.size(), "-m must match the number of --dist options");
  return ProductDist(ds);
}

// ---------------------------------------------------------------- virtual

struct VirtualOpts {
  std::string dist;
  std::size_t grid = kDefaultIronGrid;
  std::vector<double> at;
  bool dump = false;
  std::vector<double> cond_mean;
  std::vector<double> cdf;
  std::vector<double> quantile;
  std::size_t draw = 0;
};

inline void run_virtual(const VirtualOpts& o, const Globals& g, Emission& e) {
  const SingleDist d = parse_dist(o.dist, g.trunc);
  e.config["dist"] = d.describe();
  e.config["grid"] = o.grid;
  const bool need_map = o.dump || !o.at.empty() ||
                        (o.cond_mean.empty() && o.cdf.empty() && o.quantile.empty() && o.draw == 0);
  if (need_map) {
    const auto map = iron(d, o.grid);
    e.table("summary").rows.push_back(Json{{"dist", d.describe()},
                                           {"grid", o.grid},
                                           {"cells", map.cells()},
                                           {"regular", map.regular()},
                                           {"phi_bar_min", num(map.phi_bar().front())},
                                           {"phi_bar_max", num(map.phi_bar().back())}});
    for (double v : o.at) {
      e.table("at").rows.push_back(
          Json{{"v", num(v)}, {"phi", num(raw_virtual(d, v))}, {"phi_bar", num(map.at_value(v))}, {"regular", map.regular()}});
    }
    if (o.dump) {
      auto& t = e.table("grid");
      for (std::size_t c = 0; c < map.cells(); ++c) {
        t.rows.push_back(Json{{"q_lo", num(map.grid()[c])},
                              {"q_hi", num(map.grid()[c + 1])},
                              {"revenue", num(map.revenue()[c])},
                              {"hull", num(map.hull()[c])},
                              {"phi_bar", num(map.phi_bar()[c])}});
      }
    }
  }
  for (double x : o.cdf) e.table("cdf").rows.push_back(Json{{"x", num(x)}, {"cdf", num(d.cdf(x))}});
  for (double q : o.quantile) {
    e.table("quantile").rows.push_back(Json{{"q", num(q)}, {"quantile", num(d.quantile(q))}});
  }
  std::uint64_t stream = 0;
  for (double v : o.cond_mean) {
    const auto r = fact1_check(d, v, g.samples_or(kDefaultSamples), split_seed(g.seed, stream++));
    e.table("cond_mean").rows.push_back(Json{{"v", num(v)},
                                         {"estimate", num(r.estimate)},
                                         {"std_error", num(r.std_error)},
                                         {"samples", r.samples},
                                         {"within_3se", std::abs(r.estimate - v) <= 3.0 * r.std_error}});
  }
  if (o.draw > 0) {
    Stream rng(g.seed);
    auto& t = e.table("draws");
    for (std::size_t k = 0; k < o.draw; ++k) {
      const auto qd = d.sample_coupled(rng);
      t.rows.push_back(Json{{"value", num(qd.value)}, {"quantile", num(qd.quantile)}});
    }
  }
}

// ---------------------------------------------------------------- revenue

struct RevenueOpts {
  std::string mech;
  std::vector<std::string> dists;
  std::size_t n = 1;
  std::size_t m = 1;
  std::optional<double> price;
  double q = 100.0;
  double high_price = 1e8;
  double value_cap = 0.0;
  bool force_low = false;
};

inline void run_revenue(const RevenueOpts& o, const Globals& g, Emission& e) {
  const std::uint64_t N = g.samples_or(kDefaultSamples);
  e.config["mech"] = o.mech;
  e.config["n"] = o.n;
  auto& t = e.table("revenue");
  auto row = [&](const RevenueEstimate& r) {
    Json j{{"mech", o.mech}, {"n", o.n}};
    j.update(estimate_json(r));
    j["seed"] = g.seed;
    return j;
  };
  if (o.mech == "posted-price") {
    PostedPriceParams prm{o.n, o.m, g.trunc, o.price};
    e.config["m"] = o.m;
    const auto r = feldman_posted_price(prm, N, g.seed);
    Json j = row(r.revenue);
    j["m"] = o.m;
    j["bundle"] = r.bundle;
    j["bundle_rounded"] = r.bundle_rounded;
    j["price"] = num(r.price);
    j["purchase_rate"] = num(r.purchase_rate);
    j["revenue_cap"] = num(r.revenue_cap);
    j["max_observed"] = num(r.max_observed);
    t.rows.push_back(j);
    return;
  }
  if (o.mech == "three-tier") {
    ThreeTierParams prm;
    prm.n = o.n;
    prm.q = o.q;
    prm.p = o.high_price;
    prm.value_cap = o.value_cap;
    prm.force_low = o.force_low;
    e.config["q"] = o.q;
    e.config["high_price"] = o.high_price;
    e.config["value_cap"] = prm.cap();
    e.config["force_low"] = o.force_low;
    const auto r = three_tier_mechanism(prm, N, g.seed);
    Json j = row(r.revenue);
    j["k"] = num(r.k);
    j["target"] = num(r.target);
    j["mean_medium"] = num(r.mean_medium);
    j["mean_high"] = num(r.mean_high);
    j["max_observed"] = num(r.max_observed);
    t.rows.push_back(j);
    return;
  }
  const auto pd = product_from(o.dists, o.m, g.trunc);
  e.config["dist"] = pd.describe();
  e.config["m"] = pd.items();
  const bool single = pd.items() == 1;
  if (o.mech == "myerson" || o.mech == "myerson-direct" || o.mech == "bk" || o.mech == "phi-check") {
    expects(single, o.mech + ": needs a single item");
  }
  if (o.mech == "myerson") {
    t.rows.push_back(row(myerson_item_revenue(pd[0], o.n, N, g.seed)));
  } else if (o.mech == "myerson-direct") {
    t.rows.push_back(row(myerson_item_revenue_direct(iron(pd[0]), o.n, N, g.seed)));
  } else if (o.mech == "vcg") {
    t.rows.push_back(row(single ? vcg_item_revenue(pd[0], o.n, N, g.seed) : vcg(pd, o.n, N, g.seed)));
  } else if (o.mech == "srev") {
    t.rows.push_back(row(srev(pd, o.n, N, g.seed)));
  } else if (o.mech == "bk") {
    const auto r = bulow_klemperer_check(pd[0], o.n, N, g.seed);
    t.rows.push_back(Json{{"mech", o.mech},
                          {"n", o.n},
                          {"vcg_n_plus_1", num(r.vcg_more.mean)},
                          {"vcg_std_error", num(r.vcg_more.std_error)},
                          {"rev_n", num(r.rev.mean)},
                          {"rev_std_error", num(r.rev.std_error)},
                          {"margin", num(r.margin)},
                          {"std_error", num(r.std_error)},
                          {"holds", r.holds},
                          {"seed", g.seed}});
    e.failed = !r.holds;
  } else if (o.mech == "phi-check") {
    const auto r = vcg_virtual_surplus_check(pd[0], o.n, N, g.seed);
    const bool ok = std::abs(r.second_price.mean - r.raw_phi_of_max.mean) <= 3.0 * r.raw_gap_std_error &&
                    std::abs(r.raw_phi_of_max.mean - r.ironed_phi_of_max.mean) <= 3.0 * r.ironed_gap_std_error;
    t.rows.push_back(Json{{"mech", o.mech},
                          {"n", o.n},
                          {"second_price", num(r.second_price.mean)},
                          {"raw_phi_of_max", num(r.raw_phi_of_max.mean)},
                          {"ironed_phi_of_max", num(r.ironed_phi_of_max.mean)},
                          {"raw_gap_std_error", num(r.raw_gap_std_error)},
                          {"ironed_gap_std_error", num(r.ironed_gap_std_error)},
                          {"agree_within_3se", ok},
                          {"seed", g.seed}});
    e.failed = !ok;
  }
}

// ---------------------------------------------------------------- benchmark

struct BenchmarkOpts {
  std::vector<std::string> dists;
  std::size_t n = 1;
  std::size_t m = 1;
  std::string chain;
  std::string bound = "efftw";
  std::size_t l = 0;  // 0: default
  std::optional<std::size_t> c;
  bool regions = false;
};

inline void run_benchmark(const BenchmarkOpts& o, const Globals& g, Emission& e) {
  const std::uint64_t N = g.samples_or(kDefaultSamples);
  const auto pd = product_from(o.dists, o.m, g.trunc);
  const std::size_t m = pd.items();
  e.config["dist"] = pd.describe();
  e.config["n"] = o.n;
  e.config["m"] = m;
  const double root = std::sqrt(static_cast<double>(o.n * m));
  const std::size_t l = o.l ? o.l
                            : static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(o.n) / m))) + 1;

  if (o.regions) {
    const auto f = region_frequencies(pd, o.n, N, g.seed);
    auto& t = e.table("regions");
    for (std::size_t j = 0; j < m; ++j) t.rows.push_back(Json{{"item", j + 1}, {"frequency", num(f[j])}});
    return;
  }
  if (!o.chain.empty()) {
    ChainReport r;
    if (o.chain == "little") {
      const std::size_t c = o.c.value_or(little_n_extra_bidders(o.n, m));
      r = little_chain(pd, o.n, c, N, g.seed);
    } else {
      const std::size_t c = o.c.value_or(static_cast<std::size_t>(std::ceil(5.0 * root + 4.0 * (m - 1.0))));
      e.config["l"] = l;
      r = big_chain(pd, o.n, l, c, N, g.seed);
    }
    e.config["chain"] = o.chain;
    e.config["c"] = r.extra_bidders;
    auto& b = e.table("bounds");
    for (std::size_t a = 0; a < r.names.size(); ++a) {
      b.rows.push_back(Json{{"bound", r.names[a]}, {"mean", num(r.bounds[a].mean)}, {"std_error", num(r.bounds[a].std_error)}});
    }
    auto& lt = e.table("links");
    for (const auto& link : r.links) {
      lt.rows.push_back(Json{{"from", link.from},
                             {"to", link.to},
                             {"diff", num(link.diff)},
                             {"std_error", num(link.std_error)},
                             {"holds", link.holds}});
    }
    e.failed = !r.all_hold;
    return;
  }
  RevenueEstimate r;
  if (o.bound == "efftw") r = efftw_bound(pd, o.n, N, g.seed);
  else if (o.bound == "obs1") r = obs1_bound(pd, o.n, N, g.seed);
  else if (o.bound == "xl") r = xl_chain_bound(pd, o.n, N, g.seed);
  else if (o.bound == "xb") {
    e.config["l"] = l;
    r = xb_chain_bound(pd, o.n, l, N, g.seed);
  } else if (o.bound == "srev") {
    r = srev(pd, o.n + o.c.value_or(0), N, g.seed);
  } else {
    r = vcg(pd, o.n + o.c.value_or(0), N, g.seed);
  }
  e.config["bound"] = o.bound;
  Json j{{"bound", o.bound}};
  j.update(estimate_json(r));
  e.table("bound").rows.push_back(j);
}

// ---------------------------------------------------------------- dominance

struct DominanceOpts {
  std::string pair;
  std::size_t n = 1;
  std::size_t m = 1;
  std::size_t l = 2;
  std::optional<std::size_t> c;
  double delta = 1e-3;
  std::size_t grid = 199;
  bool curves = false;
  std::optional<double> ystar;
  std::optional<double> prop_key;
  std::size_t draw = 0;
  std::string var = "xs";
};

inline void run_dominance(const DominanceOpts& o, const Globals& g, Emission& e) {
  const std::uint64_t N = g.samples_or(kDefaultSamples);
  e.config["n"] = o.n;
  if (o.draw > 0) {
    Stream rng(g.seed);
    e.config["var"] = o.var;
    auto& t = e.table("draws");
    for (std::size_t k = 0; k < o.draw; ++k) {
      if (o.var == "w") {
        const auto w = sample_w(o.n, o.l, rng);
        t.rows.push_back(Json{{"w", num(w.w)}, {"top", num(w.top)}, {"lth", num(w.lth)}});
        continue;
      }
      double x = 0.0;
      if (o.var == "xs") x = sample_xs(o.n, o.c.value_or(0), rng);
      else if (o.var == "xb") x = sample_xb(o.n, o.l, rng);
      else if (o.var == "xl") x = sample_xl(o.n, o.m, rng);
      else x = sample_xl_prime(o.n, o.m, rng);
      t.rows.push_back(Json{{o.var, num(x)}});
    }
    return;
  }
  if (o.ystar) {
    e.config["m"] = o.m;
    e.config["p"] = *o.ystar;
    const double exact = ystar_tail(o.n, o.m, *o.ystar);
    const auto mc = ystar_conditional_mc(o.n, o.m, *o.ystar, N, g.seed, o.delta);
    const bool ok = std::abs(mc.estimate - exact) <= mc.epsilon;
    e.table("ystar").rows.push_back(Json{{"n", o.n},
                                         {"m", o.m},
                                         {"p", num(*o.ystar)},
                                         {"closed_form", num(exact)},
                                         {"estimate", num(mc.estimate)},
                                         {"std_error", num(mc.std_error)},
                                         {"epsilon", num(mc.epsilon)},
                                         {"within_band", ok}});
    e.failed = !ok;
    return;
  }
  if (o.prop_key) {
    const std::size_t c = o.c.value_or(big_n_extra_bidders(o.n, o.l));
    e.config["l"] = o.l;
    e.config["c"] = c;
    e.config["p"] = *o.prop_key;
    const auto r = prop_key_conditional(o.n, o.l, c, *o.prop_key, N, g.seed);
    e.table("tail_comparison").rows.push_back(Json{{"n", o.n},
                                            {"l", o.l},
                                            {"c", c},
                                            {"p", num(*o.prop_key)},
                                            {"lhs", num(r.lhs)},
                                            {"rhs", num(r.rhs)},
                                            {"rhs_std_error", num(r.rhs_std_error)},
                                            {"holds", r.holds}});
    const double threshold = o.l == 2 ? static_cast<double>(o.n) : 4.0 * o.n / (o.l - 1.0);
    e.failed = static_cast<double>(c) >= threshold && !r.holds;
    return;
  }
  expects(!o.pair.empty(), "dominance: need one of --pair, --ystar, --tail-compare, --draw");
  std::size_t c = 0;
  double threshold = 0.0;
  QuantileSampler a, b;
  if (o.pair == "xs-xb") {
    expects(o.l >= 2 && o.l <= o.n, "dominance: need 2 <= l <= n");
    c = o.c.value_or(big_n_extra_bidders(o.n, o.l));
    threshold = 4.0 * o.n / (o.l - 1.0);
    b = [n = o.n, l = o.l](Stream& r) { return sample_xb(n, l, r); };
    e.config["l"] = o.l;
  } else {
    c = o.c.value_or(little_n_extra_bidders(o.n, o.m));
    threshold = o.n * (2.0 + std::log(1.0 + static_cast<double>(o.m) / o.n));
    b = [n = o.n, m = o.m](Stream& r) { return sample_xl(n, m, r); };
    e.config["m"] = o.m;
  }
  a = [n = o.n, c](Stream& r) { return sample_xs(n, c, r); };
  e.config["pair"] = o.pair;
  e.config["c"] = c;
  e.config["delta"] = o.delta;
  e.config["grid"] = o.grid;
  const auto r = dominance_test(a, b, N, o.grid, o.delta, g.seed);
  const bool above = static_cast<double>(c) >= threshold;
  e.table("dominance").rows.push_back(Json{{"pair", o.pair},
                                           {"n", o.n},
                                           {"m", o.m},
                                           {"l", o.l},
                                           {"c", c},
                                           {"threshold", num(threshold)},
                                           {"samples", r.samples},
                                           {"epsilon", num(r.epsilon)},
                                           {"max_excess", num(r.max_excess)},
                                           {"dominates", r.dominates}});
  if (o.curves) {
    auto& t = e.table("curves");
    for (std::size_t k = 0; k < r.grid.size(); ++k) {
      t.rows.push_back(Json{{"probe", num(r.grid[k])}, {"cdf_a", num(r.cdf_a[k])}, {"cdf_b", num(r.cdf_b[k])}});
    }
  }
  e.failed = above && !r.dominates;
}

// ---------------------------------------------------------------- reproduce

struct ReproduceOpts {
  std::vector<std::string> claims;
  bool all = false;
  bool list = false;
  bool timing = false;
  std::string driver;
  std::size_t n = 0, m = 0, x = 0, y = 0;
  std::optional<std::size_t> c;
  double q = 5.0;
};

inline Json repro_row(const Claim& claim, const ReproResult& r, bool timing) {
  Json j{{"claim", claim.id},
         {"criterion", claim.criterion},
         {"name", r.name},
         {"computed", num(r.computed)},
         {"target", num(r.target)},
         {"tolerance", num(r.tolerance)},
         {"mode", r.mode()},
         {"pass", r.pass}};
  if (timing) j["runtime"] = num(r.runtime);
  j["details"] = r.details;
  return j;
}

inline void run_driver(const ReproduceOpts& o, const Globals& g, Emission& e) {
  const std::uint64_t N = g.samples_or(kDefaultSamples);
  auto& t = e.table("driver");
  e.config["driver"] = o.driver;
  if (o.driver == "er-order-stat") {
    const double p = g.trunc == 1e4 ? 1e6 : g.trunc;
    e.config["x"] = o.x;
    e.config["y"] = o.y;
    e.config["p"] = p;
    const auto r = er_order_stat(o.x, o.y, N, g.seed, p);
    Json j{{"x", o.x}, {"y", o.y}};
    j.update(estimate_json(r));
    j["target"] = num(static_cast<double>(o.y) / (o.x - 1.0));
    t.rows.push_back(j);
  } else if (o.driver == "er-decomposition") {
    const auto r = er_benchmark_decomposition(o.n, o.m, N, g.seed, g.trunc);
    t.rows.push_back(Json{{"n", o.n},
                          {"m", o.m},
                          {"p", num(g.trunc)},
                          {"benchmark", num(r.benchmark.mean)},
                          {"benchmark_std_error", num(r.benchmark.std_error)},
                          {"nm_plus_offregion", num(r.nm_plus_offregion.mean)},
                          {"gap", num(r.gap.mean)},
                          {"gap_std_error", num(r.gap.std_error)},
                          {"relative_gap", num(r.relative_gap)},
                          {"offregion_per_item", num(r.offregion_per_item.mean)}});
  } else if (o.driver == "bign-tightness") {
    const double p = g.trunc == 1e4 ? 1e5 : g.trunc;
    const auto r = bign_tightness(o.n, o.m, o.c, N, g.seed, p);
    t.rows.push_back(Json{{"n", o.n},
                          {"m", o.m},
                          {"c", r.c},
                          {"p", num(p)},
                          {"offregion_per_item", num(r.offregion_per_item.mean)},
                          {"offregion_std_error", num(r.offregion_per_item.std_error)},
                          {"offregion_target", num(r.offregion_target)},
                          {"vcg_n_plus_c", num(r.vcg_more.mean)},
                          {"vcg_std_error", num(r.vcg_more.std_error)},
                          {"vcg_target", num(r.vcg_target)},
                          {"benchmark", num(r.benchmark.mean)},
                          {"implied_c", num(r.implied_c)}});
  } else if (o.driver == "two-item-tail") {
    const auto mc = two_item_sum_tail_mc(o.q, N, g.seed);
    t.rows.push_back(Json{{"q", num(o.q)},
                          {"closed_form", num(two_item_sum_tail(o.q))},
                          {"estimate", num(mc.estimate)},
                          {"std_error", num(mc.std_error)},
                          {"epsilon", num(mc.epsilon)}});
  } else if (o.driver == "three-tier-surplus") {
    const auto r = appendix_b_revenue(o.n, N, g.seed);
    t.rows.push_back(Json{{"n", o.n},
                          {"revenue", num(r.mechanism.revenue.mean)},
                          {"std_error", num(r.mechanism.revenue.std_error)},
                          {"target", num(r.mechanism.target)},
                          {"k", num(r.mechanism.k)},
                          {"surplus_over_2n", num(r.surplus)},
                          {"ln_n_over_10", num(r.surplus_target)}});
  } else {
    const auto r = little_n_tightness(o.n, o.m, N, g.seed, g.trunc);
    t.rows.push_back(Json{{"n", o.n},
                          {"m", o.m},
                          {"revenue", num(r.mechanism.revenue.mean)},
                          {"std_error", num(r.mechanism.revenue.std_error)},
                          {"price", num(r.mechanism.price)},
                          {"purchase_rate", num(r.mechanism.purchase_rate)},
                          {"implied_c", num(r.implied_c)},
                          {"min_integer_c", r.min_c}});
  }
}

inline void run_reproduce(const ReproduceOpts& o, const Globals& g, Emission& e) {
  if (o.list) {
    auto& t = e.table("claims");
    for (const auto& c : claim_registry()) {
      t.rows.push_back(Json{{"claim", c.id}, {"criterion", c.criterion}, {"samples", c.samples}, {"summary", c.summary}});
    }
    return;
  }
  if (!o.driver.empty()) {
    run_driver(o, g, e);
    return;
  }
  expects(o.all || !o.claims.empty(), "reproduce: need --all, --claim, --driver or --list");
  std::vector<const Claim*> chosen;
  if (o.all) {
    for (const auto& c : claim_registry()) chosen.push_back(&c);
  } else {
    for (const auto& id : o.claims) chosen.push_back(&find_claim(id));
  }
  Json ids = Json::array();
  for (const auto* c : chosen) ids.push_back(c->id);
  e.config["claims"] = ids;
  auto& t = e.table("results");
  const std::optional<std::uint64_t> override_n =
      g.samples_given() ? std::optional<std::uint64_t>(g.samples) : std::nullopt;
  for (const auto* c : chosen) {
    for (const auto& r : run_claim(*c, g.seed, override_n)) {
      t.rows.push_back(repro_row(*c, r, o.timing));
      if (!r.pass) e.failed = true;
    }
  }
}

}  // namespace detail

// Parses argv (without the program name), runs one operation and writes
// its tables to `out`. Returns the process exit code.
inline int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Competition complexity toolkit: virtual values, revenue, benchmarks, dominance"};
  app.name("compcx");
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--out", g.out, "output format")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--seed", g.seed, "master seed");
  app.add_option("--samples", g.samples, "Monte Carlo samples (command default when omitted)")
      ->check(CLI::PositiveNumber);
  app.add_option("--trunc", g.trunc, "default truncation point for ER distributions")->check(CLI::PositiveNumber);
  app.add_option("--workers", g.workers, "worker threads, 0 for one per core");

  detail::VirtualOpts vo;
  auto* virt = app.add_subcommand("virtual", "virtual values, ironing, cdf/quantile, Fact-1 check");
  virt->add_option("--dist", vo.dist, "distribution spec")->required();
  virt->add_option("--grid", vo.grid, "ironing grid size K")->check(CLI::Range(std::size_t{2}, std::size_t{1} << 24));
  virt->add_option("--at", vo.at, "evaluate phi and phi_bar at these values");
  virt->add_flag("--dump", vo.dump, "write the full ironing grid");
  virt->add_option("--cond-mean", vo.cond_mean, "Monte Carlo E[phi(w) | w >= v] at these v");
  virt->add_option("--cdf", vo.cdf, "evaluate the cdf");
  virt->add_option("--quantile", vo.quantile, "evaluate the generalized inverse");
  virt->add_option("--draw", vo.draw, "coupled (value, quantile) draws");

  detail::RevenueOpts ro;
  double price = 0.0;
  auto* rev = app.add_subcommand("revenue", "Monte Carlo revenue of a mechanism");
  rev->add_option("--mech", ro.mech, "mechanism")
      ->required()
      ->check(CLI::IsMember({"myerson", "myerson-direct", "vcg", "srev", "bk", "phi-check", "posted-price", "three-tier"}));
  rev->add_option("--dist", ro.dists, "distribution spec, once per item or once for i.i.d. items");
  rev->add_option("-n", ro.n, "bidders")->check(CLI::PositiveNumber);
  rev->add_option("-m", ro.m, "items")->check(CLI::PositiveNumber);
  auto* price_opt = rev->add_option("--price", price, "posted price override (posted-price)");
  rev->add_option("--q", ro.q, "medium price per item (three-tier)");
  rev->add_option("--high-price", ro.high_price, "high price for both items (three-tier)");
  rev->add_option("--value-cap", ro.value_cap, "truncation of three-tier values, 0 for 10x the high price");
  rev->add_flag("--force-low", ro.force_low, "every three-tier bidder declares low");

  detail::BenchmarkOpts bo;
  std::size_t bench_c = 0;
  auto* bench = app.add_subcommand("benchmark", "EFFTW benchmark and the chains of upper bounds");
  bench->add_option("--dist", bo.dists, "distribution spec, once per item or once for i.i.d. items")->required();
  bench->add_option("-n", bo.n, "bidders")->check(CLI::PositiveNumber);
  bench->add_option("-m", bo.m, "items")->check(CLI::PositiveNumber);
  bench->add_option("--chain", bo.chain, "verify a whole chain")->check(CLI::IsMember({"little", "big"}));
  bench->add_option("--bound", bo.bound, "single bound")->check(CLI::IsMember({"efftw", "obs1", "xl", "xb", "srev", "vcg"}));
  bench->add_option("-l", bo.l, "order index for the big-n bounds");
  auto* bench_c_opt = bench->add_option("-c", bench_c, "extra bidders");
  bench->add_flag("--regions", bo.regions, "region frequencies");

  detail::DominanceOpts dopt;
  std::size_t dom_c = 0;
  double ystar_p = 0.0, prop_p = 0.0;
  auto* dom = app.add_subcommand("dominance", "stochastic dominance between quantile experiments");
  dom->add_option("--pair", dopt.pair, "which pair to compare")->check(CLI::IsMember({"xs-xb", "xs-xl"}));
  dom->add_option("-n", dopt.n, "bidders")->check(CLI::PositiveNumber);
  dom->add_option("-m", dopt.m, "items")->check(CLI::PositiveNumber);
  dom->add_option("-l", dopt.l, "order index")->check(CLI::PositiveNumber);
  auto* dom_c_opt = dom->add_option("-c", dom_c, "extra bidders (default: the sufficient threshold)");
  dom->add_option("--delta", dopt.delta, "DKW confidence parameter")->check(CLI::Range(0.0, 1.0));
  dom->add_option("--grid", dopt.grid, "probe points")->check(CLI::PositiveNumber);
  dom->add_flag("--curves", dopt.curves, "write both empirical cdfs");
  auto* ystar_opt = dom->add_option("--ystar", ystar_p, "conditional tail of Y* at this p");
  auto* prop_opt = dom->add_option("--tail-compare", prop_p, "conditional tails of Z and W_l at this p");
  dom->add_option("--draw", dopt.draw, "raw draws of one variable");
  dom->add_option("--var", dopt.var, "variable for --draw")->check(CLI::IsMember({"xs", "xb", "xl", "xl-prime", "w"}));

  detail::ReproduceOpts po;
  std::size_t repro_c = 0;
  auto* repro = app.add_subcommand("reproduce", "checked reproductions of the quantitative claims");
  repro->add_option("--claim", po.claims, "claim id (repeatable)");
  repro->add_flag("--all", po.all, "every claim");
  repro->add_flag("--list", po.list, "list claim ids");
  repro->add_flag("--timing", po.timing, "include per-claim runtime");
  repro->add_option("--driver", po.driver, "run one driver with explicit parameters")
      ->check(CLI::IsMember({"er-order-stat", "er-decomposition", "bign-tightness", "two-item-tail", "three-tier-surplus",
                             "little-n"}));
  repro->add_option("-n", po.n, "bidders");
  repro->add_option("-m", po.m, "items");
  repro->add_option("-x", po.x, "order index (x-th highest)");
  repro->add_option("-y", po.y, "number of draws");
  auto* repro_c_opt = repro->add_option("-c", repro_c, "extra bidders");
  repro->add_option("--q", po.q, "half the two-item threshold");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  if (price_opt->count() > 0) ro.price = price;
  if (bench_c_opt->count() > 0) bo.c = bench_c;
  if (dom_c_opt->count() > 0) dopt.c = dom_c;
  if (ystar_opt->count() > 0) dopt.ystar = ystar_p;
  if (prop_opt->count() > 0) dopt.prop_key = prop_p;
  if (repro_c_opt->count() > 0) po.c = repro_c;
  if (ro.dists.empty()) ro.dists.push_back("uniform:0,1");

  set_worker_count(g.workers);
  Emission e;
  try {
    if (virt->parsed()) {
      e.config = detail::globals_json(g, "virtual");
      detail::run_virtual(vo, g, e);
    } else if (rev->parsed()) {
      e.config = detail::globals_json(g, "revenue");
      detail::run_revenue(ro, g, e);
    } else if (bench->parsed()) {
      e.config = detail::globals_json(g, "benchmark");
      detail::run_benchmark(bo, g, e);
    } else if (dom->parsed()) {
      e.config = detail::globals_json(g, "dominance");
      detail::run_dominance(dopt, g, e);
    } else {
      e.config = detail::globals_json(g, "reproduce");
      detail::run_reproduce(po, g, e);
    }
  } catch (const precondition_error& ex) {
    err << "precondition violated: " << ex.what() << '\n';
    return kExitPrecondition;
  }

  if (g.out == "json") detail::write_json(e, out);
  else detail::write_csv(e, out);
  return e.failed ? kExitClaimFailed : kExitOk;
}

}  // namespace compcx::cli
