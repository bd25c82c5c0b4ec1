// Copyright 2026 The shortint Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Subcommand front end: parses flags and an optional JSON config, validates,
// dispatches to the library and renders CSV or JSON.
//
// Output columns per subcommand:
//   moments    K,empirical,thm3_main,conj1,cramer,ratio_thm3,ratio_conj1
//   dist       bin_lo,bin_hi,count,normal_expected
//   singular   offsets,k,singular_series,s0
//   rk         h,k,r_k,asymptotic
//   pairs      h,pair_sum,formula,difference
//   gallagher  h,k,gallagher_sum,binomial_bridge
//   residues   q,h,k,phi,m_k,v_k,v_k_value,v_2,gaussian_main,ratio
//   ramanujan  q,m,c_q_m
//   ktuple     offsets,N,sum,main,residual
//   zeros      T,X,k,zeros_used,lhs,rhs,ratio
//   rmt        k,mean,std_error,exact,z_score

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "shortint/analogues.hpp"
#include "shortint/errors.hpp"
#include "shortint/interval_moments.hpp"
#include "shortint/parallel.hpp"
#include "shortint/reduced_residues.hpp"
#include "shortint/sieve.hpp"
#include "shortint/singular_series.hpp"

namespace shortint::cli {

/// Bad input from the user: flags, config, files. Maps to exit code 2.
class usage_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Cell = std::variant<std::monostate, std::uint64_t, std::int64_t, double, std::string>;

struct Report {
  std::string command;
  nlohmann::ordered_json parameters = nlohmann::ordered_json::object();
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  nlohmann::ordered_json summary = nlohmann::ordered_json::object();
  std::vector<std::string> warnings;
  std::string summary_line;
};

/// 12 significant digits.
inline std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

/// The double that format_double(x) denotes.
inline double round12(double x) {
  if (!std::isfinite(x)) return x;
  return std::strtod(format_double(x).c_str(), nullptr);
}

inline Cell opt_cell(const std::optional<double>& v) {
  if (!v) return std::monostate{};
  return *v;
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline std::string cell_text(const Cell& c) {
  struct Visitor {
    std::string operator()(std::monostate) const { return ""; }
    std::string operator()(std::uint64_t v) const { return std::to_string(v); }
    std::string operator()(std::int64_t v) const { return std::to_string(v); }
    std::string operator()(double v) const { return format_double(v); }
    std::string operator()(const std::string& v) const { return v; }
  };
  return std::visit(Visitor{}, c);
}

inline nlohmann::ordered_json cell_json(const Cell& c) {
  struct Visitor {
    nlohmann::ordered_json operator()(std::monostate) const { return nullptr; }
    nlohmann::ordered_json operator()(std::uint64_t v) const { return v; }
    nlohmann::ordered_json operator()(std::int64_t v) const { return v; }
    nlohmann::ordered_json operator()(double v) const {
      if (!std::isfinite(v)) return nullptr;
      return round12(v);
    }
    nlohmann::ordered_json operator()(const std::string& v) const { return v; }
  };
  return std::visit(Visitor{}, c);
}

/// RFC 4180: CRLF-free, comma separated, fields quoted when needed.
inline std::string render_csv(const Report& r) {
  std::string out;
  for (std::size_t i = 0; i < r.columns.size(); ++i) {
    if (i) out += ',';
    out += csv_field(r.columns[i]);
  }
  out += '\n';
  for (const auto& row : r.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += csv_field(cell_text(row[i]));
    }
    out += '\n';
  }
  return out;
}

inline std::string render_json(const Report& r) {
  nlohmann::ordered_json j;
  j["schema_version"] = 1;
  j["command"] = r.command;
  j["parameters"] = r.parameters;
  j["columns"] = r.columns;
  auto rows = nlohmann::ordered_json::array();
  for (const auto& row : r.rows) {
    nlohmann::ordered_json obj = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < row.size(); ++i) obj[r.columns[i]] = cell_json(row[i]);
    rows.push_back(std::move(obj));
  }
  j["rows"] = std::move(rows);
  j["summary"] = r.summary;
  j["warnings"] = r.warnings;
  return j.dump(2) + "\n";
}

/// Merged parameter values as text: explicit flags over config entries.
class Params {
 public:
  void set(const std::string& key, std::string value) { values_[key] = std::move(value); }
  bool has(const std::string& key) const { return values_.count(key) > 0; }

  std::string text(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw usage_error("missing required parameter --" + key);
    return it->second;
  }

  /// Non-negative integer; accepts scientific notation such as 1e6.
  std::uint64_t u64(const std::string& key) const { return parse_u64(key, text(key)); }
  std::uint64_t u64(const std::string& key, std::uint64_t fallback) const {
    return has(key) ? u64(key) : fallback;
  }

  std::int64_t i64(const std::string& key) const {
    const std::string s = text(key);
    std::int64_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec == std::errc{} && p == s.data() + s.size()) return v;
    const double d = parse_real(key, s);
    if (d != std::floor(d) || std::fabs(d) > 9.0e15) {
      throw usage_error("--" + key + " must be an integer, got '" + s + "'");
    }
    return static_cast<std::int64_t>(d);
  }

  double real(const std::string& key) const { return parse_real(key, text(key)); }

  std::vector<std::int64_t> offsets(const std::string& key) const {
    std::vector<std::int64_t> out;
    std::stringstream ss(text(key));
    std::string item;
    while (std::getline(ss, item, ',')) {
      const auto b = item.find_first_not_of(" \t");
      const auto e = item.find_last_not_of(" \t");
      if (b == std::string::npos) throw usage_error("--" + key + " has an empty entry");
      const std::string t = item.substr(b, e - b + 1);
      std::int64_t v = 0;
      auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
      if (ec != std::errc{} || p != t.data() + t.size()) {
        throw usage_error("--" + key + " entry '" + t + "' is not an integer");
      }
      out.push_back(v);
    }
    if (out.empty()) throw usage_error("--" + key + " needs at least one offset");
    return out;
  }

 private:
  static double parse_real(const std::string& key, const std::string& s) {
    double v = 0.0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size() || !std::isfinite(v)) {
      throw usage_error("--" + key + " must be a number, got '" + s + "'");
    }
    return v;
  }

  static std::uint64_t parse_u64(const std::string& key, const std::string& s) {
    std::uint64_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec == std::errc{} && p == s.data() + s.size()) return v;
    const double d = parse_real(key, s);
    if (d < 0.0 || d != std::floor(d) || d > 9.0e15) {
      throw usage_error("--" + key + " must be a non-negative integer, got '" + s + "'");
    }
    return static_cast<std::uint64_t>(d);
  }

  std::map<std::string, std::string> values_;
};

namespace detail {

inline std::string join_offsets(const TupleD& D) {
  std::string s;
  for (std::size_t i = 0; i < D.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(D[i]);
  }
  return s;
}

inline std::string config_text(const std::string& key, const nlohmann::json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_unsigned()) return std::to_string(v.get<std::uint64_t>());
  if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
  if (v.is_number_float()) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v.get<double>());
    return buf;
  }
  if (v.is_array()) {
    std::string s;
    for (const auto& e : v) {
      if (!e.is_number_integer()) throw usage_error("config key '" + key + "' must list integers");
      if (!s.empty()) s += ',';
      s += std::to_string(e.get<std::int64_t>());
    }
    return s;
  }
  throw usage_error("config key '" + key + "' has an unsupported type");
}

inline void check_window(std::uint64_t N, std::uint64_t H) {
  if (N < 2) throw usage_error("N must be >= 2");
  if (H < 1) throw usage_error("H must be >= 1");
  if (H >= N) throw usage_error("H must be < N");
  if (N + H > kMaxSieveBound) throw usage_error("N + H exceeds the sieve bound 2^42");
}

inline Report cmd_moments(const Params& p, unsigned workers) {
  const auto N = p.u64("n"), H = p.u64("h");
  const auto kmax = p.u64("kmax", 4);
  check_window(N, H);
  if (kmax > kMaxMomentOrder) throw usage_error("Kmax must be <= 12");
  Report r;
  r.parameters = {{"N", N}, {"H", H}, {"Kmax", kmax}};
  r.columns = {"K", "empirical", "thm3_main", "conj1", "cramer", "ratio_thm3", "ratio_conj1"};
  MomentOptions opt;
  opt.workers = workers;
  const auto reps = empirical_moments(N, H, static_cast<unsigned>(kmax), opt);
  for (const auto& m : reps) {
    r.rows.push_back({std::uint64_t{m.K}, m.empirical, m.thm3_main, m.conj1, m.cramer_ref,
                      opt_cell(m.ratio_thm3), opt_cell(m.ratio_conj1)});
  }
  r.warnings = regime_warnings(N, H);
  r.summary_line = "moments N=" + std::to_string(N) + " H=" + std::to_string(H) +
                   " Kmax=" + std::to_string(kmax);
  if (kmax >= 2 && reps[2].ratio_thm3) {
    r.summary_line += " M2/thm3=" + format_double(*reps[2].ratio_thm3);
  }
  return r;
}

inline Report cmd_dist(const Params& p, unsigned workers) {
  const auto N = p.u64("n"), H = p.u64("h");
  const auto bins = p.u64("bins", 60);
  check_window(N, H);
  if (bins < 10 || bins > 100000) throw usage_error("bins must be in [10, 100000]");
  MomentOptions opt;
  opt.workers = workers;
  const auto d = distribution(N, H, static_cast<unsigned>(bins), opt);
  Report r;
  r.parameters = {{"N", N}, {"H", H}, {"bins", bins}};
  r.columns = {"bin_lo", "bin_hi", "count", "normal_expected"};
  const double n = static_cast<double>(d.samples);
  for (std::size_t i = 0; i < d.counts.size(); ++i) {
    const double lo = i == 0 ? 0.0 : standard_normal_cdf(d.edges[i]);
    const double hi = i + 1 == d.counts.size() ? 1.0 : standard_normal_cdf(d.edges[i + 1]);
    r.rows.push_back({d.edges[i], d.edges[i + 1], d.counts[i], n * (hi - lo)});
  }
  r.summary = {{"samples", d.samples},   {"scale", round12(d.scale)},
               {"ks", round12(d.ks)},     {"ks_exact", d.ks_exact},
               {"mean", round12(d.mean)}, {"variance", round12(d.variance)}};
  r.warnings = d.warnings;
  r.summary_line = "dist N=" + std::to_string(N) + " H=" + std::to_string(H) +
                   " ks=" + format_double(d.ks) + " variance=" + format_double(d.variance);
  return r;
}

inline Report cmd_singular(const Params& p, unsigned) {
  const TupleD D(p.offsets("d"));
  if (D.size() > kMaxSubsetTuple) throw usage_error("at most 20 offsets are supported");
  const double s = singular_series(D);
  const double z = s0(D);
  Report r;
  r.parameters = {{"d", D.offsets()}};
  r.columns = {"offsets", "k", "singular_series", "s0"};
  r.rows.push_back({join_offsets(D), std::uint64_t{D.size()}, s, z});
  r.summary_line = "singular D={" + join_offsets(D) + "} S=" + format_double(s);
  return r;
}

inline Report cmd_rk(const Params& p, unsigned workers) {
  const auto h = p.u64("h"), k = p.u64("k");
  if (h < 1) throw usage_error("h must be >= 1");
  const double v = r_k(h, k, {}, workers);
  Report r;
  r.parameters = {{"h", h}, {"k", k}};
  r.columns = {"h", "k", "r_k", "asymptotic"};
  r.rows.push_back({h, k, v, h >= 2 ? Cell{r_k_asymptotic(h, k)} : Cell{}});
  r.summary_line = "rk h=" + std::to_string(h) + " k=" + std::to_string(k) + " R=" + format_double(v);
  return r;
}

inline Report cmd_pairs(const Params& p, unsigned) {
  const auto h = p.u64("h");
  if (h < 1) throw usage_error("h must be >= 1");
  const double v = pair_sum(h);
  const double hd = static_cast<double>(h);
  const double formula = hd * hd - hd * std::log(hd) + constants::kB * hd;
  Report r;
  r.parameters = {{"h", h}};
  r.columns = {"h", "pair_sum", "formula", "difference"};
  r.rows.push_back({h, v, formula, v - formula});
  r.summary_line = "pairs h=" + std::to_string(h) + " sum=" + format_double(v);
  return r;
}

inline Report cmd_gallagher(const Params& p, unsigned workers) {
  const auto h = p.u64("h"), k = p.u64("k");
  if (h < 1) throw usage_error("h must be >= 1");
  const double v = gallagher_sum(h, k, {}, workers);
  const double bridge = gallagher_from_r(h, k, {}, workers);
  Report r;
  r.parameters = {{"h", h}, {"k", k}};
  r.columns = {"h", "k", "gallagher_sum", "binomial_bridge"};
  r.rows.push_back({h, k, v, bridge});
  r.summary_line = "gallagher h=" + std::to_string(h) + " k=" + std::to_string(k) +
                   " sum=" + format_double(v);
  return r;
}

inline Report cmd_residues(const Params& p, unsigned) {
  const auto q = p.u64("q"), h = p.u64("h");
  const auto k = p.u64("k", 2);
  if (k > 16) throw usage_error("k must be <= 16");
  const ModulusQ mod(q);
  const auto m = m_k_direct(mod, h, static_cast<unsigned>(k));
  const auto rep = theorem1_report(mod, h, static_cast<unsigned>(k));
  Report r;
  r.parameters = {{"q", q}, {"h", h}, {"k", k}};
  r.columns = {"q", "h", "k", "phi", "m_k", "v_k", "v_k_value", "v_2", "gaussian_main", "ratio"};
  r.rows.push_back({q, h, k, mod.phi(), to_string(m), to_string(rep.v_k_exact), rep.v_k,
                    to_string(rep.v_2_exact), rep.main,
                    rep.main != 0.0 ? Cell{rep.ratio} : Cell{}});
  r.summary_line = "residues q=" + std::to_string(q) + " h=" + std::to_string(h) +
                   " k=" + std::to_string(k) + " V=" + to_string(rep.v_k_exact);
  return r;
}

inline Report cmd_ramanujan(const Params& p, unsigned) {
  const auto q = p.u64("q");
  const auto m = p.i64("m");
  if (q < 1) throw usage_error("q must be >= 1");
  const auto c = ramanujan(q, m);
  Report r;
  r.parameters = {{"q", q}, {"m", m}};
  r.columns = {"q", "m", "c_q_m"};
  r.rows.push_back({q, m, c});
  r.summary_line = "ramanujan c_" + std::to_string(q) + "(" + std::to_string(m) + ")=" +
                   std::to_string(c);
  return r;
}

inline Report cmd_ktuple(const Params& p, unsigned) {
  const TupleD D(p.offsets("d"));
  const auto N = p.u64("n");
  if (D.size() > 4) throw usage_error("ktuple supports at most 4 offsets");
  if (D[0] < 0) throw usage_error("ktuple offsets must be >= 0");
  if (N < 1) throw usage_error("N must be >= 1");
  if (N + static_cast<std::uint64_t>(D[D.size() - 1]) > kMaxSieveBound) {
    throw usage_error("N + max offset exceeds the sieve bound 2^42");
  }
  const auto e = ktuple_residual(D, N);
  Report r;
  r.parameters = {{"d", D.offsets()}, {"N", N}};
  r.columns = {"offsets", "N", "sum", "main", "residual"};
  r.rows.push_back({join_offsets(D), N, e.sum, e.main, e.residual});
  r.summary_line = "ktuple D={" + join_offsets(D) + "} N=" + std::to_string(N) +
                   " residual=" + format_double(e.residual);
  return r;
}

inline Report cmd_zeros(const Params& p, unsigned workers) {
  const std::string path = p.text("zeros");
  ZeroTable table;
  try {
    table = load_zeros(path);
  } catch (const std::exception& e) {
    throw usage_error(std::string("zero table: ") + e.what());
  }
  const double X = p.real("x");
  const double T = p.has("t") ? p.real("t") : table.max_ordinate();
  const auto k = p.u64("k", 2);
  if (k > kMaxZeroMomentOrder) throw usage_error("k must be <= 8");
  if (!(X >= 2.0)) throw usage_error("X must be >= 2");
  if (!(T > 1.0)) throw usage_error("T must be > 1");
  if (T > table.max_ordinate()) {
    throw usage_error("T exceeds the largest ordinate in the zero table (" +
                      format_double(table.max_ordinate()) + ")");
  }
  const auto z = zero_moment(table, T, X, static_cast<unsigned>(k), workers);
  Report r;
  r.parameters = {{"zeros", path}, {"T", round12(T)}, {"X", round12(X)}, {"k", k}};
  r.columns = {"T", "X", "k", "zeros_used", "lhs", "rhs", "ratio"};
  r.rows.push_back({T, X, k, std::uint64_t{z.zeros_used}, z.lhs, z.rhs, opt_cell(z.ratio)});
  r.summary = {{"table_size", table.size()}, {"panels", z.panels}};
  r.summary_line = "zeros k=" + std::to_string(k) + " zeros_used=" + std::to_string(z.zeros_used) +
                   " lhs=" + format_double(z.lhs);
  return r;
}

inline Report cmd_rmt(const Params& p, unsigned workers) {
  MCConfig cfg;
  cfg.N = p.u64("n");
  cfg.trials = p.u64("trials");
  cfg.seed = p.u64("seed", 0);
  const auto kmax = p.u64("kmax", 4);
  if (cfg.N < 1) throw usage_error("N must be >= 1");
  if (cfg.trials < 1) throw usage_error("trials must be >= 1");
  if (kmax > kMaxRmtOrder) throw usage_error("kmax must be <= 8");
  const auto ms = rmt_moments(cfg, static_cast<unsigned>(kmax), workers);
  Report r;
  r.parameters = {{"N", cfg.N}, {"trials", cfg.trials}, {"seed", cfg.seed}, {"kmax", kmax}};
  r.columns = {"k", "mean", "std_error", "exact", "z_score"};
  for (const auto& m : ms) {
    r.rows.push_back({std::uint64_t{m.k}, m.mean, m.std_error, m.exact,
                      m.std_error > 0.0 ? Cell{(m.mean - m.exact) / m.std_error} : Cell{}});
  }
  r.summary_line = "rmt N=" + std::to_string(cfg.N) + " trials=" + std::to_string(cfg.trials);
  return r;
}

struct Command {
  const char* name;
  const char* help;
  std::vector<std::pair<const char*, const char*>> options;
  std::function<Report(const Params&, unsigned)> run;
};

inline const std::vector<Command>& commands() {
  static const std::vector<Command> table = {
      {"moments", "moments of psi(n+H)-psi(n)-H over n <= N",
       {{"n", "N"}, {"h", "window H"}, {"kmax", "largest K (<= 12, default 4)"}}, cmd_moments},
      {"dist", "histogram and KS distance of standardized window sums",
       {{"n", "N"}, {"h", "window H"}, {"bins", "histogram bins (default 60)"}}, cmd_dist},
      {"singular", "singular series of an offset tuple", {{"d", "offsets, e.g. 1,3,7"}}, cmd_singular},
      {"rk", "R_k(h) by brute force", {{"h", "h"}, {"k", "k"}}, cmd_rk},
      {"pairs", "sum of S({d1,d2}) over ordered pairs in [1,h]", {{"h", "h"}}, cmd_pairs},
      {"gallagher", "sum of S(D) over ordered k-tuples in [1,h]", {{"h", "h"}, {"k", "k"}},
       cmd_gallagher},
      {"residues", "centered moments of reduced residues in windows",
       {{"q", "squarefree modulus"}, {"h", "window h"}, {"k", "moment order (default 2)"}},
       cmd_residues},
      {"ramanujan", "Ramanujan sum c_q(m)", {{"q", "q"}, {"m", "m"}}, cmd_ramanujan},
      {"ktuple", "k-tuple residual against S(D) N", {{"d", "offsets, e.g. 0,2"}, {"n", "N"}},
       cmd_ktuple},
      {"zeros", "cosine-sum moment over zeta-zero ordinates",
       {{"zeros", "zero table path"}, {"t", "T (default: largest ordinate)"}, {"x", "X"},
        {"k", "moment order (default 2)"}},
       cmd_zeros},
      {"rmt", "Monte Carlo moments of sum cos(2 pi X_n)",
       {{"n", "N"}, {"trials", "trials"}, {"seed", "seed (default 0)"}, {"kmax", "largest k (default 4)"}},
       cmd_rmt},
  };
  return table;
}

}  // namespace detail

/// Runs one invocation. Exit codes: 0 success, 2 validation error, 1 runtime error.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"shortint: primes in short intervals, singular series and their analogues"};
  app.set_help_flag("--help", "print help and exit");
  app.require_subcommand(1, 1);
  std::string config_path, format = "csv", output_path, workers_text;
  app.add_option("--config", config_path, "JSON file of parameters; flags take precedence");
  app.add_option("--format", format, "csv or json");
  app.add_option("--output", output_path, "write the report here instead of stdout");
  app.add_option("--workers", workers_text, "worker threads (default: SHORTINT_WORKERS or 1)");

  const auto& cmds = detail::commands();
  // Option storage; std::map keeps element addresses stable for CLI11.
  std::vector<std::map<std::string, std::string>> storage(cmds.size());
  std::vector<CLI::App*> subs;
  for (std::size_t i = 0; i < cmds.size(); ++i) {
    auto* sub = app.add_subcommand(cmds[i].name, cmds[i].help);
    sub->fallthrough();
    sub->set_help_flag("--help", "print help and exit");
    for (const auto& [name, help] : cmds[i].options) {
      sub->add_option(std::string("--") + name, storage[i][name], help);
    }
    subs.push_back(sub);
  }

  // First bare word must name a subcommand; CLI11 would only say one is required.
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a.rfind("--", 0) == 0) {
      if (a.find('=') == std::string::npos && a != "--help") ++i;
      continue;
    }
    bool known = false;
    for (const auto& c : cmds) known = known || a == c.name;
    if (!known) {
      err << "error: unknown subcommand '" << a << "'\n";
      return 2;
    }
    break;
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  std::size_t which = 0;
  while (!subs[which]->parsed()) ++which;
  const auto& cmd = cmds[which];

  try {
    Params params;
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw usage_error("cannot read config file: " + config_path);
      nlohmann::json cfg;
      try {
        cfg = nlohmann::json::parse(in);
      } catch (const nlohmann::json::parse_error& e) {
        throw usage_error("config file is not valid JSON: " + std::string(e.what()));
      }
      if (!cfg.is_object()) throw usage_error("config file must hold a JSON object");
      for (const auto& [key, value] : cfg.items()) {
        if (key == "format") {
          if (!app.get_option("--format")->count()) format = detail::config_text(key, value);
          continue;
        }
        if (key == "output") {
          if (!app.get_option("--output")->count()) output_path = detail::config_text(key, value);
          continue;
        }
        if (key == "workers") {
          if (!app.get_option("--workers")->count()) workers_text = detail::config_text(key, value);
          continue;
        }
        bool known = false;
        for (const auto& [name, help] : cmd.options) known = known || key == name;
        if (!known) throw usage_error("config key '" + key + "' is not a parameter of " + cmd.name);
        params.set(key, detail::config_text(key, value));
      }
    }
    for (const auto& [name, help] : cmd.options) {
      if (subs[which]->get_option(std::string("--") + name)->count()) {
        params.set(name, storage[which][name]);
      }
    }
    if (format != "csv" && format != "json") throw usage_error("--format must be csv or json");
    unsigned workers = default_workers();
    if (!workers_text.empty()) {
      Params w;
      w.set("workers", workers_text);
      const auto v = w.u64("workers");
      if (v < 1 || v > 1024) throw usage_error("--workers must be in [1, 1024]");
      workers = static_cast<unsigned>(v);
    }

    Report report = cmd.run(params, workers);
    report.command = cmd.name;
    const std::string text = format == "csv" ? render_csv(report) : render_json(report);
    if (output_path.empty()) {
      out << text;
    } else {
      std::ofstream file(output_path, std::ios::binary);
      if (!file) throw usage_error("cannot open output file: " + output_path);
      file << text;
      if (!file) throw usage_error("failed writing output file: " + output_path);
    }
    for (const auto& w : report.warnings) err << "warning: " << w << "\n";
    err << report.summary_line << "\n";
    return 0;
  } catch (const usage_error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const budget_error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::out_of_range& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "runtime error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace shortint::cli
