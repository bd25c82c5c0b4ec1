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

// Two analogues of the short-interval moments: cosine sums over zeta-zero
// ordinates integrated over [1, X], and the Monte Carlo distribution of
// sum cos(2 pi X_n) for independent uniforms X_n.

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numbers>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "shortint/arith.hpp"
#include "shortint/compensated.hpp"
#include "shortint/errors.hpp"
#include "shortint/parallel.hpp"

namespace shortint {

/// Ascending positive ordinates gamma of zeta zeros.
class ZeroTable {
 public:
  ZeroTable() = default;

  explicit ZeroTable(std::vector<double> ordinates) : ordinates_(std::move(ordinates)) {
    for (std::size_t i = 0; i < ordinates_.size(); ++i) {
      if (!(ordinates_[i] > 0.0) || !std::isfinite(ordinates_[i])) {
        throw std::invalid_argument("zero ordinates must be finite and positive");
      }
      if (i > 0 && !(ordinates_[i] > ordinates_[i - 1])) {
        throw std::invalid_argument("zero ordinates must be strictly increasing");
      }
    }
  }

  std::size_t size() const noexcept { return ordinates_.size(); }
  bool empty() const noexcept { return ordinates_.empty(); }
  const std::vector<double>& ordinates() const noexcept { return ordinates_; }
  double max_ordinate() const noexcept { return ordinates_.empty() ? 0.0 : ordinates_.back(); }

  /// Ordinates with gamma <= T.
  std::vector<double> up_to(double T) const {
    auto end = std::upper_bound(ordinates_.begin(), ordinates_.end(), T);
    return {ordinates_.begin(), end};
  }

 private:
  std::vector<double> ordinates_;
};

/// Reads one decimal ordinate per line. Blank lines and lines starting with
/// '#' are skipped. Malformed or out-of-order lines are reported by number.
inline ZeroTable load_zeros(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open zero table: " + path);
  std::vector<double> values;
  std::string line;
  std::size_t lineno = 0;
  auto fail = [&](const std::string& why) {
    throw std::runtime_error(path + ":" + std::to_string(lineno) + ": " + why);
  };
  while (std::getline(in, line)) {
    ++lineno;
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos || line[b] == '#') continue;
    const auto e = line.find_last_not_of(" \t\r");
    const char* first = line.data() + b;
    const char* last = line.data() + e + 1;
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last || !std::isfinite(v)) fail("not a number");
    if (!(v > 0.0)) fail("ordinate must be positive");
    if (!values.empty() && !(v > values.back())) fail("ordinates must be strictly increasing");
    values.push_back(v);
  }
  if (values.empty()) throw std::runtime_error("zero table has no ordinates: " + path);
  return ZeroTable(std::move(values));
}

inline constexpr unsigned kMaxZeroMomentOrder = 8;
inline constexpr double kZeroMomentBudget = 2e10;  // cosine evaluations

struct ZeroMomentReport {
  double lhs = 0.0;
  double rhs = 0.0;
  std::optional<double> ratio;
  std::size_t zeros_used = 0;
  std::uint64_t panels = 0;
};

/// mu_k X (T/(4 pi) log T)^{k/2}, 0 for odd k.
inline double zero_moment_rhs(double T, double X, unsigned k) {
  if (k % 2 == 1) return 0.0;
  return gaussian_moment(k) * X * std::pow(T / (4.0 * std::numbers::pi) * std::log(T), k / 2.0);
}

/// int_1^X (sum_{0<gamma<=T} cos(gamma log x))^k dx. Integrated in u = log x
/// with 10-point Gauss-Legendre on panels of width at most pi/(10 T).
inline ZeroMomentReport zero_moment(const ZeroTable& table, double T, double X, unsigned k,
                                    unsigned workers = 1) {
  if (k > kMaxZeroMomentOrder) {
    throw std::invalid_argument("k must be <= " + std::to_string(kMaxZeroMomentOrder));
  }
  if (!(X >= 2.0) || !std::isfinite(X)) throw std::invalid_argument("X must be >= 2");
  if (!(T > 1.0)) throw std::invalid_argument("T must be > 1");
  if (table.empty() || T > table.max_ordinate()) {
    throw std::out_of_range("T exceeds the largest ordinate in the zero table");
  }
  ZeroMomentReport r;
  r.rhs = zero_moment_rhs(T, X, k);
  const auto gammas = table.up_to(T);
  r.zeros_used = gammas.size();
  const double U = std::log(X);
  const double max_step = std::numbers::pi / (10.0 * T);
  r.panels = static_cast<std::uint64_t>(std::ceil(U / max_step));
  if (k == 0) {
    r.lhs = X - 1.0;
  } else if (!gammas.empty()) {
    const double cost = static_cast<double>(r.panels) * 10.0 * static_cast<double>(gammas.size());
    if (cost > kZeroMomentBudget) {
      throw budget_error("zero_moment evaluation count exceeds budget", cost, kZeroMomentBudget);
    }
    const double step = U / static_cast<double>(r.panels);
    auto integrand = [&](double u) {
      double s = 0.0;
      for (double g : gammas) s += std::cos(g * u);
      double p = 1.0;
      for (unsigned i = 0; i < k; ++i) p *= s;
      return p * std::exp(u);
    };
    using Rule = boost::math::quadrature::gauss<double, 10>;
    const auto shards = make_shards(0, r.panels - 1, std::max(1u, workers));
    std::vector<CompensatedSum> partial(shards.size());
    run_indexed(shards.size(), workers, [&](std::size_t s) {
      for (std::uint64_t i = shards[s].first; i <= shards[s].last; ++i) {
        const double a = step * static_cast<double>(i);
        const double b = i + 1 == r.panels ? U : a + step;
        partial[s].add(Rule::integrate(integrand, a, b));
      }
    });
    CompensatedSum total;
    for (const auto& p : partial) total += p;
    r.lhs = total.value();
  }
  if (r.rhs != 0.0) r.ratio = r.lhs / r.rhs;
  return r;
}

struct MCConfig {
  std::uint64_t N = 1;
  std::uint64_t trials = 1;
  std::uint64_t seed = 0;
};

struct RmtMoment {
  unsigned k = 0;
  double mean = 0.0;       // sample mean of S^k
  double std_error = 0.0;  // standard error of that mean
  double exact = 0.0;      // E[S^k]
};

inline constexpr unsigned kMaxRmtOrder = 8;

/// E[(sum_{n<=N} cos 2 pi X_n)^k] exactly, by adding one term at a time with
/// E cos^j = C(j, j/2) / 2^j for even j.
inline double rmt_exact_moment(std::uint64_t N, unsigned k) {
  std::vector<double> single(k + 1, 0.0);
  for (unsigned j = 0; j <= k; j += 2) {
    double c = 1.0;  // C(j, j/2) / 2^j
    for (unsigned i = 1; i <= j / 2; ++i) c *= static_cast<double>(j / 2 + i) / (4.0 * i);
    single[j] = c;
  }
  std::vector<std::vector<double>> binom(k + 1, std::vector<double>(k + 1, 0.0));
  for (unsigned n = 0; n <= k; ++n) {
    binom[n][0] = 1.0;
    for (unsigned j = 1; j <= n; ++j) binom[n][j] = binom[n - 1][j - 1] + (j < n ? binom[n - 1][j] : 0.0);
  }
  std::vector<double> m(k + 1, 0.0);  // moments of S over the first n terms
  m[0] = 1.0;
  for (std::uint64_t n = 0; n < N; ++n) {
    std::vector<double> next(k + 1, 0.0);
    for (unsigned a = 0; a <= k; ++a) {
      for (unsigned j = 0; j <= a; j += 2) next[a] += binom[a][j] * m[a - j] * single[j];
    }
    m = std::move(next);
  }
  return m[k];
}

/// Generator for one trial: mt19937_64 seeded through seed_seq with the 32-bit
/// halves of (seed, trial index).
inline std::mt19937_64 trial_generator(std::uint64_t seed, std::uint64_t trial) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(trial >> 32)};
  return std::mt19937_64(seq);
}

/// Uniform on [0, 1) from the top 53 bits.
inline double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Sample moments of S = sum_{n<=N} cos(2 pi X_n), k = 1..kmax.
inline std::vector<RmtMoment> rmt_moments(const MCConfig& cfg, unsigned kmax, unsigned workers = 1) {
  if (cfg.N < 1) throw std::invalid_argument("N must be >= 1");
  if (cfg.trials < 1) throw std::invalid_argument("trials must be >= 1");
  if (kmax > kMaxRmtOrder) throw std::invalid_argument("kmax must be <= " + std::to_string(kMaxRmtOrder));
  const unsigned top = 2 * kmax;
  const auto shards = make_shards(0, cfg.trials - 1, std::max(1u, workers));
  std::vector<std::vector<CompensatedSum>> partial(shards.size(),
                                                   std::vector<CompensatedSum>(top + 1));
  constexpr double two_pi = 2.0 * std::numbers::pi;
  run_indexed(shards.size(), workers, [&](std::size_t s) {
    auto& acc = partial[s];
    for (std::uint64_t t = shards[s].first; t <= shards[s].last; ++t) {
      auto rng = trial_generator(cfg.seed, t);
      double S = 0.0;
      for (std::uint64_t n = 0; n < cfg.N; ++n) S += std::cos(two_pi * unit_uniform(rng));
      double p = 1.0;
      for (unsigned j = 1; j <= top; ++j) {
        p *= S;
        acc[j].add(p);
      }
    }
  });
  std::vector<double> raw(top + 1, 0.0);
  for (unsigned j = 1; j <= top; ++j) {
    CompensatedSum total;
    for (const auto& p : partial) total += p[j];
    raw[j] = total.value() / static_cast<double>(cfg.trials);
  }
  std::vector<RmtMoment> out;
  const double n = static_cast<double>(cfg.trials);
  for (unsigned k = 1; k <= kmax; ++k) {
    RmtMoment m;
    m.k = k;
    m.mean = raw[k];
    const double var = cfg.trials > 1 ? std::max(0.0, raw[2 * k] - raw[k] * raw[k]) * n / (n - 1.0) : 0.0;
    m.std_error = std::sqrt(var / n);
    m.exact = rmt_exact_moment(cfg.N, k);
    out.push_back(m);
  }
  return out;
}

}  // namespace shortint
