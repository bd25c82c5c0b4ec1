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

// Hardy-Littlewood singular series S(D), its inclusion-exclusion transform
// S0(D), and the tuple averages built from them (R_k, pair and Gallagher sums).
//
// S(D) is evaluated as an explicit Euler product over p <= y followed by the
// exact tail prod_{p>y}. For p > span(D) every offset lands in its own class,
// so log f_k(p) = sum_{m>=2} (k - k^m)/m * p^-m and the tail reduces to prime
// zeta tails P_m(y) = sum_{p>y} p^-m, obtained from log zeta by Moebius
// inversion. Floating point throughout.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "shortint/arith.hpp"
#include "shortint/compensated.hpp"
#include "shortint/errors.hpp"
#include "shortint/parallel.hpp"
#include "shortint/sieve.hpp"

namespace shortint {

namespace constants {
/// Euler's constant.
inline constexpr double kEulerGamma = std::numbers::egamma;
/// A = 2 - C0 - log 2pi, the linear coefficient in R_2(h) ~ -h log h + A h.
inline const double kA = 2.0 - kEulerGamma - std::log(2.0 * std::numbers::pi);
/// B = 1 - C0 - log 2pi = A - 1.
inline const double kB = 1.0 - kEulerGamma - std::log(2.0 * std::numbers::pi);
}  // namespace constants

/// A finite set of distinct integer offsets, kept sorted.
class TupleD {
 public:
  TupleD() = default;

  /// Sorts the offsets; duplicates are rejected.
  explicit TupleD(std::vector<std::int64_t> offsets) : offsets_(std::move(offsets)) {
    std::sort(offsets_.begin(), offsets_.end());
    if (std::adjacent_find(offsets_.begin(), offsets_.end()) != offsets_.end()) {
      throw std::invalid_argument("TupleD offsets must be distinct");
    }
  }

  TupleD(std::initializer_list<std::int64_t> offsets)
      : TupleD(std::vector<std::int64_t>(offsets)) {}

  std::size_t size() const noexcept { return offsets_.size(); }
  bool empty() const noexcept { return offsets_.empty(); }
  std::span<const std::int64_t> offsets() const noexcept { return offsets_; }
  std::int64_t operator[](std::size_t i) const { return offsets_[i]; }

  /// max - min, or 0 for fewer than two offsets.
  std::int64_t span() const noexcept {
    return offsets_.size() < 2 ? 0 : offsets_.back() - offsets_.front();
  }

  TupleD translated(std::int64_t shift) const {
    TupleD out = *this;
    for (auto& d : out.offsets_) d += shift;
    return out;
  }

  /// Sub-tuple picked by the bits of `mask`.
  TupleD subset(std::uint64_t mask) const {
    TupleD out;
    for (std::size_t i = 0; i < offsets_.size(); ++i) {
      if (mask >> i & 1) out.offsets_.push_back(offsets_[i]);
    }
    return out;
  }

  friend bool operator==(const TupleD&, const TupleD&) = default;

 private:
  std::vector<std::int64_t> offsets_;
};

struct SeriesConfig {
  /// Explicit Euler product runs over p <= max(prime_cutoff, span, 4k, 100).
  std::uint64_t prime_cutoff = 1000;
  double target_rel_tol = 1e-9;
};

namespace detail {

inline std::uint64_t mod_nonneg(std::int64_t d, std::uint64_t p) {
  const auto m = static_cast<std::int64_t>(p);
  return static_cast<std::uint64_t>(((d % m) + m) % m);
}

// Shared ascending prime list, grown on demand. Handed out as an immutable
// snapshot so concurrent growth never invalidates a reader.
class PrimeTable {
 public:
  static std::shared_ptr<const std::vector<std::uint64_t>> up_to(std::uint64_t limit) {
    static std::mutex mu;
    static std::shared_ptr<const std::vector<std::uint64_t>> table =
        std::make_shared<const std::vector<std::uint64_t>>();
    static std::uint64_t covered = 1;
    std::lock_guard<std::mutex> lock(mu);
    if (limit > covered) {
      const std::uint64_t target = std::max(limit, 2 * covered);
      table = std::make_shared<const std::vector<std::uint64_t>>(primes_in(1, target));
      covered = target;
    }
    return table;
  }
};

// zeta(s) - 1 for real s >= 2 by Euler-Maclaurin with cut N = 32.
inline double zeta_minus_one(double s) {
  constexpr int kCut = 32;
  CompensatedSum acc;
  for (int n = kCut - 1; n >= 2; --n) acc.add(std::pow(static_cast<double>(n), -s));
  const double N = kCut;
  acc.add(std::pow(N, 1.0 - s) / (s - 1.0));
  acc.add(0.5 * std::pow(N, -s));
  static constexpr double kBernoulli[] = {1.0 / 6, -1.0 / 30, 1.0 / 42,
                                          -1.0 / 30, 5.0 / 66, -691.0 / 2730};
  double rising = s;        // s (s+1) ... (s+2j-2)
  double factorial = 2.0;   // (2j)!
  double npow = std::pow(N, -s - 1.0);
  for (int j = 1; j <= 6; ++j) {
    acc.add(kBernoulli[j - 1] / factorial * rising * npow);
    rising *= (s + 2 * j - 1) * (s + 2 * j);
    factorial *= (2.0 * j + 1) * (2.0 * j + 2);
    npow /= N * N;
  }
  return acc.value();
}

// log prod_{p > y} (1 - p^-s)^-1, with `primes` covering [2, y].
inline double log_zeta_tail(double s, std::uint64_t y, std::span<const std::uint64_t> primes) {
  if ((s - 1.0) * std::log(static_cast<double>(y)) > 80.0) return 0.0;
  CompensatedSum acc(std::log1p(zeta_minus_one(s)));
  for (std::uint64_t p : primes) {
    if (p > y) break;
    acc.add(std::log1p(-std::pow(static_cast<double>(p), -s)));
  }
  return acc.value();
}

// sum_{p > y} p^-m.
inline double prime_power_tail(unsigned m, std::uint64_t y, std::span<const std::uint64_t> primes) {
  CompensatedSum acc;
  for (unsigned n = 1;; ++n) {
    const double s = static_cast<double>(m) * n;
    if ((s - 1.0) * std::log(static_cast<double>(y)) > 80.0) break;
    const int mu = mobius(n);
    if (mu != 0) acc.add(mu / static_cast<double>(n) * log_zeta_tail(s, y, primes));
  }
  return acc.value();
}

// log prod_{p > y} (1-1/p)^-k (1-k/p), valid for y >= 4k. Cached per (k, y).
inline double log_euler_tail(std::size_t k, std::uint64_t y) {
  static std::mutex mu;
  static std::map<std::pair<std::size_t, std::uint64_t>, double> cache;
  {
    std::lock_guard<std::mutex> lock(mu);
    if (auto it = cache.find({k, y}); it != cache.end()) return it->second;
  }
  const auto primes = PrimeTable::up_to(y);
  CompensatedSum acc;
  const double kd = static_cast<double>(k);
  const double yd = static_cast<double>(y);
  for (unsigned m = 2; m < 400; ++m) {
    // |coefficient| * y^(1-m) bounds the term; stop once it is negligible.
    const double log_bound = m * std::log(std::max(kd, 1.0)) + (1.0 - m) * std::log(yd);
    if (k <= 1 || log_bound < std::log(1e-22)) break;
    const double coeff = (kd - std::pow(kd, m)) / m;
    acc.add(coeff * prime_power_tail(m, y, *primes));
  }
  const double value = acc.value();
  std::lock_guard<std::mutex> lock(mu);
  cache.emplace(std::make_pair(k, y), value);
  return value;
}

inline void require_prime(std::uint64_t p) {
  if (!is_prime(p)) throw std::invalid_argument(std::to_string(p) + " is not prime");
}

// Local factor (p/(p-1))^k (1 - nu/p).
inline double local_factor_value(std::size_t k, std::size_t nu, std::uint64_t p) {
  const double pd = static_cast<double>(p);
  return std::pow(pd / (pd - 1.0), static_cast<double>(k)) * (1.0 - static_cast<double>(nu) / pd);
}

inline std::size_t count_classes(const TupleD& D, std::uint64_t p) {
  if (p <= 64) {
    std::uint64_t seen = 0;
    for (auto d : D.offsets()) seen |= std::uint64_t{1} << mod_nonneg(d, p);
    return static_cast<std::size_t>(std::popcount(seen));
  }
  std::vector<std::uint64_t> r;
  r.reserve(D.size());
  for (auto d : D.offsets()) r.push_back(mod_nonneg(d, p));
  std::sort(r.begin(), r.end());
  return static_cast<std::size_t>(std::unique(r.begin(), r.end()) - r.begin());
}

}  // namespace detail

/// Number of distinct residue classes mod p among the offsets.
inline std::size_t nu_p(const TupleD& D, std::uint64_t p) {
  detail::require_prime(p);
  if (D.empty()) throw std::invalid_argument("nu_p requires a non-empty tuple");
  return detail::count_classes(D, p);
}

/// (1 - 1/p)^-k (1 - nu_p(D)/p). Zero exactly when D covers every class mod p.
inline double local_factor(const TupleD& D, std::uint64_t p) {
  const std::size_t nu = nu_p(D, p);
  if (nu == p) return 0.0;
  return detail::local_factor_value(D.size(), nu, p);
}

/// The local factor computed the long way: sum over q_i in {1, p} of
/// prod mu(q_i)/phi(q_i) times A(q_1, ..., q_k), with A enumerated over
/// reduced residues a_i mod q_i such that sum a_i/q_i is an integer.
/// Limited to k <= 4 and p <= 100.
inline double a_local_sum(const TupleD& D, std::uint64_t p) {
  detail::require_prime(p);
  const std::size_t k = D.size();
  if (k == 0) throw std::invalid_argument("a_local_sum requires a non-empty tuple");
  if (k > 4 || p > 100) {
    std::uint64_t cost = 1;
    for (std::size_t i = 1; i < k; ++i) cost *= (p - 1);
    throw budget_error("a_local_sum is limited to k <= 4 and p <= 100", cost << k,
                       std::uint64_t{96} * 96 * 96 * 16);
  }
  std::vector<double> cos_table(p);
  for (std::uint64_t t = 0; t < p; ++t) {
    cos_table[t] = std::cos(2.0 * std::numbers::pi * static_cast<double>(t) / static_cast<double>(p));
  }
  std::vector<std::uint64_t> dmod(k);
  for (std::size_t i = 0; i < k; ++i) dmod[i] = detail::mod_nonneg(D[i], p);

  CompensatedSum total;
  total.add(1.0);  // every q_i = 1: a_i = 1, A = 1
  const double weight_p = -1.0 / static_cast<double>(p - 1);  // mu(p)/phi(p)
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << k); ++mask) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < k; ++i) {
      if (mask >> i & 1) idx.push_back(i);
    }
    const std::size_t j = idx.size();
    // Enumerate a_i in [1, p-1] for all but the last index; the last is forced
    // by sum a_i == 0 (mod p) and must itself be nonzero.
    std::vector<std::uint64_t> a(j - 1, 1);
    CompensatedSum inner;
    for (;;) {
      std::uint64_t sum_a = 0, phase = 0;
      for (std::size_t t = 0; t + 1 < j; ++t) {
        sum_a += a[t];
        phase += a[t] * dmod[idx[t]];
      }
      const std::uint64_t last = (p - sum_a % p) % p;
      if (last != 0) {
        phase += last * dmod[idx[j - 1]];
        inner.add(cos_table[phase % p]);
      }
      std::size_t t = 0;
      while (t < a.size() && ++a[t] == p) a[t++] = 1;
      if (t == a.size()) break;
    }
    total.add(std::pow(weight_p, static_cast<double>(j)) * inner.value());
  }
  return total.value();
}

/// Plain truncated Euler product over p <= y.
inline double singular_series_truncated(const TupleD& D, std::uint64_t y) {
  if (D.empty()) return 1.0;
  const auto primes = detail::PrimeTable::up_to(y);
  double prod = 1.0;
  for (std::uint64_t p : *primes) {
    if (p > y) break;
    const std::size_t nu = detail::count_classes(D, p);
    if (nu == p) return 0.0;
    prod *= detail::local_factor_value(D.size(), nu, p);
  }
  return prod;
}

/// Explicit cutoff used by singular_series for this tuple.
inline std::uint64_t effective_cutoff(const TupleD& D, const SeriesConfig& cfg) {
  return std::max<std::uint64_t>({cfg.prime_cutoff, 100, static_cast<std::uint64_t>(D.span()),
                                  4 * static_cast<std::uint64_t>(D.size())});
}

/// S(D). Returns exactly 0 when some local factor vanishes, 1 for |D| <= 1.
inline double singular_series(const TupleD& D, const SeriesConfig& cfg = {}) {
  const std::size_t k = D.size();
  if (k <= 1) return 1.0;
  const std::uint64_t y = effective_cutoff(D, cfg);
  const auto span = static_cast<std::uint64_t>(D.span());
  const auto primes = detail::PrimeTable::up_to(y);
  double prod = 1.0;
  for (std::uint64_t p : *primes) {
    if (p > y) break;
    const std::size_t nu = p <= span ? detail::count_classes(D, p) : k;
    if (nu == p) return 0.0;
    prod *= detail::local_factor_value(k, nu, p);
  }
  return prod * std::exp(detail::log_euler_tail(k, y));
}

/// Largest tuple accepted by the 2^k subset transforms.
inline constexpr std::size_t kMaxSubsetTuple = 20;

namespace detail {

inline void check_subset_budget(const TupleD& D) {
  if (D.size() > kMaxSubsetTuple) {
    throw budget_error("subset sum over 2^k subsets refused for k=" + std::to_string(D.size()),
                       std::uint64_t{1} << std::min<std::size_t>(D.size(), 63),
                       std::uint64_t{1} << kMaxSubsetTuple);
  }
}

// S over every subset, indexed by mask.
inline std::vector<double> subset_series(const TupleD& D, const SeriesConfig& cfg) {
  const std::uint64_t count = std::uint64_t{1} << D.size();
  std::vector<double> out(count);
  for (std::uint64_t mask = 0; mask < count; ++mask) out[mask] = singular_series(D.subset(mask), cfg);
  return out;
}

// In-place signed subset transform: g(T) = sum_{I subset T} sign^{|T \ I|} f(I).
inline void subset_transform(std::vector<double>& f, std::size_t k, double sign) {
  for (std::size_t bit = 0; bit < k; ++bit) {
    for (std::uint64_t mask = 0; mask < f.size(); ++mask) {
      if (mask >> bit & 1) f[mask] = f[mask] + sign * f[mask ^ (std::uint64_t{1} << bit)];
    }
  }
}

}  // namespace detail

/// S0(D) = sum over subsets I of (-1)^{|D \ I|} S(I), the density attached to
/// products of Lambda(n) - 1. Inverts to S(D) = sum over subsets of S0(I).
inline double s0(const TupleD& D, const SeriesConfig& cfg = {}) {
  detail::check_subset_budget(D);
  const auto values = detail::subset_series(D, cfg);
  const std::uint64_t full = values.size() - 1;
  CompensatedSum acc;
  for (std::uint64_t mask = 0; mask < values.size(); ++mask) {
    acc.add((std::popcount(full ^ mask) % 2 ? -1.0 : 1.0) * values[mask]);
  }
  return acc.value();
}

/// S(D) rebuilt as sum over subsets I of S0(I).
inline double s_from_s0(const TupleD& D, const SeriesConfig& cfg = {}) {
  detail::check_subset_budget(D);
  auto s0_all = detail::subset_series(D, cfg);
  detail::subset_transform(s0_all, D.size(), -1.0);
  CompensatedSum acc;
  for (double v : s0_all) acc.add(v);
  return acc.value();
}

/// Memo of S by translation class (offsets shifted so the smallest is 0).
class SeriesCache {
 public:
  explicit SeriesCache(SeriesConfig cfg = {}) : cfg_(cfg) {}

  double get(std::span<const std::int64_t> sorted_offsets) {
    if (sorted_offsets.size() <= 1) return 1.0;
    key_.assign(sorted_offsets.begin(), sorted_offsets.end());
    const std::int64_t base = key_.front();
    for (auto& d : key_) d -= base;
    if (auto it = memo_.find(key_); it != memo_.end()) return it->second;
    const double v = singular_series(TupleD(key_), cfg_);
    memo_.emplace(key_, v);
    return v;
  }

  /// S({0, m}).
  double pair(std::int64_t m) {
    const std::int64_t d[2] = {0, m};
    return get(d);
  }

  const SeriesConfig& config() const noexcept { return cfg_; }
  std::size_t size() const noexcept { return memo_.size(); }

 private:
  SeriesConfig cfg_;
  std::map<std::vector<std::int64_t>, double> memo_;
  std::vector<std::int64_t> key_;
};

inline constexpr std::uint64_t kTupleBudget = 100'000'000;

namespace detail {

inline void check_tuple_budget(const char* what, std::uint64_t h, std::size_t k) {
  std::uint64_t cost = 1;
  for (std::size_t i = 0; i < k; ++i) {
    if (cost > kTupleBudget) break;
    cost *= h;
  }
  if (cost > kTupleBudget) {
    throw budget_error(std::string(what) + ": h^k ordered tuples exceed the budget", cost,
                       kTupleBudget);
  }
}

inline double factorial(std::size_t k) {
  double f = 1.0;
  for (std::size_t i = 2; i <= k; ++i) f *= static_cast<double>(i);
  return f;
}

// Sum over sorted k-subsets of [1, h] of value(subset), sharded over the
// smallest element and reduced in shard order.
template <class Value>
double sum_over_sets(std::uint64_t h, std::size_t k, unsigned workers, SeriesCache& warm,
                     Value value) {
  if (k == 0) {
    std::vector<std::int64_t> none;
    return value(none, warm);
  }
  if (h < k) return 0.0;
  const std::uint64_t first_max = h - k + 1;
  const auto shards = make_shards(1, first_max, std::max(1u, workers));
  std::vector<CompensatedSum> partial(shards.size());
  run_indexed(shards.size(), workers, [&](std::size_t s) {
    SeriesCache cache = warm;
    std::vector<std::int64_t> d(k);
    for (std::uint64_t d1 = shards[s].first; d1 <= shards[s].last; ++d1) {
      // Lexicographic walk over sets with smallest element d1.
      d[0] = static_cast<std::int64_t>(d1);
      for (std::size_t i = 1; i < k; ++i) d[i] = d[i - 1] + 1;
      for (;;) {
        partial[s].add(value(d, cache));
        std::size_t i = k;
        while (i > 1 && d[i - 1] == static_cast<std::int64_t>(h - (k - i))) --i;
        if (i == 1) break;
        ++d[i - 1];
        for (std::size_t j = i; j < k; ++j) d[j] = d[j - 1] + 1;
      }
    }
  });
  CompensatedSum total;
  for (const auto& p : partial) total += p;
  return total.value();
}

// S0 of a sorted offset list through the cache.
inline double s0_cached(std::span<const std::int64_t> d, SeriesCache& cache) {
  const std::size_t k = d.size();
  CompensatedSum acc;
  std::vector<std::int64_t> sub;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << k); ++mask) {
    sub.clear();
    for (std::size_t i = 0; i < k; ++i) {
      if (mask >> i & 1) sub.push_back(d[i]);
    }
    acc.add(((k - sub.size()) % 2 ? -1.0 : 1.0) * cache.get(sub));
  }
  return acc.value();
}

inline SeriesCache warmed_pair_cache(std::uint64_t h, const SeriesConfig& cfg) {
  SeriesCache cache(cfg);
  for (std::uint64_t m = 1; m < h; ++m) cache.pair(static_cast<std::int64_t>(m));
  return cache;
}

}  // namespace detail

/// S({d1, d2}) summed over ordered pairs of distinct d1, d2 in [1, h].
inline double pair_sum(std::uint64_t h, const SeriesConfig& cfg = {}) {
  if (h < 1) throw std::invalid_argument("pair_sum requires h >= 1");
  SeriesCache cache(cfg);
  CompensatedSum acc;
  for (std::uint64_t m = 1; m < h; ++m) {
    acc.add(2.0 * static_cast<double>(h - m) * cache.pair(static_cast<std::int64_t>(m)));
  }
  return acc.value();
}

/// R_k(h): S0 summed over ordered k-tuples of distinct d_i in [1, h].
inline double r_k(std::uint64_t h, std::size_t k, const SeriesConfig& cfg = {},
                  unsigned workers = 1) {
  if (h < 1) throw std::invalid_argument("r_k requires h >= 1");
  detail::check_tuple_budget("r_k", h, k);
  if (k == 0) return 1.0;
  if (k == 1) return 0.0;
  if (k == 2) {
    // S0({a, b}) = S({a, b}) - 1
    SeriesCache cache(cfg);
    CompensatedSum acc;
    for (std::uint64_t m = 1; m < h; ++m) {
      acc.add(2.0 * static_cast<double>(h - m) * (cache.pair(static_cast<std::int64_t>(m)) - 1.0));
    }
    return acc.value();
  }
  auto warm = detail::warmed_pair_cache(h, cfg);
  const double sets = detail::sum_over_sets(
      h, k, workers, warm,
      [](std::span<const std::int64_t> d, SeriesCache& c) { return detail::s0_cached(d, c); });
  return detail::factorial(k) * sets;
}

/// Leading behaviour mu_k (-h log h + A h)^{k/2}; 0 for odd k. For even k the
/// power is an integer power, so a negative base keeps its sign when k/2 is odd.
inline double r_k_asymptotic(std::uint64_t h, std::size_t k) {
  if (h < 2) throw std::invalid_argument("r_k_asymptotic requires h >= 2");
  if (k % 2 == 1) return 0.0;
  const double hd = static_cast<double>(h);
  const double base = -hd * std::log(hd) + constants::kA * hd;
  double power = 1.0;
  for (std::size_t i = 0; i < k / 2; ++i) power *= base;
  return gaussian_moment(static_cast<unsigned>(k)) * power;
}

/// S(D) summed over ordered k-tuples of distinct d_i in [1, h].
inline double gallagher_sum(std::uint64_t h, std::size_t k, const SeriesConfig& cfg = {},
                            unsigned workers = 1) {
  if (h < 1) throw std::invalid_argument("gallagher_sum requires h >= 1");
  detail::check_tuple_budget("gallagher_sum", h, k);
  if (k == 0) return 1.0;
  if (k == 1) return static_cast<double>(h);
  if (k == 2) return pair_sum(h, cfg);
  auto warm = detail::warmed_pair_cache(h, cfg);
  const double sets = detail::sum_over_sets(
      h, k, workers, warm,
      [](std::span<const std::int64_t> d, SeriesCache& c) { return c.get(d); });
  return detail::factorial(k) * sets;
}

/// Right-hand side of the binomial bridge: sum_r C(k, r) R_r(h) (h-r)...(h-k+1).
inline double gallagher_from_r(std::uint64_t h, std::size_t k, const SeriesConfig& cfg = {},
                               unsigned workers = 1) {
  CompensatedSum acc;
  double binom = 1.0;
  for (std::size_t r = 0; r <= k; ++r) {
    double falling = 1.0;
    for (std::size_t j = r; j < k; ++j) falling *= static_cast<double>(h) - static_cast<double>(j);
    if (falling != 0.0) acc.add(binom * r_k(h, r, cfg, workers) * falling);
    binom = binom * static_cast<double>(k - r) / static_cast<double>(r + 1);
  }
  return acc.value();
}

}  // namespace shortint
