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

// Segmented odd-only sieve of Eratosthenes and the von Mangoldt streams
// built on it. Nothing here allocates proportionally to the sieved range:
// memory is one segment plus the base primes up to sqrt(hi).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "shortint/compensated.hpp"

namespace shortint {

/// Largest position any stream may reach.
inline constexpr std::uint64_t kMaxSieveBound = std::uint64_t{1} << 42;

struct SieveConfig {
  std::uint64_t segment_length = std::uint64_t{1} << 20;
};

/// A prime power n = p^exponent, carrying Lambda(n) = log p.
struct PrimePowerEvent {
  std::uint64_t n;
  double log_p;
  std::uint64_t p;
  unsigned exponent;

  friend bool operator==(const PrimePowerEvent&, const PrimePowerEvent&) = default;
};

namespace detail {

inline void check_range(std::uint64_t lo, std::uint64_t hi, const SieveConfig& cfg) {
  if (lo < 1 || lo > hi) {
    throw std::invalid_argument("sieve range must satisfy 1 <= lo <= hi (got lo=" +
                                std::to_string(lo) + ", hi=" + std::to_string(hi) + ")");
  }
  if (hi > kMaxSieveBound) {
    throw std::out_of_range("sieve bound " + std::to_string(hi) + " exceeds maximum " +
                            std::to_string(kMaxSieveBound));
  }
  if (cfg.segment_length < 2) throw std::invalid_argument("segment_length must be >= 2");
}

inline std::uint64_t isqrt(std::uint64_t n) {
  auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(n)));
  while (r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  return r;
}

// All primes <= limit by a plain byte sieve; limit stays around sqrt(hi).
inline std::vector<std::uint32_t> base_primes(std::uint64_t limit) {
  std::vector<std::uint32_t> out;
  if (limit < 2) return out;
  std::vector<std::uint8_t> composite(limit + 1, 0);
  for (std::uint64_t i = 2; i <= limit; ++i) {
    if (composite[i]) continue;
    out.push_back(static_cast<std::uint32_t>(i));
    for (std::uint64_t j = i * i; j <= limit; j += i) composite[j] = 1;
  }
  return out;
}

}  // namespace detail

/// Walks [lo, hi] one segment at a time. Each odd base prime carries its next
/// odd multiple across segments, so the strike loop never divides.
class SegmentedSieve {
 public:
  SegmentedSieve(std::uint64_t lo, std::uint64_t hi, const SieveConfig& cfg = {})
      : lo_(lo), hi_(hi), seg_len_(cfg.segment_length) {
    detail::check_range(lo, hi, cfg);
    base_ = detail::base_primes(detail::isqrt(hi));
    next_multiple_.reserve(base_.size());
    for (std::uint32_t p32 : base_) {
      const std::uint64_t p = p32;
      std::uint64_t m = std::max(p * p, (lo + p - 1) / p * p);
      if (p != 2 && m % 2 == 0) m += p;
      next_multiple_.push_back(m);
    }
    composite_.reserve(seg_len_ / 2 + 1);
  }

  /// Sieves the next segment. Returns false once [lo, hi] is exhausted.
  bool next() {
    if (done_) return false;
    cur_lo_ = started_ ? cur_hi_ + 1 : lo_;
    started_ = true;
    if (cur_lo_ > hi_ || (cur_lo_ == 0)) {
      done_ = true;
      return false;
    }
    cur_hi_ = std::min(hi_, cur_lo_ + seg_len_ - 1);
    if (cur_hi_ == hi_) last_ = true;

    odd_lo_ = cur_lo_ | 1;
    const std::uint64_t odd_count = cur_hi_ >= odd_lo_ ? (cur_hi_ - odd_lo_) / 2 + 1 : 0;
    composite_.assign(odd_count, 0);
    for (std::size_t j = 0; j < base_.size(); ++j) {
      const std::uint64_t p = base_[j];
      if (p == 2) continue;
      if (p * p > cur_hi_) break;
      std::uint64_t m = next_multiple_[j];
      const std::uint64_t step = 2 * p;
      for (; m <= cur_hi_; m += step) composite_[(m - odd_lo_) >> 1] = 1;
      next_multiple_[j] = m;
    }
    if (odd_lo_ == 1 && odd_count > 0) composite_[0] = 1;
    if (last_) done_ = true;
    return true;
  }

  std::uint64_t segment_lo() const noexcept { return cur_lo_; }
  std::uint64_t segment_hi() const noexcept { return cur_hi_; }
  std::span<const std::uint32_t> base_primes() const noexcept { return base_; }

  /// Calls f(p) for each prime of the current segment in ascending order.
  template <class F>
  void for_each_prime(F&& f) const {
    if (cur_lo_ <= 2 && 2 <= cur_hi_) f(std::uint64_t{2});
    for (std::size_t i = 0; i < composite_.size(); ++i) {
      if (!composite_[i]) f(odd_lo_ + 2 * i);
    }
  }

  /// Calls f(n, p, e) for each p^e (e >= 2) in the current segment, unordered.
  template <class F>
  void for_each_higher_power(F&& f) const {
    for (std::uint32_t p32 : base_) {
      const std::uint64_t p = p32;
      if (p * p > cur_hi_) break;
      std::uint64_t pk = p * p;
      unsigned e = 2;
      for (;;) {
        if (pk >= cur_lo_) f(pk, p, e);
        if (pk > cur_hi_ / p) break;
        pk *= p;
        ++e;
        if (pk > cur_hi_) break;
      }
    }
  }

 private:
  std::uint64_t lo_, hi_, seg_len_;
  std::uint64_t cur_lo_ = 0, cur_hi_ = 0, odd_lo_ = 1;
  bool started_ = false, last_ = false, done_ = false;
  std::vector<std::uint32_t> base_;
  std::vector<std::uint64_t> next_multiple_;
  std::vector<std::uint8_t> composite_;
};

/// Ascending primes in [lo, hi].
inline std::vector<std::uint64_t> primes_in(std::uint64_t lo, std::uint64_t hi,
                                            const SieveConfig& cfg = {}) {
  SegmentedSieve sieve(lo, hi, cfg);
  std::vector<std::uint64_t> out;
  while (sieve.next()) {
    sieve.for_each_prime([&](std::uint64_t p) { out.push_back(p); });
  }
  return out;
}

/// Stream of prime-power events over [lo, hi], delivered one segment per batch
/// in strictly increasing n.
class LambdaEventStream {
 public:
  LambdaEventStream(std::uint64_t lo, std::uint64_t hi, const SieveConfig& cfg = {})
      : sieve_(lo, hi, cfg) {}

  /// Next non-empty batch; an empty span means the stream is exhausted.
  std::span<const PrimePowerEvent> next_batch() {
    while (sieve_.next()) {
      batch_.clear();
      powers_.clear();
      sieve_.for_each_higher_power([&](std::uint64_t n, std::uint64_t p, unsigned e) {
        powers_.push_back({n, std::log(static_cast<double>(p)), p, e});
      });
      std::sort(powers_.begin(), powers_.end(),
                [](const PrimePowerEvent& a, const PrimePowerEvent& b) { return a.n < b.n; });
      auto pw = powers_.begin();
      sieve_.for_each_prime([&](std::uint64_t p) {
        while (pw != powers_.end() && pw->n < p) batch_.push_back(*pw++);
        batch_.push_back({p, std::log(static_cast<double>(p)), p, 1});
      });
      batch_.insert(batch_.end(), pw, powers_.end());
      if (!batch_.empty()) return batch_;
    }
    return {};
  }

  /// Calls f(event) for the remainder of the stream.
  template <class F>
  void for_each(F&& f) {
    for (auto batch = next_batch(); !batch.empty(); batch = next_batch()) {
      for (const auto& ev : batch) f(ev);
    }
  }

 private:
  SegmentedSieve sieve_;
  std::vector<PrimePowerEvent> batch_;
  std::vector<PrimePowerEvent> powers_;
};

/// All prime-power events in [lo, hi]. Materializes the list; use
/// LambdaEventStream for long ranges.
inline std::vector<PrimePowerEvent> lambda_events(std::uint64_t lo, std::uint64_t hi,
                                                  const SieveConfig& cfg = {}) {
  std::vector<PrimePowerEvent> out;
  LambdaEventStream(lo, hi, cfg).for_each([&](const PrimePowerEvent& e) { out.push_back(e); });
  return out;
}

/// Chebyshev psi(x) = sum_{n <= x} Lambda(n).
inline double psi(double x, const SieveConfig& cfg = {}) {
  if (!(x >= 0.0)) throw std::invalid_argument("psi: x must be >= 0");
  if (x >= static_cast<double>(kMaxSieveBound) + 1.0) {
    throw std::out_of_range("psi: x exceeds the sieve bound");
  }
  const auto hi = static_cast<std::uint64_t>(std::floor(x));
  if (hi < 2) return 0.0;
  CompensatedSum s;
  LambdaEventStream(1, hi, cfg).for_each([&](const PrimePowerEvent& e) { s.add(e.log_p); });
  return s.value();
}

/// Dense Lambda(n) values for n = start, start+1, ..., hi, one segment at a time.
class LambdaCursor {
 public:
  LambdaCursor(std::uint64_t start, std::uint64_t hi, const SieveConfig& cfg = {})
      : sieve_(start, hi, cfg) {}

  /// Up to `max` upcoming values without consuming them. Empty at end.
  std::span<const double> peek(std::size_t max) {
    if (pos_ == values_.size() && !refill()) return {};
    return std::span<const double>(values_).subspan(pos_, std::min(max, values_.size() - pos_));
  }

  void advance(std::size_t count) noexcept { pos_ += count; }

  /// Position of the next value peek() would return.
  std::uint64_t position() const noexcept { return base_n_ + pos_; }

 private:
  bool refill() {
    if (!sieve_.next()) return false;
    base_n_ = sieve_.segment_lo();
    values_.assign(sieve_.segment_hi() - base_n_ + 1, 0.0);
    sieve_.for_each_prime(
        [&](std::uint64_t p) { values_[p - base_n_] = std::log(static_cast<double>(p)); });
    sieve_.for_each_higher_power([&](std::uint64_t n, std::uint64_t p, unsigned) {
      values_[n - base_n_] = std::log(static_cast<double>(p));
    });
    pos_ = 0;
    return true;
  }

  SegmentedSieve sieve_;
  std::vector<double> values_;
  std::size_t pos_ = 0;
  std::uint64_t base_n_ = 0;
};

/// Sliding window D(n) = psi(n+H) - psi(n) - H for n = first, ..., last.
/// The window sum is carried forward by adding Lambda(n+H) and removing
/// Lambda(n), in compensated arithmetic.
class WindowStream {
 public:
  WindowStream(std::uint64_t first, std::uint64_t last, std::uint64_t window,
               const SieveConfig& cfg = {})
      : first_(first), last_(last), window_(window), next_n_(first),
        lead_(first + window + 1, std::max(last + window, first + window + 1), cfg),
        lag_(first + 1, std::max(last, first + 1), cfg) {
    if (window < 1) throw std::invalid_argument("window length H must be >= 1");
    if (last < first) throw std::invalid_argument("window range must satisfy first <= last");
    if (last + window > kMaxSieveBound) {
      throw std::out_of_range("N + H exceeds the sieve bound");
    }
    LambdaCursor init(first + 1, first + window, cfg);
    for (auto run = init.peek(window); !run.empty(); run = init.peek(window)) {
      for (double v : run) sum_.add(v);
      init.advance(run.size());
    }
  }

  std::uint64_t window() const noexcept { return window_; }

  /// Index n of the next value fill() will write.
  std::uint64_t position() const noexcept { return next_n_; }
  bool done() const noexcept { return next_n_ > last_; }

  /// Writes consecutive D(n) values into `out`; returns how many were written.
  std::size_t fill(std::span<double> out) {
    std::size_t produced = 0;
    const double h = static_cast<double>(window_);
    if (done() || out.empty()) return 0;
    if (next_n_ == first_) {
      out[0] = sum_.value() - h;
      ++produced;
      ++next_n_;
    }
    while (produced < out.size() && next_n_ <= last_) {
      const std::size_t want =
          std::min<std::uint64_t>(out.size() - produced, last_ - next_n_ + 1);
      const auto lead = lead_.peek(want);
      const auto lag = lag_.peek(lead.size());
      const std::size_t run = lag.size();
      for (std::size_t i = 0; i < run; ++i) {
        sum_.add(lead[i]);
        sum_.add(-lag[i]);
        out[produced + i] = sum_.value() - h;
      }
      lead_.advance(run);
      lag_.advance(run);
      produced += run;
      next_n_ += run;
    }
    return produced;
  }

  /// Calls f(n, D(n)) for the rest of the stream.
  template <class F>
  void for_each(F&& f) {
    std::vector<double> buf(1 << 14);
    while (!done()) {
      const std::uint64_t n0 = next_n_;
      const std::size_t got = fill(buf);
      for (std::size_t i = 0; i < got; ++i) f(n0 + i, buf[i]);
    }
  }

 private:
  std::uint64_t first_, last_, window_, next_n_;
  CompensatedSum sum_;
  LambdaCursor lead_;
  LambdaCursor lag_;
};

/// The stream of D(n) for n = 0, ..., N.
inline WindowStream window_sums(std::uint64_t n_max, std::uint64_t window,
                                const SieveConfig& cfg = {}) {
  return WindowStream(0, n_max, window, cfg);
}

}  // namespace shortint
