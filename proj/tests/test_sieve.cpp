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


#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "shortint/sieve.hpp"

namespace shortint {
namespace {

// Independent reference: Lambda(n) by trial division.
double mangoldt(std::uint64_t n) {
  for (std::uint64_t p = 2; p * p <= n; ++p) {
    if (n % p) continue;
    while (n % p == 0) n /= p;
    return n == 1 ? std::log(static_cast<double>(p)) : 0.0;
  }
  return n >= 2 ? std::log(static_cast<double>(n)) : 0.0;
}

bool trial_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t p = 2; p * p <= n; ++p) {
    if (n % p == 0) return false;
  }
  return true;
}

TEST(PrimesIn, SmallRanges) {
  EXPECT_EQ(primes_in(1, 10), (std::vector<std::uint64_t>{2, 3, 5, 7}));
  EXPECT_TRUE(primes_in(90, 96).empty());
  EXPECT_EQ(primes_in(2, 2), (std::vector<std::uint64_t>{2}));
  EXPECT_TRUE(primes_in(1, 1).empty());
}

TEST(PrimesIn, CountToMillionMatchesTrialDivision) {
  std::uint64_t trial = 0;
  for (std::uint64_t n = 2; n <= 1'000'000; ++n) trial += trial_prime(n);
  EXPECT_EQ(trial, 78498u);
  EXPECT_EQ(primes_in(1, 1'000'000).size(), trial);
}

TEST(PrimesIn, SegmentLengthDoesNotChangeResult) {
  const auto reference = primes_in(999'000, 1'001'000);
  for (std::uint64_t seg : {2, 3, 64, 1000, 4097}) {
    SieveConfig cfg;
    cfg.segment_length = seg;
    EXPECT_EQ(primes_in(999'000, 1'001'000, cfg), reference) << "segment " << seg;
  }
  for (auto p : reference) EXPECT_TRUE(trial_prime(p));
}

TEST(PrimesIn, RejectsBadRanges) {
  EXPECT_THROW(primes_in(0, 10), std::invalid_argument);
  EXPECT_THROW(primes_in(10, 9), std::invalid_argument);
  EXPECT_THROW(primes_in(1, kMaxSieveBound + 1), std::out_of_range);
  SieveConfig cfg;
  cfg.segment_length = 1;
  EXPECT_THROW(primes_in(1, 10, cfg), std::invalid_argument);
}

TEST(LambdaEvents, Examples) {
  const auto ev = lambda_events(8, 9);
  ASSERT_EQ(ev.size(), 2u);
  EXPECT_EQ(ev[0], (PrimePowerEvent{8, std::log(2.0), 2, 3}));
  EXPECT_EQ(ev[1], (PrimePowerEvent{9, std::log(3.0), 3, 2}));
  EXPECT_TRUE(lambda_events(12, 12).empty());
  EXPECT_EQ(lambda_events(2, 2), (std::vector<PrimePowerEvent>{{2, std::log(2.0), 2, 1}}));
  EXPECT_TRUE(lambda_events(1, 1).empty());
}

TEST(LambdaEvents, MatchTrialDivisionWithTinySegments) {
  SieveConfig cfg;
  cfg.segment_length = 37;
  const auto ev = lambda_events(1, 20'000, cfg);
  std::size_t i = 0;
  for (std::uint64_t n = 1; n <= 20'000; ++n) {
    const double lam = mangoldt(n);
    if (lam == 0.0) continue;
    ASSERT_LT(i, ev.size());
    EXPECT_EQ(ev[i].n, n);
    EXPECT_DOUBLE_EQ(ev[i].log_p, lam);
    ++i;
  }
  EXPECT_EQ(i, ev.size());
}

TEST(LambdaEvents, Invariants) {
  const auto ev = lambda_events(1, 200'000);
  for (std::size_t i = 0; i < ev.size(); ++i) {
    std::uint64_t power = 1;
    for (unsigned e = 0; e < ev[i].exponent; ++e) power *= ev[i].p;
    EXPECT_EQ(power, ev[i].n);
    EXPECT_EQ(ev[i].log_p, std::log(static_cast<double>(ev[i].p)));
    if (i) {
      EXPECT_LT(ev[i - 1].n, ev[i].n);
    }
  }
}

TEST(LambdaEvents, PrimeEventsAreExactlyThePrimes) {
  std::size_t first_powers = 0;
  LambdaEventStream(1, 1'000'000).for_each([&](const PrimePowerEvent& e) {
    first_powers += e.exponent == 1;
  });
  EXPECT_EQ(first_powers, primes_in(1, 1'000'000).size());
}

TEST(LambdaEvents, SplitAnywhereConcatenates) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const std::uint64_t lo = 1 + rng() % 50'000;
    const std::uint64_t hi = lo + rng() % 50'000;
    const std::uint64_t mid = lo + rng() % (hi - lo + 1);
    SieveConfig cfg;
    cfg.segment_length = 2 + rng() % 5000;
    auto left = lambda_events(lo, mid, cfg);
    if (mid < hi) {
      const auto right = lambda_events(mid + 1, hi, cfg);
      left.insert(left.end(), right.begin(), right.end());
    }
    EXPECT_EQ(left, lambda_events(lo, hi)) << lo << " " << mid << " " << hi;
  }
}

TEST(Psi, Values) {
  EXPECT_EQ(psi(0), 0.0);
  EXPECT_EQ(psi(1), 0.0);
  EXPECT_NEAR(psi(2), std::log(2.0), 1e-15);
  EXPECT_NEAR(psi(10), std::log(2520.0), 1e-12);
  EXPECT_NEAR(psi(10.9), psi(10), 0.0);
  double direct = 0.0;
  for (std::uint64_t n = 1; n <= 100; ++n) direct += mangoldt(n);
  EXPECT_NEAR(psi(100), direct, 1e-9);
  EXPECT_THROW(psi(-1.0), std::invalid_argument);
}

TEST(Psi, StepsAreZeroOrLogPrime) {
  double prev = psi(1);
  for (std::uint64_t x = 2; x <= 2000; ++x) {
    const double cur = psi(static_cast<double>(x));
    const double step = cur - prev;
    EXPECT_GE(step, 0.0);
    if (step > 1e-12) {
      bool found = false;
      for (auto p : primes_in(2, x)) found = found || std::fabs(step - std::log(double(p))) < 1e-9;
      EXPECT_TRUE(found) << x;
    }
    prev = cur;
  }
}

TEST(WindowSums, SmallExamples) {
  std::vector<double> got;
  window_sums(1, 1).for_each([&](std::uint64_t, double d) { got.push_back(d); });
  ASSERT_EQ(got.size(), 2u);
  EXPECT_DOUBLE_EQ(got[0], -1.0);
  EXPECT_NEAR(got[1], std::log(2.0) - 1.0, 1e-15);

  auto stream = window_sums(5, 10);
  std::vector<double> buf(1);
  ASSERT_EQ(stream.fill(buf), 1u);
  EXPECT_NEAR(buf[0], std::log(2520.0) - 10.0, 1e-12);
}

TEST(WindowSums, EmitsNPlusOneValuesInOrder) {
  std::uint64_t count = 0, expect_n = 0;
  window_sums(1000, 17).for_each([&](std::uint64_t n, double) {
    EXPECT_EQ(n, expect_n++);
    ++count;
  });
  EXPECT_EQ(count, 1001u);
}

TEST(WindowSums, MatchIndependentPsiDifferences) {
  const std::uint64_t N = 100'000;
  std::vector<double> prefix(N + 400, 0.0);  // prefix[x] = psi(x) by trial division
  for (std::uint64_t x = 1; x < prefix.size(); ++x) prefix[x] = prefix[x - 1] + mangoldt(x);
  for (std::uint64_t H : {1, 5, 64, 300}) {
    SieveConfig cfg;
    cfg.segment_length = 4093;
    std::vector<double> d;
    d.reserve(N + 1);
    window_sums(N, H, cfg).for_each([&](std::uint64_t, double v) { d.push_back(v); });
    ASSERT_EQ(d.size(), N + 1);
    std::mt19937_64 rng(H);
    for (int t = 0; t < 500; ++t) {
      const std::uint64_t n = rng() % (N + 1);
      EXPECT_NEAR(d[n], prefix[n + H] - prefix[n] - double(H), 1e-9) << "n=" << n << " H=" << H;
    }
  }
}

TEST(WindowSums, OffsetStartAgreesWithFullStream) {
  std::vector<double> full;
  window_sums(50'000, 123).for_each([&](std::uint64_t, double v) { full.push_back(v); });
  WindowStream part(31'337, 50'000, 123);
  part.for_each([&](std::uint64_t n, double v) { EXPECT_NEAR(v, full[n], 1e-9); });
  EXPECT_TRUE(part.done());
}

TEST(WindowSums, Errors) {
  EXPECT_THROW(window_sums(10, 0), std::invalid_argument);
  EXPECT_THROW(window_sums(kMaxSieveBound, 10), std::out_of_range);
}

}  // namespace
}  // namespace shortint
