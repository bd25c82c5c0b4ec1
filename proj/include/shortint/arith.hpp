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

// Small-integer arithmetic helpers: factorization by trial division,
// Moebius, Euler phi and divisor lists. Inputs here are moduli and tuple
// spans, never sieve-range positions, so trial division is adequate.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <utility>
#include <vector>

namespace shortint {

struct PrimeFactor {
  std::uint64_t prime;
  unsigned exponent;
};

inline std::vector<PrimeFactor> factorize(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("factorize: n must be positive");
  std::vector<PrimeFactor> out;
  for (std::uint64_t p = 2; p * p <= n; p += (p == 2 ? 1 : 2)) {
    if (n % p != 0) continue;
    unsigned e = 0;
    while (n % p == 0) {
      n /= p;
      ++e;
    }
    out.push_back({p, e});
  }
  if (n > 1) out.push_back({n, 1});
  return out;
}

inline bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  if (n % 2 == 0) return n == 2;
  for (std::uint64_t p = 3; p * p <= n; p += 2) {
    if (n % p == 0) return false;
  }
  return true;
}

inline int mobius(std::uint64_t n) {
  int sign = 1;
  for (const auto& f : factorize(n)) {
    if (f.exponent > 1) return 0;
    sign = -sign;
  }
  return sign;
}

inline std::uint64_t euler_phi(std::uint64_t n) {
  std::uint64_t phi = n;
  for (const auto& f : factorize(n)) phi = phi / f.prime * (f.prime - 1);
  return phi;
}

inline std::vector<std::uint64_t> divisors(std::uint64_t n) {
  std::vector<std::uint64_t> out{1};
  for (const auto& f : factorize(n)) {
    const std::size_t base = out.size();
    std::uint64_t pk = 1;
    for (unsigned e = 1; e <= f.exponent; ++e) {
      pk *= f.prime;
      for (std::size_t i = 0; i < base; ++i) out.push_back(out[i] * pk);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Standard normal moments: 1*3*...*(k-1) for even k, 0 for odd k.
inline double gaussian_moment(unsigned k) {
  if (k % 2 == 1) return 0.0;
  double m = 1.0;
  for (unsigned j = k; j > 1; j -= 2) m *= static_cast<double>(j - 1);
  return m;
}

}  // namespace shortint
