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

// Exact moments of reduced residues in short intervals. Everything in this
// header is integer or rational arithmetic; exponential sums are folded to
// integers through Ramanujan sums and never evaluated numerically.

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "shortint/arith.hpp"
#include "shortint/errors.hpp"

namespace shortint {

using BigInt = boost::multiprecision::cpp_int;
/// Exact rational, always stored in lowest terms with positive denominator.
using RationalValue = boost::multiprecision::cpp_rational;

inline std::string to_string(const RationalValue& r) {
  const BigInt num = boost::multiprecision::numerator(r);
  const BigInt den = boost::multiprecision::denominator(r);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

inline double to_double(const RationalValue& r) { return r.convert_to<double>(); }

/// A squarefree modulus together with its prime factors.
class ModulusQ {
 public:
  explicit ModulusQ(std::uint64_t q) : q_(q) {
    if (q == 0) throw std::invalid_argument("modulus must be positive");
    for (const auto& f : factorize(q)) {
      if (f.exponent > 1) {
        throw std::invalid_argument("modulus " + std::to_string(q) + " is not squarefree");
      }
      primes_.push_back(f.prime);
    }
    phi_ = 1;
    for (auto p : primes_) phi_ *= p - 1;
  }

  std::uint64_t value() const noexcept { return q_; }
  std::uint64_t phi() const noexcept { return phi_; }
  const std::vector<std::uint64_t>& primes() const noexcept { return primes_; }

 private:
  std::uint64_t q_;
  std::uint64_t phi_ = 1;
  std::vector<std::uint64_t> primes_;
};

/// Product of the primes up to `bound`.
inline ModulusQ primorial(std::uint64_t bound) {
  std::uint64_t q = 1;
  for (std::uint64_t p = 2; p <= bound; ++p) {
    if (is_prime(p)) q *= p;
  }
  return ModulusQ(q);
}

inline constexpr std::uint64_t kResidueBudget = 100'000'000;

/// m_k(q; h): sum over n mod q of (#{1 <= m <= h : (m+n, q) = 1} - h phi(q)/q)^k.
inline RationalValue m_k_direct(const ModulusQ& mod, std::uint64_t h, unsigned k) {
  const std::uint64_t q = mod.value();
  if (h < 1) throw std::invalid_argument("m_k_direct requires h >= 1");
  if (k < 1) throw std::invalid_argument("m_k_direct requires k >= 1");
  if (q > kResidueBudget / h) {
    throw budget_error("m_k_direct: q*h exceeds the enumeration budget", q * h, kResidueBudget);
  }
  std::vector<std::uint8_t> coprime(q);
  for (std::uint64_t r = 0; r < q; ++r) coprime[r] = std::gcd(r, q) == 1;

  // Window counts for n = 1..q by sliding, tallied into a histogram.
  std::vector<std::uint64_t> hist(h + 1, 0);
  std::uint64_t count = 0;
  for (std::uint64_t m = 1; m <= h; ++m) count += coprime[(1 + m) % q];
  for (std::uint64_t n = 1; n <= q; ++n) {
    ++hist[count];
    count += coprime[(n + 1 + h) % q];
    count -= coprime[(n + 1) % q];
  }

  // (c - h phi/q)^k = (q c - h phi)^k / q^k
  const BigInt hphi = BigInt(h) * mod.phi();
  BigInt total = 0;
  for (std::uint64_t c = 0; c <= h; ++c) {
    if (hist[c] == 0) continue;
    total += BigInt(hist[c]) * boost::multiprecision::pow(BigInt(q) * c - hphi, k);
  }
  return RationalValue(total, boost::multiprecision::pow(BigInt(q), k));
}

/// V_k(q; h) = m_k(q; h) / (q (phi(q)/q)^k).
inline RationalValue v_k(const ModulusQ& mod, std::uint64_t h, unsigned k) {
  const RationalValue m = m_k_direct(mod, h, k);
  const BigInt q = mod.value();
  return m * RationalValue(boost::multiprecision::pow(q, k - 1),
                           boost::multiprecision::pow(BigInt(mod.phi()), k));
}

/// c_d(m) from the closed form mu(d/g) phi(d) / phi(d/g), g = gcd(d, m).
inline std::int64_t ramanujan(std::uint64_t d, std::int64_t m) {
  if (d < 1) throw std::invalid_argument("ramanujan requires d >= 1");
  const std::uint64_t am = static_cast<std::uint64_t>(m < 0 ? -m : m);
  const std::uint64_t g = std::gcd(d, am);  // gcd(d, 0) = d
  const std::uint64_t r = d / g;
  return static_cast<std::int64_t>(mobius(r)) * static_cast<std::int64_t>(euler_phi(d) / euler_phi(r));
}

/// c_d(m) as the divisor sum over e | gcd(d, m) of mu(d/e) e.
inline std::int64_t ramanujan_divisor_sum(std::uint64_t d, std::int64_t m) {
  if (d < 1) throw std::invalid_argument("ramanujan requires d >= 1");
  const std::uint64_t am = static_cast<std::uint64_t>(m < 0 ? -m : m);
  std::int64_t total = 0;
  for (std::uint64_t e : divisors(std::gcd(d, am))) {
    total += mobius(d / e) * static_cast<std::int64_t>(e);
  }
  return total;
}

/// sum over reduced a mod d of |E(a/d)|^2 = phi(d) h + 2 sum_{m=1}^{h} (h - m) c_d(m).
inline RationalValue e_power_sum(std::uint64_t d, std::uint64_t h) {
  if (d < 1 || h < 1) throw std::invalid_argument("e_power_sum requires d, h >= 1");
  BigInt total = BigInt(euler_phi(d)) * h;
  for (std::uint64_t m = 1; m <= h; ++m) {
    total += 2 * BigInt(h - m) * ramanujan(d, static_cast<std::int64_t>(m));
  }
  return RationalValue(total);
}

/// Same quantity from the double sum over m1, m2 in [1, h] of the reduced
/// exponential sum at m1 - m2, each evaluated as a Moebius divisor sum.
inline RationalValue e_power_sum_direct(std::uint64_t d, std::uint64_t h) {
  if (d < 1 || h < 1) throw std::invalid_argument("e_power_sum requires d, h >= 1");
  // c_d(-j) = c_d(j)
  std::vector<std::int64_t> c(h);
  for (std::uint64_t j = 0; j < h; ++j) c[j] = ramanujan_divisor_sum(d, static_cast<std::int64_t>(j));
  std::int64_t total = 0;
  for (std::uint64_t m1 = 1; m1 <= h; ++m1) {
    for (std::uint64_t m2 = 1; m2 <= h; ++m2) total += c[m1 > m2 ? m1 - m2 : m2 - m1];
  }
  return RationalValue(total);
}

/// V_2(q; h) as sum over d | q, d > 1 of mu(d)^2 / phi(d)^2 * e_power_sum(d, h).
inline RationalValue v_2_closed(const ModulusQ& mod, std::uint64_t h) {
  RationalValue total = 0;
  for (std::uint64_t d : divisors(mod.value())) {
    if (d == 1) continue;
    const BigInt phi = euler_phi(d);
    total += e_power_sum(d, h) / RationalValue(phi * phi);
  }
  return total;
}

inline constexpr std::uint64_t kDirectSumBudget = 500'000'000;

/// V_k(q; h) from its defining multiple sum over q_i | q (q_i > 1), reduced
/// a_i mod q_i with sum a_i/q_i integral, and d_i in [1, h].
///
/// Writing a_i/q_i = b_i/q turns the outer sums into b_i in Z/q \ {0} with
/// sum b_i = 0, and the d-sums into powers of zeta = e(1/q). The total is fixed
/// by every automorphism zeta -> zeta^c, so it equals its average over them,
/// which replaces each zeta^j by c_q(j)/phi(q). The last b_i is forced by the
/// sum condition, hence (q-1)^{k-1} h^k evaluations.
inline RationalValue v_k_direct(const ModulusQ& mod, std::uint64_t h, unsigned k) {
  const std::uint64_t q = mod.value();
  if (h < 1) throw std::invalid_argument("v_k_direct requires h >= 1");
  if (k < 1) throw std::invalid_argument("v_k_direct requires k >= 1");
  if (q == 1) return 0;
  {
    long double cost = 1.0L;
    for (unsigned i = 0; i + 1 < k; ++i) cost *= static_cast<long double>(q - 1);
    for (unsigned i = 0; i < k; ++i) cost *= static_cast<long double>(h);
    if (cost > static_cast<long double>(kDirectSumBudget)) {
      throw budget_error("v_k_direct: tuple evaluations exceed the budget",
                         static_cast<std::uint64_t>(std::min(cost, 1.8e19L)), kDirectSumBudget);
    }
  }
  if (k == 1) return 0;  // b_1 = 0 is excluded

  const std::int64_t phi_q = static_cast<std::int64_t>(mod.phi());
  // weight(b) = mu(q_b) phi(q) / phi(q_b) with q_b = q / gcd(b, q)
  std::vector<std::int64_t> weight(q, 0), trace(q, 0);
  for (std::uint64_t b = 1; b < q; ++b) {
    const std::uint64_t qb = q / std::gcd(b, q);
    weight[b] = mobius(qb) * (phi_q / static_cast<std::int64_t>(euler_phi(qb)));
  }
  for (std::uint64_t t = 0; t < q; ++t) {
    trace[t] = ramanujan_divisor_sum(q, static_cast<std::int64_t>(t));
  }

  __int128 total = 0;
  std::vector<std::uint64_t> b(k - 1, 1);
  std::vector<std::uint64_t> m(k - 1, 1);
  for (;;) {
    std::uint64_t bsum = 0;
    __int128 w = 1;
    for (auto bi : b) {
      bsum += bi;
      w *= weight[bi];
    }
    const std::uint64_t last = (q - bsum % q) % q;
    if (last != 0) {
      w *= weight[last];
      // Sum over m_1..m_{k-1} of sum over m_k of c_q(sum b_i m_i).
      std::int64_t inner = 0;
      std::fill(m.begin(), m.end(), 1);
      for (;;) {
        std::uint64_t s = 0;
        for (std::size_t i = 0; i < m.size(); ++i) s = (s + b[i] * m[i]) % q;
        for (std::uint64_t mk = 1; mk <= h; ++mk) {
          s = (s + last) % q;
          inner += trace[s];
        }
        std::size_t i = 0;
        while (i < m.size() && ++m[i] > h) m[i++] = 1;
        if (i == m.size()) break;
      }
      total += w * inner;
    }
    std::size_t i = 0;
    while (i < b.size() && ++b[i] == q) b[i++] = 1;
    if (i == b.size()) break;
  }

  auto to_big = [](__int128 v) {
    const bool neg = v < 0;
    unsigned __int128 u = neg ? static_cast<unsigned __int128>(-v) : static_cast<unsigned __int128>(v);
    BigInt out = static_cast<std::uint64_t>(u >> 64);
    out <<= 64;
    out += static_cast<std::uint64_t>(u);
    return neg ? BigInt(-out) : out;
  };
  return RationalValue(to_big(total), boost::multiprecision::pow(BigInt(phi_q), k + 1));
}

struct Theorem1Report {
  RationalValue v_k_exact;
  RationalValue v_2_exact;
  double v_k = 0.0;
  double main = 0.0;      // mu_k V_2^{k/2}
  double residual = 0.0;  // V_k - main
  double ratio = 0.0;     // V_k / main, 0 when main is 0
};

/// V_k against the Gaussian prediction mu_k V_2^{k/2}. Reporting only.
inline Theorem1Report theorem1_report(const ModulusQ& mod, std::uint64_t h, unsigned k) {
  Theorem1Report r;
  r.v_k_exact = v_k(mod, h, k);
  r.v_2_exact = v_k(mod, h, 2);
  r.v_k = to_double(r.v_k_exact);
  r.main = gaussian_moment(k) * std::pow(to_double(r.v_2_exact), k / 2.0);
  r.residual = r.v_k - r.main;
  r.ratio = r.main != 0.0 ? r.v_k / r.main : 0.0;
  return r;
}

}  // namespace shortint
