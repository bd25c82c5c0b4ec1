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


// Acceptance gate. Runs every criterion (or the ones named on the command
// line), prints one PASS/FAIL line each, exits nonzero if any failed.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "shortint/analogues.hpp"
#include "shortint/arith.hpp"
#include "shortint/interval_moments.hpp"
#include "shortint/reduced_residues.hpp"
#include "shortint/sieve.hpp"
#include "shortint/singular_series.hpp"

namespace {

using namespace shortint;

struct Outcome {
  bool pass = true;
  std::string detail;

  void check(bool ok, const std::string& what) {
    if (!detail.empty()) detail += "; ";
    detail += what + (ok ? "" : " [FAILED]");
    pass = pass && ok;
  }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

Outcome roundtrip() {
  Outcome o;
  std::mt19937_64 rng(20260101);
  double worst = 0.0;
  for (int t = 0; t < 200; ++t) {
    const int k = 1 + static_cast<int>(rng() % 4);
    std::vector<std::int64_t> d;
    while (static_cast<int>(d.size()) < k) {
      const auto v = static_cast<std::int64_t>(rng() % 51);
      if (std::find(d.begin(), d.end(), v) == d.end()) d.push_back(v);
    }
    const TupleD D(d);
    worst = std::max(worst, std::fabs(s_from_s0(D) - singular_series(D)));
  }
  o.check(worst <= 1e-9, "max |s_from_s0 - S| = " + fmt("%.3g", worst) + " over 200 tuples");
  return o;
}

Outcome local_factors() {
  Outcome o;
  double worst = 0.0;
  std::size_t cases = 0;
  const auto primes = primes_in(2, 50);
  std::vector<std::vector<std::int64_t>> tuples;
  for (std::int64_t a = 0; a <= 20; ++a) {
    tuples.push_back({a});
    for (std::int64_t b = a + 1; b <= 20; ++b) {
      tuples.push_back({a, b});
      for (std::int64_t c = b + 1; c <= 20; ++c) tuples.push_back({a, b, c});
    }
  }
  for (const auto& t : tuples) {
    const TupleD D(t);
    for (auto p : primes) {
      worst = std::max(worst, std::fabs(a_local_sum(D, p) - local_factor(D, p)));
      ++cases;
    }
  }
  o.check(worst <= 1e-12, "max |a_local_sum - local_factor| = " + fmt("%.3g", worst) + " over " +
                              std::to_string(cases) + " cases");
  return o;
}

bool is_squarefree(std::uint64_t n) {
  for (const auto& f : factorize(n)) {
    if (f.exponent > 1) return false;
  }
  return true;
}

Outcome exact_identities() {
  Outcome o;
  std::size_t bad = 0, cases = 0;
  for (std::uint64_t q : {2, 6, 30, 210}) {
    const ModulusQ mod(q);
    for (std::uint64_t h = 1; h <= 12; ++h) {
      for (unsigned k = 1; k <= 3; ++k) {
        ++cases;
        if (v_k(mod, h, k) != v_k_direct(mod, h, k)) ++bad;
      }
    }
  }
  o.check(bad == 0, "v_k = v_k_direct: " + std::to_string(cases - bad) + "/" + std::to_string(cases));

  bad = 0;
  cases = 0;
  for (std::uint64_t q = 1; q <= 2310; ++q) {
    if (!is_squarefree(q)) continue;
    const ModulusQ mod(q);
    for (std::uint64_t h = 1; h <= 50; ++h) {
      ++cases;
      if (v_2_closed(mod, h) != v_k(mod, h, 2)) ++bad;
    }
  }
  o.check(bad == 0, "v_2_closed = v_2: " + std::to_string(cases - bad) + "/" + std::to_string(cases));

  bad = 0;
  cases = 0;
  for (std::uint64_t d = 1; d <= 500; ++d) {
    for (std::uint64_t h = 1; h <= 100; ++h) {
      ++cases;
      if (e_power_sum(d, h) != e_power_sum_direct(d, h)) ++bad;
    }
  }
  o.check(bad == 0,
          "e_power_sum routes: " + std::to_string(cases - bad) + "/" + std::to_string(cases));
  return o;
}

double band(double h) { return 5.0 * std::pow(h, 0.55); }

Outcome pair_sums() {
  Outcome o;
  for (std::uint64_t h : {100, 500, 1000}) {
    const double hd = static_cast<double>(h);
    const double expected = hd * hd - hd * std::log(hd) + constants::kB * hd;
    const double diff = pair_sum(h) - expected;
    o.check(std::fabs(diff) <= band(hd), "h=" + std::to_string(h) + " diff " + fmt("%.3f", diff) +
                                             " band " + fmt("%.1f", band(hd)));
  }
  return o;
}

Outcome r2_values() {
  Outcome o;
  for (std::uint64_t h : {100, 500, 1000}) {
    const double hd = static_cast<double>(h);
    const double expected = -hd * std::log(hd) + constants::kA * hd;
    const double diff = r_k(h, 2) - expected;
    o.check(std::fabs(diff) <= band(hd), "h=" + std::to_string(h) + " diff " + fmt("%.3f", diff) +
                                             " band " + fmt("%.1f", band(hd)));
  }
  return o;
}

Outcome binomial_bridge() {
  Outcome o;
  double worst = 0.0;
  for (std::uint64_t h = 1; h <= 60; ++h) {
    for (std::size_t k = 1; k <= 3; ++k) {
      const double g = gallagher_sum(h, k);
      const double b = gallagher_from_r(h, k);
      const double rel = g == 0.0 ? std::fabs(b) : std::fabs(g - b) / std::fabs(g);
      worst = std::max(worst, rel);
    }
  }
  o.check(worst <= 1e-7, "max relative gap " + fmt("%.3g", worst) + " for h <= 60, k <= 3");
  return o;
}

MomentOptions moment_options() {
  MomentOptions opt;
  opt.workers = default_workers();
  return opt;
}

Outcome second_moment() {
  Outcome o;
  {
    const auto sums = empirical_moment_sums(10'000'000, 1000, 2, moment_options());
    const double ratio = sums[2] / thm3_main_term(10'000'000, 1000, 2);
    o.check(std::fabs(ratio - 1.0) <= 0.15, "N=1e7 H=1e3 M2/main " + fmt("%.4f", ratio));
  }
  {
    const double N = 1e8, H = 1e4;
    const auto sums = empirical_moment_sums(100'000'000, 10'000, 2, moment_options());
    const double per_n = sums[2] / N;
    const double ratio = per_n / (H * (std::log(N / H) + constants::kB - 1.0));
    o.check(ratio >= 0.8 && ratio <= 1.25, "N=1e8 H=1e4 (M2/N)/H(log(N/H)+B-1) " + fmt("%.4f", ratio));
    const double cramer = 0.6 * H * std::log(N);
    o.check(per_n < cramer, "M2/N " + fmt("%.1f", per_n) + " < 0.6 H log N " + fmt("%.1f", cramer));
  }
  return o;
}

Outcome fourth_moment() {
  Outcome o;
  const auto sums = empirical_moment_sums(10'000'000, 1000, 4, moment_options());
  const double ratio = sums[4] / thm3_main_term(10'000'000, 1000, 4);
  o.check(ratio >= 0.5 && ratio <= 2.0, "N=1e7 H=1e3 M4/main " + fmt("%.4f", ratio));
  return o;
}

Outcome normality() {
  Outcome o;
  const auto d = distribution(10'000'000, 1000, 60, moment_options());
  o.check(d.ks < 0.08, std::string(d.ks_exact ? "exact" : "binned") + " KS " + fmt("%.4f", d.ks));
  // values are already divided by sqrt(H log(N/H))
  o.check(d.variance >= 0.8 && d.variance <= 1.25, "variance ratio " + fmt("%.4f", d.variance));
  return o;
}

Outcome random_matrix() {
  Outcome o;
  const MCConfig cfg{50, 100'000, 0x5eed};
  const auto ms = rmt_moments(cfg, 7, default_workers());
  const double N = 50.0;
  for (const auto& m : ms) {
    double expected = 0.0;
    if (m.k == 2) expected = N / 2.0;
    else if (m.k == 4) expected = 3.0 * N * (N - 1.0) / 4.0 + 3.0 * N / 8.0;
    else if (m.k % 2 == 0) continue;
    const double z = (m.mean - expected) / m.std_error;
    o.check(std::fabs(z) <= 4.0, "k=" + std::to_string(m.k) + " z " + fmt("%.2f", z));
  }
  return o;
}

Outcome zero_sums() {
  Outcome o;
  const auto table = load_zeros(std::string(SHORTINT_TEST_DATA) + "/zeros100.txt");
  std::mt19937_64 rng(22);
  std::uniform_real_distribution<double> t_dist(table.ordinates().front(), table.max_ordinate());
  std::uniform_real_distribution<double> logx_dist(std::log(2.0), std::log(1e4));
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const double T = t_dist(rng);
    const double X = std::exp(logx_dist(rng));
    double oracle = 0.0;
    for (double g : table.up_to(T)) {
      const std::complex<double> s(1.0, g);
      oracle += ((std::exp(s * std::log(X)) - 1.0) / s).real();
    }
    const double lhs = zero_moment(table, T, X, 1).lhs;
    worst = std::max(worst, std::fabs(lhs - oracle) / std::fabs(oracle));
  }
  o.check(worst <= 1e-6, "k=1 max relative gap " + fmt("%.3g", worst) + " over 20 (T, X)");
  const auto r = zero_moment(table, table.max_ordinate(), 1e4, 2);
  o.check(r.ratio && *r.ratio >= 0.5 && *r.ratio <= 2.0,
          "k=2 X=1e4 " + std::to_string(r.zeros_used) + " zeros ratio " + fmt("%.4f", r.ratio.value_or(0.0)));
  return o;
}

double mangoldt_oracle(std::uint64_t n) {
  for (std::uint64_t p = 2; p * p <= n; ++p) {
    if (n % p) continue;
    while (n % p == 0) n /= p;
    return n == 1 ? std::log(static_cast<double>(p)) : 0.0;
  }
  return n >= 2 ? std::log(static_cast<double>(n)) : 0.0;
}

Outcome psi_sanity() {
  Outcome o;
  const double p10 = psi(10);
  o.check(std::fabs(p10 - 7.83200) <= 1e-5, "psi(10) " + fmt("%.7f", p10) + " vs 7.83200 +- 1e-5 (log 2520 = " +
                                                 fmt("%.7f", std::log(2520.0)) + ")");
  double direct = 0.0;
  for (std::uint64_t n = 1; n <= 100; ++n) direct += mangoldt_oracle(n);
  const double p100 = psi(100);
  o.check(std::fabs(p100 - direct) <= 1e-9, "psi(100) " + fmt("%.9f", p100) + " vs " + fmt("%.9f", direct));
  std::uint64_t trial = 0;
  for (std::uint64_t n = 2; n <= 1'000'000; ++n) {
    bool prime = true;
    for (std::uint64_t p = 2; p * p <= n; ++p) {
      if (n % p == 0) {
        prime = false;
        break;
      }
    }
    trial += prime;
  }
  const auto sieved = primes_in(1, 1'000'000).size();
  o.check(sieved == 78498 && trial == 78498,
          "pi(1e6) sieve " + std::to_string(sieved) + " trial division " + std::to_string(trial));
  return o;
}

struct Criterion {
  int id;
  const char* name;
  double limit_seconds;  // 0: no limit stated
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all = {
      {1, "inclusion-exclusion round trip", 30, roundtrip},
      {2, "local factor equivalence", 60, local_factors},
      {3, "exact residue identities", 120, exact_identities},
      {4, "pair sum asymptotic", 120, pair_sums},
      {5, "R2 asymptotic", 120, r2_values},
      {6, "binomial bridge", 300, binomial_bridge},
      {7, "second moment", 180, second_moment},
      {8, "fourth moment", 0, fourth_moment},
      {9, "normality of window sums", 0, normality},
      {10, "random matrix analogue", 30, random_matrix},
      {11, "zero cosine-sum moments", 0, zero_sums},
      {12, "psi sanity", 0, psi_sanity},
  };
  std::vector<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.push_back(std::atoi(argv[i]));

  int failed = 0;
  for (const auto& c : all) {
    if (!wanted.empty() && std::find(wanted.begin(), wanted.end(), c.id) == wanted.end()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.limit_seconds > 0) o.check(secs < c.limit_seconds, "runtime " + fmt("%.1fs", secs) + " limit " + fmt("%.0fs", c.limit_seconds));
    else o.check(true, "runtime " + fmt("%.1fs", secs));
    std::printf("criterion %2d %-4s %s: %s\n", c.id, o.pass ? "PASS" : "FAIL", c.name, o.detail.c_str());
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed == 0 ? 0 : 1;
}
