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

// Moments of psi(n+H) - psi(n) - H over 1 <= n <= N from a single streaming
// pass, the comparators they are judged against, the normality check, and
// k-tuple residuals.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "shortint/arith.hpp"
#include "shortint/compensated.hpp"
#include "shortint/parallel.hpp"
#include "shortint/sieve.hpp"
#include "shortint/singular_series.hpp"

namespace shortint {

inline constexpr unsigned kMaxMomentOrder = 12;

struct MomentReport {
  unsigned K = 0;
  double empirical = 0.0;   // M_K(N; H)
  double thm3_main = 0.0;   // mu_K H^{K/2} int_1^N (log(x/H) + B)^{K/2} dx
  double conj1 = 0.0;       // mu_K N (H log(N/H))^{K/2}
  double cramer_ref = 0.0;  // mu_K N (H log N)^{K/2}
  std::optional<double> ratio_thm3;
  std::optional<double> ratio_conj1;
  std::optional<double> ratio_cramer;
};

struct MomentOptions {
  unsigned workers = 1;
  SieveConfig sieve{};
};

/// Human-readable notes when (N, H) lies outside the regimes the comparators
/// are meant for. Empty when nothing to flag.
inline std::vector<std::string> regime_warnings(std::uint64_t N, std::uint64_t H) {
  std::vector<std::string> out;
  const double n = static_cast<double>(N), h = static_cast<double>(H);
  if (H >= N) out.push_back("H >= N: outside every asymptotic regime");
  if (h <= std::log(n)) out.push_back("H <= log N: Poisson rather than Gaussian regime");
  return out;
}

namespace detail {

inline void check_moment_args(std::uint64_t N, std::uint64_t H, unsigned Kmax) {
  if (H < 1) throw std::invalid_argument("H must be >= 1");
  if (H >= N) throw std::invalid_argument("H must be < N");
  if (Kmax > kMaxMomentOrder) {
    throw std::invalid_argument("Kmax must be <= " + std::to_string(kMaxMomentOrder));
  }
}

}  // namespace detail

/// M_K(N; H) = sum_{n=1}^{N} D(n)^K for K = 0..Kmax in one pass per shard.
/// Shards cover disjoint n-ranges, each with its own window, and are merged
/// in ascending order.
inline std::vector<double> empirical_moment_sums(std::uint64_t N, std::uint64_t H, unsigned Kmax,
                                                 const MomentOptions& opt = {}) {
  detail::check_moment_args(N, H, Kmax);
  const auto shards = make_shards(1, N, std::max(1u, opt.workers));
  std::vector<std::vector<CompensatedSum>> partial(shards.size(),
                                                   std::vector<CompensatedSum>(Kmax + 1));
  run_indexed(shards.size(), opt.workers, [&](std::size_t s) {
    WindowStream stream(shards[s].first, shards[s].last, H, opt.sieve);
    std::vector<double> buf(1 << 15);
    auto& acc = partial[s];
    while (!stream.done()) {
      const std::size_t got = stream.fill(buf);
      for (std::size_t i = 0; i < got; ++i) {
        const double d = buf[i];
        double power = 1.0;
        for (unsigned K = 1; K <= Kmax; ++K) {
          power *= d;
          acc[K].add(power);
        }
      }
    }
  });
  std::vector<double> out(Kmax + 1);
  for (unsigned K = 1; K <= Kmax; ++K) {
    CompensatedSum total;
    for (const auto& p : partial) total += p[K];
    out[K] = total.value();
  }
  out[0] = static_cast<double>(N);
  return out;
}

/// mu_K H^{K/2} int_1^N (log(x/H) + B)^{K/2} dx, 0 for odd K. Integrated in
/// closed form: with L = log(x/H) + B and n = K/2, an antiderivative of L^n is
/// x sum_{j=0}^{n} (-1)^j n!/(n-j)! L^{n-j}. The integrand is used with its
/// sign where L < 0.
inline double thm3_main_term(std::uint64_t N, std::uint64_t H, unsigned K) {
  if (K % 2 == 1) return 0.0;
  const unsigned n = K / 2;
  const double h = static_cast<double>(H);
  auto antiderivative = [&](double x) {
    const double L = std::log(x / h) + constants::kB;
    CompensatedSum acc;
    double coeff = 1.0;  // n!/(n-j)!
    for (unsigned j = 0; j <= n; ++j) {
      acc.add((j % 2 ? -1.0 : 1.0) * coeff * std::pow(L, static_cast<double>(n - j)));
      coeff *= static_cast<double>(n - j);
    }
    return x * acc.value();
  };
  const double integral = antiderivative(static_cast<double>(N)) - antiderivative(1.0);
  return gaussian_moment(K) * std::pow(h, static_cast<double>(n)) * integral;
}

/// mu_K N (H log(N/H))^{K/2}, 0 for odd K.
inline double conj1_moment(std::uint64_t N, std::uint64_t H, unsigned K) {
  if (H >= N) throw std::invalid_argument("H must be < N");
  if (K % 2 == 1) return 0.0;
  const double n = static_cast<double>(N), h = static_cast<double>(H);
  return gaussian_moment(K) * n * std::pow(h * std::log(n / h), K / 2.0);
}

/// N H log N: the second moment under Cramer's model.
inline double cramer_variance(double N, double H) {
  if (!(H < N)) throw std::invalid_argument("H must be < N");
  return N * H * std::log(N);
}

/// mu_K N (H log N)^{K/2}: Gaussian moments with the Cramer variance.
inline double cramer_moment(std::uint64_t N, std::uint64_t H, unsigned K) {
  if (K % 2 == 1) return 0.0;
  const double n = static_cast<double>(N), h = static_cast<double>(H);
  return gaussian_moment(K) * n * std::pow(h * std::log(n), K / 2.0);
}

/// Empirical moments K = 0..Kmax with every comparator attached.
inline std::vector<MomentReport> empirical_moments(std::uint64_t N, std::uint64_t H, unsigned Kmax,
                                                   const MomentOptions& opt = {}) {
  const auto sums = empirical_moment_sums(N, H, Kmax, opt);
  std::vector<MomentReport> out;
  auto ratio = [](double a, double b) -> std::optional<double> {
    if (b == 0.0) return std::nullopt;
    return a / b;
  };
  for (unsigned K = 0; K <= Kmax; ++K) {
    MomentReport r;
    r.K = K;
    r.empirical = sums[K];
    r.thm3_main = thm3_main_term(N, H, K);
    r.conj1 = conj1_moment(N, H, K);
    r.cramer_ref = cramer_moment(N, H, K);
    r.ratio_thm3 = ratio(r.empirical, r.thm3_main);
    r.ratio_conj1 = ratio(r.empirical, r.conj1);
    r.ratio_cramer = ratio(r.empirical, r.cramer_ref);
    out.push_back(r);
  }
  return out;
}

inline double standard_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

struct DistributionReport {
  std::vector<double> edges;          // bins + 1 edges; outer bins are open-ended
  std::vector<std::uint64_t> counts;  // bins entries
  std::uint64_t samples = 0;
  double scale = 1.0;  // values were divided by this before binning
  double ks = 0.0;
  bool ks_exact = false;  // sorted-sample KS rather than bin-edge KS
  double mean = 0.0;
  double variance = 0.0;
  std::vector<std::string> warnings;
};

/// Largest sample for which the exact sorted-sample KS statistic is kept.
inline constexpr std::uint64_t kExactKsLimit = 10'000'000;

/// Histogram and KS distance against the standard normal for a stream of
/// standardized values. Accumulators merge bin-wise in shard order.
class DistributionAccumulator {
 public:
  DistributionAccumulator(unsigned bins, double half_width, bool keep_samples)
      : bins_(bins), half_width_(half_width), keep_(keep_samples), counts_(bins, 0) {
    if (bins < 10) throw std::invalid_argument("bins must be >= 10");
    if (!(half_width > 0.0)) throw std::invalid_argument("histogram half width must be positive");
  }

  void add(double z) {
    const double pos = (z + half_width_) / (2.0 * half_width_) * bins_;
    std::int64_t b = pos < 0.0 ? 0 : static_cast<std::int64_t>(pos);
    b = std::clamp<std::int64_t>(b, 0, bins_ - 1);
    ++counts_[static_cast<std::size_t>(b)];
    sum_.add(z);
    sum_sq_.add(z * z);
    ++n_;
    if (keep_) samples_.push_back(z);
  }

  void merge(const DistributionAccumulator& other) {
    for (unsigned i = 0; i < bins_; ++i) counts_[i] += other.counts_[i];
    sum_ += other.sum_;
    sum_sq_ += other.sum_sq_;
    n_ += other.n_;
    if (keep_) samples_.insert(samples_.end(), other.samples_.begin(), other.samples_.end());
  }

  DistributionReport finish() {
    DistributionReport r;
    r.samples = n_;
    r.counts = counts_;
    for (unsigned i = 0; i <= bins_; ++i) {
      r.edges.push_back(-half_width_ + 2.0 * half_width_ * i / bins_);
    }
    if (n_ == 0) return r;
    const double n = static_cast<double>(n_);
    r.mean = sum_.value() / n;
    r.variance = n_ > 1 ? (sum_sq_.value() - n * r.mean * r.mean) / (n - 1.0) : 0.0;
    if (keep_) {
      std::sort(samples_.begin(), samples_.end());
      double d = 0.0;
      for (std::size_t i = 0; i < samples_.size(); ++i) {
        const double f = standard_normal_cdf(samples_[i]);
        d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
      }
      r.ks = d;
      r.ks_exact = true;
    } else {
      double cum = 0.0, d = 0.0;
      for (unsigned i = 0; i + 1 < bins_; ++i) {
        cum += static_cast<double>(counts_[i]);
        d = std::max(d, std::fabs(cum / n - standard_normal_cdf(r.edges[i + 1])));
      }
      r.ks = d;
    }
    return r;
  }

 private:
  unsigned bins_;
  double half_width_;
  bool keep_;
  std::vector<std::uint64_t> counts_;
  CompensatedSum sum_, sum_sq_;
  std::uint64_t n_ = 0;
  std::vector<double> samples_;
};

/// Distribution report for an arbitrary standardized sample.
inline DistributionReport distribution_of(std::span<const double> standardized, unsigned bins,
                                          double half_width = 5.0) {
  DistributionAccumulator acc(bins, half_width, standardized.size() <= kExactKsLimit);
  for (double z : standardized) acc.add(z);
  return acc.finish();
}

/// D(n) / sqrt(H log(N/H)) for 1 <= n <= N, binned and compared with the
/// standard normal.
inline DistributionReport distribution(std::uint64_t N, std::uint64_t H, unsigned bins,
                                       const MomentOptions& opt = {}, double half_width = 5.0) {
  if (H < 1) throw std::invalid_argument("H must be >= 1");
  if (H >= N) throw std::invalid_argument("H must be < N");
  const double scale =
      std::sqrt(static_cast<double>(H) * std::log(static_cast<double>(N) / static_cast<double>(H)));
  const bool exact = N <= kExactKsLimit;
  const auto shards = make_shards(1, N, std::max(1u, opt.workers));
  std::vector<DistributionAccumulator> partial(shards.size(),
                                               DistributionAccumulator(bins, half_width, exact));
  run_indexed(shards.size(), opt.workers, [&](std::size_t s) {
    WindowStream stream(shards[s].first, shards[s].last, H, opt.sieve);
    std::vector<double> buf(1 << 15);
    while (!stream.done()) {
      const std::size_t got = stream.fill(buf);
      for (std::size_t i = 0; i < got; ++i) partial[s].add(buf[i] / scale);
    }
  });
  for (std::size_t s = 1; s < partial.size(); ++s) partial[0].merge(partial[s]);
  auto report = partial[0].finish();
  report.scale = scale;
  report.warnings = regime_warnings(N, H);
  return report;
}

struct KTupleResidual {
  TupleD D;
  std::uint64_t N = 0;
  double sum = 0.0;       // sum_{n<=N} prod Lambda(n + d_i)
  double main = 0.0;      // S(D) N
  double residual = 0.0;  // sum - main
};

/// E_k(N; D) for k <= 4 offsets d_i >= 0, streamed with one cursor per offset.
inline KTupleResidual ktuple_residual(const TupleD& D, std::uint64_t N,
                                      const SieveConfig& sieve = {}) {
  const std::size_t k = D.size();
  if (k < 1 || k > 4) throw std::invalid_argument("ktuple_residual supports 1 <= k <= 4 offsets");
  if (N < 1) throw std::invalid_argument("N must be >= 1");
  if (D[0] < 0) throw std::invalid_argument("ktuple_residual offsets must be >= 0");
  std::vector<LambdaCursor> cursors;
  cursors.reserve(k);
  for (auto d : D.offsets()) {
    const auto du = static_cast<std::uint64_t>(d);
    cursors.emplace_back(1 + du, N + du, sieve);
  }
  CompensatedSum acc;
  std::uint64_t remaining = N;
  std::vector<std::span<const double>> runs(k);
  while (remaining > 0) {
    std::size_t run = static_cast<std::size_t>(std::min<std::uint64_t>(remaining, 1 << 20));
    for (std::size_t i = 0; i < k; ++i) {
      runs[i] = cursors[i].peek(run);
      run = std::min(run, runs[i].size());
    }
    for (std::size_t j = 0; j < run; ++j) {
      double prod = runs[0][j];
      for (std::size_t i = 1; i < k && prod != 0.0; ++i) prod *= runs[i][j];
      if (prod != 0.0) acc.add(prod);
    }
    for (auto& c : cursors) c.advance(run);
    remaining -= run;
  }
  KTupleResidual r;
  r.D = D;
  r.N = N;
  r.sum = acc.value();
  SeriesConfig cfg;
  cfg.target_rel_tol = 1e-9;
  r.main = singular_series(D, cfg) * static_cast<double>(N);
  r.residual = r.sum - r.main;
  return r;
}

}  // namespace shortint
