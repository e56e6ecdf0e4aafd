// Copyright 2026 The rwre Authors
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

#include "rwre/potential.hpp"

#include <algorithm>
#include <cmath>

#include "rwre/errors.hpp"
#include "rwre/logspace.hpp"
#include "rwre/rng.hpp"

namespace rwre {
namespace {

double ln_n(std::int64_t n) { return std::log(static_cast<double>(n)); }

void require_kappa(double kappa) {
  if (!(kappa > 0.0) || !std::isfinite(kappa)) throw PreconditionError("event checker needs a positive kappa");
}

EventCheck rise_event(const PotentialProfile& profile, std::int64_t n, std::int64_t buffer, double threshold) {
  if (n < 2) throw DomainError("rise checkers need n >= 2");
  if (buffer < 0) throw DomainError("buffer must be nonnegative");
  if (!profile.covers(-n, n + buffer)) throw PreconditionError("profile does not cover [-n, n + buffer]");
  EventCheck out;
  out.measured = max_rise(profile, -n, n, n + buffer);
  out.threshold = threshold;
  double lowest = kPosInf;
  for (std::int64_t i = -n; i <= n; ++i) lowest = std::min(lowest, profile(i));
  // A rise completed beyond the buffer must first climb from V(n + buffer)
  // to lowest + threshold; call the cut reliable when that climb is itself
  // larger than the threshold.
  const double gap = lowest + std::max(threshold, 0.0) - profile(n + buffer);
  out.reliable = gap >= std::max(threshold, 0.0);
  return out;
}

}  // namespace

PotentialProfile::PotentialProfile(std::int64_t first, std::vector<double> values)
    : first_(first), values_(std::move(values)) {
  if (values_.empty()) throw DomainError("empty potential profile");
  if (first_ > 0 || last() < 0) throw DomainError("potential profile must contain site 0");
}

double PotentialProfile::operator()(std::int64_t x) const {
  if (x < first() || x > last()) throw DomainError("site outside the potential profile");
  return values_[static_cast<std::size_t>(x - first_)];
}

double BlockDecomposition::nu_bar_estimate() const {
  const std::size_t complete = nu.size() - 1;
  if (complete == 0) return 0.0;
  return static_cast<double>(nu[complete] - nu[0]) / static_cast<double>(complete);
}

std::size_t BlockDecomposition::n0_of(std::int64_t n) const { return block_index(*this, n); }

PotentialProfile potential(const Environment& env) {
  if (env.reflected_at()) {
    throw PreconditionError("the potential is defined on the unreflected environment");
  }
  const std::int64_t first = env.first_site();
  const std::int64_t last = env.last_site() + 1;
  std::vector<double> v(static_cast<std::size_t>(last - first + 1));
  auto at = [&](std::int64_t x) -> double& { return v[static_cast<std::size_t>(x - first)]; };
  at(0) = 0.0;
  CompensatedSum right;
  for (std::int64_t x = 1; x <= last; ++x) {
    right.add(std::log(rho(env.omega(x - 1))));
    at(x) = right.value();
  }
  CompensatedSum left;
  for (std::int64_t x = -1; x >= first; --x) {
    left.add(-std::log(rho(env.omega(x))));
    at(x) = left.value();
  }
  return PotentialProfile(first, std::move(v));
}

BlockDecomposition ladder_blocks(const PotentialProfile& profile, std::int64_t upto) {
  if (upto < 0 || upto > profile.last()) throw DomainError("upto outside the potential profile");
  BlockDecomposition d;
  d.upto = upto;
  d.nu.push_back(0);
  double base = profile(0);
  double height = 0.0;
  for (std::int64_t x = 1; x <= upto; ++x) {
    const double v = profile(x);
    if (v < base) {
      d.heights.push_back(height);
      d.nu.push_back(x);
      base = v;
      height = 0.0;
    } else {
      height = std::max(height, v - base);
    }
  }
  d.heights.push_back(height);
  d.last_partial = true;

  // Strict running minima from the left edge; nu_{-1} is the last one before 0.
  double running = kPosInf;
  std::vector<std::int64_t> records;
  for (std::int64_t x = profile.first(); x < 0; ++x) {
    const double v = profile(x);
    if (v < running) {
      records.push_back(x);
      running = v;
    }
  }
  d.nu_left.assign(records.rbegin(), records.rend());
  return d;
}

std::size_t block_index(const BlockDecomposition& decomp, std::int64_t n) {
  if (n < 0 || n > decomp.upto) throw DomainError("site outside the block decomposition");
  const auto it = std::upper_bound(decomp.nu.begin(), decomp.nu.end(), n);
  return static_cast<std::size_t>(it - decomp.nu.begin()) - 1;
}

NuBarEstimate estimate_nu_bar(const EnvDistribution& dist, std::size_t samples, std::uint64_t seed) {
  if (samples < 2) throw DomainError("need at least two samples");
  if (!(mean_log_rho(dist) < 0.0)) throw PreconditionError("nu_1 is not integrable unless E ln rho < 0");
  constexpr std::int64_t kCap = 10'000'000;
  double sum = 0.0;
  double sum_sq = 0.0;
  for (std::size_t s = 0; s < samples; ++s) {
    const std::uint64_t env_seed = splitmix64(seed ^ splitmix64(s));
    double v = 0.0;
    std::int64_t x = 0;
    while (v >= 0.0) {
      if (x >= kCap) throw ResourceCapError("nu_1 sample exceeded 1e7 sites");
      v += std::log(rho(sample_site(dist, env_seed, x)));
      ++x;
    }
    const double width = static_cast<double>(x);
    sum += width;
    sum_sq += width * width;
  }
  const double n = static_cast<double>(samples);
  NuBarEstimate est;
  est.samples = samples;
  est.mean = sum / n;
  const double var = std::max(0.0, (sum_sq - n * est.mean * est.mean) / (n - 1.0));
  est.ci_half_width = 1.96 * std::sqrt(var / n);
  return est;
}

bool check_B1(const PotentialProfile& profile, std::int64_t n) {
  if (n < 1) throw DomainError("B1 needs n >= 1");
  if (!profile.covers(-n, n)) throw PreconditionError("profile does not cover [-n, n]");
  const double l = ln_n(n);
  const double l2 = l * l;
  if (n == 1) {
    // (ln n)^2 = 0: every k is admissible and the bound reads V(j) > V(i).
    for (std::int64_t i = -1; i <= 1; ++i) {
      for (std::int64_t j = i + 1; j <= 1; ++j) {
        if (profile(j) > profile(i)) return false;
      }
    }
    return true;
  }
  // suffix_max[m + n] = max_{m <= j <= n} V(j).
  std::vector<double> suffix_max(static_cast<std::size_t>(2 * n + 1));
  double running = kNegInf;
  for (std::int64_t j = n; j >= -n; --j) {
    running = std::max(running, profile(j));
    suffix_max[static_cast<std::size_t>(j + n)] = running;
  }
  // For fixed (i, k) the weakest requirement is the one on the farthest j, so
  // checking the suffix maximum from i + ceil(k (ln n)^2) suffices.
  for (std::int64_t k = 1;; ++k) {
    const auto offset = static_cast<std::int64_t>(std::ceil(static_cast<double>(k) * l2));
    if (offset > 2 * n) break;
    const double drop = static_cast<double>(k) * l;
    for (std::int64_t i = -n; i + offset <= n; ++i) {
      if (suffix_max[static_cast<std::size_t>(i + offset + n)] > profile(i) - drop) return false;
    }
  }
  return true;
}

bool check_B2(const BlockDecomposition& decomp, std::int64_t n, double nu_bar) {
  if (n < 1) throw DomainError("B2 needs n >= 1");
  if (!(nu_bar > 0.0)) throw DomainError("nu_bar must be positive");
  if (decomp.nu.size() < static_cast<std::size_t>(n) + 1 || decomp.nu_left.size() < static_cast<std::size_t>(n)) {
    throw PreconditionError("insufficient blocks for B2(n)");
  }
  const double bound = 2.0 * nu_bar * static_cast<double>(n);
  const auto nu_minus_n = static_cast<double>(decomp.nu_left[static_cast<std::size_t>(n) - 1]);
  const auto nu_plus_n = static_cast<double>(decomp.nu[static_cast<std::size_t>(n)]);
  return -bound <= nu_minus_n && nu_plus_n <= bound;
}

double max_rise(const PotentialProfile& profile, std::int64_t from, std::int64_t to, std::int64_t k_end) {
  if (from > to || to > k_end) throw DomainError("max_rise needs from <= to <= k_end");
  if (!profile.covers(from, k_end)) throw PreconditionError("profile does not cover the rise window");
  double best = 0.0;
  double running = kNegInf;
  for (std::int64_t k = k_end; k >= from; --k) {
    running = std::max(running, profile(k));
    if (k <= to) best = std::max(best, running - profile(k));
  }
  return best;
}

EventCheck check_B3(const PotentialProfile& profile, std::int64_t n, std::int64_t buffer, double kappa) {
  require_kappa(kappa);
  const double l = ln_n(n);
  auto out = rise_event(profile, n, buffer, (l + 2.0 * std::log(l)) / kappa);
  out.holds = out.measured <= out.threshold;
  return out;
}

EventCheck check_B4(const PotentialProfile& profile, std::int64_t n, std::int64_t buffer, double kappa) {
  require_kappa(kappa);
  const double l = ln_n(n);
  auto out = rise_event(profile, n, buffer, (l - 4.0 * std::log(l)) / kappa);
  out.holds = out.measured > out.threshold;
  return out;
}

bool check_D(const BlockDecomposition& decomp, std::int64_t n, int m, double kappa) {
  require_kappa(kappa);
  if (n < 2) throw DomainError("D(n, m) needs n >= 2");
  if (m < 2) throw DomainError("D(n, m) needs m >= 2");
  const std::size_t n0 = block_index(decomp, n);
  const double l = ln_n(n);
  const double scale = (l + 2.0 * std::log(l)) / kappa;
  for (int level = 1; level < m; ++level) {
    const double fraction = static_cast<double>(level) / static_cast<double>(m);
    const double threshold = fraction * scale;
    std::size_t count = 0;
    for (std::size_t i = 0; i <= n0; ++i) {
      if (decomp.heights[i] >= threshold) ++count;
    }
    if (!(static_cast<double>(count) < std::pow(static_cast<double>(n), 1.0 - fraction))) return false;
  }
  return true;
}

bool check_E(const PotentialProfile& profile, std::int64_t n, double a, double kappa) {
  require_kappa(kappa);
  if (!(a > 0.0 && a < 1.0)) throw DomainError("E(n, a) needs 0 < a < 1");
  if (n < 2) throw DomainError("E(n, a) needs n >= 2");
  const double l = ln_n(n);
  const double l2 = l * l;
  const auto reach = static_cast<std::int64_t>(std::floor(l2));
  if (!profile.covers(-reach, n + reach)) {
    throw PreconditionError("profile does not cover [-(ln n)^2, n + (ln n)^2]");
  }
  const double back_threshold = a / kappa * l;
  const double forward_threshold = (1.0 - 0.75 * a) / kappa * l;
  for (std::int64_t k = 0; k <= n; ++k) {
    const auto l_min = static_cast<std::int64_t>(std::ceil(static_cast<double>(k) - l2));
    double lowest = kPosInf;
    for (std::int64_t x = l_min; x < k; ++x) lowest = std::min(lowest, profile(x));
    if (!(profile(k) - lowest > back_threshold)) continue;
    const auto j_max = static_cast<std::int64_t>(std::floor(static_cast<double>(k) + l2));
    double running_min = kPosInf;
    double rise = kNegInf;
    for (std::int64_t j = k + 1; j <= j_max; ++j) {
      if (running_min < kPosInf) rise = std::max(rise, profile(j) - running_min);
      running_min = std::min(running_min, profile(j));
    }
    if (rise > forward_threshold) return false;
  }
  return true;
}

TailConstants tail_constants(const PotentialProfile& profile, std::span<const double> log_w_left) {
  const std::int64_t first = profile.first();
  const std::int64_t last = profile.last();
  if (log_w_left.size() != static_cast<std::size_t>(-first)) {
    throw DomainError("log W sequence must cover sites first .. -1");
  }
  TailConstants out;
  CompensatedSum c_minus;
  CompensatedSum c_plus;
  CompensatedSum d_minus;
  double edge_w = 0.0;
  for (std::int64_t j = first; j < 0; ++j) {
    const double weight = std::exp(-profile(j));
    c_minus.add(weight);
    const double log_w = log_w_left[static_cast<std::size_t>(j - first)];
    const double w = std::exp(log_w);
    d_minus.add(weight * (w + w * w));
    if (j - first < 64) edge_w = std::max(edge_w, w + w * w);
  }
  for (std::int64_t j = 0; j <= last; ++j) c_plus.add(std::exp(profile(j)));
  out.c_minus = c_minus.value();
  out.c_plus = c_plus.value();
  out.d_minus = d_minus.value();

  // Geometric continuation with the average slope of the last stretch.
  out.truncation_reliable = true;
  double bound = 0.0;
  const std::int64_t span_r = std::min<std::int64_t>(64, last);
  if (span_r > 0) {
    const double slope = (profile(last) - profile(last - span_r)) / static_cast<double>(span_r);
    if (slope < 0.0) {
      const double q = std::exp(slope);
      bound += std::exp(profile(last)) * q / (1.0 - q);
    } else {
      out.truncation_reliable = false;
      bound = kPosInf;
    }
  }
  const std::int64_t span_l = std::min<std::int64_t>(64, -first);
  if (span_l > 0) {
    const double slope = (profile(first + span_l) - profile(first)) / static_cast<double>(span_l);
    if (slope < 0.0) {
      const double q = std::exp(slope);
      const double tail = std::exp(-profile(first)) * q / (1.0 - q);
      bound += tail * (1.0 + edge_w);
    } else {
      out.truncation_reliable = false;
      bound = kPosInf;
    }
  }
  out.truncation_bound = bound;
  return out;
}

}  // namespace rwre
