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

#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "rwre/envgen.hpp"

namespace rwre {

/// Potential V on [first, last] with V(0) = 0 and V(x+1) - V(x) = ln rho_x.
/// For an environment window [-L, R] the profile covers [-L, R+1].
class PotentialProfile {
 public:
  PotentialProfile(std::int64_t first, std::vector<double> values);

  double operator()(std::int64_t x) const;
  std::int64_t first() const { return first_; }
  std::int64_t last() const { return first_ + static_cast<std::int64_t>(values_.size()) - 1; }
  bool covers(std::int64_t from, std::int64_t to) const { return from >= first() && to <= last(); }
  std::span<const double> values() const { return values_; }

 private:
  std::int64_t first_;
  std::vector<double> values_;
};

/// Right-side ladder locations nu_0 = 0 < nu_1 < ... <= upto with block
/// heights, plus the left-side ladder nu_{-1} > nu_{-2} > ... found inside
/// the window. heights[i] belongs to block [nu_i, nu_{i+1}); the last block is
/// always cut at upto and flagged partial.
struct BlockDecomposition {
  std::vector<std::int64_t> nu;
  std::vector<double> heights;
  std::vector<std::int64_t> nu_left;
  std::int64_t upto = 0;
  bool last_partial = true;

  // Mean width of the complete blocks; 0 when there are none.
  double nu_bar_estimate() const;
  // Largest l with nu_l <= n.
  std::size_t n0_of(std::int64_t n) const;
};

struct NuBarEstimate {
  double mean = 0.0;
  double ci_half_width = 0.0;  // 95% normal interval
  std::size_t samples = 0;
};

/// Outcome of an event checker whose defining maximum runs over a truncated
/// range. `reliable` states whether the cut could plausibly change the verdict.
struct EventCheck {
  bool holds = false;
  double measured = 0.0;
  double threshold = 0.0;
  bool reliable = true;
};

struct TailConstants {
  double c_minus = 0.0;
  double c_plus = 0.0;
  double d_minus = 0.0;
  double truncation_bound = 0.0;
  bool truncation_reliable = true;
};

/// Requires an unreflected environment.
PotentialProfile potential(const Environment& env);

BlockDecomposition ladder_blocks(const PotentialProfile& profile, std::int64_t upto);

std::size_t block_index(const BlockDecomposition& decomp, std::int64_t n);

/// Monte Carlo estimate of E nu_1 from fresh environments.
NuBarEstimate estimate_nu_bar(const EnvDistribution& dist, std::size_t samples, std::uint64_t seed);

/// B1(n): on [-n, n] the potential drops by at least k ln n over every
/// stretch of length >= k (ln n)^2.
bool check_B1(const PotentialProfile& profile, std::int64_t n);

/// B2(n): -2 nu_bar n <= nu_{-n} and nu_n <= 2 nu_bar n.
bool check_B2(const BlockDecomposition& decomp, std::int64_t n, double nu_bar);

/// B3(n) and B4(n) compare max_{-n<=i<=n} max_{i<=k<=n+buffer} (V(k)-V(i))
/// against (ln n + 2 ln ln n)/kappa and (ln n - 4 ln ln n)/kappa.
EventCheck check_B3(const PotentialProfile& profile, std::int64_t n, std::int64_t buffer, double kappa);
EventCheck check_B4(const PotentialProfile& profile, std::int64_t n, std::int64_t buffer, double kappa);

/// D(n, m): for l = 1..m-1 fewer than n^(1-l/m) blocks among 0..n_0 reach
/// height (l/(kappa m)) (ln n + 2 ln ln n).
bool check_D(const BlockDecomposition& decomp, std::int64_t n, int m, double kappa);

/// E(n, a): no k in [0, n] with a backward rise > (a/kappa) ln n within
/// (ln n)^2 before k and a forward rise > ((1 - 3a/4)/kappa) ln n within
/// (ln n)^2 after k.
bool check_E(const PotentialProfile& profile, std::int64_t n, double a, double kappa);

/// C-, C+ and D- truncated to the profile window. log_w_left holds ln W_j for
/// j = profile.first() .. -1.
TailConstants tail_constants(const PotentialProfile& profile, std::span<const double> log_w_left);

/// Maximal rise max_{from<=i<=to} max_{i<=k<=k_end} (V(k) - V(i)).
double max_rise(const PotentialProfile& profile, std::int64_t from, std::int64_t to, std::int64_t k_end);

inline std::int64_t default_rise_buffer(std::int64_t n) {
  const double l = std::log(static_cast<double>(n));
  return static_cast<std::int64_t>(std::ceil(10.0 * l * l));
}

}  // namespace rwre
