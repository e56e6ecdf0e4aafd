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

#include <cstdint>
#include <optional>
#include <vector>

#include "rwre/envgen.hpp"
#include "rwre/logspace.hpp"
#include "rwre/potential.hpp"

namespace rwre {

enum class WVariant { reflected, full_line };

/// W_i stored as ln W_i (-inf for W_i = 0) for sites first_site .. last_site.
///
/// reflected:  W_i^0 = sum_{j=1}^{i} prod_{k=j}^{i} rho_k, i = 0 .. n-1.
/// full_line:  the same sum started at j = -left_trunc + 1, which is W^0 for
///             the walk reflected at -left_trunc; log_edge_mass estimates
///             ln sum_{j <= -left_trunc} exp(-V(j)), the omitted left tail.
struct WSequence {
  WVariant variant = WVariant::reflected;
  std::int64_t first_site = 0;
  std::vector<double> log_values;
  double log_edge_mass = kNegInf;
  bool bound_reliable = true;

  std::int64_t last_site() const { return first_site + static_cast<std::int64_t>(log_values.size()) - 1; }
  double log_at(std::int64_t site) const;
  std::optional<double> linear(std::int64_t site) const;
};

/// Quenched moments of the hitting time T_n of the walk started at 0, with the
/// lazy-chain conversion. Linear fields are +inf when the log value exceeds
/// the double range.
struct HittingMoments {
  std::int64_t n = 0;
  double log_expectation = 0.0;
  double log_variance = 0.0;
  double expectation = 0.0;
  double variance = 0.0;
  double log_lazy_expectation = 0.0;
  double log_lazy_variance = 0.0;
  double lazy_expectation = 0.0;
  double lazy_variance = 0.0;
  std::optional<double> truncation_bound;
};

/// ln E T_n and ln Var T_n for n = 1 .. n_max of the walk reflected at 0,
/// indexed by n (entry 0 unused). Uses only omega_1 .. omega_{n_max - 1}, so
/// it serves every reflection point n <= n_max of the same environment.
struct MomentPath {
  std::vector<double> log_expectation;
  std::vector<double> log_variance;
};

WSequence w_reflected(const Environment& reflected_env);
WSequence w_full_line(const Environment& env, std::int64_t left_trunc);

HittingMoments quenched_moments(const Environment& reflected_env);
double quenched_expectation(const Environment& reflected_env);
double quenched_variance(const Environment& reflected_env);

/// Full-line moments with the left tail cut at -left_trunc (the walk reflected
/// there). truncation_bound estimates the omitted expectation mass.
HittingMoments quenched_moments_full_line(const Environment& env, std::int64_t n, std::int64_t left_trunc);
double quenched_variance_full_line(const Environment& env, std::int64_t n, std::int64_t left_trunc);

MomentPath reflected_moment_path(const Environment& env, std::int64_t n_max);

/// E^Y = 2E, Var^Y = 4 Var + 2E.
HittingMoments lazy_moments(const HittingMoments& m);

/// Default left truncation ceil(10 (ln n)^2).
std::int64_t default_left_truncation(std::int64_t n);

/// Convenience overload of tail_constants using a full-line W sequence.
TailConstants tail_constants(const PotentialProfile& profile, const WSequence& w);

}  // namespace rwre
