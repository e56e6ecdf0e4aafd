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
#include <functional>
#include <span>
#include <vector>

#include "rwre/envgen.hpp"
#include "rwre/potential.hpp"
#include "rwre/rng.hpp"
#include "rwre/stats.hpp"

namespace rwre {

inline constexpr std::uint64_t kDefaultStepCap = 10'000'000'000ull;

/// Steps until the walk from 0 first hits n in an environment reflected at n.
std::uint64_t simulate_T(const Environment& reflected_env, RngStream& stream, std::uint64_t cap = kDefaultStepCap);

/// Same for the lazy walk. Each step holds with probability 1/2.
std::uint64_t simulate_T_lazy(const Environment& reflected_env, RngStream& stream,
                              std::uint64_t cap = kDefaultStepCap);

struct RestrictedSample {
  std::uint64_t t = 0;
  std::uint64_t t_tilde = 0;
  bool a_indicator = false;
  // Only meaningful with audit enabled.
  bool dominance_held = true;
};

struct RestrictedOptions {
  std::uint64_t cap = kDefaultStepCap;
  bool audit = false;
};

/// Coupled pair on the environment reflected at 0 (omega_0 := 1): the free
/// walk X and the walk that, once its record ladder index is r, sees
/// omega = 1 at nu_{max(r - ceil((ln n)^2), 0)}. One uniform per step drives
/// both. a_indicator is T_n == T~_n.
RestrictedSample simulate_restricted(const Environment& env, const BlockDecomposition& blocks, std::int64_t n,
                                     RngStream& stream, const RestrictedOptions& options = {});

std::int64_t backtrack_horizon(std::int64_t n);

struct HittingSampleSummary {
  std::int64_t n = 0;
  bool lazy = false;
  std::uint64_t replicas = 0;
  SampleMoments moments;
  std::vector<std::uint64_t> ks;
  std::vector<double> tail;  // P(T > k)
  std::vector<Interval> tail_ci;
};

/// Hitting times of replicas 0..replicas-1; replica i uses stream index i, so
/// the output does not depend on the worker count.
std::vector<std::uint64_t> sample_hitting_times(const Environment& reflected_env, bool lazy, std::uint64_t replicas,
                                                std::uint64_t master_seed, unsigned workers = 1,
                                                std::uint64_t cap = kDefaultStepCap);

HittingSampleSummary estimate_tail(const Environment& reflected_env, bool lazy, std::span<const std::uint64_t> ks,
                                   std::uint64_t replicas, std::uint64_t master_seed, unsigned workers = 1,
                                   std::uint64_t cap = kDefaultStepCap);

struct TailBoundEntry {
  std::uint64_t k = 0;
  double d = 0.0;
  double tail = 0.0;
  double allowance = 0.0;  // tail plus three standard errors, floored by the z = 3 Wilson bound
  bool holds = false;
};

/// Checks d(k) <= P(T_n^Y > k) at each k with the lazy walk started at 0.
std::vector<TailBoundEntry> tail_bound_check(const Environment& reflected_env, std::span<const std::uint64_t> ks,
                                             std::uint64_t replicas, std::uint64_t master_seed,
                                             unsigned workers = 1);

/// Runs body(i) for i in [0, count) on `workers` threads with a static
/// interleaved assignment; the first exception is rethrown.
void parallel_for(std::uint64_t count, unsigned workers, const std::function<void(std::uint64_t)>& body);

}  // namespace rwre
