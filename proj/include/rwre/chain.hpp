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
#include <span>
#include <vector>

#include "rwre/envgen.hpp"

namespace rwre {

/// Lazy reflected chain on {0..n}: holds with probability 1/2.
struct LazyKernel {
  std::int64_t n = 0;
  std::vector<double> up;
  std::vector<double> down;
  std::vector<double> hold;
};

using DistVector = std::vector<double>;

enum class StartSet { endpoints, exhaustive };

inline constexpr std::uint64_t kDefaultKernelCap = 1'000'000'000;

/// stepping applies the kernel once per time step (cost n per step);
/// doubling squares the dense kernel (cost n^3 per doubling) and reads d at
/// arbitrary times from its binary powers. automatic steps while that is
/// cheaper and switches for long horizons.
enum class Evolution { automatic, stepping, doubling };

struct EvolutionOptions {
  Evolution method = Evolution::automatic;
  // Bound on single-step kernel applications (stepping path).
  std::uint64_t cap = kDefaultKernelCap;
  // Expected horizon, if known; lets automatic skip the stepping attempt.
  std::uint64_t horizon_hint = 0;
  // Memory for stored kernel powers on the doubling path.
  std::size_t memory_budget = std::size_t{3} << 30;
};

struct TVProfile {
  std::vector<std::int64_t> starts;
  std::vector<std::int64_t> schedule;
  std::vector<double> d;
};

struct CutoffReport {
  std::int64_t n = 0;
  double t = 0.0;
  double f = 0.0;
  std::vector<double> c_grid;
  std::vector<std::int64_t> k_minus;  // floor(t - c f), clamped at 0
  std::vector<std::int64_t> k_plus;   // floor(t + c f)
  std::vector<double> d_minus;
  std::vector<double> d_plus;
  bool clamped = false;
  std::int64_t k75 = 0;
  std::int64_t k25 = 0;
  std::int64_t t_mix = 0;
  double window_ratio = 0.0;
};

LazyKernel lazy_kernel(const Environment& reflected_env);

/// Reversible law of the reflected chain from the potential, normalized in
/// the log domain. The lazy and the plain chain share it.
DistVector stationary(const Environment& reflected_env);

DistVector step(std::span<const double> d, const LazyKernel& k);

double tv(std::span<const double> p, std::span<const double> q);

/// max over x in starts of tv(delta_x P^k, pi) on an increasing schedule.
/// An empty start list means {0, n}.
TVProfile distance_profile(const LazyKernel& kernel, std::span<const double> pi, std::vector<std::int64_t> starts,
                           std::vector<std::int64_t> schedule, const EvolutionOptions& options = {});

std::vector<std::int64_t> start_states(std::int64_t n, StartSet set);

/// First k with d(k) <= eps for each level, worst case over the starts.
/// Each start curve is monotone, so the worst-case crossing is the largest
/// per-start crossing.
std::vector<std::int64_t> crossing_times(const LazyKernel& kernel, std::span<const double> pi,
                                         std::span<const std::int64_t> starts, std::span<const double> levels,
                                         const EvolutionOptions& options = {});

std::int64_t mixing_time(const LazyKernel& kernel, std::span<const double> pi, double eps = 0.25,
                         StartSet starts = StartSet::endpoints, const EvolutionOptions& options = {});

/// t = 2 E T_n, f = sqrt(Var T_n) from the closed forms; d evaluated at
/// floor(t -/+ c f) over the endpoint starts.
CutoffReport cutoff_scan(const Environment& reflected_env, std::span<const double> c_grid,
                         StartSet starts = StartSet::endpoints, EvolutionOptions options = {});

/// pi mass of {x >= n - 2 (ln n)^2}.
double stationary_tail_mass(const Environment& reflected_env);

}  // namespace rwre
