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
#include <string>
#include <utility>
#include <vector>

#include "rwre/chain.hpp"
#include "rwre/envgen.hpp"
#include "rwre/stats.hpp"

namespace rwre {

/// pass <=> lo <= measured <= hi. Informational verdicts (regime boundary
/// runs) always carry pass = true and informational = true.
struct Verdict {
  std::string id;
  double measured = 0.0;
  double target = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  bool pass = false;
  bool informational = false;
  double runtime_seconds = 0.0;
  std::string note;
};

Verdict make_verdict(std::string id, double measured, double target, double lo, double hi);

enum class ScalingQuantity { expectation, variance, mixing };

std::string to_string(ScalingQuantity q);

struct ScalingStudy {
  explicit ScalingStudy(EnvDistribution d) : dist(std::move(d)) {}

  EnvDistribution dist;
  double kappa = 0.0;
  ScalingQuantity quantity = ScalingQuantity::expectation;
  std::vector<std::int64_t> n_grid;
  std::uint64_t seed = 0;
  // values[r][g]: ln E, ln Var or ln t_mix of replica r at n_grid[g].
  std::vector<std::vector<double>> values;
  std::vector<double> replica_slopes;
  double median_slope = 0.0;
  // Fit of the per-n median curve against ln n and its first/last slope.
  LinearFit median_curve_fit;
  double two_point_slope = 0.0;
  double target = 0.0;
  // mixing with kappa > 1: median t_mix / n per grid point against 2 E T_1.
  std::vector<double> median_ratio;
  double ratio_target = 0.0;
};

struct CutoffStudy {
  explicit CutoffStudy(EnvDistribution d) : dist(std::move(d)) {}

  EnvDistribution dist;
  double kappa = 0.0;
  std::vector<std::int64_t> n_grid;
  std::vector<double> c_grid;
  std::uint64_t seed = 0;
  std::vector<std::vector<CutoffReport>> reports;  // [replica][grid]
  std::vector<double> median_window_ratio;
  std::vector<Verdict> verdicts;
};

struct ErgodicStudy {
  std::int64_t n = 0;
  double kappa = 0.0;
  double annealed_et1 = 0.0;
  std::vector<double> e_over_n;
  std::vector<double> free_over_reflected;
  std::vector<double> var_over_n;
  std::vector<Verdict> verdicts;
};

/// Site seed of the environment used by replica r of a study.
std::uint64_t replica_env_seed(std::uint64_t seed, std::uint64_t replica);

/// Environment of replica r on [0, n_max]; prefixes are shared across n.
Environment replica_environment(const EnvDistribution& dist, std::int64_t n_max, std::uint64_t seed,
                                std::uint64_t replica, std::int64_t left = 0);

ScalingStudy scaling_expectation(const EnvDistribution& dist, std::vector<std::int64_t> n_grid, std::size_t replicas,
                                 std::uint64_t seed, unsigned workers = 1);
ScalingStudy scaling_variance(const EnvDistribution& dist, std::vector<std::int64_t> n_grid, std::size_t replicas,
                              std::uint64_t seed, unsigned workers = 1);
ScalingStudy mixing_scaling(const EnvDistribution& dist, std::vector<std::int64_t> n_grid, std::size_t replicas,
                            std::uint64_t seed, unsigned workers = 1, double eps = 0.25);

/// Verdict on a scaling study against a band around its target.
Verdict scaling_verdict(const ScalingStudy& s, double lo, double hi);

CutoffStudy cutoff_dichotomy(const EnvDistribution& dist, std::vector<std::int64_t> n_grid,
                             std::vector<double> c_grid, std::size_t replicas, std::uint64_t seed,
                             unsigned workers = 1, double window_floor = 0.05, double min_fraction = 0.7);

/// Regime verdicts for a cutoff study. ballistic selects the cutoff checks
/// (kappa > 1) or the window floor check (kappa < 1); evaluating the wrong
/// regime serves as a negative control.
std::vector<Verdict> cutoff_verdicts(const CutoffStudy& s, bool ballistic, double window_floor = 0.05,
                                     double min_fraction = 0.7);

ErgodicStudy ergodic_check(const EnvDistribution& dist, std::int64_t n, std::size_t replicas, std::uint64_t seed,
                           unsigned workers = 1, double tolerance = 0.05);

}  // namespace rwre
