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

#include "rwre/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "rwre/errors.hpp"
#include "rwre/hitting.hpp"
#include "rwre/mc.hpp"
#include "rwre/rng.hpp"

namespace rwre {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void check_grid(const std::vector<std::int64_t>& grid) {
  if (grid.empty()) throw DomainError("n grid is empty");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i] < 1 || (i > 0 && grid[i] <= grid[i - 1])) throw DomainError("n grid must be positive and strictly increasing");
  }
}

bool near(double a, double b) { return std::abs(a - b) < 1e-6; }

void fit_study(ScalingStudy& s) {
  std::vector<double> ln_n;
  for (std::int64_t n : s.n_grid) ln_n.push_back(std::log(static_cast<double>(n)));
  s.replica_slopes.clear();
  if (s.n_grid.size() >= 2) {
    for (const auto& row : s.values) s.replica_slopes.push_back(least_squares(ln_n, row).slope);
    s.median_slope = median(s.replica_slopes);
  }
  std::vector<double> curve;
  for (std::size_t g = 0; g < s.n_grid.size(); ++g) {
    std::vector<double> col;
    for (const auto& row : s.values) col.push_back(row[g]);
    curve.push_back(median(col));
  }
  if (s.n_grid.size() >= 2) {
    s.median_curve_fit = least_squares(ln_n, curve);
    s.two_point_slope = (curve.back() - curve.front()) / (ln_n.back() - ln_n.front());
  }
}

ScalingStudy closed_form_scaling(const EnvDistribution& dist, std::vector<std::int64_t> n_grid, std::size_t replicas,
                                 std::uint64_t seed, unsigned workers, ScalingQuantity q) {
  check_grid(n_grid);
  if (replicas == 0) throw DomainError("replicas must be positive");
  ScalingStudy s{dist};
  s.kappa = solve_kappa(dist);
  s.quantity = q;
  s.n_grid = std::move(n_grid);
  s.seed = seed;
  s.target = q == ScalingQuantity::expectation ? std::max(1.0 / s.kappa, 1.0) : std::max(2.0 / s.kappa, 1.0);
  s.values.assign(replicas, std::vector<double>(s.n_grid.size(), 0.0));
  const std::int64_t n_max = s.n_grid.back();
  parallel_for(replicas, workers, [&](std::uint64_t r) {
    const Environment env = replica_environment(dist, std::max<std::int64_t>(n_max, 1), seed, r);
    const MomentPath path = reflected_moment_path(env, n_max);
    for (std::size_t g = 0; g < s.n_grid.size(); ++g) {
      const auto n = static_cast<std::size_t>(s.n_grid[g]);
      s.values[r][g] = q == ScalingQuantity::expectation ? path.log_expectation[n] : path.log_variance[n];
    }
  });
  fit_study(s);
  return s;
}

}  // namespace

std::string to_string(ScalingQuantity q) {
  switch (q) {
    case ScalingQuantity::expectation:
      return "expectation";
    case ScalingQuantity::variance:
      return "variance";
    case ScalingQuantity::mixing:
      return "mixing";
  }
  return "unknown";
}

Verdict make_verdict(std::string id, double measured, double target, double lo, double hi) {
  Verdict v;
  v.id = std::move(id);
  v.measured = measured;
  v.target = target;
  v.lo = lo;
  v.hi = hi;
  v.pass = lo <= measured && measured <= hi;
  return v;
}

std::uint64_t replica_env_seed(std::uint64_t seed, std::uint64_t replica) {
  return splitmix64(seed ^ splitmix64(replica + 0x5EEDull));
}

Environment replica_environment(const EnvDistribution& dist, std::int64_t n_max, std::uint64_t seed,
                                std::uint64_t replica, std::int64_t left) {
  return sample_environment(dist, left, n_max, replica_env_seed(seed, replica));
}

ScalingStudy scaling_expectation(const EnvDistribution& dist, std::vector<std::int64_t> n_grid, std::size_t replicas,
                                 std::uint64_t seed, unsigned workers) {
  return closed_form_scaling(dist, std::move(n_grid), replicas, seed, workers, ScalingQuantity::expectation);
}

ScalingStudy scaling_variance(const EnvDistribution& dist, std::vector<std::int64_t> n_grid, std::size_t replicas,
                              std::uint64_t seed, unsigned workers) {
  return closed_form_scaling(dist, std::move(n_grid), replicas, seed, workers, ScalingQuantity::variance);
}

ScalingStudy mixing_scaling(const EnvDistribution& dist, std::vector<std::int64_t> n_grid, std::size_t replicas,
                            std::uint64_t seed, unsigned workers, double eps) {
  check_grid(n_grid);
  if (replicas == 0) throw DomainError("replicas must be positive");
  ScalingStudy s{dist};
  s.kappa = solve_kappa(dist);
  s.quantity = ScalingQuantity::mixing;
  s.n_grid = std::move(n_grid);
  s.seed = seed;
  s.target = s.kappa <= 1.0 ? 1.0 / s.kappa : 1.0;
  if (s.kappa > 1.0) s.ratio_target = 2.0 * annealed_ET1(dist);
  s.values.assign(replicas, std::vector<double>(s.n_grid.size(), 0.0));
  const std::int64_t n_max = s.n_grid.back();
  const std::size_t cells = replicas * s.n_grid.size();
  parallel_for(cells, workers, [&](std::uint64_t cell) {
    const std::size_t r = cell / s.n_grid.size();
    const std::size_t g = cell % s.n_grid.size();
    const Environment env = reflect(replica_environment(dist, n_max, seed, r), s.n_grid[g]);
    const LazyKernel k = lazy_kernel(env);
    const DistVector pi = stationary(env);
    s.values[r][g] = std::log(static_cast<double>(std::max<std::int64_t>(mixing_time(k, pi, eps), 1)));
  });
  fit_study(s);
  if (s.kappa > 1.0) {
    for (std::size_t g = 0; g < s.n_grid.size(); ++g) {
      std::vector<double> ratios;
      for (const auto& row : s.values) ratios.push_back(std::exp(row[g]) / static_cast<double>(s.n_grid[g]));
      s.median_ratio.push_back(median(ratios));
    }
  }
  return s;
}

Verdict scaling_verdict(const ScalingStudy& s, double lo, double hi) {
  Verdict v;
  v.id = to_string(s.quantity) + "_slope";
  v.measured = s.median_slope;
  v.target = s.target;
  v.lo = lo;
  v.hi = hi;
  const bool boundary = (s.quantity == ScalingQuantity::variance && near(s.kappa, 2.0)) ||
                        (s.quantity != ScalingQuantity::variance && near(s.kappa, 1.0));
  v.informational = boundary;
  v.pass = boundary || (lo <= v.measured && v.measured <= hi);
  if (boundary) v.note = "regime boundary; reported only";
  return v;
}

std::vector<Verdict> cutoff_verdicts(const CutoffStudy& s, bool ballistic, double window_floor, double min_fraction) {
  std::vector<Verdict> out;
  if (s.c_grid.empty() || *std::max_element(s.c_grid.begin(), s.c_grid.end()) <= 0.0 || s.reports.empty()) return out;
  const std::size_t c_star = static_cast<std::size_t>(std::max_element(s.c_grid.begin(), s.c_grid.end()) - s.c_grid.begin());
  const double replicas = static_cast<double>(s.reports.size());
  const bool boundary = near(s.kappa, 1.0);
  if (ballistic) {
    const std::size_t g = s.n_grid.size() - 1;
    double sharp = 0.0;
    for (const auto& row : s.reports) {
      if (row[g].d_plus[c_star] < 0.25 && row[g].d_minus[c_star] > 0.75) sharp += 1.0;
    }
    Verdict v = make_verdict("cutoff_sharp", sharp / replicas, 1.0, min_fraction, 1.0);
    v.pass = boundary || v.measured >= min_fraction;
    v.informational = boundary;
    out.push_back(v);
    double increases = 0.0;
    for (std::size_t i = 1; i < s.median_window_ratio.size(); ++i) {
      if (!(s.median_window_ratio[i] < s.median_window_ratio[i - 1])) increases += 1.0;
    }
    Verdict w = make_verdict("window_ratio_decreasing", increases, 0.0, 0.0, 0.0);
    w.pass = boundary || increases == 0.0;
    w.informational = boundary;
    out.push_back(w);
  } else {
    double worst = 1.0;
    for (std::size_t g = 0; g < s.n_grid.size(); ++g) {
      double above = 0.0;
      for (const auto& row : s.reports) {
        if (row[g].window_ratio >= window_floor) above += 1.0;
      }
      worst = std::min(worst, above / replicas);
    }
    Verdict v = make_verdict("no_cutoff_window_floor", worst, 1.0, min_fraction, 1.0);
    v.pass = boundary || worst >= min_fraction;
    v.informational = boundary;
    out.push_back(v);
  }
  return out;
}

CutoffStudy cutoff_dichotomy(const EnvDistribution& dist, std::vector<std::int64_t> n_grid,
                             std::vector<double> c_grid, std::size_t replicas, std::uint64_t seed, unsigned workers,
                             double window_floor, double min_fraction) {
  const auto start = Clock::now();
  check_grid(n_grid);
  if (replicas == 0) throw DomainError("replicas must be positive");
  CutoffStudy s{dist};
  s.kappa = solve_kappa(dist);
  s.n_grid = std::move(n_grid);
  s.c_grid = std::move(c_grid);
  s.seed = seed;
  s.reports.assign(replicas, std::vector<CutoffReport>(s.n_grid.size()));
  const std::int64_t n_max = s.n_grid.back();
  const std::size_t cells = replicas * s.n_grid.size();
  parallel_for(cells, workers, [&](std::uint64_t cell) {
    const std::size_t r = cell / s.n_grid.size();
    const std::size_t g = cell % s.n_grid.size();
    const Environment env = reflect(replica_environment(dist, n_max, seed, r), s.n_grid[g]);
    s.reports[r][g] = cutoff_scan(env, s.c_grid);
  });
  for (std::size_t g = 0; g < s.n_grid.size(); ++g) {
    std::vector<double> w;
    for (const auto& row : s.reports) w.push_back(row[g].window_ratio);
    s.median_window_ratio.push_back(median(w));
  }
  s.verdicts = cutoff_verdicts(s, s.kappa > 1.0, window_floor, min_fraction);
  const double elapsed = seconds_since(start);
  for (auto& v : s.verdicts) v.runtime_seconds = elapsed;
  return s;
}

ErgodicStudy ergodic_check(const EnvDistribution& dist, std::int64_t n, std::size_t replicas, std::uint64_t seed,
                           unsigned workers, double tolerance) {
  const auto start = Clock::now();
  const double kappa = solve_kappa(dist);
  if (!(kappa > 1.0)) {
    throw PreconditionError("ergodic limit needs kappa > 1: E T_1 is infinite otherwise");
  }
  if (n < 2 || replicas == 0) throw DomainError("ergodic check needs n >= 2 and replicas > 0");
  ErgodicStudy s;
  s.n = n;
  s.kappa = kappa;
  s.annealed_et1 = annealed_ET1(dist);
  s.e_over_n.assign(replicas, 0.0);
  s.free_over_reflected.assign(replicas, 0.0);
  s.var_over_n.assign(replicas, 0.0);
  const std::int64_t left = default_left_truncation(n);
  parallel_for(replicas, workers, [&](std::uint64_t r) {
    const Environment env = replica_environment(dist, n, seed, r, left);
    const HittingMoments reflected = quenched_moments(reflect(env, n));
    const HittingMoments free = quenched_moments_full_line(env, n, left);
    const double dn = static_cast<double>(n);
    s.e_over_n[r] = reflected.expectation / dn;
    s.free_over_reflected[r] = free.expectation / reflected.expectation;
    s.var_over_n[r] = reflected.variance / dn;
  });
  std::vector<double> dev;
  for (double e : s.e_over_n) dev.push_back(std::abs(e - s.annealed_et1) / s.annealed_et1);
  Verdict v1 = make_verdict("ergodic_expectation", median(dev), 0.0, 0.0, tolerance);
  v1.pass = v1.measured <= tolerance;
  Verdict v2 = make_verdict("free_over_reflected", median(s.free_over_reflected), 1.0, 1.0 - tolerance, 1.0 + tolerance);
  v2.pass = v2.lo <= v2.measured && v2.measured <= v2.hi;
  Verdict v3 = make_verdict("variance_per_site", median(s.var_over_n), 0.0, 0.0, 0.0);
  v3.pass = true;
  v3.informational = true;
  v3.note = "trend only; no analytic target";
  s.verdicts = {v1, v2, v3};
  const double elapsed = seconds_since(start);
  for (auto& v : s.verdicts) v.runtime_seconds = elapsed;
  return s;
}

}  // namespace rwre
