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


// Acceptance run: one PASS/FAIL line per criterion. With arguments, runs only
// the listed criterion numbers.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "rwre/chain.hpp"
#include "rwre/envgen.hpp"
#include "rwre/experiments.hpp"
#include "rwre/hitting.hpp"
#include "rwre/mc.hpp"
#include "rwre/oracle.hpp"
#include "rwre/potential.hpp"
#include "rwre/rng.hpp"
#include "rwre/stats.hpp"

namespace rwre {
namespace {

const unsigned kWorkers = std::max(1u, std::thread::hardware_concurrency());

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

const double kKappas[] = {0.5, 1.0, 2.0, 4.0};

// Alternates TwoPoint and Beta laws over the kappa set.
EnvDistribution mixed_law(std::size_t i) {
  const double kappa = kKappas[i % 4];
  if ((i / 4) % 2 == 0) return EnvDistribution(two_point_for_kappa(kappa));
  const double b = 1.0 + 0.5 * static_cast<double>(i % 3);
  return EnvDistribution(BetaLike{b + kappa, b});
}

std::int64_t draw_n(std::uint64_t i, std::int64_t lo, std::int64_t hi) {
  RngStream s(0xACCE55, i);
  return lo + static_cast<std::int64_t>(s.uniform() * static_cast<double>(hi - lo + 1));
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

double since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

Outcome oracle_equivalence() {
  const auto start = std::chrono::steady_clock::now();
  double worst = 0.0;
  constexpr double kTol = 1e-9;
  for (std::size_t i = 0; i < 50; ++i) {
    const Environment base = sample_environment(mixed_law(i), 0, 512, 100 + i);
    for (std::int64_t n : {8, 64, 512}) {
      const Environment env = reflect(base, n);
      const HittingMoments m = quenched_moments(env);
      const OracleMoments o = oracle_moments(env);
      worst = std::max({worst, rel(m.expectation, o.expectation), rel(m.variance, o.variance)});
    }
  }
  const double secs = since(start);
  return {worst <= kTol && secs < 60.0,
          fmt("max relative error %.3g over 150 cases (tol %.0e); %.1f s (< 60)", worst, kTol, secs)};
}

Outcome monte_carlo_agreement() {
  const auto start = std::chrono::steady_clock::now();
  constexpr std::uint64_t kReplicas = 100000;
  double worst_z = 0.0;
  double worst_identity = 0.0;
  for (std::size_t i = 0; i < 10; ++i) {
    const EnvDistribution law = i % 2 == 0 ? EnvDistribution(two_point_for_kappa(i < 5 ? 2.0 : 4.0))
                                           : EnvDistribution(BetaLike{1.0 + (i < 5 ? 2.0 : 4.0), 1.0});
    const Environment env = reflect(sample_environment(law, 0, 100, 200 + i), 100);
    const HittingMoments m = quenched_moments(env);
    const HittingMoments lazy = lazy_moments(m);
    worst_identity = std::max({worst_identity, rel(m.lazy_expectation, 2.0 * m.expectation),
                               rel(m.lazy_variance, 4.0 * m.variance + 2.0 * m.expectation),
                               rel(lazy.lazy_expectation, 2.0 * m.expectation)});
    for (bool is_lazy : {false, true}) {
      const auto t = sample_hitting_times(env, is_lazy, kReplicas, 300 + i, kWorkers);
      const SampleMoments s = sample_moments(std::vector<double>(t.begin(), t.end()));
      const double e = is_lazy ? 2.0 * m.expectation : m.expectation;
      const double v = is_lazy ? 4.0 * m.variance + 2.0 * m.expectation : m.variance;
      worst_z = std::max({worst_z, std::abs(s.mean - e) / s.se_mean, std::abs(s.variance - v) / s.se_variance});
    }
  }
  const double secs = since(start);
  const bool pass = worst_z < 4.0 && worst_identity <= 1e-14 && secs < 300.0;
  return {pass, fmt("max |z| %.2f over 40 comparisons (< 4), lazy identity residual %.2g; %.0f s (< 300)", worst_z,
                    worst_identity, secs)};
}

Outcome stationarity_and_balance() {
  double worst_l1 = 0.0;
  double worst_balance = 0.0;
  for (std::uint64_t i = 0; i < 100; ++i) {
    const std::int64_t n = draw_n(i, 1, 1024);
    const Environment env = reflect(sample_environment(mixed_law(i), 0, n, 400 + i), n);
    const LazyKernel k = lazy_kernel(env);
    const DistVector pi = stationary(env);
    const DistVector next = step(pi, k);
    double l1 = 0.0;
    for (std::size_t x = 0; x < pi.size(); ++x) l1 += std::abs(next[x] - pi[x]);
    worst_l1 = std::max(worst_l1, l1);
    for (std::size_t x = 0; x + 1 < pi.size(); ++x) {
      worst_balance = std::max(worst_balance, std::abs(pi[x] * k.up[x] - pi[x + 1] * k.down[x + 1]));
    }
  }
  const bool pass = worst_l1 <= 1e-12 && worst_balance <= 1e-12;
  return {pass, fmt("max |pi P - pi|_1 %.3g, max balance residual %.3g (tol 1e-12)", worst_l1, worst_balance)};
}

Outcome tv_structure() {
  constexpr double kRounding = 1e-12;
  int increases = 0;
  double worst_increase = 0.0;
  int violations = 0;
  double worst_margin = -1.0;
  for (std::uint64_t i = 0; i < 20; ++i) {
    const std::int64_t n = std::int64_t{50} << (i % 3);
    const Environment env = reflect(sample_environment(mixed_law(i), 0, n, 500 + i), n);
    const LazyKernel k = lazy_kernel(env);
    const DistVector pi = stationary(env);
    const std::int64_t tmix = std::max<std::int64_t>(mixing_time(k, pi), 1);
    std::vector<std::int64_t> schedule;
    for (std::int64_t j = 0; j <= 200; ++j) schedule.push_back(j * 3 * tmix / 200);
    schedule.erase(std::unique(schedule.begin(), schedule.end()), schedule.end());
    const TVProfile p = distance_profile(k, pi, {}, schedule);
    for (std::size_t j = 1; j < p.d.size(); ++j) {
      increases += p.d[j] > p.d[j - 1] + kRounding;
      worst_increase = std::max(worst_increase, p.d[j] - p.d[j - 1]);
    }
    std::vector<std::uint64_t> probes;
    for (double f : {0.25, 0.5, 1.0, 1.5, 2.0}) probes.push_back(static_cast<std::uint64_t>(f * static_cast<double>(tmix)));
    for (const TailBoundEntry& e : tail_bound_check(env, probes, 20000, 600 + i, kWorkers)) {
      violations += !e.holds;
      worst_margin = std::max(worst_margin, e.d - e.allowance);
    }
  }
  return {increases == 0 && violations == 0,
          fmt("%d increases above %.0e over 20 profiles (largest step up %.2g); %d of 100 probes exceed tail + 3 SE "
              "(max d - allowance %.3g)",
              increases, kRounding, worst_increase, violations, worst_margin)};
}

Outcome exhaustive_consistency() {
  int mismatches = 0;
  std::string first;
  for (std::uint64_t i = 0; i < 100; ++i) {
    const std::int64_t n = draw_n(1000 + i, 1, 128);
    const Environment env = reflect(sample_environment(mixed_law(i), 0, n, 700 + i), n);
    const LazyKernel k = lazy_kernel(env);
    const DistVector pi = stationary(env);
    const std::int64_t a = mixing_time(k, pi, 0.25, StartSet::endpoints);
    const std::int64_t b = mixing_time(k, pi, 0.25, StartSet::exhaustive);
    if (a != b) {
      if (mismatches++ == 0) first = fmt(" (first: env %d n=%lld endpoints %lld exhaustive %lld)", static_cast<int>(i),
                                         static_cast<long long>(n), static_cast<long long>(a), static_cast<long long>(b));
    }
  }
  return {mismatches == 0, fmt("%d of 100 environments differ%s", mismatches, first.c_str())};
}

Outcome cutoff() {
  const auto start = std::chrono::steady_clock::now();
  const CutoffStudy s = cutoff_dichotomy(two_point_for_kappa(2.0), {1024, 2048, 4096}, {4.0}, 10, 800, kWorkers);
  const double secs = since(start);
  bool pass = secs < 1800.0 && s.verdicts.size() == 2;
  std::string ratios;
  for (double w : s.median_window_ratio) ratios += fmt("%.4f ", w);
  double sharp = 0.0;
  for (const Verdict& v : s.verdicts) {
    pass = pass && v.pass && !v.informational;
    if (v.id == "cutoff_sharp") sharp = v.measured;
  }
  return {pass, fmt("sharp fraction %.1f (>= 0.7) at n=4096; median window ratio %s(decreasing); %.0f s (< 1800)",
                    sharp, ratios.c_str(), secs)};
}

Outcome no_cutoff() {
  const CutoffStudy s = cutoff_dichotomy(two_point_for_kappa(0.5), {256, 512, 1024, 2048, 4096}, {}, 10, 900, kWorkers);
  double worst = 1.0;
  std::string per_n;
  for (std::size_t g = 0; g < s.n_grid.size(); ++g) {
    double above = 0.0;
    for (const auto& row : s.reports) above += row[g].window_ratio >= 0.05;
    const double frac = above / static_cast<double>(s.reports.size());
    worst = std::min(worst, frac);
    per_n += fmt("%.1f ", frac);
  }
  return {worst >= 0.7, fmt("fraction with window ratio >= 0.05 per n: %s(each >= 0.7)", per_n.c_str())};
}

Outcome scaling() {
  const auto start = std::chrono::steady_clock::now();
  std::vector<std::int64_t> grid;
  for (int p = 8; p <= 14; ++p) grid.push_back(std::int64_t{1} << p);
  const Verdict e2 = scaling_verdict(scaling_expectation(two_point_for_kappa(2.0), grid, 20, 1000, kWorkers), 0.9, 1.15);
  const Verdict eh = scaling_verdict(scaling_expectation(two_point_for_kappa(0.5), grid, 20, 1001, kWorkers), 1.5, 2.5);
  const Verdict vh = scaling_verdict(scaling_variance(two_point_for_kappa(0.5), grid, 20, 1002, kWorkers), 3.2, 4.8);
  const double secs = since(start);
  return {e2.pass && eh.pass && vh.pass && secs < 600.0,
          fmt("E slope kappa=2 %.3f [0.9, 1.15], kappa=1/2 %.3f [1.5, 2.5]; Var slope kappa=1/2 %.3f [3.2, 4.8]; %.1f s",
              e2.measured, eh.measured, vh.measured, secs)};
}

Outcome mixing_order() {
  const auto start = std::chrono::steady_clock::now();
  const EnvDistribution law(two_point_for_kappa(2.0));
  const ScalingStudy s = mixing_scaling(law, {8192}, 10, 1100, kWorkers);
  const double secs = since(start);
  const double target = 2.0 * annealed_ET1(law);
  const double ratio = s.median_ratio.at(0);
  const bool pass = std::abs(ratio - 8.0) <= 0.25 * 8.0 && std::abs(target - 8.0) < 1e-9 && secs < 1200.0;
  return {pass, fmt("median t_mix/n %.3f vs 8 (+-25%%), 2 E T_1 = %.6f; %.0f s (< 1200)", ratio, target, secs)};
}

Outcome restricted_fidelity() {
  constexpr std::int64_t n = 10000;
  std::uint64_t hits = 0;
  std::uint64_t broken = 0;
  const EnvDistribution law(two_point_for_kappa(2.0));
  for (std::uint64_t e = 0; e < 10; ++e) {
    const Environment env = sample_environment(law, 0, n, 1200 + e);
    const BlockDecomposition blocks = ladder_blocks(potential(env), n);
    for (std::uint64_t i = 0; i < 100; ++i) {
      RngStream s(1300, e * 100 + i);
      const RestrictedSample r = simulate_restricted(env, blocks, n, s, {kDefaultStepCap, true});
      hits += r.a_indicator;
      broken += !r.dominance_held;
    }
  }
  const double freq = static_cast<double>(hits) / 1000.0;
  return {freq >= 0.95 && broken == 0,
          fmt("A(n) frequency %.3f (>= 0.95); dominance broken on %llu of 1000 trajectories", freq,
              static_cast<unsigned long long>(broken))};
}

}  // namespace
}  // namespace rwre

int main(int argc, char** argv) {
  using rwre::Outcome;
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"oracle equivalence", rwre::oracle_equivalence},
      {"monte carlo agreement", rwre::monte_carlo_agreement},
      {"stationarity and balance", rwre::stationarity_and_balance},
      {"tv structure", rwre::tv_structure},
      {"exhaustive start consistency", rwre::exhaustive_consistency},
      {"cutoff", rwre::cutoff},
      {"no cutoff", rwre::no_cutoff},
      {"scaling", rwre::scaling},
      {"mixing order", rwre::mixing_order},
      {"restricted walk fidelity", rwre::restricted_fidelity},
  };
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!only.empty() && !only.count(id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = rwre::since(start);
    failures += !o.pass;
    std::printf("criterion %2d %s  %s: %s [%.1f s]\n", id, o.pass ? "PASS" : "FAIL", criteria[i].first, o.detail.c_str(),
                secs);
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
