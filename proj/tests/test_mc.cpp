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


#include <cmath>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "rwre/chain.hpp"
#include "rwre/errors.hpp"
#include "rwre/hitting.hpp"
#include "rwre/mc.hpp"
#include "rwre/potential.hpp"

namespace rwre {
namespace {

using testing::constant_reflected;

std::vector<double> as_real(const std::vector<std::uint64_t>& t) { return {t.begin(), t.end()}; }

// P(T_n > k) by evolving the plain chain with n absorbing.
double exact_tail(const Environment& env, std::uint64_t k) {
  const std::int64_t n = env.reflected_n();
  std::vector<double> p(static_cast<std::size_t>(n + 1), 0.0);
  p[0] = 1.0;
  for (std::uint64_t s = 0; s < k; ++s) {
    std::vector<double> q(p.size(), 0.0);
    for (std::int64_t x = 0; x < n; ++x) {
      const auto i = static_cast<std::size_t>(x);
      q[i + 1] += env[x] * p[i];
      if (x > 0) q[i - 1] += (1.0 - env[x]) * p[i];
    }
    q[static_cast<std::size_t>(n)] += p[static_cast<std::size_t>(n)];
    p = q;
  }
  return 1.0 - p[static_cast<std::size_t>(n)];
}

TEST(Simulators, PureFunctionOfStream) {
  const Environment env = reflect(sample_environment(testing::kappa_dist(1.0), 0, 80, 3), 80);
  for (std::uint64_t i = 0; i < 20; ++i) {
    RngStream a(9, i);
    RngStream b(9, i);
    EXPECT_EQ(simulate_T(env, a), simulate_T(env, b));
    RngStream c(9, i);
    RngStream d(9, i);
    EXPECT_EQ(simulate_T_lazy(env, c), simulate_T_lazy(env, d));
  }
}

TEST(Simulators, SingleSiteAndCap) {
  const Environment one = reflect(sample_environment(TwoPoint{}, 0, 4, 1), 1);
  RngStream s(1, 0);
  EXPECT_EQ(simulate_T(one, s), 1u);
  const Environment slow = constant_reflected(0.3, 60);
  RngStream r(1, 1);
  EXPECT_THROW(simulate_T(slow, r, 100), ResourceCapError);
}

TEST(Simulators, ConstantEnvironmentMoments) {
  const Environment two = constant_reflected(2.0 / 3.0, 2);
  const SampleMoments m2 = sample_moments(as_real(sample_hitting_times(two, false, 400000, 5)));
  EXPECT_LT(std::abs(m2.mean - 3.0), 4.0 * m2.se_mean);
  EXPECT_LT(std::abs(m2.variance - 3.0), 4.0 * m2.se_variance);

  const Environment three = constant_reflected(2.0 / 3.0, 3);
  const HittingMoments exact = quenched_moments(three);
  const SampleMoments lazy = sample_moments(as_real(sample_hitting_times(three, true, 200000, 6)));
  EXPECT_NEAR(exact.lazy_expectation, 11.0, 1e-12);
  EXPECT_LT(std::abs(lazy.mean - 11.0), 4.0 * lazy.se_mean);
  EXPECT_LT(std::abs(lazy.variance - (4.0 * exact.variance + 11.0)), 4.0 * lazy.se_variance);
}

struct Fixture {
  EnvDistribution dist;
  std::int64_t n;
};

TEST(Simulators, MomentAgreementMatrix) {
  const std::vector<Fixture> fixtures = {
      {testing::kappa_dist(4.0), 100},
      {testing::kappa_dist(2.0), 60},
      {testing::kappa_dist(1.0), 30},
      {EnvDistribution(BetaLike{4.0, 1.0}), 80},
      {EnvDistribution(Discrete{{0.4, 0.8, 0.9}, {0.3, 0.3, 0.4}}), 50},
  };
  std::uint64_t seed = 0;
  for (const Fixture& f : fixtures) {
    const Environment env = reflect(sample_environment(f.dist, 0, f.n, 40 + seed), f.n);
    const HittingMoments m = quenched_moments(env);
    for (bool lazy : {false, true}) {
      const SampleMoments s = sample_moments(as_real(sample_hitting_times(env, lazy, 40000, 100 + seed++)));
      const double e = lazy ? m.lazy_expectation : m.expectation;
      const double v = lazy ? m.lazy_variance : m.variance;
      EXPECT_LT(std::abs(s.mean - e), 4.0 * s.se_mean) << f.dist.family() << " lazy=" << lazy;
      EXPECT_LT(std::abs(s.variance - v), 4.0 * s.se_variance) << f.dist.family() << " lazy=" << lazy;
    }
  }
}

TEST(EstimateTail, ParallelInvariance) {
  const Environment env = reflect(sample_environment(testing::kappa_dist(1.5), 0, 40, 8), 40);
  const std::uint64_t ks[] = {0, 50, 100, 200, 400};
  const HittingSampleSummary a = estimate_tail(env, true, ks, 3000, 77, 1);
  for (unsigned w : {4u, 16u}) {
    const HittingSampleSummary b = estimate_tail(env, true, ks, 3000, 77, w);
    EXPECT_EQ(a.tail, b.tail);
    EXPECT_EQ(a.moments.mean, b.moments.mean);
    EXPECT_EQ(a.moments.variance, b.moments.variance);
    for (std::size_t i = 0; i < a.tail_ci.size(); ++i) EXPECT_EQ(a.tail_ci[i].hi, b.tail_ci[i].hi);
  }
  EXPECT_EQ(sample_hitting_times(env, false, 500, 3, 1), sample_hitting_times(env, false, 500, 3, 7));
}

TEST(EstimateTail, Examples) {
  const Environment env = constant_reflected(2.0 / 3.0, 3);
  const std::uint64_t ks[] = {0, 5, 100000};
  const std::uint64_t replicas = 100000;
  const HittingSampleSummary s = estimate_tail(env, false, ks, replicas, 12);
  EXPECT_EQ(s.tail[0], 1.0);
  EXPECT_EQ(s.tail[2], 0.0);
  EXPECT_GT(s.tail_ci[2].hi, 3.0 / replicas);
  EXPECT_LT(s.tail_ci[2].hi, 4.0 / replicas);
  const double exact = exact_tail(env, 5);
  EXPECT_LE(s.tail_ci[1].lo, exact);
  EXPECT_GE(s.tail_ci[1].hi, exact);
  EXPECT_THROW(estimate_tail(env, false, ks, 99, 1), DomainError);
}

TEST(EstimateTail, ExactTailAcrossTimes) {
  const Environment env = reflect(sample_environment(testing::kappa_dist(2.0), 0, 12, 2), 12);
  const std::uint64_t ks[] = {12, 20, 40, 80};
  const HittingSampleSummary s = estimate_tail(env, false, ks, 50000, 31);
  for (std::size_t i = 0; i < 4; ++i) {
    const double exact = exact_tail(env, ks[i]);
    const double se = std::sqrt(exact * (1.0 - exact) / 50000.0);
    EXPECT_LT(std::abs(s.tail[i] - exact), 4.0 * se + 1e-12) << ks[i];
  }
}

TEST(TailBound, HoldsAtProbeTimes) {
  const Environment env = reflect(sample_environment(testing::kappa_dist(2.0), 0, 50, 13), 50);
  const std::int64_t tmix = mixing_time(lazy_kernel(env), stationary(env));
  const double t = 2.0 * quenched_expectation(env);
  const std::uint64_t ks[] = {0, static_cast<std::uint64_t>(t / 2), static_cast<std::uint64_t>(tmix),
                              static_cast<std::uint64_t>(2 * tmix)};
  const auto report = tail_bound_check(env, ks, 20000, 4);
  ASSERT_EQ(report.size(), 4u);
  EXPECT_EQ(report[0].tail, 1.0);
  for (const TailBoundEntry& e : report) {
    EXPECT_TRUE(e.holds) << e.k << " d=" << e.d << " tail=" << e.tail;
    EXPECT_GE(e.allowance, e.tail);
  }
}

TEST(Restricted, DominanceAndIndicator) {
  const std::int64_t n = 300;
  int agree = 0;
  for (std::uint64_t e = 0; e < 5; ++e) {
    const Environment env = sample_environment(testing::kappa_dist(2.0), 0, n, 60 + e);
    const BlockDecomposition blocks = ladder_blocks(potential(env), n);
    for (std::uint64_t i = 0; i < 100; ++i) {
      RngStream s(8, e * 1000 + i);
      const RestrictedSample r = simulate_restricted(env, blocks, n, s, {kDefaultStepCap, true});
      EXPECT_TRUE(r.dominance_held);
      EXPECT_LE(r.t_tilde, r.t);
      EXPECT_EQ(r.a_indicator, r.t == r.t_tilde);
      agree += r.a_indicator;
      RngStream plain(8, e * 1000 + i);
      EXPECT_EQ(r.t, simulate_T(reflect(env, n), plain));
    }
  }
  EXPECT_GT(agree, 400);
}

TEST(Restricted, WeakDriftIsCutShort) {
  const std::int64_t n = 2000;
  const Environment env = testing::constant_env(0.51, n + 1);
  const BlockDecomposition blocks = ladder_blocks(potential(env), n);
  std::uint64_t shorter = 0;
  for (std::uint64_t i = 0; i < 40; ++i) {
    RngStream s(2, i);
    const RestrictedSample r = simulate_restricted(env, blocks, n, s, {kDefaultStepCap, true});
    EXPECT_TRUE(r.dominance_held);
    shorter += r.t_tilde < r.t;
  }
  EXPECT_GT(shorter, 0u);
  EXPECT_EQ(backtrack_horizon(10000), static_cast<std::int64_t>(std::ceil(std::pow(std::log(10000.0), 2))));
}

}  // namespace
}  // namespace rwre
