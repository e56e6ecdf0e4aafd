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

#include "rwre/hitting.hpp"

#include <algorithm>
#include <cmath>

#include "rwre/errors.hpp"
#include "rwre/logspace.hpp"

namespace rwre {
namespace {

constexpr double kLn2 = 0.69314718055994530942;
constexpr double kLn4 = 2.0 * kLn2;
constexpr double kLn8 = 3.0 * kLn2;

// One step of the W / U recursions. lnW_i = ln rho_i + ln(1 + W_{i-1}),
// U_i = rho_i (U_{i-1} + a_{i-1}), a = W + W^2.
struct Sweep {
  double log_w = kNegInf;
  double log_a = kNegInf;
  double log_u = kNegInf;

  void advance(double log_rho) {
    log_u = log_rho + log_add(log_u, log_a);
    log_w = log_rho + log1p_exp(log_w);
    log_a = log_w + log1p_exp(log_w);
  }
  double log_e_term() const { return log1p_exp(kLn2 + log_w); }
  double log_var_term() const { return log_add(kLn4 + log_a, kLn8 + log_u); }
};

double log_rho_at(const Environment& env, std::int64_t site) {
  const double w = env.omega(site);
  return std::log1p(-w) - std::log(w);
}

void require_unreflected(const Environment& env) {
  if (env.reflected_at()) throw PreconditionError("full-line quantities need an unreflected environment");
}

HittingMoments finish(std::int64_t n, double log_e, double log_var) {
  HittingMoments m;
  m.n = n;
  m.log_expectation = log_e;
  m.log_variance = log_var;
  m.expectation = to_linear(log_e).value_or(kPosInf);
  m.variance = to_linear(log_var).value_or(kPosInf);
  const HittingMoments lazy = lazy_moments(m);
  m.log_lazy_expectation = lazy.log_lazy_expectation;
  m.log_lazy_variance = lazy.log_lazy_variance;
  m.lazy_expectation = lazy.lazy_expectation;
  m.lazy_variance = lazy.lazy_variance;
  return m;
}

// ln sum_{j <= -L} exp(-V(j)), continuing geometrically with the mean slope
// of V over the 64 sites right of -L. Returns +inf when the slope does not
// decay to the left.
double left_edge_mass(const Environment& env, std::int64_t left_trunc, bool& reliable) {
  const std::int64_t edge = -left_trunc;
  const std::int64_t span = std::min<std::int64_t>(64, env.last_site() - edge);
  if (span <= 0) {
    reliable = false;
    return kPosInf;
  }
  // V(edge) relative to V(0) and V(edge + span) - V(edge).
  CompensatedSum v_edge;
  for (std::int64_t k = edge; k < 0; ++k) v_edge.add(-log_rho_at(env, k));
  for (std::int64_t k = 0; k < edge; ++k) v_edge.add(log_rho_at(env, k));
  CompensatedSum rise;
  for (std::int64_t k = edge; k < edge + span; ++k) rise.add(log_rho_at(env, k));
  const double slope = -rise.value() / static_cast<double>(span);
  if (!(slope > 0.0)) {
    reliable = false;
    return kPosInf;
  }
  reliable = true;
  return -v_edge.value() - std::log(-std::expm1(-slope));
}

}  // namespace

double WSequence::log_at(std::int64_t site) const {
  if (site < first_site || site > last_site()) throw DomainError("site outside the W sequence");
  return log_values[static_cast<std::size_t>(site - first_site)];
}

std::optional<double> WSequence::linear(std::int64_t site) const { return to_linear(log_at(site)); }

std::int64_t default_left_truncation(std::int64_t n) {
  const double l = std::log(static_cast<double>(std::max<std::int64_t>(n, 2)));
  return static_cast<std::int64_t>(std::ceil(10.0 * l * l));
}

WSequence w_reflected(const Environment& reflected_env) {
  const std::int64_t n = reflected_env.reflected_n();
  WSequence out;
  out.variant = WVariant::reflected;
  out.first_site = 0;
  out.log_values.reserve(static_cast<std::size_t>(n));
  Sweep s;
  out.log_values.push_back(s.log_w);
  for (std::int64_t i = 1; i < n; ++i) {
    s.advance(log_rho_at(reflected_env, i));
    out.log_values.push_back(s.log_w);
  }
  out.log_edge_mass = kNegInf;
  return out;
}

WSequence w_full_line(const Environment& env, std::int64_t left_trunc) {
  require_unreflected(env);
  if (left_trunc < 0) throw DomainError("left truncation must be nonnegative");
  if (!env.covers(-left_trunc, 0)) throw PreconditionError("environment does not cover the truncation window");
  WSequence out;
  out.variant = WVariant::full_line;
  out.first_site = -left_trunc;
  Sweep s;
  out.log_values.push_back(s.log_w);
  for (std::int64_t i = -left_trunc + 1; i <= env.last_site(); ++i) {
    s.advance(log_rho_at(env, i));
    out.log_values.push_back(s.log_w);
  }
  bool reliable = true;
  out.log_edge_mass = left_edge_mass(env, left_trunc, reliable);
  out.bound_reliable = reliable;
  return out;
}

HittingMoments quenched_moments(const Environment& reflected_env) {
  const std::int64_t n = reflected_env.reflected_n();
  Sweep s;
  double log_e = s.log_e_term();
  double log_var = s.log_var_term();
  for (std::int64_t i = 1; i < n; ++i) {
    s.advance(log_rho_at(reflected_env, i));
    log_e = log_add(log_e, s.log_e_term());
    log_var = log_add(log_var, s.log_var_term());
  }
  return finish(n, log_e, log_var);
}

double quenched_expectation(const Environment& reflected_env) { return quenched_moments(reflected_env).expectation; }
double quenched_variance(const Environment& reflected_env) { return quenched_moments(reflected_env).variance; }

HittingMoments quenched_moments_full_line(const Environment& env, std::int64_t n, std::int64_t left_trunc) {
  require_unreflected(env);
  if (n < 1) throw DomainError("n must be positive");
  if (left_trunc < 0) throw DomainError("left truncation must be nonnegative");
  if (!env.covers(-left_trunc, n - 1)) throw PreconditionError("environment does not cover [-left_trunc, n-1]");
  Sweep s;
  double log_e = kNegInf;
  double log_var = kNegInf;
  // ln sum_{i<n} exp(V(i+1)) for the omitted expectation mass.
  double log_profile_mass = kNegInf;
  CompensatedSum v;
  for (std::int64_t i = -left_trunc; i < n; ++i) {
    if (i > -left_trunc) s.advance(log_rho_at(env, i));
    if (i >= 0) {
      log_e = log_add(log_e, s.log_e_term());
      log_var = log_add(log_var, s.log_var_term());
      v.add(log_rho_at(env, i));
      log_profile_mass = log_add(log_profile_mass, v.value());
    }
  }
  HittingMoments m = finish(n, log_e, log_var);
  bool reliable = true;
  const double edge = left_edge_mass(env, left_trunc, reliable);
  if (reliable) {
    m.truncation_bound = std::exp(kLn2 + log_profile_mass + edge);
  } else {
    m.truncation_bound = kPosInf;
  }
  return m;
}

double quenched_variance_full_line(const Environment& env, std::int64_t n, std::int64_t left_trunc) {
  return quenched_moments_full_line(env, n, left_trunc).variance;
}

MomentPath reflected_moment_path(const Environment& env, std::int64_t n_max) {
  if (n_max < 1) throw DomainError("n_max must be positive");
  if (n_max > 1 && !env.covers(1, n_max - 1)) throw PreconditionError("environment does not cover [1, n_max-1]");
  MomentPath path;
  path.log_expectation.assign(static_cast<std::size_t>(n_max + 1), kNegInf);
  path.log_variance.assign(static_cast<std::size_t>(n_max + 1), kNegInf);
  Sweep s;
  double log_e = kNegInf;
  double log_var = kNegInf;
  for (std::int64_t i = 0; i < n_max; ++i) {
    if (i > 0) s.advance(log_rho_at(env, i));
    log_e = log_add(log_e, s.log_e_term());
    log_var = log_add(log_var, s.log_var_term());
    path.log_expectation[static_cast<std::size_t>(i + 1)] = log_e;
    path.log_variance[static_cast<std::size_t>(i + 1)] = log_var;
  }
  return path;
}

HittingMoments lazy_moments(const HittingMoments& m) {
  HittingMoments out = m;
  out.log_lazy_expectation = kLn2 + m.log_expectation;
  out.log_lazy_variance = log_add(kLn4 + m.log_variance, kLn2 + m.log_expectation);
  out.lazy_expectation = to_linear(out.log_lazy_expectation).value_or(kPosInf);
  out.lazy_variance = to_linear(out.log_lazy_variance).value_or(kPosInf);
  return out;
}

TailConstants tail_constants(const PotentialProfile& profile, const WSequence& w) {
  if (w.variant != WVariant::full_line || w.first_site != profile.first()) {
    throw PreconditionError("W sequence must be full-line and start at the profile's first site");
  }
  const auto count = static_cast<std::size_t>(-profile.first());
  if (w.log_values.size() < count) throw PreconditionError("W sequence too short");
  return tail_constants(profile, std::span<const double>(w.log_values.data(), count));
}

}  // namespace rwre
