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

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace rwre {

/// Two atoms: P(omega_0 = p_hi) = beta, P(omega_0 = p_lo) = 1 - beta.
struct TwoPoint {
  double p_hi = 0.75;
  double p_lo = 0.25;
  double beta = 0.5;
};

/// Beta(shape_a, shape_b) law of omega_0 on (0, 1). For shape_a > shape_b the
/// transience exponent is shape_a - shape_b.
struct BetaLike {
  double shape_a = 2.0;
  double shape_b = 1.0;
};

/// Finite support with explicit weights.
struct Discrete {
  std::vector<double> values;
  std::vector<double> weights;
};

/// Law of a single site probability omega_0. Construction validates that all
/// support points lie strictly inside (0, 1) and that weights sum to one.
class EnvDistribution {
 public:
  using Variant = std::variant<TwoPoint, BetaLike, Discrete>;

  EnvDistribution(TwoPoint p);
  EnvDistribution(BetaLike p);
  EnvDistribution(Discrete p);

  const Variant& variant() const { return law_; }
  bool is_atomic() const { return !std::holds_alternative<BetaLike>(law_); }

  // Atoms (omega value, weight) with zero-weight atoms dropped. Empty for
  // continuous laws.
  std::vector<std::pair<double, double>> atoms() const;

  std::string family() const;

 private:
  Variant law_;
};

/// Site probabilities omega_i on the window [-left, right].
class Environment {
 public:
  Environment(EnvDistribution spec, std::int64_t left, std::int64_t right, std::uint64_t seed,
              std::vector<double> omega, std::optional<std::int64_t> reflected_at = std::nullopt);

  double omega(std::int64_t site) const;
  double operator[](std::int64_t site) const { return omega(site); }

  // Window bounds in site coordinates: first_site() == -left().
  std::int64_t left() const { return left_; }
  std::int64_t right() const { return right_; }
  std::int64_t first_site() const { return -left_; }
  std::int64_t last_site() const { return right_; }
  bool covers(std::int64_t from, std::int64_t to) const { return from >= -left_ && to <= right_; }

  std::uint64_t seed() const { return seed_; }
  const EnvDistribution& spec() const { return spec_; }
  std::optional<std::int64_t> reflected_at() const { return reflected_at_; }

  // All stored values, index 0 corresponds to site -left.
  std::span<const double> values() const { return omega_; }
  // Sites [from, to] inclusive.
  std::span<const double> sites(std::int64_t from, std::int64_t to) const;

  // Requires reflected_at; throws PreconditionError otherwise.
  std::int64_t reflected_n() const;

 private:
  EnvDistribution spec_;
  std::int64_t left_;
  std::int64_t right_;
  std::uint64_t seed_;
  std::vector<double> omega_;
  std::optional<std::int64_t> reflected_at_;
};

enum class LatticeFlag { non_lattice, lattice, unknown };

struct AssumptionReport {
  double mean_log_rho = 0.0;
  std::optional<double> kappa;
  // E[rho^kappa ln+ rho]; NaN when kappa is absent.
  double kappa_moment_check = 0.0;
  LatticeFlag lattice_flag = LatticeFlag::unknown;
  bool ballistic = false;
};

std::string to_string(LatticeFlag flag);

/// Odds ratio (1 - omega) / omega. Throws DomainError outside (0, 1).
double rho(double omega);

/// omega at one site; a pure function of (dist, seed, site).
double sample_site(const EnvDistribution& dist, std::uint64_t seed, std::int64_t site);

/// i.i.d. sites on [-left, right]; site i is drawn from its own counter-based
/// stream, so the value at a site depends only on (dist, seed, i).
Environment sample_environment(const EnvDistribution& dist, std::int64_t left, std::int64_t right,
                               std::uint64_t seed);

/// omega_0 = 1, omega_n = 0, interior untouched.
Environment reflect(const Environment& env, std::int64_t n);

/// Unreflected copy restricted to [from, to] (keeps site coordinates).
Environment window(const Environment& env, std::int64_t from, std::int64_t to);

double mean_log_rho(const EnvDistribution& dist);

/// E[rho_0^s] for s >= 0; +infinity when the integral diverges.
double moment_rho(const EnvDistribution& dist, double s);

/// E[rho_0^s ln+ rho_0].
double moment_rho_log_plus(const EnvDistribution& dist, double s);

/// P(rho_0 > 1) = P(omega_0 < 1/2).
double prob_rho_above_one(const EnvDistribution& dist);

/// The positive root of E[rho^s] = 1 by bisection on an expanding bracket.
double solve_kappa(const EnvDistribution& dist, double tol = 1e-10);

/// Annealed E T_1 = (1 + E rho) / (1 - E rho), +infinity when E rho >= 1.
double annealed_ET1(const EnvDistribution& dist);

/// 1 + sum_{k>=1} (E rho)^k = 1 / (1 - E rho). Reported next to annealed_ET1
/// for comparison; not used by any computation.
double annealed_ET1_geometric_series(const EnvDistribution& dist);

LatticeFlag lattice_flag(const EnvDistribution& dist);

AssumptionReport check_assumptions(const EnvDistribution& dist, double tol = 1e-10);

/// Symmetric two-point law with rho in {1/r, r} matching a target kappa and
/// E ln rho < 0.
TwoPoint fit_two_point(double kappa, double mean_log_rho);

/// TwoPoint{3/4, 1/4, beta} with beta chosen so the exponent equals kappa.
TwoPoint two_point_for_kappa(double kappa);

}  // namespace rwre
