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

#include "rwre/envgen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/random/beta_distribution.hpp>

#include "rwre/errors.hpp"
#include "rwre/logspace.hpp"
#include "rwre/rng.hpp"

namespace rwre {
namespace {

bool strictly_inside(double p) { return p > 0.0 && p < 1.0; }

void require_probability(double p, const char* what) {
  if (!strictly_inside(p)) {
    throw DomainError(std::string(what) + " must lie strictly inside (0,1)");
  }
}

template <class... Fs>
struct Overloaded : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
Overloaded(Fs...) -> Overloaded<Fs...>;

double log_beta_fn(double a, double b) { return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b); }

// Integrates a Beta(a,b)-weighted function of (omega, 1 - omega) on (0,1) in
// log form. The integrand receives both omega and its complement to keep
// precision near omega = 1.
template <class LogIntegrand>
double beta_integral(const BetaLike& p, LogIntegrand&& log_g, double lo, double hi) {
  const double log_norm = log_beta_fn(p.shape_a, p.shape_b);
  auto f = [&](double x, double xc) {
    double w;
    double wc;
    if (hi == 1.0 && xc > 0.0) {
      wc = xc;
      w = 1.0 - wc;
    } else {
      w = x;
      wc = 1.0 - x;
    }
    if (w <= 0.0 || wc <= 0.0) return 0.0;
    const double log_density = (p.shape_a - 1.0) * std::log(w) + (p.shape_b - 1.0) * std::log(wc) - log_norm;
    const auto [log_mag, sign] = log_g(w, wc);
    if (log_mag == kNegInf) return 0.0;
    return sign * std::exp(log_density + log_mag);
  };
  boost::math::quadrature::tanh_sinh<double> integrator(15);
  double error = 0.0;
  double l1 = 0.0;
  double value = 0.0;
  try {
    value = integrator.integrate(f, lo, hi, 1e-13, &error, &l1);
  } catch (const std::exception& e) {
    throw QuadratureError(std::string("tanh-sinh quadrature failed: ") + e.what());
  }
  if (!std::isfinite(value) || error > 1e-10 * std::max(1.0, l1)) {
    throw QuadratureError("quadrature did not reach tolerance 1e-10");
  }
  return value;
}

// Best rational approximation p/q with q <= max_q by continued fractions.
std::pair<long long, long long> best_rational(double x, long long max_q) {
  long long p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  double r = x;
  for (int iter = 0; iter < 64; ++iter) {
    const double a = std::floor(r);
    const long long ai = static_cast<long long>(a);
    const long long p2 = ai * p1 + p0;
    const long long q2 = ai * q1 + q0;
    if (q2 > max_q) break;
    p0 = p1;
    q0 = q1;
    p1 = p2;
    q1 = q2;
    const double frac = r - a;
    if (frac < 1e-15) break;
    r = 1.0 / frac;
  }
  return {p1, q1};
}

}  // namespace

EnvDistribution::EnvDistribution(TwoPoint p) : law_(p) {
  require_probability(p.p_hi, "p_hi");
  require_probability(p.p_lo, "p_lo");
  if (!(p.beta >= 0.0 && p.beta <= 1.0)) throw DomainError("beta must lie in [0,1]");
}

EnvDistribution::EnvDistribution(BetaLike p) : law_(p) {
  if (!(p.shape_a > 0.0) || !(p.shape_b > 0.0)) throw DomainError("Beta shapes must be positive");
}

EnvDistribution::EnvDistribution(Discrete p) : law_(std::move(p)) {
  const auto& d = std::get<Discrete>(law_);
  if (d.values.empty() || d.values.size() != d.weights.size()) {
    throw DomainError("discrete law needs equally many values and weights");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < d.values.size(); ++i) {
    require_probability(d.values[i], "discrete support point");
    if (!(d.weights[i] >= 0.0)) throw DomainError("discrete weights must be nonnegative");
    total += d.weights[i];
  }
  if (std::abs(total - 1.0) > 1e-12) throw DomainError("discrete weights must sum to 1");
}

std::vector<std::pair<double, double>> EnvDistribution::atoms() const {
  std::vector<std::pair<double, double>> out;
  std::visit(Overloaded{
                 [&](const TwoPoint& p) {
                   if (p.beta > 0.0) out.emplace_back(p.p_hi, p.beta);
                   if (p.beta < 1.0) out.emplace_back(p.p_lo, 1.0 - p.beta);
                 },
                 [&](const BetaLike&) {},
                 [&](const Discrete& p) {
                   for (std::size_t i = 0; i < p.values.size(); ++i) {
                     if (p.weights[i] > 0.0) out.emplace_back(p.values[i], p.weights[i]);
                   }
                 },
             },
             law_);
  return out;
}

std::string EnvDistribution::family() const {
  return std::visit(Overloaded{
                        [](const TwoPoint&) { return std::string("two_point"); },
                        [](const BetaLike&) { return std::string("beta"); },
                        [](const Discrete&) { return std::string("discrete"); },
                    },
                    law_);
}

Environment::Environment(EnvDistribution spec, std::int64_t left, std::int64_t right, std::uint64_t seed,
                         std::vector<double> omega, std::optional<std::int64_t> reflected_at)
    : spec_(std::move(spec)),
      left_(left),
      right_(right),
      seed_(seed),
      omega_(std::move(omega)),
      reflected_at_(reflected_at) {
  if (left_ < 0 || right_ < 1) throw DomainError("window needs left >= 0 and right >= 1");
  if (omega_.size() != static_cast<std::size_t>(left_ + right_ + 1)) {
    throw DomainError("omega length does not match the window");
  }
  if (reflected_at_ && (*reflected_at_ < 1 || *reflected_at_ > right_)) {
    throw DomainError("reflection site outside the window");
  }
  for (std::int64_t site = -left_; site <= right_; ++site) {
    const double w = omega_[static_cast<std::size_t>(site + left_)];
    if (reflected_at_ && site == 0) {
      if (w != 1.0) throw DomainError("reflected environment needs omega_0 = 1");
    } else if (reflected_at_ && site == *reflected_at_) {
      if (w != 0.0) throw DomainError("reflected environment needs omega_n = 0");
    } else if (!strictly_inside(w)) {
      throw DomainError("site probabilities must lie strictly inside (0,1)");
    }
  }
}

double Environment::omega(std::int64_t site) const {
  if (site < -left_ || site > right_) throw DomainError("site outside the environment window");
  return omega_[static_cast<std::size_t>(site + left_)];
}

std::span<const double> Environment::sites(std::int64_t from, std::int64_t to) const {
  if (from < -left_ || to > right_ || from > to + 1) throw DomainError("site range outside the window");
  return std::span<const double>(omega_).subspan(static_cast<std::size_t>(from + left_),
                                                 static_cast<std::size_t>(to - from + 1));
}

std::int64_t Environment::reflected_n() const {
  if (!reflected_at_) throw PreconditionError("operation needs an environment reflected at some n");
  return *reflected_at_;
}

std::string to_string(LatticeFlag flag) {
  switch (flag) {
    case LatticeFlag::non_lattice:
      return "non_lattice";
    case LatticeFlag::lattice:
      return "lattice";
    case LatticeFlag::unknown:
      break;
  }
  return "unknown";
}

double rho(double omega) {
  if (!strictly_inside(omega)) throw DomainError("rho needs omega strictly inside (0,1)");
  return (1.0 - omega) / omega;
}

double sample_site(const EnvDistribution& dist, std::uint64_t seed, std::int64_t site) {
  RngStream stream(seed, site_stream(site));
  if (const auto* beta_law = std::get_if<BetaLike>(&dist.variant())) {
    boost::random::beta_distribution<double> law(beta_law->shape_a, beta_law->shape_b);
    double w;
    do {
      w = law(stream);
    } while (!strictly_inside(w));
    return w;
  }
  const auto atoms = dist.atoms();
  double total = 0.0;
  for (const auto& atom : atoms) total += atom.second;
  double u = stream.uniform() * total;
  for (const auto& [value, weight] : atoms) {
    if (u < weight) return value;
    u -= weight;
  }
  return atoms.back().first;
}

Environment sample_environment(const EnvDistribution& dist, std::int64_t left, std::int64_t right,
                               std::uint64_t seed) {
  if (left < 0 || right < 1) throw DomainError("window needs left >= 0 and right >= 1");
  std::vector<double> omega;
  omega.reserve(static_cast<std::size_t>(left + right + 1));
  for (std::int64_t site = -left; site <= right; ++site) omega.push_back(sample_site(dist, seed, site));
  return Environment(dist, left, right, seed, std::move(omega));
}

Environment reflect(const Environment& env, std::int64_t n) {
  if (n < 1) throw DomainError("reflection needs n >= 1");
  if (!env.covers(0, n)) throw PreconditionError("environment window does not cover [0, n]");
  if (env.reflected_at() && *env.reflected_at() != n) {
    throw PreconditionError("environment is already reflected at a different site");
  }
  std::vector<double> omega(env.values().begin(), env.values().end());
  omega[static_cast<std::size_t>(env.left())] = 1.0;
  omega[static_cast<std::size_t>(env.left() + n)] = 0.0;
  return Environment(env.spec(), env.left(), env.right(), env.seed(), std::move(omega), n);
}

Environment window(const Environment& env, std::int64_t from, std::int64_t to) {
  if (from > 0 || to < 1) throw DomainError("window must contain sites 0 and 1");
  if (env.reflected_at()) throw PreconditionError("window() needs an unreflected environment");
  const auto s = env.sites(from, to);
  return Environment(env.spec(), -from, to, env.seed(), std::vector<double>(s.begin(), s.end()));
}

double mean_log_rho(const EnvDistribution& dist) {
  if (const auto* p = std::get_if<BetaLike>(&dist.variant())) {
    // ln rho = ln(1-w) - ln w changes sign at w = 1/2; split there.
    auto g = [](double w, double wc) {
      const double v = std::log(wc) - std::log(w);
      return std::pair{std::log(std::abs(v)), v < 0 ? -1.0 : 1.0};
    };
    return beta_integral(*p, g, 0.0, 0.5) + beta_integral(*p, g, 0.5, 1.0);
  }
  double total = 0.0;
  for (const auto& [w, weight] : dist.atoms()) total += weight * std::log(rho(w));
  return total;
}

double moment_rho(const EnvDistribution& dist, double s) {
  if (!(s >= 0.0)) throw DomainError("moment order must be nonnegative");
  if (s == 0.0) return 1.0;
  if (const auto* p = std::get_if<BetaLike>(&dist.variant())) {
    // Integrand ~ w^(a-s-1) at 0: diverges iff s >= a.
    if (s >= p->shape_a) return kPosInf;
    auto g = [s](double w, double wc) { return std::pair{s * (std::log(wc) - std::log(w)), 1.0}; };
    return beta_integral(*p, g, 0.0, 0.5) + beta_integral(*p, g, 0.5, 1.0);
  }
  double total = 0.0;
  for (const auto& [w, weight] : dist.atoms()) total += weight * std::exp(s * std::log(rho(w)));
  return total;
}

double moment_rho_log_plus(const EnvDistribution& dist, double s) {
  if (!(s >= 0.0)) throw DomainError("moment order must be nonnegative");
  if (const auto* p = std::get_if<BetaLike>(&dist.variant())) {
    if (s >= p->shape_a) return kPosInf;
    auto g = [s](double w, double wc) {
      const double log_rho = std::log(wc) - std::log(w);
      if (log_rho <= 0.0) return std::pair{kNegInf, 1.0};
      return std::pair{s * log_rho + std::log(log_rho), 1.0};
    };
    return beta_integral(*p, g, 0.0, 0.5);
  }
  double total = 0.0;
  for (const auto& [w, weight] : dist.atoms()) {
    const double r = rho(w);
    if (r > 1.0) total += weight * std::pow(r, s) * std::log(r);
  }
  return total;
}

double prob_rho_above_one(const EnvDistribution& dist) {
  if (std::holds_alternative<BetaLike>(dist.variant())) {
    // Continuous law with positive density on (0, 1/2).
    const auto& p = std::get<BetaLike>(dist.variant());
    auto g = [](double, double) { return std::pair{0.0, 1.0}; };
    return beta_integral(p, g, 0.0, 0.5);
  }
  double total = 0.0;
  for (const auto& [w, weight] : dist.atoms()) {
    if (w < 0.5) total += weight;
  }
  return total;
}

double solve_kappa(const EnvDistribution& dist, double tol) {
  if (!(tol > 0.0)) throw DomainError("tolerance must be positive");
  if (!(mean_log_rho(dist) < 0.0)) {
    throw PreconditionError("no kappa: E ln rho_0 < 0 does not hold");
  }
  if (!(prob_rho_above_one(dist) > 0.0)) {
    throw NoRootError("no kappa: rho_0 <= 1 almost surely");
  }
  // s -> E[rho^s] is log-convex with value 1 at 0 and negative slope there,
  // so {s > 0 : E[rho^s] < 1} = (0, kappa).
  double lo = 0.0;
  double hi = 1.0;
  for (;;) {
    const double m = moment_rho(dist, hi);
    if (m > 1.0) break;
    lo = hi;
    hi *= 2.0;
    if (hi > 1e6) throw NotBracketableError("moment map does not exceed 1 below s = 1e6");
  }
  for (int iter = 0; iter < 200 && hi - lo > 1e-15 * hi; ++iter) {
    const double mid = 0.5 * (lo + hi);
    const double m = moment_rho(dist, mid);
    if (m > 1.0) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  const double m_lo = lo > 0.0 ? moment_rho(dist, lo) : kPosInf;
  const double m_hi = moment_rho(dist, hi);
  const double err_lo = std::abs(m_lo - 1.0);
  const double err_hi = std::abs(m_hi - 1.0);
  const double best = err_lo <= err_hi ? lo : hi;
  if (std::min(err_lo, err_hi) > tol) {
    throw NotBracketableError("moment map jumps across 1 (divergence before recrossing)");
  }
  return best;
}

double annealed_ET1(const EnvDistribution& dist) {
  const double mean_rho = moment_rho(dist, 1.0);
  if (!(mean_rho < 1.0)) return kPosInf;
  return (1.0 + mean_rho) / (1.0 - mean_rho);
}

double annealed_ET1_geometric_series(const EnvDistribution& dist) {
  const double mean_rho = moment_rho(dist, 1.0);
  if (!(mean_rho < 1.0)) return kPosInf;
  return 1.0 / (1.0 - mean_rho);
}

LatticeFlag lattice_flag(const EnvDistribution& dist) {
  if (!dist.is_atomic()) return LatticeFlag::unknown;
  std::vector<double> logs;
  for (const auto& [w, weight] : dist.atoms()) logs.push_back(std::log(rho(w)));
  std::sort(logs.begin(), logs.end());
  logs.erase(std::unique(logs.begin(), logs.end(), [](double a, double b) { return std::abs(a - b) <= 1e-12; }),
             logs.end());
  // Any two points lie on a lattice x + yZ.
  if (logs.size() <= 2) return LatticeFlag::lattice;
  const double base = logs[1] - logs[0];
  for (std::size_t i = 2; i < logs.size(); ++i) {
    const double ratio = (logs[i] - logs[0]) / base;
    const auto [p, q] = best_rational(ratio, 1000);
    if (std::abs(ratio - static_cast<double>(p) / static_cast<double>(q)) > 1e-9) {
      return LatticeFlag::non_lattice;
    }
  }
  return LatticeFlag::lattice;
}

AssumptionReport check_assumptions(const EnvDistribution& dist, double tol) {
  AssumptionReport report;
  report.mean_log_rho = mean_log_rho(dist);
  report.lattice_flag = lattice_flag(dist);
  report.kappa_moment_check = std::nan("");
  if (report.mean_log_rho < 0.0 && prob_rho_above_one(dist) > 0.0) {
    try {
      report.kappa = solve_kappa(dist, tol);
      report.kappa_moment_check = moment_rho_log_plus(dist, *report.kappa);
    } catch (const NotBracketableError&) {
      report.kappa.reset();
    }
  }
  report.ballistic = report.kappa && *report.kappa > 1.0;
  return report;
}

TwoPoint fit_two_point(double kappa, double target_mean_log_rho) {
  if (!(kappa > 0.0)) throw DomainError("kappa must be positive");
  if (!(target_mean_log_rho < 0.0)) throw DomainError("E ln rho must be negative");
  // rho in {1/r, r} with L = ln r: E ln rho = -L tanh(kappa L / 2), which is
  // increasing in L from 0 to infinity.
  const double target = -target_mean_log_rho;
  auto g = [kappa](double L) { return L * std::tanh(0.5 * kappa * L); };
  double lo = 0.0;
  double hi = 1.0;
  while (g(hi) < target) hi *= 2.0;
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) < target ? lo : hi) = mid;
  }
  const double L = 0.5 * (lo + hi);
  const double r = std::exp(L);
  TwoPoint p;
  p.p_hi = r / (1.0 + r);
  p.p_lo = 1.0 / (1.0 + r);
  p.beta = 1.0 / (1.0 + std::exp(-kappa * L));
  return p;
}

TwoPoint two_point_for_kappa(double kappa) {
  if (!(kappa > 0.0)) throw DomainError("kappa must be positive");
  const double odds = std::pow(3.0, kappa);
  return TwoPoint{0.75, 0.25, odds / (1.0 + odds)};
}

}  // namespace rwre
