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

#include "rwre/chain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include <Eigen/Dense>

#if defined(__SSE__)
#include <pmmintrin.h>
#include <xmmintrin.h>
#endif

#include "rwre/errors.hpp"
#include "rwre/hitting.hpp"
#include "rwre/logspace.hpp"

namespace rwre {
namespace {

// Denormal probabilities carry no mass worth keeping and are slow to
// multiply; flush them for the duration of an evolution.
class FlushDenormals {
 public:
  FlushDenormals() {
#if defined(__SSE__)
    saved_ = _mm_getcsr();
    _mm_setcsr(saved_ | 0x8040);
#endif
  }
  ~FlushDenormals() {
#if defined(__SSE__)
    _mm_setcsr(saved_);
#endif
  }
  FlushDenormals(const FlushDenormals&) = delete;
  FlushDenormals& operator=(const FlushDenormals&) = delete;

 private:
  unsigned saved_ = 0;
};

// Push-forward coefficients on a padded grid: q[i] = a[i] p[i-1] + h[i] p[i]
// + c[i] p[i+1] for i = 1..n+1, with p[0] = p[n+2] = 0.
struct Stencil {
  std::size_t size = 0;
  std::vector<double> a;
  std::vector<double> h;
  std::vector<double> c;
  std::vector<double> pi;
};

Stencil make_stencil(const LazyKernel& k, std::span<const double> pi) {
  const auto m = static_cast<std::size_t>(k.n + 1);
  if (pi.size() != m) throw DomainError("stationary vector has the wrong length");
  Stencil s;
  s.size = m;
  s.a.assign(m + 2, 0.0);
  s.h.assign(m + 2, 0.0);
  s.c.assign(m + 2, 0.0);
  s.pi.assign(m + 2, 0.0);
  for (std::size_t x = 0; x < m; ++x) {
    s.h[x + 1] = k.hold[x];
    if (x > 0) s.a[x + 1] = k.up[x - 1];
    if (x + 1 < m) s.c[x + 1] = k.down[x + 1];
    s.pi[x + 1] = pi[x];
  }
  return s;
}

// One kernel application fused with the L1 distance of the result to pi.
double step_and_distance(const Stencil& s, const double* __restrict p, double* __restrict q) {
  const double* a = s.a.data();
  const double* h = s.h.data();
  const double* c = s.c.data();
  const double* pi = s.pi.data();
  const std::size_t end = s.size + 1;
  double acc = 0.0;
#pragma omp simd reduction(+ : acc)
  for (std::size_t i = 1; i < end; ++i) {
    const double v = a[i] * p[i - 1] + h[i] * p[i] + c[i] * p[i + 1];
    q[i] = v;
    acc += std::fabs(v - pi[i]);
  }
  return std::min(1.0, 0.5 * acc);
}

struct StartResult {
  std::vector<double> d_at;
  std::vector<std::int64_t> crossing;
};

// Evolves delta_x until every eval time has passed and every level has been
// crossed, or until `limit` steps; eval must be increasing. Returns false when
// stopped by the limit.
bool run_start(const Stencil& s, std::int64_t x, std::span<const std::int64_t> eval, std::span<const double> levels,
               std::uint64_t& budget, std::uint64_t limit, StartResult& r) {
  r.d_at.assign(eval.size(), 0.0);
  r.crossing.assign(levels.size(), -1);
  std::vector<double> p(s.size + 2, 0.0);
  std::vector<double> q(s.size + 2, 0.0);
  p[static_cast<std::size_t>(x) + 1] = 1.0;
  double d = 1.0 - s.pi[static_cast<std::size_t>(x) + 1];
  std::size_t next_eval = 0;
  std::size_t open_levels = levels.size();
  std::uint64_t k = 0;
  FlushDenormals ftz;
  while (true) {
    while (next_eval < eval.size() && static_cast<std::uint64_t>(eval[next_eval]) == k) r.d_at[next_eval++] = d;
    for (std::size_t l = 0; l < levels.size(); ++l) {
      if (r.crossing[l] < 0 && d <= levels[l]) {
        r.crossing[l] = static_cast<std::int64_t>(k);
        --open_levels;
      }
    }
    if (next_eval == eval.size() && open_levels == 0) break;
    if (k == limit) return false;
    if (budget == 0) throw ResourceCapError("kernel application cap exceeded");
    --budget;
    d = step_and_distance(s, p.data(), q.data());
    std::swap(p, q);
    ++k;
  }
  CompensatedSum mass;
  for (double v : p) mass.add(v);
  if (std::abs(mass.value() - 1.0) > 1e-9) throw Error("probability mass drifted during evolution");
  return true;
}

using Dense = std::vector<double>;

double distance_to(std::span<const double> v, std::span<const double> pi) {
  double acc = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) acc += std::fabs(v[i] - pi[i]);
  return std::min(1.0, 0.5 * acc);
}

void check_mass(std::span<const double> v) {
  CompensatedSum mass;
  for (double x : v) mass.add(x);
  if (std::abs(mass.value() - 1.0) > 1e-9) throw Error("probability mass drifted during evolution");
}

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// v <- v M for a row vector v.
void times(std::vector<double>& v, const Dense& m, std::vector<double>& scratch) {
  const auto size = static_cast<Eigen::Index>(v.size());
  scratch.assign(v.size(), 0.0);
  Eigen::Map<const RowMajor> mm(m.data(), size, size);
  Eigen::Map<const Eigen::RowVectorXd> in(v.data(), size);
  Eigen::Map<Eigen::RowVectorXd>(scratch.data(), size).noalias() = in * mm;
  std::swap(v, scratch);
}

Dense squared(const Dense& a, std::size_t m) {
  Dense c(m * m, 0.0);
  const auto size = static_cast<Eigen::Index>(m);
  Eigen::Map<const RowMajor> am(a.data(), size, size);
  Eigen::Map<RowMajor> cm(c.data(), size, size);
  cm.noalias() = am * am;
  // Row sums of a product drift by doubling per squaring; powers are stochastic.
  cm.array().colwise() /= cm.rowwise().sum().array();
  return c;
}

// Binary powers P^(2^j). Reads d(2^j) off the rows, accumulates delta_x P^e
// bit by bit for each eval time e and locates each crossing by a descending
// binary search over the powers. Powers that do not fit the memory budget
// are recomputed from sparse checkpoints during the descent.
std::vector<StartResult> run_doubling(const LazyKernel& kernel, std::span<const double> pi,
                                      std::span<const std::int64_t> starts, std::span<const std::int64_t> eval,
                                      std::span<const double> levels, std::size_t memory_budget) {
  const auto m = static_cast<std::size_t>(kernel.n + 1);
  const std::size_t matrix_bytes = m * m * sizeof(double);
  const std::size_t slots = memory_budget / matrix_bytes;
  if (slots < 4) throw ResourceCapError("dense kernel powers exceed the memory budget");
  FlushDenormals ftz;

  Dense cur(m * m, 0.0);
  for (std::size_t x = 0; x < m; ++x) {
    cur[x * m + x] = kernel.hold[x];
    if (x + 1 < m) cur[x * m + x + 1] = kernel.up[x];
    if (x > 0) cur[x * m + x - 1] = kernel.down[x];
  }

  const std::size_t ns = starts.size();
  std::vector<StartResult> out(ns);
  // Times at or below 2^j - 1 are complete after power j.
  std::uint64_t max_eval = 0;
  for (std::int64_t e : eval) max_eval = std::max<std::uint64_t>(max_eval, static_cast<std::uint64_t>(e));
  std::vector<std::vector<std::vector<double>>> acc(ns);
  std::vector<std::vector<int>> top(ns, std::vector<int>(levels.size(), -1));
  std::size_t open = 0;
  for (std::size_t i = 0; i < ns; ++i) {
    const auto x = static_cast<std::size_t>(starts[i]);
    out[i].d_at.assign(eval.size(), 0.0);
    out[i].crossing.assign(levels.size(), -1);
    acc[i].assign(eval.size(), std::vector<double>(m, 0.0));
    for (auto& v : acc[i]) v[x] = 1.0;
    const double d0 = 1.0 - pi[x];
    for (std::size_t l = 0; l < levels.size(); ++l) {
      if (d0 <= levels[l]) {
        out[i].crossing[l] = 0;
      } else {
        ++open;
      }
    }
  }

  std::map<int, Dense> stored;
  int stride = 1;
  std::vector<double> scratch;
  int j = 0;
  while (true) {
    if (j % stride == 0) {
      stored.emplace(j, cur);
      // Stored powers, one block of recomputed powers and two work matrices.
      while (stored.size() + static_cast<std::size_t>(stride) + 1 > slots) {
        if (static_cast<std::size_t>(stride) * 2 + 2 > slots) {
          throw ResourceCapError("memory budget too small for the kernel powers of this horizon");
        }
        stride *= 2;
        for (auto it = stored.begin(); it != stored.end();) {
          it = it->first % stride == 0 ? std::next(it) : stored.erase(it);
        }
      }
    }
    for (std::size_t i = 0; i < ns; ++i) {
      for (std::size_t e = 0; e < eval.size(); ++e) {
        if ((static_cast<std::uint64_t>(eval[e]) >> j) & 1u) times(acc[i][e], cur, scratch);
      }
      const auto x = static_cast<std::size_t>(starts[i]);
      const std::span<const double> row(cur.data() + x * m, m);
      for (std::size_t l = 0; l < levels.size(); ++l) {
        if (out[i].crossing[l] < 0 && top[i][l] < 0 && distance_to(row, pi) <= levels[l]) {
          top[i][l] = j;
          --open;
        }
      }
    }
    if (open == 0 && (max_eval >> (j + 1)) == 0) break;
    if (j == 62) throw ResourceCapError("mixing horizon exceeds 2^62 steps");
    cur = squared(cur, m);
    ++j;
  }
  cur.clear();
  cur.shrink_to_fit();

  for (std::size_t i = 0; i < ns; ++i) {
    for (std::size_t e = 0; e < eval.size(); ++e) {
      check_mass(acc[i][e]);
      out[i].d_at[e] = eval[e] == 0 ? 1.0 - pi[static_cast<std::size_t>(starts[i])] : distance_to(acc[i][e], pi);
    }
  }
  acc.clear();

  // Descent: invariant d(k) > level; the crossing is k + 1 at the end.
  struct State {
    std::size_t start;
    std::size_t level;
    int top;
    std::uint64_t k;
    std::vector<double> v;
  };
  std::vector<State> states;
  int jmax = -1;
  for (std::size_t i = 0; i < ns; ++i) {
    for (std::size_t l = 0; l < levels.size(); ++l) {
      if (top[i][l] < 0) continue;
      if (top[i][l] == 0) {
        out[i].crossing[l] = 1;
        continue;
      }
      std::vector<double> v(m, 0.0);
      v[static_cast<std::size_t>(starts[i])] = 1.0;
      states.push_back({i, l, top[i][l], 0, std::move(v)});
      jmax = std::max(jmax, top[i][l] - 1);
    }
  }
  int cache_base = -1;
  std::vector<Dense> cache;  // powers cache_base + 1 .. cache_base + cache.size()
  std::vector<double> w;
  for (int jj = jmax; jj >= 0; --jj) {
    const Dense* power = nullptr;
    if (auto it = stored.find(jj); it != stored.end()) {
      power = &it->second;
    } else {
      const auto base = std::prev(stored.upper_bound(jj));
      if (cache_base != base->first) {
        cache.clear();
        cache_base = base->first;
        const Dense* prev = &base->second;
        for (int q = cache_base + 1; q <= jj; ++q) {
          cache.push_back(squared(*prev, m));
          prev = &cache.back();
        }
      }
      power = &cache[static_cast<std::size_t>(jj - cache_base - 1)];
    }
    for (State& st : states) {
      if (st.top - 1 < jj) continue;
      w = st.v;
      times(w, *power, scratch);
      if (distance_to(w, pi) > levels[st.level]) {
        std::swap(st.v, w);
        st.k += std::uint64_t{1} << jj;
      }
    }
    stored.erase(stored.upper_bound(jj - 1), stored.end());
    if (!cache.empty() && cache_base + static_cast<int>(cache.size()) >= jj) {
      cache.resize(static_cast<std::size_t>(std::max(0, jj - 1 - cache_base)));
    }
  }
  for (State& st : states) {
    check_mass(st.v);
    out[st.start].crossing[st.level] = static_cast<std::int64_t>(st.k + 1);
  }
  return out;
}

// 2 E T_n of the plain chain from the kernel, as a horizon estimate.
double log_horizon_estimate(const LazyKernel& k) {
  double log_w = kNegInf;
  double log_e = 0.0;  // site 0 contributes 1
  for (std::int64_t x = 1; x < k.n; ++x) {
    const auto i = static_cast<std::size_t>(x);
    log_w = std::log(k.down[i]) - std::log(k.up[i]) + log1p_exp(log_w);
    log_e = log_add(log_e, log1p_exp(std::log(2.0) + log_w));
  }
  return std::log(2.0) + log_e;
}

std::vector<StartResult> evolve(const LazyKernel& kernel, std::span<const double> pi,
                                std::span<const std::int64_t> starts, std::span<const std::int64_t> eval,
                                std::span<const double> levels, const EvolutionOptions& options) {
  for (std::int64_t x : starts) {
    if (x < 0 || x > kernel.n) throw DomainError("start state outside {0..n}");
  }
  const Stencil s = make_stencil(kernel, pi);
  const double m = static_cast<double>(kernel.n + 1);
  const auto switch_at = static_cast<std::uint64_t>(std::max(1024.0, 3.0 * m * m));
  std::uint64_t limit = std::numeric_limits<std::uint64_t>::max();
  if (options.method == Evolution::doubling) limit = 0;
  if (options.method == Evolution::automatic) {
    limit = switch_at;
    double horizon = std::max(static_cast<double>(options.horizon_hint), std::exp(log_horizon_estimate(kernel)));
    if (!eval.empty()) horizon = std::max(horizon, static_cast<double>(eval.back()));
    if (2.0 * horizon > static_cast<double>(switch_at)) limit = 0;
  }
  std::vector<StartResult> out(starts.size());
  std::vector<std::int64_t> rest;
  std::vector<std::size_t> rest_index;
  std::uint64_t budget = options.cap;
  for (std::size_t i = 0; i < starts.size(); ++i) {
    if (limit == 0 || !run_start(s, starts[i], eval, levels, budget, limit, out[i])) {
      rest.push_back(starts[i]);
      rest_index.push_back(i);
    }
  }
  if (!rest.empty()) {
    std::vector<StartResult> more = run_doubling(kernel, pi, rest, eval, levels, options.memory_budget);
    for (std::size_t r = 0; r < rest.size(); ++r) out[rest_index[r]] = std::move(more[r]);
  }
  return out;
}

}  // namespace

LazyKernel lazy_kernel(const Environment& reflected_env) {
  const std::int64_t n = reflected_env.reflected_n();
  LazyKernel k;
  k.n = n;
  const auto m = static_cast<std::size_t>(n + 1);
  k.up.assign(m, 0.0);
  k.down.assign(m, 0.0);
  k.hold.assign(m, 0.0);
  for (std::int64_t x = 0; x <= n; ++x) {
    const auto i = static_cast<std::size_t>(x);
    const double w = reflected_env.omega(x);
    k.up[i] = x < n ? 0.5 * w : 0.0;
    k.down[i] = x > 0 ? 0.5 * (1.0 - w) : 0.0;
    k.hold[i] = 1.0 - k.up[i] - k.down[i];
  }
  return k;
}

DistVector stationary(const Environment& reflected_env) {
  const std::int64_t n = reflected_env.reflected_n();
  // u[x] = V(x) - V(1) for x = 1..n; rho_0 drops out after normalization.
  std::vector<double> u(static_cast<std::size_t>(n + 1), 0.0);
  CompensatedSum acc;
  for (std::int64_t x = 1; x < n; ++x) {
    const double w = reflected_env.omega(x);
    acc.add(std::log1p(-w) - std::log(w));
    u[static_cast<std::size_t>(x + 1)] = acc.value();
  }
  std::vector<double> logw(static_cast<std::size_t>(n + 1));
  logw[0] = -u[1];
  for (std::int64_t x = 1; x < n; ++x) {
    const auto i = static_cast<std::size_t>(x);
    logw[i] = log_add(-u[i], -u[i + 1]);
  }
  logw[static_cast<std::size_t>(n)] = -u[static_cast<std::size_t>(n)];
  const double log_c = log_sum_exp(logw);
  DistVector pi(logw.size());
  for (std::size_t i = 0; i < pi.size(); ++i) pi[i] = std::exp(logw[i] - log_c);
  return pi;
}

DistVector step(std::span<const double> d, const LazyKernel& k) {
  const auto m = static_cast<std::size_t>(k.n + 1);
  if (d.size() != m) throw DomainError("distribution length does not match the kernel");
  DistVector out(m, 0.0);
  for (std::size_t x = 0; x < m; ++x) {
    out[x] += k.hold[x] * d[x];
    if (x + 1 < m) out[x + 1] += k.up[x] * d[x];
    if (x > 0) out[x - 1] += k.down[x] * d[x];
  }
  return out;
}

double tv(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw DomainError("tv needs equal lengths");
  CompensatedSum s;
  for (std::size_t i = 0; i < p.size(); ++i) s.add(std::fabs(p[i] - q[i]));
  return std::clamp(0.5 * s.value(), 0.0, 1.0);
}

std::vector<std::int64_t> start_states(std::int64_t n, StartSet set) {
  if (set == StartSet::endpoints) return {0, n};
  std::vector<std::int64_t> all(static_cast<std::size_t>(n + 1));
  for (std::int64_t x = 0; x <= n; ++x) all[static_cast<std::size_t>(x)] = x;
  return all;
}

TVProfile distance_profile(const LazyKernel& kernel, std::span<const double> pi, std::vector<std::int64_t> starts,
                           std::vector<std::int64_t> schedule, const EvolutionOptions& options) {
  if (starts.empty()) starts = start_states(kernel.n, StartSet::endpoints);
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    if (schedule[i] < 0 || (i > 0 && schedule[i] <= schedule[i - 1])) {
      throw DomainError("schedule must be nonnegative and strictly increasing");
    }
  }
  TVProfile out;
  out.starts = starts;
  out.schedule = schedule;
  out.d.assign(schedule.size(), 0.0);
  for (const StartResult& r : evolve(kernel, pi, starts, schedule, {}, options)) {
    for (std::size_t i = 0; i < schedule.size(); ++i) out.d[i] = std::max(out.d[i], r.d_at[i]);
  }
  return out;
}

std::vector<std::int64_t> crossing_times(const LazyKernel& kernel, std::span<const double> pi,
                                         std::span<const std::int64_t> starts, std::span<const double> levels,
                                         const EvolutionOptions& options) {
  for (double l : levels) {
    if (!(l > 0.0 && l <= 1.0)) throw DomainError("crossing level must lie in (0, 1]");
  }
  std::vector<std::int64_t> out(levels.size(), 0);
  for (const StartResult& r : evolve(kernel, pi, starts, {}, levels, options)) {
    for (std::size_t l = 0; l < levels.size(); ++l) out[l] = std::max(out[l], r.crossing[l]);
  }
  return out;
}

std::int64_t mixing_time(const LazyKernel& kernel, std::span<const double> pi, double eps, StartSet starts,
                         const EvolutionOptions& options) {
  if (!(eps > 0.0 && eps <= 1.0)) throw DomainError("eps must lie in (0, 1]");
  const std::vector<std::int64_t> xs = start_states(kernel.n, starts);
  const double levels[] = {eps};
  return crossing_times(kernel, pi, xs, levels, options).front();
}

CutoffReport cutoff_scan(const Environment& reflected_env, std::span<const double> c_grid, StartSet starts,
                         EvolutionOptions options) {
  const HittingMoments m = quenched_moments(reflected_env);
  if (!std::isfinite(m.expectation) || m.expectation * 2.0 > 4e18) {
    throw ResourceCapError("cutoff time beyond the representable step range");
  }
  CutoffReport rep;
  rep.n = m.n;
  rep.t = 2.0 * m.expectation;
  rep.f = std::sqrt(std::max(m.variance, 0.0));
  rep.c_grid.assign(c_grid.begin(), c_grid.end());
  std::vector<std::int64_t> eval;
  for (double c : c_grid) {
    const double lo = std::floor(rep.t - c * rep.f);
    if (lo < 0.0) rep.clamped = true;
    rep.k_minus.push_back(static_cast<std::int64_t>(std::max(lo, 0.0)));
    rep.k_plus.push_back(static_cast<std::int64_t>(std::floor(rep.t + c * rep.f)));
    eval.push_back(rep.k_minus.back());
    eval.push_back(rep.k_plus.back());
  }
  std::sort(eval.begin(), eval.end());
  eval.erase(std::unique(eval.begin(), eval.end()), eval.end());

  const LazyKernel kernel = lazy_kernel(reflected_env);
  const DistVector pi = stationary(reflected_env);
  const double levels[] = {0.75, 0.25};
  options.horizon_hint = std::max<std::uint64_t>(options.horizon_hint, static_cast<std::uint64_t>(rep.t));
  std::vector<double> d(eval.size(), 0.0);
  std::int64_t k75 = 0;
  std::int64_t k25 = 0;
  const std::vector<std::int64_t> xs = start_states(kernel.n, starts);
  for (const StartResult& r : evolve(kernel, pi, xs, eval, levels, options)) {
    for (std::size_t i = 0; i < eval.size(); ++i) d[i] = std::max(d[i], r.d_at[i]);
    k75 = std::max(k75, r.crossing[0]);
    k25 = std::max(k25, r.crossing[1]);
  }
  auto lookup = [&](std::int64_t k) {
    return d[static_cast<std::size_t>(std::lower_bound(eval.begin(), eval.end(), k) - eval.begin())];
  };
  for (std::size_t i = 0; i < c_grid.size(); ++i) {
    rep.d_minus.push_back(lookup(rep.k_minus[i]));
    rep.d_plus.push_back(lookup(rep.k_plus[i]));
  }
  rep.k75 = k75;
  rep.k25 = k25;
  rep.t_mix = k25;
  rep.window_ratio = k25 > 0 ? static_cast<double>(k25 - k75) / static_cast<double>(k25) : 0.0;
  return rep;
}

double stationary_tail_mass(const Environment& reflected_env) {
  const std::int64_t n = reflected_env.reflected_n();
  if (n < 3) throw PreconditionError("stationary tail mass needs n >= 3");
  const double l = std::log(static_cast<double>(n));
  const auto from = static_cast<std::int64_t>(std::max(0.0, std::ceil(static_cast<double>(n) - 2.0 * l * l)));
  const DistVector pi = stationary(reflected_env);
  CompensatedSum s;
  for (std::int64_t x = from; x <= n; ++x) s.add(pi[static_cast<std::size_t>(x)]);
  return s.value();
}

}  // namespace rwre
