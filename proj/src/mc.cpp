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

#include "rwre/mc.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "rwre/chain.hpp"
#include "rwre/errors.hpp"

namespace rwre {
namespace {

const double* origin(const Environment& env) { return env.values().data() + env.left(); }

void check_reflected_window(const Environment& env) {
  const std::int64_t n = env.reflected_n();
  if (!env.covers(0, n)) throw PreconditionError("environment does not cover [0, n]");
}

[[noreturn]] void cap_exceeded(std::uint64_t cap) {
  throw ResourceCapError("trajectory exceeded the step cap of " + std::to_string(cap));
}

}  // namespace

std::uint64_t simulate_T(const Environment& reflected_env, RngStream& stream, std::uint64_t cap) {
  check_reflected_window(reflected_env);
  const std::int64_t n = reflected_env.reflected_n();
  const double* w = origin(reflected_env);
  std::int64_t x = 0;
  std::uint64_t t = 0;
  while (x != n) {
    if (t == cap) cap_exceeded(cap);
    x += stream.uniform() < w[x] ? 1 : -1;
    ++t;
  }
  return t;
}

std::uint64_t simulate_T_lazy(const Environment& reflected_env, RngStream& stream, std::uint64_t cap) {
  check_reflected_window(reflected_env);
  const std::int64_t n = reflected_env.reflected_n();
  const double* w = origin(reflected_env);
  std::int64_t x = 0;
  std::uint64_t t = 0;
  while (x != n) {
    if (t == cap) cap_exceeded(cap);
    ++t;
    // The move indicator Z_t is u >= 1/2; the remaining bit range picks the
    // direction.
    const double u = stream.uniform();
    if (u < 0.5) continue;
    x += (2.0 * u - 1.0) < w[x] ? 1 : -1;
  }
  return t;
}

std::int64_t backtrack_horizon(std::int64_t n) {
  const double l = std::log(static_cast<double>(std::max<std::int64_t>(n, 1)));
  return static_cast<std::int64_t>(std::ceil(l * l));
}

RestrictedSample simulate_restricted(const Environment& env, const BlockDecomposition& blocks, std::int64_t n,
                                     RngStream& stream, const RestrictedOptions& options) {
  if (n < 1) throw DomainError("n must be positive");
  if (!env.covers(0, n)) throw PreconditionError("environment does not cover [0, n]");
  if (blocks.nu.empty() || blocks.nu.front() != 0 || blocks.upto < n) {
    throw PreconditionError("block decomposition must start at 0 and reach n");
  }
  const double* w = origin(env);
  const std::int64_t h = backtrack_horizon(n);
  const std::vector<std::int64_t>& nu = blocks.nu;

  auto omega = [&](std::int64_t x) { return x == 0 ? 1.0 : w[x]; };

  RestrictedSample out;
  std::int64_t x = 0;
  std::int64_t y = 0;  // restricted walk
  std::int64_t record = 0;
  std::size_t r = 0;  // record ladder index of y
  std::int64_t patch = 0;
  bool x_done = false;
  bool y_done = false;
  std::uint64_t t = 0;
  while (!(x_done && y_done)) {
    if (t == options.cap) cap_exceeded(options.cap);
    ++t;
    const double u = stream.uniform();
    if (!x_done) {
      x += u < omega(x) ? 1 : -1;
      if (x == n) {
        x_done = true;
        out.t = t;
      }
    }
    if (!y_done) {
      const double wy = y == patch ? 1.0 : omega(y);
      y += u < wy ? 1 : -1;
      if (y > record) {
        record = y;
        while (r + 1 < nu.size() && nu[r + 1] <= record) ++r;
        patch = nu[static_cast<std::size_t>(std::max<std::int64_t>(static_cast<std::int64_t>(r) - h, 0))];
      }
      if (y == n) {
        y_done = true;
        out.t_tilde = t;
      }
    }
    if (options.audit && !x_done && !y_done && y < x) out.dominance_held = false;
  }
  out.a_indicator = out.t == out.t_tilde;
  return out;
}

void parallel_for(std::uint64_t count, unsigned workers, const std::function<void(std::uint64_t)>& body) {
  workers = std::max(1u, workers);
  if (workers == 1 || count < 2) {
    for (std::uint64_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::exception_ptr error;
  std::mutex mu;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned wkr = 0; wkr < workers; ++wkr) {
    pool.emplace_back([&, wkr] {
      try {
        for (std::uint64_t i = wkr; i < count; i += workers) body(i);
      } catch (...) {
        const std::lock_guard<std::mutex> lock(mu);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

std::vector<std::uint64_t> sample_hitting_times(const Environment& reflected_env, bool lazy, std::uint64_t replicas,
                                                std::uint64_t master_seed, unsigned workers, std::uint64_t cap) {
  check_reflected_window(reflected_env);
  std::vector<std::uint64_t> out(replicas, 0);
  parallel_for(replicas, workers, [&](std::uint64_t i) {
    RngStream stream(master_seed, i);
    out[i] = lazy ? simulate_T_lazy(reflected_env, stream, cap) : simulate_T(reflected_env, stream, cap);
  });
  return out;
}

HittingSampleSummary estimate_tail(const Environment& reflected_env, bool lazy, std::span<const std::uint64_t> ks,
                                   std::uint64_t replicas, std::uint64_t master_seed, unsigned workers,
                                   std::uint64_t cap) {
  if (replicas < 100) throw DomainError("tail estimation needs at least 100 replicas");
  const std::vector<std::uint64_t> times = sample_hitting_times(reflected_env, lazy, replicas, master_seed, workers, cap);
  HittingSampleSummary s;
  s.n = reflected_env.reflected_n();
  s.lazy = lazy;
  s.replicas = replicas;
  const std::vector<double> as_real(times.begin(), times.end());
  s.moments = sample_moments(as_real);
  s.ks.assign(ks.begin(), ks.end());
  for (std::uint64_t k : ks) {
    const auto above = static_cast<std::uint64_t>(std::count_if(times.begin(), times.end(), [k](std::uint64_t t) { return t > k; }));
    s.tail.push_back(static_cast<double>(above) / static_cast<double>(replicas));
    s.tail_ci.push_back(wilson_interval(above, replicas));
  }
  return s;
}

std::vector<TailBoundEntry> tail_bound_check(const Environment& reflected_env, std::span<const std::uint64_t> ks,
                                             std::uint64_t replicas, std::uint64_t master_seed, unsigned workers) {
  std::vector<std::uint64_t> sorted(ks.begin(), ks.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  const LazyKernel kernel = lazy_kernel(reflected_env);
  const DistVector pi = stationary(reflected_env);
  const TVProfile prof = distance_profile(kernel, pi, {}, std::vector<std::int64_t>(sorted.begin(), sorted.end()));
  const HittingSampleSummary mc = estimate_tail(reflected_env, true, sorted, replicas, master_seed, workers);
  std::vector<TailBoundEntry> out;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    TailBoundEntry e;
    e.k = sorted[i];
    e.d = prof.d[i];
    e.tail = mc.tail[i];
    const auto above = static_cast<std::uint64_t>(std::llround(e.tail * static_cast<double>(replicas)));
    const double se = std::sqrt(e.tail * (1.0 - e.tail) / static_cast<double>(replicas));
    e.allowance = std::max(e.tail + 3.0 * se, wilson_interval(above, replicas, 3.0).hi);
    e.holds = e.d <= e.allowance;
    out.push_back(e);
  }
  return out;
}

}  // namespace rwre
