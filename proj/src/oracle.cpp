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

#include "rwre/oracle.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "rwre/errors.hpp"

namespace rwre {
namespace {

using Real = boost::multiprecision::cpp_bin_float_50;

// Solves (I - P) y = rhs on {0, ..., m-1} with y(m) = 0, P the walk kernel.
std::vector<Real> solve(std::span<const double> omega, const std::vector<Real>& rhs) {
  const std::size_t m = omega.size();
  std::vector<Real> c(m);
  std::vector<Real> d(m);
  for (std::size_t x = 0; x < m; ++x) {
    const Real up = Real(omega[x]);
    const Real down = Real(1) - up;
    const Real sub = -down;
    const Real denom = x == 0 ? Real(1) : Real(1) - sub * c[x - 1];
    c[x] = -up / denom;
    d[x] = (rhs[x] - (x == 0 ? Real(0) : sub * d[x - 1])) / denom;
  }
  std::vector<Real> y(m);
  y[m - 1] = d[m - 1];
  for (std::size_t x = m - 1; x-- > 0;) y[x] = d[x] - c[x] * y[x + 1];
  return y;
}

}  // namespace

std::vector<OracleMoments> oracle_hitting_profile(std::span<const double> omega) {
  if (omega.empty()) throw DomainError("oracle needs at least one transient site");
  if (omega[0] != 1.0) throw PreconditionError("oracle expects omega[0] == 1");
  for (std::size_t x = 1; x < omega.size(); ++x) {
    if (!(omega[x] > 0.0 && omega[x] < 1.0)) throw DomainError("interior omega outside (0, 1)");
  }
  const std::size_t m = omega.size();
  const std::vector<Real> h = solve(omega, std::vector<Real>(m, Real(1)));
  std::vector<Real> rhs(m);
  for (std::size_t x = 0; x < m; ++x) rhs[x] = 2 * h[x] - 1;
  const std::vector<Real> s = solve(omega, rhs);
  std::vector<OracleMoments> out(m);
  for (std::size_t x = 0; x < m; ++x) {
    out[x].expectation = static_cast<double>(h[x]);
    out[x].variance = static_cast<double>(s[x] - h[x] * h[x]);
  }
  return out;
}

OracleMoments oracle_moments(const Environment& reflected_env, std::int64_t cap) {
  const std::int64_t n = reflected_env.reflected_n();
  if (n > cap) throw ResourceCapError("oracle limited to n <= " + std::to_string(cap));
  return oracle_hitting_profile(reflected_env.sites(0, n - 1)).front();
}

}  // namespace rwre
