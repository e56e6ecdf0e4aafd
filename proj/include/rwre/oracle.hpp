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
#include <vector>

#include "rwre/envgen.hpp"

namespace rwre {

inline constexpr std::int64_t kOracleCap = 2048;

struct OracleMoments {
  double expectation = 0.0;
  double variance = 0.0;
};

/// First-step analysis for the nearest-neighbour walk on {0, ..., m} with
/// omega[0] == 1 (reflecting) and m = omega.size() absorbing. Solves
/// h = 1 + P h and the second-moment system (I - P) s = 2h - 1 by
/// tridiagonal elimination in 50-digit arithmetic. Returns E_x T_m and
/// Var_x T_m for every start x in [0, m).
std::vector<OracleMoments> oracle_hitting_profile(std::span<const double> omega);

/// E and Var of T_n from 0 for an environment reflected at n.
OracleMoments oracle_moments(const Environment& reflected_env, std::int64_t cap = kOracleCap);

}  // namespace rwre
