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
#include <vector>

#include "rwre/envgen.hpp"

namespace rwre::testing {

// Sites [-left, right] with the given values, unreflected.
inline Environment make_env(std::vector<double> omega, std::int64_t left = 0) {
  const auto right = static_cast<std::int64_t>(omega.size()) - 1 - left;
  return Environment(TwoPoint{}, left, right, 0, std::move(omega));
}

inline Environment constant_env(double w, std::int64_t right, std::int64_t left = 0) {
  return make_env(std::vector<double>(static_cast<std::size_t>(left + right + 1), w), left);
}

inline Environment constant_reflected(double w, std::int64_t n) { return reflect(constant_env(w, n), n); }

inline EnvDistribution kappa_dist(double kappa) { return EnvDistribution(two_point_for_kappa(kappa)); }

}  // namespace rwre::testing
