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

namespace rwre {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

inline constexpr double kZ95 = 1.959963984540054;

/// Wilson score interval for count successes out of trials.
Interval wilson_interval(std::uint64_t count, std::uint64_t trials, double z = kZ95);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_se = 0.0;
  // 95% normal half width of the slope.
  double slope_ci = 0.0;
};

/// Ordinary least squares y = intercept + slope x; needs two distinct x.
LinearFit least_squares(std::span<const double> x, std::span<const double> y);

/// Median; the mean of the middle pair for even sizes.
double median(std::vector<double> v);

struct SampleMoments {
  double mean = 0.0;
  double variance = 0.0;  // unbiased
  double se_mean = 0.0;
  double se_variance = 0.0;
};

/// Two-pass moments; se_variance uses the fourth central moment.
SampleMoments sample_moments(std::span<const double> xs);

}  // namespace rwre
