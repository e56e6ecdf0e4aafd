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

#include "rwre/stats.hpp"

#include <algorithm>
#include <cmath>

#include "rwre/errors.hpp"
#include "rwre/logspace.hpp"

namespace rwre {

Interval wilson_interval(std::uint64_t count, std::uint64_t trials, double z) {
  if (trials == 0) throw DomainError("Wilson interval needs at least one trial");
  if (count > trials) throw DomainError("more successes than trials");
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(count) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double centre = (p + z2 / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

LinearFit least_squares(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw DomainError("least squares needs two or more paired points");
  const double n = static_cast<double>(x.size());
  CompensatedSum sx;
  CompensatedSum sy;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx.add(x[i]);
    sy.add(y[i]);
  }
  const double mx = sx.value() / n;
  const double my = sy.value() / n;
  CompensatedSum sxx;
  CompensatedSum sxy;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx.add((x[i] - mx) * (x[i] - mx));
    sxy.add((x[i] - mx) * (y[i] - my));
  }
  if (!(sxx.value() > 0.0)) throw DomainError("least squares needs distinct x values");
  LinearFit fit;
  fit.slope = sxy.value() / sxx.value();
  fit.intercept = my - fit.slope * mx;
  if (x.size() > 2) {
    CompensatedSum rss;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double r = y[i] - fit.intercept - fit.slope * x[i];
      rss.add(r * r);
    }
    fit.slope_se = std::sqrt(rss.value() / (n - 2.0) / sxx.value());
  }
  fit.slope_ci = kZ95 * fit.slope_se;
  return fit;
}

double median(std::vector<double> v) {
  if (v.empty()) throw DomainError("median of an empty sample");
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double upper = v[mid];
  if (v.size() % 2 == 1) return upper;
  const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

SampleMoments sample_moments(std::span<const double> xs) {
  if (xs.size() < 2) throw DomainError("sample moments need two or more values");
  const double n = static_cast<double>(xs.size());
  CompensatedSum s;
  for (double x : xs) s.add(x);
  const double mean = s.value() / n;
  CompensatedSum m2;
  CompensatedSum m4;
  for (double x : xs) {
    const double d = x - mean;
    m2.add(d * d);
    m4.add(d * d * d * d);
  }
  SampleMoments out;
  out.mean = mean;
  out.variance = m2.value() / (n - 1.0);
  out.se_mean = std::sqrt(out.variance / n);
  const double mu2 = m2.value() / n;
  const double mu4 = m4.value() / n;
  const double var_of_var = (mu4 - mu2 * mu2 * (n - 3.0) / (n - 1.0)) / n;
  out.se_variance = std::sqrt(std::max(var_of_var, 0.0));
  return out;
}

}  // namespace rwre
