/*
 * Copyright 2026 The saferoute Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

namespace saferoute {

// Thrown when a statistic is undefined on the given data (single-class
// labels, empty routed set, all-zero differences, ...). The CLI maps this
// to exit code 3.
class degenerate_error : public std::runtime_error {
 public:
  explicit degenerate_error(const std::string& what) : std::runtime_error(what) {}
};

inline double sigmoid(double z) {
  if (z >= 0.0) {
    return 1.0 / (1.0 + std::exp(-z));
  }
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// Inverse of sigmoid. The input is clamped away from {0,1} so that scores
// produced by saturated models stay finite.
inline double logit(double s, double clamp = 1e-6) {
  if (s < clamp) s = clamp;
  if (s > 1.0 - clamp) s = 1.0 - clamp;
  return std::log(s / (1.0 - s));
}

// log(1 + exp(z)) without overflow for large |z|.
inline double log1pexp(double z) {
  if (z > 35.0) return z;
  if (z < -35.0) return std::exp(z);
  return std::log1p(std::exp(z));
}

// Standard normal CDF. erfc keeps relative accuracy in the far tails,
// well inside the 1e-12 absolute target.
inline double normal_cdf(double x) {
  return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

// Upper tail P(Z >= x).
inline double normal_sf(double x) {
  return 0.5 * std::erfc(x / std::sqrt(2.0));
}

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace saferoute
