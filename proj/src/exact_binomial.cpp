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
#include "saferoute/exact_binomial.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace saferoute {
namespace {

double log_beta(double a, double b) {
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

// Continued fraction for I_x(a, b), evaluated with the modified Lentz
// method. Converges quickly for x < (a + 1) / (a + b + 2); the caller
// applies the symmetry transform otherwise.
double beta_cf(double x, double a, double b) {
  constexpr int kMaxIter = 500;
  constexpr double kEps = 1e-15;
  constexpr double kTiny = 1e-300;

  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double m2 = 2.0 * m;
    // Even step.
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    // Odd step.
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) return h;
  }
  throw std::runtime_error("incomplete_beta_ratio: continued fraction did not converge");
}

}  // namespace

double incomplete_beta_ratio(double x, double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) {
    throw std::invalid_argument("incomplete_beta_ratio: a and b must be positive");
  }
  if (!(x >= 0.0) || !(x <= 1.0)) {
    throw std::invalid_argument("incomplete_beta_ratio: x must lie in [0, 1]");
  }
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;

  const double front =
      std::exp(a * std::log(x) + b * std::log1p(-x) - log_beta(a, b));
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * beta_cf(x, a, b) / a;
  }
  return 1.0 - std::exp(b * std::log1p(-x) + a * std::log(x) - log_beta(b, a)) *
                   beta_cf(1.0 - x, b, a) / b;
}

double beta_quantile(double p, double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) {
    throw std::invalid_argument("beta_quantile: a and b must be positive");
  }
  if (!(p >= 0.0) || !(p <= 1.0)) {
    throw std::invalid_argument("beta_quantile: p must lie in [0, 1]");
  }
  if (p == 0.0) return 0.0;
  if (p == 1.0) return 1.0;

  constexpr double kTol = 1e-13;
  const double log_b = log_beta(a, b);

  double lo = 0.0;
  double hi = 1.0;
  double x = a / (a + b);  // start at the mean
  for (int iter = 0; iter < 200 && hi - lo > kTol; ++iter) {
    const double f = incomplete_beta_ratio(x, a, b) - p;
    if (f == 0.0) break;
    if (f > 0.0) {
      hi = x;
    } else {
      lo = x;
    }
    // Newton step off the density; fall back to bisection when the step
    // leaves the bracket or the density underflows.
    const double log_pdf =
        (a - 1.0) * std::log(x) + (b - 1.0) * std::log1p(-x) - log_b;
    double next = 0.5 * (lo + hi);
    if (log_pdf > -700.0) {
      const double candidate = x - f / std::exp(log_pdf);
      if (candidate > lo && candidate < hi) next = candidate;
    }
    x = next;
  }
  return x;
}

double cp_upper_bound(std::int64_t k, std::int64_t n, double delta) {
  if (n <= 0) {
    throw std::invalid_argument("cp_upper_bound: n must be positive");
  }
  if (k < 0 || k > n) {
    throw std::invalid_argument("cp_upper_bound: k must lie in [0, n]");
  }
  if (!(delta > 0.0) || !(delta < 1.0)) {
    throw std::invalid_argument("cp_upper_bound: delta must lie in (0, 1)");
  }
  if (k == n) return 1.0;
  return beta_quantile(1.0 - delta, static_cast<double>(k) + 1.0,
                       static_cast<double>(n - k));
}

std::int64_t min_calibration_size(double alpha, double delta) {
  if (!(alpha > 0.0) || !(alpha < 1.0)) {
    throw std::invalid_argument("min_calibration_size: alpha must lie in (0, 1)");
  }
  if (!(delta > 0.0) || !(delta < 1.0)) {
    throw std::invalid_argument("min_calibration_size: delta must lie in (0, 1)");
  }
  const double ratio = std::log(delta) / std::log1p(-alpha);
  return static_cast<std::int64_t>(std::ceil(ratio));
}

}  // namespace saferoute
