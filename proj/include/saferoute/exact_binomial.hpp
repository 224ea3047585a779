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

#include <cstdint>

namespace saferoute {

// Regularized incomplete beta function I_x(a, b) for a, b > 0 and
// x in [0, 1]. Continued-fraction evaluation, accurate to ~1e-14.
double incomplete_beta_ratio(double x, double a, double b);

// Quantile of the Beta(a, b) distribution: the x with I_x(a, b) = p,
// located by a bracketed Newton/bisection hybrid to absolute
// tolerance 1e-10. p = 0 and p = 1 return the exact endpoints.
double beta_quantile(double p, double a, double b);

// Exact one-sided upper confidence bound for a binomial proportion:
// the Clopper-Pearson bound at confidence 1 - delta after observing
// k successes in n trials,
//
//     ucb(k, n, delta) = BetaQuantile(1 - delta; k + 1, n - k),
//
// with ucb(n, n, delta) = 1 exactly. Monotone: nondecreasing in k,
// nonincreasing in n, and always > k/n for k < n.
double cp_upper_bound(std::int64_t k, std::int64_t n, double delta);

// Smallest calibration size n such that a set with zero observed
// failures can certify a violation rate <= alpha at confidence
// 1 - delta: ceil(log(delta) / log(1 - alpha)).
std::int64_t min_calibration_size(double alpha, double delta);

}  // namespace saferoute
