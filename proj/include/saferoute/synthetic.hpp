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
#include <vector>

#include "saferoute/roc.hpp"
#include "saferoute/scored.hpp"

namespace saferoute {

// Gaussian class-conditional latents pushed through a sigmoid. The
// closed-form ROC and violation rate make this the oracle for checking
// the calibration guarantee end to end.
struct BinormalSpec {
  double pi = 0.7;
  double mu0 = 0.0;
  double mu1 = 1.0;
  double sigma = 1.0;
  std::uint64_t seed = 1;
};

void validate(const BinormalSpec& spec);

// StandardNormalCDF((mu1 - mu0) / (sigma * sqrt(2))).
double implied_auc(const BinormalSpec& spec);

// Inverse standard normal CDF by bisection, |error| < 1e-12.
double normal_quantile(double p);

// Spec with mu0 = 0 and mu1 chosen so implied_auc equals auc.
BinormalSpec binormal_from_auc(double pi, double auc, double sigma = 1.0,
                               std::uint64_t seed = 1);

struct BinormalDraw {
  std::vector<ScoredExample> examples;
  std::vector<double> latents;
};

// Y ~ Bernoulli(pi), z ~ Normal(mu_Y, sigma), score = sigmoid(z).
BinormalDraw generate(const BinormalSpec& spec, std::size_t n);

// Population unsafe fraction among inputs with score >= t, evaluated
// from the normal tails; boundary t <= 0 returns 1 - pi.
double true_violation(const BinormalSpec& spec, double t);

// Closed-form ROC of the score against the safe label, sampled on a
// latent grid with exact (0,0) and (1,1) endpoints.
RocCurve true_roc(const BinormalSpec& spec, int grid_points = 2001);

}  // namespace saferoute

