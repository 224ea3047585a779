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
#include "saferoute/synthetic.hpp"

#include <cmath>
#include <stdexcept>

#include "saferoute/numeric.hpp"
#include "saferoute/rng.hpp"

namespace saferoute {

void validate(const BinormalSpec& spec) {
  if (!(spec.pi > 0.0 && spec.pi < 1.0)) {
    throw std::invalid_argument("BinormalSpec: pi must be in (0,1)");
  }
  if (!(spec.sigma > 0.0)) {
    throw std::invalid_argument("BinormalSpec: sigma must be positive");
  }
  if (!std::isfinite(spec.mu0) || !std::isfinite(spec.mu1)) {
    throw std::invalid_argument("BinormalSpec: means must be finite");
  }
}

double implied_auc(const BinormalSpec& spec) {
  validate(spec);
  return normal_cdf((spec.mu1 - spec.mu0) / (spec.sigma * std::sqrt(2.0)));
}

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::invalid_argument("normal_quantile: p must be in (0,1)");
  }
  double lo = -40.0, hi = 40.0;
  for (int iter = 0; iter < 200 && hi - lo > 1e-13; ++iter) {
    const double mid = 0.5 * (lo + hi);
    (normal_cdf(mid) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

BinormalSpec binormal_from_auc(double pi, double auc, double sigma,
                               std::uint64_t seed) {
  if (!(auc > 0.0 && auc < 1.0)) {
    throw std::invalid_argument("binormal_from_auc: auc must be in (0,1)");
  }
  BinormalSpec spec;
  spec.pi = pi;
  spec.mu0 = 0.0;
  spec.mu1 = sigma * std::sqrt(2.0) * normal_quantile(auc);
  spec.sigma = sigma;
  spec.seed = seed;
  validate(spec);
  return spec;
}

BinormalDraw generate(const BinormalSpec& spec, std::size_t n) {
  validate(spec);
  if (n == 0) {
    throw std::invalid_argument("generate: n must be positive");
  }
  Rng rng(spec.seed);
  BinormalDraw draw;
  draw.examples.reserve(n);
  draw.latents.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const int label = rng.bernoulli(spec.pi) ? 1 : 0;
    const double z =
        (label != 0 ? spec.mu1 : spec.mu0) + spec.sigma * rng.normal();
    draw.latents.push_back(z);
    draw.examples.push_back({sigmoid(z), label});
  }
  return draw;
}

double true_violation(const BinormalSpec& spec, double t) {
  validate(spec);
  if (t <= 0.0) return 1.0 - spec.pi;
  if (t >= 1.0) {
    // Limit of the ratio as the routed set shrinks to the upper tail.
    if (spec.mu1 > spec.mu0) return 0.0;
    if (spec.mu1 < spec.mu0) return 1.0;
    return 1.0 - spec.pi;
  }
  const double z = logit(t, 0.0);
  const double fpr = normal_sf((z - spec.mu0) / spec.sigma);
  const double tpr = normal_sf((z - spec.mu1) / spec.sigma);
  const double unsafe_mass = (1.0 - spec.pi) * fpr;
  const double safe_mass = spec.pi * tpr;
  if (unsafe_mass + safe_mass <= 0.0) {
    return spec.mu1 > spec.mu0 ? 0.0 : (spec.mu1 < spec.mu0 ? 1.0 : 1.0 - spec.pi);
  }
  return unsafe_mass / (unsafe_mass + safe_mass);
}

RocCurve true_roc(const BinormalSpec& spec, int grid_points) {
  validate(spec);
  if (grid_points < 2) {
    throw std::invalid_argument("true_roc: need at least 2 grid points");
  }
  const double lo = std::min(spec.mu0, spec.mu1) - 9.0 * spec.sigma;
  const double hi = std::max(spec.mu0, spec.mu1) + 9.0 * spec.sigma;

  std::vector<RocPoint> points;
  points.reserve(static_cast<std::size_t>(grid_points) + 2);
  points.push_back({0.0, 0.0, kInf});
  for (int i = 0; i < grid_points; ++i) {
    // Descending latent threshold gives ascending false positive rate.
    const double z =
        hi - (hi - lo) * static_cast<double>(i) / static_cast<double>(grid_points - 1);
    RocPoint p;
    p.fpr = normal_sf((z - spec.mu0) / spec.sigma);
    p.tpr = normal_sf((z - spec.mu1) / spec.sigma);
    p.threshold = sigmoid(z);
    points.push_back(p);
  }
  points.push_back({1.0, 1.0, 0.0});
  return make_roc_curve(std::move(points));
}

}  // namespace saferoute
