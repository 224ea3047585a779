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
#include <string>
#include <vector>

#include "saferoute/conformal.hpp"
#include "saferoute/predictors.hpp"

namespace saferoute {

enum class Method {
  gate_conformal,
  reg_conformal,
  naive,
  oracle,
  random_matched,
  always_bb,  // keep everything on the reference model
  always_cm,  // send everything to the surrogate
};

std::string method_name(Method method);
Method parse_method(const std::string& name);
const std::vector<Method>& all_methods();

// Split conformal upper bound on predicted degradation: route to the
// surrogate iff model(x) + q_hat <= tau.
struct RegressionConformalPolicy {
  RidgeModel model;
  double q_hat = 0.0;
  double alpha = 0.0;
  double tau = 0.0;
};

// q_hat as the ceil((n+1)(1-alpha))-th smallest signed residual
// d - model(x) over the calibration rows; +inf when the index
// overflows n (the policy then routes nothing).
double conformal_residual_quantile(std::vector<double> residuals, double alpha);

RegressionConformalPolicy fit_regression_conformal(
    const std::vector<std::vector<double>>& calibration_features,
    const std::vector<double>& calibration_degradation, const RidgeModel& model,
    double alpha, double tau);

Decision regression_route(const RegressionConformalPolicy& policy,
                          const std::vector<double>& x, double tau);

Decision naive_route(double s);
Decision oracle_route(double d, double tau);

// Routes each of n inputs independently with probability
// coverage_target; deterministic per seed.
std::vector<Decision> random_matched_route(double coverage_target,
                                           std::uint64_t seed, std::size_t n);

Decision always_route(Decision which);

}  // namespace saferoute

