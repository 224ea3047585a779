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
#include "saferoute/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "saferoute/numeric.hpp"
#include "saferoute/rng.hpp"

namespace saferoute {

std::string method_name(Method method) {
  switch (method) {
    case Method::gate_conformal:
      return "gate_conformal";
    case Method::reg_conformal:
      return "reg_conformal";
    case Method::naive:
      return "naive";
    case Method::oracle:
      return "oracle";
    case Method::random_matched:
      return "random";
    case Method::always_bb:
      return "always_bb";
    case Method::always_cm:
      return "always_cm";
  }
  return "gate_conformal";
}

Method parse_method(const std::string& name) {
  for (Method m : all_methods()) {
    if (method_name(m) == name) return m;
  }
  throw std::invalid_argument("unknown method '" + name + "'");
}

const std::vector<Method>& all_methods() {
  static const std::vector<Method> methods{
      Method::gate_conformal, Method::reg_conformal, Method::naive,
      Method::oracle,         Method::random_matched, Method::always_bb,
      Method::always_cm};
  return methods;
}

double conformal_residual_quantile(std::vector<double> residuals, double alpha) {
  if (residuals.empty()) {
    throw std::invalid_argument("conformal_residual_quantile: empty residuals");
  }
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("conformal_residual_quantile: alpha must be in (0,1)");
  }
  const std::size_t n = residuals.size();
  const double raw = std::ceil(static_cast<double>(n + 1) * (1.0 - alpha));
  const std::size_t rank = static_cast<std::size_t>(raw);
  if (rank > n) return kInf;
  std::nth_element(residuals.begin(), residuals.begin() + (rank - 1),
                   residuals.end());
  return residuals[rank - 1];
}

RegressionConformalPolicy fit_regression_conformal(
    const std::vector<std::vector<double>>& calibration_features,
    const std::vector<double>& calibration_degradation, const RidgeModel& model,
    double alpha, double tau) {
  if (calibration_features.empty() ||
      calibration_features.size() != calibration_degradation.size()) {
    throw std::invalid_argument("fit_regression_conformal: bad calibration data");
  }
  std::vector<double> residuals(calibration_features.size());
  for (std::size_t i = 0; i < calibration_features.size(); ++i) {
    residuals[i] =
        calibration_degradation[i] - model.predict(calibration_features[i]);
  }
  RegressionConformalPolicy policy;
  policy.model = model;
  policy.q_hat = conformal_residual_quantile(std::move(residuals), alpha);
  policy.alpha = alpha;
  policy.tau = tau;
  return policy;
}

Decision regression_route(const RegressionConformalPolicy& policy,
                          const std::vector<double>& x, double tau) {
  if (std::isinf(policy.q_hat)) return Decision::reference;
  return policy.model.predict(x) + policy.q_hat <= tau ? Decision::surrogate
                                                       : Decision::reference;
}

Decision naive_route(double s) {
  return s >= 0.5 ? Decision::surrogate : Decision::reference;
}

Decision oracle_route(double d, double tau) {
  return d <= tau ? Decision::surrogate : Decision::reference;
}

std::vector<Decision> random_matched_route(double coverage_target,
                                           std::uint64_t seed, std::size_t n) {
  if (!(coverage_target >= 0.0 && coverage_target <= 1.0)) {
    throw std::invalid_argument("random_matched_route: target must be in [0,1]");
  }
  Rng rng(seed);
  std::vector<Decision> decisions(n, Decision::reference);
  for (std::size_t i = 0; i < n; ++i) {
    if (rng.bernoulli(coverage_target)) decisions[i] = Decision::surrogate;
  }
  return decisions;
}

Decision always_route(Decision which) { return which; }

}  // namespace saferoute
