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

#include <string>
#include <vector>

#include "saferoute/scored.hpp"

namespace saferoute {

enum class CalibrationKind { identity, platt, temperature, isotonic, beta };

std::string calibration_kind_name(CalibrationKind kind);
CalibrationKind parse_calibration_kind(const std::string& name);

// Monotone map from raw scores to recalibrated probabilities.
//   platt:       sigmoid(a * logit(s) + b)
//   temperature: sigmoid(logit(s) / t)
//   isotonic:    left-constant step function (breakpoints -> values)
//   beta:        sigmoid(a * ln s - b * ln(1-s) + c)
// Positivity of a, b, t is enforced at fit time so every parametric
// map is strictly increasing; the isotonic step map is nondecreasing.
struct CalibrationMap {
  CalibrationKind kind = CalibrationKind::identity;
  double a = 1.0;
  double b = 0.0;
  double c = 0.0;
  double t = 1.0;
  std::vector<double> breakpoints;
  std::vector<double> values;

  double apply(double s) const;
  std::vector<double> apply_all(const std::vector<double>& scores) const;
  std::vector<ScoredExample> apply_all(
      const std::vector<ScoredExample>& examples) const;
};

CalibrationMap identity_map();
CalibrationMap fit_platt(const std::vector<ScoredExample>& examples);
CalibrationMap fit_temperature(const std::vector<ScoredExample>& examples);
CalibrationMap fit_isotonic(const std::vector<ScoredExample>& examples);
CalibrationMap fit_beta(const std::vector<ScoredExample>& examples);

// Dispatch by kind; identity needs no data.
CalibrationMap fit_recalibration(CalibrationKind kind,
                                 const std::vector<ScoredExample>& examples);

}  // namespace saferoute

