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
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "saferoute/roc.hpp"
#include "saferoute/scored.hpp"

namespace saferoute {

struct GateConfig {
  double l2_strength = 1.0;
  double tolerance = 1e-8;
  int max_iterations = 1000;
  std::uint64_t seed = 0;  // reserved; the full-batch fit is deterministic
};

// Logistic safety gate. Features are standardized with the training
// split's statistics; the optional Platt map recalibrates the output
// on the logit scale.
struct GateModel {
  std::vector<double> feature_means;
  std::vector<double> feature_scales;
  std::vector<double> weights;
  double bias = 0.0;
  std::optional<std::pair<double, double>> platt;  // (slope, intercept)
  bool converged = false;
  int iterations = 0;

  double score(const std::vector<double>& features) const;
  std::vector<double> score_all(const std::vector<std::vector<double>>& rows) const;
};

// Full-batch gradient descent with a backtracking line search on the
// mean log-loss plus an L2 penalty (bias unpenalized). Deterministic.
// Throws degenerate_error when the labels are single class.
GateModel train_gate(const std::vector<std::vector<double>>& features,
                     const std::vector<int>& labels,
                     const GateConfig& config = {});

// Probability that a score/label pair ranks a random safe input above a
// random unsafe one, ties counted half. Throws degenerate_error when
// only one class is present.
double auc(const std::vector<ScoredExample>& examples);

// Expected calibration error over equal-width bins.
double ece(const std::vector<ScoredExample>& examples, int bins = 10);

// Step-function ROC over the unique scores, one point per threshold,
// starting at (0,0). The curve's auc field equals auc() up to rounding.
RocCurve empirical_roc(const std::vector<ScoredExample>& examples);

// Flat text serialization; numeric fields round-trip bit exact.
void save_gate_model(std::ostream& out, const GateModel& model);
GateModel load_gate_model(std::istream& in);
void save_gate_model_file(const std::string& path, const GateModel& model);
GateModel load_gate_model_file(const std::string& path);

}  // namespace saferoute
