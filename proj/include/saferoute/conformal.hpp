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

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "saferoute/scored.hpp"

namespace saferoute {

enum class Decision { surrogate, reference };

// Result of the calibration scan. An empty threshold means the policy
// routes nothing (no candidate certified the risk budget).
struct RoutingPolicy {
  std::optional<double> threshold;
  double alpha = 0.0;
  double delta = 0.0;
  long routed_count = 0;
  long unsafe_count = 0;
  double ucb_at_selection = 1.0;
  long candidates_tested = 0;

  bool routes_nothing() const { return !threshold.has_value(); }
};

// Scans the unique calibration scores in ascending order and returns
// the first threshold t whose exact binomial upper confidence bound on
// the routed unsafe rate is <= alpha. With probability at least
// 1 - delta over the calibration draw, the selected policy's true
// routed unsafe rate is <= alpha.
RoutingPolicy select_threshold(const std::vector<ScoredExample>& calibration,
                               double alpha, double delta);

// Surrogate iff the policy has a threshold and s >= threshold.
Decision route(const RoutingPolicy& policy, double s);

struct PolicyEvaluation {
  double coverage = 0.0;
  std::optional<double> violation;  // absent when nothing was routed
  long routed_count = 0;
  long total_count = 0;
};

PolicyEvaluation evaluate_policy(const RoutingPolicy& policy,
                                 const std::vector<ScoredExample>& test);

void save_policy(std::ostream& out, const RoutingPolicy& policy);
RoutingPolicy load_policy(std::istream& in);
void save_policy_file(const std::string& path, const RoutingPolicy& policy);
RoutingPolicy load_policy_file(const std::string& path);

}  // namespace saferoute

