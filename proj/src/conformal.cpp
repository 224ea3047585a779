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
#include "saferoute/conformal.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "saferoute/dataset.hpp"
#include "saferoute/exact_binomial.hpp"

namespace saferoute {

RoutingPolicy select_threshold(const std::vector<ScoredExample>& calibration,
                               double alpha, double delta) {
  if (calibration.empty()) {
    throw std::invalid_argument("select_threshold: empty calibration set");
  }
  if (!(alpha > 0.0 && alpha < 1.0) || !(delta > 0.0 && delta < 1.0)) {
    throw std::invalid_argument("select_threshold: alpha and delta must be in (0,1)");
  }

  std::vector<ScoredExample> sorted = calibration;
  std::sort(sorted.begin(), sorted.end(),
            [](const ScoredExample& a, const ScoredExample& b) {
              return a.score < b.score;
            });
  const std::size_t n = sorted.size();

  // unsafe_suffix[i] = number of unsafe labels among sorted[i..n).
  std::vector<long> unsafe_suffix(n + 1, 0);
  for (std::size_t i = n; i-- > 0;) {
    unsafe_suffix[i] = unsafe_suffix[i + 1] + (sorted[i].label == 0 ? 1 : 0);
  }

  RoutingPolicy policy;
  policy.alpha = alpha;
  policy.delta = delta;

  std::size_t i = 0;
  while (i < n) {
    const double t = sorted[i].score;
    const long routed = static_cast<long>(n - i);
    const long unsafe = unsafe_suffix[i];
    ++policy.candidates_tested;
    const double ucb = cp_upper_bound(unsafe, routed, delta);
    if (ucb <= alpha) {
      policy.threshold = t;
      policy.routed_count = routed;
      policy.unsafe_count = unsafe;
      policy.ucb_at_selection = ucb;
      return policy;
    }
    // Skip duplicates: equal scores form a single candidate threshold.
    while (i < n && sorted[i].score == t) ++i;
  }
  return policy;
}

Decision route(const RoutingPolicy& policy, double s) {
  if (policy.threshold && s >= *policy.threshold) {
    return Decision::surrogate;
  }
  return Decision::reference;
}

PolicyEvaluation evaluate_policy(const RoutingPolicy& policy,
                                 const std::vector<ScoredExample>& test) {
  if (test.empty()) {
    throw std::invalid_argument("evaluate_policy: empty test set");
  }
  PolicyEvaluation eval;
  eval.total_count = static_cast<long>(test.size());
  long unsafe_routed = 0;
  for (const ScoredExample& e : test) {
    if (route(policy, e.score) == Decision::surrogate) {
      ++eval.routed_count;
      if (e.label == 0) ++unsafe_routed;
    }
  }
  eval.coverage =
      static_cast<double>(eval.routed_count) / static_cast<double>(eval.total_count);
  if (eval.routed_count > 0) {
    eval.violation =
        static_cast<double>(unsafe_routed) / static_cast<double>(eval.routed_count);
  }
  return eval;
}

void save_policy(std::ostream& out, const RoutingPolicy& policy) {
  out << "saferoute_policy v1\n";
  if (policy.threshold) {
    out << "threshold " << format_double_roundtrip(*policy.threshold) << "\n";
  } else {
    out << "threshold ABSTAIN\n";
  }
  out << "alpha " << format_double_roundtrip(policy.alpha) << "\n";
  out << "delta " << format_double_roundtrip(policy.delta) << "\n";
  out << "n " << policy.routed_count << "\n";
  out << "k " << policy.unsafe_count << "\n";
  out << "ucb " << format_double_roundtrip(policy.ucb_at_selection) << "\n";
  out << "candidates " << policy.candidates_tested << "\n";
}

RoutingPolicy load_policy(std::istream& in) {
  std::string header;
  if (!std::getline(in, header) || header != "saferoute_policy v1") {
    throw std::invalid_argument("load_policy: bad header");
  }
  RoutingPolicy policy;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string key, value;
    ls >> key >> value;
    if (!ls && key != "threshold") {
      throw std::invalid_argument("load_policy: malformed line: " + line);
    }
    if (key == "threshold") {
      if (value != "ABSTAIN") {
        policy.threshold = parse_double_strict(value, "load_policy threshold");
      }
    } else if (key == "alpha") {
      policy.alpha = parse_double_strict(value, "load_policy alpha");
    } else if (key == "delta") {
      policy.delta = parse_double_strict(value, "load_policy delta");
    } else if (key == "n") {
      policy.routed_count = std::stol(value);
    } else if (key == "k") {
      policy.unsafe_count = std::stol(value);
    } else if (key == "ucb") {
      policy.ucb_at_selection = parse_double_strict(value, "load_policy ucb");
    } else if (key == "candidates") {
      policy.candidates_tested = std::stol(value);
    } else {
      throw std::invalid_argument("load_policy: unknown key " + key);
    }
  }
  return policy;
}

void save_policy_file(const std::string& path, const RoutingPolicy& policy) {
  std::ofstream out(path);
  if (!out) {
    throw std::invalid_argument("save_policy_file: cannot open " + path);
  }
  save_policy(out, policy);
}

RoutingPolicy load_policy_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("load_policy_file: cannot open " + path);
  }
  return load_policy(in);
}

}  // namespace saferoute
