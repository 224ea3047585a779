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

#include <vector>

namespace saferoute {

// A gate score in [0, 1] paired with the binary safety label it is
// trying to predict (1 = routing this input was safe).
struct ScoredExample {
  double score = 0.0;
  int label = 0;
};

inline bool both_classes_present(const std::vector<ScoredExample>& xs) {
  bool pos = false, neg = false;
  for (const ScoredExample& x : xs) {
    (x.label != 0 ? pos : neg) = true;
    if (pos && neg) return true;
  }
  return false;
}

}  // namespace saferoute
