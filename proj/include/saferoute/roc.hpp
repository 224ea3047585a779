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

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
  // Score threshold that attains this operating point; +inf for (0,0).
  double threshold = 0.0;
};

// Piecewise-linear ROC curve. Points run from (0,0) to (1,1) with
// nondecreasing fpr; auc is the trapezoidal area under the polyline.
struct RocCurve {
  std::vector<RocPoint> points;
  double auc = 0.0;
};

// Validates the point list (endpoints, monotone fpr, coordinates in
// [0,1]) and fills in the trapezoidal auc. Throws std::invalid_argument
// on malformed input.
RocCurve make_roc_curve(std::vector<RocPoint> points);

// Trapezoidal area under the polyline, without validation.
double trapezoid_auc(const std::vector<RocPoint>& points);

}  // namespace saferoute
