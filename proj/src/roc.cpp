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
#include "saferoute/roc.hpp"

#include <cmath>
#include <stdexcept>

namespace saferoute {

double trapezoid_auc(const std::vector<RocPoint>& points) {
  double area = 0.0;
  for (std::size_t i = 1; i < points.size(); ++i) {
    area += 0.5 * (points[i].fpr - points[i - 1].fpr) *
            (points[i].tpr + points[i - 1].tpr);
  }
  return area;
}

RocCurve make_roc_curve(std::vector<RocPoint> points) {
  if (points.size() < 2) {
    throw std::invalid_argument("make_roc_curve: need at least the two endpoints");
  }
  for (const RocPoint& p : points) {
    if (!(p.fpr >= 0.0) || !(p.fpr <= 1.0) || !(p.tpr >= 0.0) || !(p.tpr <= 1.0)) {
      throw std::invalid_argument("make_roc_curve: coordinates must lie in [0, 1]");
    }
  }
  if (points.front().fpr != 0.0 || points.front().tpr != 0.0) {
    throw std::invalid_argument("make_roc_curve: curve must start at (0, 0)");
  }
  if (points.back().fpr != 1.0 || points.back().tpr != 1.0) {
    throw std::invalid_argument("make_roc_curve: curve must end at (1, 1)");
  }
  for (std::size_t i = 1; i < points.size(); ++i) {
    if (points[i].fpr < points[i - 1].fpr) {
      throw std::invalid_argument("make_roc_curve: fpr must be nondecreasing");
    }
  }
  RocCurve curve;
  curve.points = std::move(points);
  curve.auc = trapezoid_auc(curve.points);
  return curve;
}

}  // namespace saferoute
