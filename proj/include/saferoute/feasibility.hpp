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

#include <optional>
#include <ostream>
#include <vector>

#include "saferoute/roc.hpp"

namespace saferoute {

// Risk target for routed traffic: at most a fraction alpha of routed
// inputs may be unsafe, certified at confidence 1 - delta.
struct RiskSpec {
  double alpha = 0.2;
  double delta = 0.1;
};

// Ratio of true-positive rate to false-positive rate a gate must exceed
// somewhere on its ROC for routing at violation level alpha to be
// possible when the safe prevalence is pi:
//
//     C(pi, alpha) = (1 - pi)(1 - alpha) / (pi * alpha).
//
// Returns +inf at pi = 0 and 0 at pi = 1.
double critical_ratio(double pi, double alpha);

// AUC at or above which every gate, whatever its ROC shape, has an
// operating point satisfying the ratio: min(1, C / 2). Conservative;
// curves below it can still be feasible.
double critical_auc(double pi, double alpha);

// Sharper threshold for concave ROC curves: 1 - 1/(2C) when C > 1,
// else 0.5. Between critical_auc and tight_auc feasibility depends on
// the ROC shape, not the AUC alone.
double tight_auc(double pi, double alpha);

// Coverage certified achievable for a concave ROC with the given AUC:
//
//     min{ 1, (2 auc - 1)(1 - pi) / ((C - 1) alpha) }.
//
// Requires C(pi, alpha) > 1 and auc >= tight_auc(pi, alpha); throws
// std::invalid_argument otherwise (the bound is trivial or undefined).
double coverage_lower_bound(double pi, double alpha, double auc);

struct RocFeasibility {
  bool feasible = false;
  // Largest fpr among achieved points satisfying tpr >= C * fpr
  // (0 when none, including the perfect-ROC corner case).
  double u_max = 0.0;
  std::optional<RocPoint> witness;
  // Whether the scanned polyline is concave; the scan itself makes no
  // concavity assumption, but downstream AUC bounds do.
  bool concave = false;
};

// Scans the achieved operating points of `roc` for one satisfying
// tpr >= critical_ratio(pi, alpha) * fpr with positive coverage.
// No interpolation between points: only achieved points qualify,
// except that a point at fpr = 0 with tpr > 0 counts as an infinite
// origin slope.
RocFeasibility roc_feasible(const RocCurve& roc, double pi, double alpha);

struct FeasibilityReport {
  double pi = 0.0;
  double alpha = 0.0;
  double critical_ratio = 0.0;
  double critical_auc = 0.0;
  double tight_auc = 0.0;
  std::optional<double> auc;             // supplied gate AUC, if any
  std::optional<double> coverage_bound;  // defined when C > 1 and auc >= tight
  std::optional<RocFeasibility> roc_scan;
  // True only when feasibility is guaranteed: C <= 1, or the supplied
  // AUC clears critical_auc, or the ROC scan found a witness. False
  // means "not certified", not "impossible".
  bool feasible = false;
};

FeasibilityReport make_feasibility_report(double pi, double alpha,
                                          std::optional<double> auc = std::nullopt,
                                          const RocCurve* roc = nullptr);

// Row-major critical-AUC surface over the two grids.
std::vector<double> feasibility_grid(const std::vector<double>& pi_grid,
                                     const std::vector<double>& alpha_grid);

// Long-format CSV with header "pi, alpha, phi_c, phi_c_star".
void write_feasibility_grid_csv(std::ostream& out,
                                const std::vector<double>& pi_grid,
                                const std::vector<double>& alpha_grid);

void write_feasibility_report(std::ostream& out, const FeasibilityReport& report);

}  // namespace saferoute
