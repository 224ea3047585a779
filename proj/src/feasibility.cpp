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
#include "saferoute/feasibility.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "saferoute/numeric.hpp"

namespace saferoute {
namespace {

void check_pi_alpha(double pi, double alpha, const char* who) {
  if (!(pi >= 0.0) || !(pi <= 1.0)) {
    throw std::invalid_argument(std::string(who) + ": pi must lie in [0, 1]");
  }
  if (!(alpha > 0.0) || !(alpha < 1.0)) {
    throw std::invalid_argument(std::string(who) + ": alpha must lie in (0, 1)");
  }
}

}  // namespace

double critical_ratio(double pi, double alpha) {
  check_pi_alpha(pi, alpha, "critical_ratio");
  if (pi == 0.0) return kInf;
  if (pi == 1.0) return 0.0;
  return (1.0 - pi) * (1.0 - alpha) / (pi * alpha);
}

double critical_auc(double pi, double alpha) {
  const double c = critical_ratio(pi, alpha);
  return std::min(1.0, 0.5 * c);
}

double tight_auc(double pi, double alpha) {
  const double c = critical_ratio(pi, alpha);
  if (c <= 1.0) return 0.5;
  return 1.0 - 1.0 / (2.0 * c);
}

double coverage_lower_bound(double pi, double alpha, double auc) {
  const double c = critical_ratio(pi, alpha);
  if (!(c > 1.0)) {
    throw std::invalid_argument(
        "coverage_lower_bound: critical ratio <= 1, bound is trivially 1");
  }
  if (auc < tight_auc(pi, alpha) - 1e-12) {
    throw std::invalid_argument(
        "coverage_lower_bound: auc below the concave feasibility threshold");
  }
  const double bound = (2.0 * auc - 1.0) * (1.0 - pi) / ((c - 1.0) * alpha);
  return std::min(1.0, bound);
}

RocFeasibility roc_feasible(const RocCurve& roc, double pi, double alpha) {
  const double c = critical_ratio(pi, alpha);
  RocFeasibility result;

  // Concavity of the achieved polyline: secant slopes nonincreasing.
  result.concave = true;
  for (std::size_t i = 2; i < roc.points.size(); ++i) {
    const RocPoint& a = roc.points[i - 2];
    const RocPoint& b = roc.points[i - 1];
    const RocPoint& d = roc.points[i];
    const double cross = (b.tpr - a.tpr) * (d.fpr - b.fpr) -
                         (d.tpr - b.tpr) * (b.fpr - a.fpr);
    if (cross < -1e-12) {
      result.concave = false;
      break;
    }
  }

  for (const RocPoint& p : roc.points) {
    const bool positive_coverage = p.fpr > 0.0 || p.tpr > 0.0;
    if (!positive_coverage) continue;
    bool ok;
    if (p.fpr == 0.0) {
      ok = true;  // infinite origin slope
    } else if (std::isinf(c)) {
      ok = false;
    } else {
      ok = p.tpr >= c * p.fpr;
    }
    if (ok) {
      result.feasible = true;
      if (!result.witness || p.fpr >= result.witness->fpr) {
        result.witness = p;
        result.u_max = p.fpr;
      }
    }
  }
  return result;
}

FeasibilityReport make_feasibility_report(double pi, double alpha,
                                          std::optional<double> auc,
                                          const RocCurve* roc) {
  FeasibilityReport report;
  report.pi = pi;
  report.alpha = alpha;
  report.critical_ratio = critical_ratio(pi, alpha);
  report.critical_auc = critical_auc(pi, alpha);
  report.tight_auc = tight_auc(pi, alpha);
  report.auc = auc;

  if (report.critical_ratio <= 1.0) {
    report.feasible = true;  // routing everything already meets alpha
  }
  if (auc) {
    if (!(*auc >= 0.0) || !(*auc <= 1.0)) {
      throw std::invalid_argument("make_feasibility_report: auc must lie in [0, 1]");
    }
    if (*auc >= report.critical_auc) report.feasible = true;
    if (report.critical_ratio > 1.0 && *auc >= report.tight_auc) {
      report.coverage_bound = coverage_lower_bound(pi, alpha, *auc);
    }
  }
  if (roc != nullptr) {
    report.roc_scan = roc_feasible(*roc, pi, alpha);
    if (report.roc_scan->feasible) report.feasible = true;
  }
  return report;
}

std::vector<double> feasibility_grid(const std::vector<double>& pi_grid,
                                     const std::vector<double>& alpha_grid) {
  std::vector<double> grid;
  grid.reserve(pi_grid.size() * alpha_grid.size());
  for (double pi : pi_grid) {
    for (double alpha : alpha_grid) {
      grid.push_back(critical_auc(pi, alpha));
    }
  }
  return grid;
}

void write_feasibility_grid_csv(std::ostream& out,
                                const std::vector<double>& pi_grid,
                                const std::vector<double>& alpha_grid) {
  out << "pi, alpha, phi_c, phi_c_star\n";
  char buf[160];
  for (double pi : pi_grid) {
    for (double alpha : alpha_grid) {
      std::snprintf(buf, sizeof(buf), "%.6f, %.6f, %.6f, %.6f\n", pi, alpha,
                    critical_auc(pi, alpha), tight_auc(pi, alpha));
      out << buf;
    }
  }
}

void write_feasibility_report(std::ostream& out, const FeasibilityReport& r) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), "pi:             %.6f\n", r.pi);
  out << buf;
  std::snprintf(buf, sizeof(buf), "alpha:          %.6f\n", r.alpha);
  out << buf;
  if (std::isinf(r.critical_ratio)) {
    out << "critical_ratio: inf\n";
  } else {
    std::snprintf(buf, sizeof(buf), "critical_ratio: %.6f\n", r.critical_ratio);
    out << buf;
  }
  std::snprintf(buf, sizeof(buf), "critical_auc:   %.6f\n", r.critical_auc);
  out << buf;
  std::snprintf(buf, sizeof(buf), "tight_auc:      %.6f\n", r.tight_auc);
  out << buf;
  if (r.auc) {
    std::snprintf(buf, sizeof(buf), "auc:            %.6f\n", *r.auc);
    out << buf;
  }
  if (r.coverage_bound) {
    std::snprintf(buf, sizeof(buf), "coverage_bound: %.6f\n", *r.coverage_bound);
    out << buf;
  }
  if (r.roc_scan) {
    out << "roc_feasible:   " << (r.roc_scan->feasible ? "yes" : "no") << "\n";
    std::snprintf(buf, sizeof(buf), "u_max:          %.6f\n", r.roc_scan->u_max);
    out << buf;
    out << "roc_concave:    " << (r.roc_scan->concave ? "yes" : "no") << "\n";
  }
  out << "feasible:       " << (r.feasible ? "yes" : "no") << "\n";
}

}  // namespace saferoute
