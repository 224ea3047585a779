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

// End-to-end release gate. Each numbered block checks one external
// contract of the library against hand-computed constants, closed-form
// oracles, or brute-force re-implementations, and prints exactly one
// [PASS]/[FAIL] line. The process exits nonzero if any block fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "saferoute/baselines.hpp"
#include "saferoute/conformal.hpp"
#include "saferoute/exact_binomial.hpp"
#include "saferoute/feasibility.hpp"
#include "saferoute/gate.hpp"
#include "saferoute/harness.hpp"
#include "saferoute/numeric.hpp"
#include "saferoute/predictors.hpp"
#include "saferoute/rng.hpp"
#include "saferoute/synthetic.hpp"

using namespace saferoute;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

int g_failures = 0;

void verdict(int number, bool pass, const char* description) {
  std::printf("[%s] criterion %d: %s\n", pass ? "PASS" : "FAIL", number,
              description);
  if (!pass) ++g_failures;
}

template <typename F>
void run_criterion(int number, const char* description, F body) {
  bool pass = false;
  try {
    pass = body();
  } catch (const std::exception& e) {
    std::printf("  unexpected exception: %s\n", e.what());
  }
  verdict(number, pass, description);
}

// --- criterion 1: upper-bound golden table ------------------------------

bool check_ucb_table() {
  const auto start = Clock::now();
  const std::int64_t ks[] = {0, 1, 5, 10, 20};
  const std::int64_t ns[] = {50, 100, 200, 300, 500};
  // Reference values for UCB_{0.10}(k, n); -1 marks an undefined cell
  // (k = 20 of n = 50 routed points is past any sensible budget).
  const double golden[5][5] = {
      {0.045, 0.023, 0.011, 0.008, 0.005},
      {0.076, 0.038, 0.019, 0.013, 0.008},
      {0.178, 0.091, 0.046, 0.031, 0.018},
      {0.291, 0.150, 0.076, 0.051, 0.031},
      {-1.0, 0.261, 0.133, 0.089, 0.054},
  };
  bool ok = true;
  double worst = 0.0;
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < 5; ++j) {
      if (golden[i][j] < 0.0) continue;
      const double value = cp_upper_bound(ks[i], ns[j], 0.10);
      const double err = std::fabs(value - golden[i][j]);
      worst = std::max(worst, err);
      if (err > 0.001) {
        std::printf("  cell k=%lld n=%lld: got %.6f want %.3f\n",
                    static_cast<long long>(ks[i]), static_cast<long long>(ns[j]),
                    value, golden[i][j]);
        ok = false;
      }
    }
  }
  const double spot = cp_upper_bound(0, 300, 0.10);
  std::printf("  worst table error %.2e, ucb(0,300)=%.6f\n", worst, spot);
  if (std::fabs(spot - 0.0076) > 0.0005) ok = false;
  const double elapsed = seconds_since(start);
  std::printf("  elapsed %.3fs (budget 1s)\n", elapsed);
  return ok && elapsed < 1.0;
}

// --- criterion 2: minimum calibration sizes -----------------------------

bool check_min_sizes() {
  const std::int64_t n_loose = min_calibration_size(0.2, 0.1);
  const std::int64_t n_tight = min_calibration_size(0.05, 0.1);
  std::printf("  n(0.20,0.10)=%lld, n(0.05,0.10)=%lld\n",
              static_cast<long long>(n_loose), static_cast<long long>(n_tight));
  return n_loose == 11 && n_tight == 45;
}

// --- criterion 3: feasibility constants ---------------------------------

bool check_feasibility_constants() {
  struct Case {
    const char* name;
    double got;
    double want;
    double tol;
  };
  const Case cases[] = {
      {"C(0.16,0.2)", critical_ratio(0.16, 0.2), 21.0, 0.01},
      {"phi_c(0.82,0.2)", critical_auc(0.82, 0.2), 0.44, 0.005},
      {"phi_c(0.66,0.2)", critical_auc(0.66, 0.2), 1.0, 0.0},
      {"phi_c*(0.66,0.2)", tight_auc(0.66, 0.2), 0.76, 0.005},
      {"phi_c*(0.74,0.2)", tight_auc(0.74, 0.2), 0.65, 0.005},
  };
  bool ok = true;
  for (const Case& c : cases) {
    const double err = std::fabs(c.got - c.want);
    const bool pass = err <= c.tol;
    std::printf("  %-18s = %.6f (want %.2f +- %.3f) %s\n", c.name, c.got,
                c.want, c.tol, pass ? "ok" : "MISS");
    ok = ok && pass;
  }
  return ok;
}

// --- criterion 4: straight-line ROC at the feasibility edge -------------

RocCurve clipped_line_roc(double slope) {
  std::vector<RocPoint> points;
  points.push_back({0.0, 0.0, kInf});
  points.push_back({1.0 / slope, 1.0, 0.5});
  points.push_back({1.0, 1.0, 0.0});
  return make_roc_curve(std::move(points));
}

bool check_edge_roc() {
  const auto start = Clock::now();
  const double pi = 2.0 / 3.0;
  const double alpha = 0.2;  // critical ratio exactly 2
  bool ok = true;

  const RocCurve shallow = clipped_line_roc(1.9);
  const double want_shallow = 1.0 - 1.0 / (2.0 * 1.9);
  if (std::fabs(shallow.auc - want_shallow) > 1e-6) ok = false;
  const FeasibilityReport below =
      make_feasibility_report(pi, alpha, shallow.auc, &shallow);
  std::printf("  slope 1.9: auc=%.6f (want %.6f), feasible=%d\n", shallow.auc,
              want_shallow, below.feasible ? 1 : 0);
  if (below.feasible) ok = false;

  const RocCurve steep = clipped_line_roc(2.1);
  const FeasibilityReport above =
      make_feasibility_report(pi, alpha, steep.auc, &steep);
  std::printf("  slope 2.1: auc=%.6f, feasible=%d\n", steep.auc,
              above.feasible ? 1 : 0);
  if (!above.feasible) ok = false;

  const double elapsed = seconds_since(start);
  return ok && elapsed < 1.0;
}

// --- criterion 5: two-segment ROC meets the coverage bound exactly ------

bool check_coverage_equality() {
  Rng rng(555);
  double worst_auc = 0.0;
  double worst_bound = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    double pi, alpha, c;
    do {
      pi = rng.uniform(0.05, 0.6);
      alpha = rng.uniform(0.05, 0.5);
      c = critical_ratio(pi, alpha);
    } while (!(c > 1.05));

    // Valid curve regime: breakpoint (u, c*u) with u <= 1/c.
    const double u_a = rng.uniform(0.05, 1.0) / c;
    std::vector<RocPoint> points;
    points.push_back({0.0, 0.0, kInf});
    points.push_back({u_a, c * u_a, 0.5});
    points.push_back({1.0, 1.0, 0.0});
    const RocCurve roc = make_roc_curve(std::move(points));
    const double want_auc = (1.0 + (c - 1.0) * u_a) / 2.0;
    worst_auc = std::max(worst_auc, std::fabs(roc.auc - want_auc));
    if (std::fabs(roc.auc - want_auc) > 1e-9) {
      std::printf("  auc mismatch at trial %d\n", trial);
      return false;
    }

    // The breakpoint is an achieved witness and routes exactly the
    // coverage the bound promises.
    const RocFeasibility scan = roc_feasible(roc, pi, alpha);
    if (!scan.feasible || !scan.witness || scan.u_max != u_a) {
      std::printf("  witness scan failed at trial %d\n", trial);
      return false;
    }
    const double kappa = pi * (c * u_a) + (1.0 - pi) * u_a;
    if (std::fabs(kappa - u_a * (1.0 - pi) / alpha) > 1e-9) {
      std::printf("  achieved-coverage identity failed at trial %d\n", trial);
      return false;
    }

    // Bound regime: auc formula extended over u in [1/c, 1/(c-1)].
    const double u_lo = 1.0 / c;
    const double u_hi = std::min(1.0 / (c - 1.0), 1.0);
    const double u_b = rng.uniform(u_lo, u_hi);
    const double auc_b = std::min(1.0, (1.0 + (c - 1.0) * u_b) / 2.0);
    const double bound = coverage_lower_bound(pi, alpha, auc_b);
    const double want_bound = std::min(1.0, u_b * (1.0 - pi) / alpha);
    worst_bound = std::max(worst_bound, std::fabs(bound - want_bound));
    if (std::fabs(bound - want_bound) > 1e-9) {
      std::printf("  coverage bound mismatch at trial %d\n", trial);
      return false;
    }

    // At the concave-feasibility edge the bound equals pi / (1 - alpha).
    const double edge = coverage_lower_bound(pi, alpha, tight_auc(pi, alpha));
    if (std::fabs(edge - pi / (1.0 - alpha)) > 1e-9) {
      std::printf("  edge identity failed at trial %d\n", trial);
      return false;
    }
  }
  std::printf("  100 triples, worst auc err %.2e, worst bound err %.2e\n",
              worst_auc, worst_bound);
  return true;
}

// --- criterion 6: Monte Carlo check of the selection guarantee ----------

bool check_mc_guarantee() {
  const auto start = Clock::now();
  const BinormalSpec spec = binormal_from_auc(0.7, 0.75);
  const McGuaranteeResult result = mc_guarantee(spec, 300, 0.2, 0.10, 2000, 909);
  const double elapsed = seconds_since(start);
  std::printf("  exceedance %ld/%ld = %.4f (budget 0.12), abstained %ld, "
              "elapsed %.1fs (budget 120s)\n",
              result.exceeded, result.trials, result.exceedance_fraction,
              result.abstained, elapsed);
  return result.exceedance_fraction <= 0.10 + 0.02 && elapsed < 120.0;
}

// --- criterion 7: threshold location under perfect calibration ----------

bool check_calibrated_threshold() {
  // Five score atoms so the scan has a stable landing spot near 1-alpha.
  const double scores[] = {0.05, 0.18, 0.52, 0.72, 0.84};
  const double cumulative[] = {0.05, 0.40, 0.65, 0.85, 1.00};
  Rng rng(777);
  std::vector<ScoredExample> sample;
  sample.reserve(10000);
  for (int i = 0; i < 10000; ++i) {
    const double roll = rng.uniform();
    int atom = 0;
    while (roll > cumulative[atom]) ++atom;
    const double s = scores[atom];
    sample.push_back({s, rng.bernoulli(s) ? 1 : 0});
  }
  bool ok = true;
  for (double alpha : {0.2, 0.3, 0.5}) {
    const RoutingPolicy policy = select_threshold(sample, alpha, 0.10);
    if (policy.routes_nothing()) {
      std::printf("  alpha %.1f: abstained\n", alpha);
      ok = false;
      continue;
    }
    const double gap = std::fabs(*policy.threshold - (1.0 - alpha));
    std::printf("  alpha %.1f: t*=%.2f, |t*-(1-alpha)|=%.3f\n", alpha,
                *policy.threshold, gap);
    if (gap > 0.05) ok = false;
  }
  return ok;
}

// --- criterion 8: equivalence with a brute-force scan -------------------

RoutingPolicy brute_force_threshold(const std::vector<ScoredExample>& sample,
                                    double alpha, double delta) {
  std::set<double> candidates;
  for (const ScoredExample& e : sample) candidates.insert(e.score);
  RoutingPolicy policy;
  policy.alpha = alpha;
  policy.delta = delta;
  for (double t : candidates) {
    ++policy.candidates_tested;
    long routed = 0;
    long unsafe = 0;
    for (const ScoredExample& e : sample) {
      if (e.score >= t) {
        ++routed;
        if (e.label == 0) ++unsafe;
      }
    }
    const double ucb = cp_upper_bound(unsafe, routed, delta);
    if (ucb <= alpha) {
      policy.threshold = t;
      policy.routed_count = routed;
      policy.unsafe_count = unsafe;
      policy.ucb_at_selection = ucb;
      return policy;
    }
  }
  return policy;
}

bool check_brute_force_equivalence() {
  Rng rng(888);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 1 + rng.below(50);
    const double alpha = rng.uniform(0.05, 0.5);
    const double delta = rng.uniform(0.05, 0.25);
    std::vector<ScoredExample> sample;
    sample.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double s = static_cast<double>(rng.below(12)) / 11.0;
      sample.push_back({s, rng.bernoulli(0.3 + 0.6 * s) ? 1 : 0});
    }
    const RoutingPolicy fast = select_threshold(sample, alpha, delta);
    const RoutingPolicy slow = brute_force_threshold(sample, alpha, delta);
    const bool same_threshold =
        fast.threshold.has_value() == slow.threshold.has_value() &&
        (!fast.threshold || *fast.threshold == *slow.threshold);
    if (!same_threshold || fast.routed_count != slow.routed_count ||
        fast.unsafe_count != slow.unsafe_count ||
        fast.candidates_tested != slow.candidates_tested) {
      std::printf("  divergence at trial %d (n=%zu)\n", trial, n);
      return false;
    }
  }
  std::printf("  500 instances matched exactly\n");
  return true;
}

// --- criterion 9: group-conditional failure of the regression baseline --

bool check_regression_contrast() {
  const double tau = 0.5;
  const double alpha = 0.2;
  const double delta = 0.1;
  const std::size_t sizes[4] = {2200, 600, 600, 600};

  double marginal_sum = 0.0;
  double conditional_sum = 0.0;
  long conditional_seeds = 0;
  long gate_ok = 0;
  const int seeds = 50;

  for (int s = 1; s <= seeds; ++s) {
    Rng rng(20260000 + s);
    // One noisy risky group (x1 = 0) and one tight safe group (x1 = 1);
    // x2 carries no signal.
    std::vector<std::vector<double>> x[4];
    std::vector<double> d[4];
    for (int part = 0; part < 4; ++part) {
      x[part].reserve(sizes[part]);
      d[part].reserve(sizes[part]);
      for (std::size_t i = 0; i < sizes[part]; ++i) {
        const double group = rng.bernoulli(0.5) ? 1.0 : 0.0;
        x[part].push_back({group, rng.normal()});
        d[part].push_back(group == 1.0 ? rng.normal(0.3, 0.1)
                                       : rng.normal(-1.0, 3.0));
      }
    }

    const RidgeModel model = fit_ridge(x[0], d[0], 1.0);
    std::vector<double> residuals;
    residuals.reserve(sizes[2]);
    for (std::size_t i = 0; i < sizes[2]; ++i) {
      residuals.push_back(d[2][i] - model.predict(x[2][i]));
    }
    const double q = conformal_residual_quantile(residuals, alpha);

    long covered = 0;
    long routed = 0;
    long routed_unsafe = 0;
    for (std::size_t i = 0; i < sizes[3]; ++i) {
      const double upper = model.predict(x[3][i]) + q;
      if (d[3][i] <= upper) ++covered;
      if (upper <= tau) {
        ++routed;
        if (d[3][i] > tau) ++routed_unsafe;
      }
    }
    marginal_sum += static_cast<double>(covered) / sizes[3];
    if (routed > 0) {
      conditional_sum += static_cast<double>(routed_unsafe) / routed;
      ++conditional_seeds;
    }

    std::vector<int> train_labels(sizes[0]);
    for (std::size_t i = 0; i < sizes[0]; ++i) {
      train_labels[i] = safety_label(d[0][i], tau);
    }
    const GateModel gate = train_gate(x[0], train_labels);
    auto scored = [&](int part) {
      std::vector<ScoredExample> out;
      out.reserve(sizes[part]);
      for (std::size_t i = 0; i < sizes[part]; ++i) {
        out.push_back({gate.score(x[part][i]), safety_label(d[part][i], tau)});
      }
      return out;
    };
    const RoutingPolicy policy = select_threshold(scored(2), alpha, delta);
    const PolicyEvaluation eval = evaluate_policy(policy, scored(3));
    if (!eval.violation || *eval.violation <= alpha) ++gate_ok;
  }

  const double marginal = marginal_sum / seeds;
  const double conditional =
      conditional_seeds > 0 ? conditional_sum / conditional_seeds : 0.0;
  std::printf("  regression marginal coverage %.4f (floor 0.78)\n", marginal);
  std::printf("  regression conditional violation %.4f over %ld seeds "
              "(floor %.2f)\n",
              conditional, conditional_seeds, alpha + 0.05);
  std::printf("  gate within budget in %ld/%d seeds (floor 45)\n", gate_ok,
              seeds);
  return marginal >= 0.78 && conditional_seeds == seeds &&
         conditional >= alpha + 0.05 && gate_ok >= 45;
}

// --- criterion 10: end-to-end pipeline ordering --------------------------

double mean_coverage(const std::vector<ReportRow>& rows,
                     const std::string& method,
                     std::optional<double> alpha = std::nullopt) {
  double sum = 0.0;
  long count = 0;
  for (const ReportRow& row : rows) {
    if (row.method != method) continue;
    if (alpha && std::fabs(row.alpha - *alpha) > 1e-9) continue;
    sum += row.coverage;
    ++count;
  }
  return count > 0 ? sum / static_cast<double>(count) : 0.0;
}

bool check_pipeline(const char* dataset_path) {
  const auto start = Clock::now();
  ExperimentConfig config;
  config.dataset_path = dataset_path;
  config.dataset_id = "bundled";
  config.tau_grid = {-1.5, -1.0, 0.0, 0.5, 1.0, 2.0};
  config.alpha_grid = {0.1, 0.2, 0.3, 0.5};
  config.methods = {Method::gate_conformal, Method::naive, Method::oracle};
  config.seeds = {1, 2, 3, 4, 5};

  const std::vector<ReportRow> rows = run_pipeline(config);
  std::printf("  %zu report rows\n", rows.size());

  bool ok = rows.size() == 5 * 6 * 4 * 3;
  for (double alpha : {0.1, 0.2}) {
    const double oracle_cov = mean_coverage(rows, "oracle", alpha);
    const double gate_cov = mean_coverage(rows, "gate_conformal", alpha);
    std::printf("  alpha %.1f: oracle coverage %.4f vs gate %.4f\n", alpha,
                oracle_cov, gate_cov);
    if (oracle_cov < gate_cov) ok = false;
  }
  const double oracle_all = mean_coverage(rows, "oracle");
  const double gate_all = mean_coverage(rows, "gate_conformal");
  std::printf("  pooled: oracle coverage %.4f vs gate %.4f\n", oracle_all,
              gate_all);
  if (oracle_all < gate_all) ok = false;

  const ExceedanceSummary gate_exc =
      pooled_exceedance(rows, Method::gate_conformal);
  const ExceedanceSummary naive_exc = pooled_exceedance(rows, Method::naive);
  std::printf("  gate exceedance %ld/%ld, naive exceedance %ld/%ld\n",
              gate_exc.exceeded, gate_exc.eligible, naive_exc.exceeded,
              naive_exc.eligible);
  // "Well above delta" pinned as at least twice the failure budget, with
  // the gate itself inside the budget.
  if (!gate_exc.fraction || *gate_exc.fraction > 0.10) ok = false;
  if (!naive_exc.fraction || *naive_exc.fraction < 0.20) ok = false;

  const double elapsed = seconds_since(start);
  std::printf("  elapsed %.1fs (budget 300s)\n", elapsed);
  return ok && elapsed < 300.0;
}

}  // namespace

int main(int argc, char** argv) {
  run_criterion(1, "exact binomial upper bounds match the golden table",
                check_ucb_table);
  run_criterion(2, "zero-failure calibration sizes are 11 and 45",
                check_min_sizes);
  run_criterion(3, "feasibility constants match their reference values",
                check_feasibility_constants);
  run_criterion(4, "clipped-line ROC flips feasibility at the critical slope",
                check_edge_roc);
  run_criterion(5, "two-segment ROC attains the coverage bound with equality",
                check_coverage_equality);
  run_criterion(6, "selected thresholds exceed alpha in at most delta of draws",
                check_mc_guarantee);
  run_criterion(7, "calibrated scores put the threshold near 1 - alpha",
                check_calibrated_threshold);
  run_criterion(8, "threshold scan equals brute force on 500 instances",
                check_brute_force_equivalence);
  run_criterion(9, "regression baseline fails groupwise where the gate holds",
                check_regression_contrast);
  if (argc > 1) {
    run_criterion(10, "bundled pipeline reproduces the qualitative ordering",
                  [&] { return check_pipeline(argv[1]); });
  } else {
    std::printf("  no dataset path given on the command line\n");
    verdict(10, false, "bundled pipeline reproduces the qualitative ordering");
  }

  std::printf("%d criteria failed\n", g_failures);
  return g_failures == 0 ? 0 : 1;
}
