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

#include "saferoute/baselines.hpp"
#include "saferoute/recalibration.hpp"
#include "saferoute/synthetic.hpp"

namespace saferoute {

struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> valid;
  std::vector<std::size_t> calib;
  std::vector<std::size_t> test;
};

// Quota sizes by largest-remainder rounding: floor quotas first, then
// one extra unit per group in decreasing fractional-part order (ties
// to the lower index).
std::vector<std::size_t> largest_remainder_sizes(
    std::size_t n, const std::vector<double>& ratios);

// Disjoint exhaustive shuffle-then-slice split; deterministic per seed.
SplitIndices split_dataset(std::size_t n, const std::vector<double>& ratios,
                           std::uint64_t seed);

struct ExperimentConfig {
  // Exactly one data source: a CSV path, or the binormal generator.
  std::string dataset_path;
  std::string dataset_id = "synthetic";
  bool use_binormal = false;
  BinormalSpec binormal;
  std::size_t binormal_n = 2000;

  std::vector<double> split_ratios{0.55, 0.15, 0.15, 0.15};
  std::vector<double> tau_grid{-1.5, -1.0, 0.0, 0.5, 1.0, 2.0};
  std::vector<double> alpha_grid;  // empty selects default_alpha_grid()
  double delta = 0.10;
  std::vector<Method> methods;  // empty selects all_methods()
  CalibrationKind recalibration = CalibrationKind::platt;
  std::vector<std::uint64_t> seeds{1};

  int forest_trees = 100;
  int forest_max_depth = 15;
  int forest_min_leaf = 1;
  std::vector<int> surrogate_depths;  // empty selects the default grid
  int surrogate_min_leaf = 1;
  double gate_l2 = 1.0;
  double ridge_lambda = 1.0;
};

// 0.05 steps from 0.05 through 0.80.
const std::vector<double>& default_alpha_grid();

void validate(const ExperimentConfig& config);

// Flat "key = value" text; lists use repeated keys; '#' starts a
// comment line; unknown keys are errors.
ExperimentConfig parse_experiment_config(std::istream& in);
ExperimentConfig parse_experiment_config_file(const std::string& path);

struct ReportRow {
  std::string dataset;
  std::string method;
  std::optional<double> tau;  // absent for the binormal source
  double alpha = 0.0;
  double coverage = 0.0;
  std::optional<double> violation;  // absent when nothing was routed
  std::optional<double> ece;
  std::optional<double> auc;
  double pi = 0.0;  // empirical safe rate on the test split
  std::optional<double> threshold;  // gate threshold when one was selected
  bool abstained = false;           // gate policy routed nothing by choice
  bool exceeded_alpha = false;      // violation present and > alpha
};

std::vector<ReportRow> run_pipeline(const ExperimentConfig& config);

// Canonical CSV: fixed header, 6-decimal fixed-point, empty cells for
// absent values, "abstain" in the threshold column for abstention.
void write_report_csv(std::ostream& out, const std::vector<ReportRow>& rows);
void write_report_csv_file(const std::string& path,
                           const std::vector<ReportRow>& rows);
std::vector<ReportRow> read_report_csv(std::istream& in);
std::vector<ReportRow> read_report_csv_file(const std::string& path);

std::string format_report_table(const std::vector<ReportRow>& rows);

struct ExceedanceSummary {
  long exceeded = 0;
  long eligible = 0;  // rows with positive coverage
  std::optional<double> fraction;
};

// Fraction of positive-coverage rows for the method whose violation
// exceeds their own alpha.
ExceedanceSummary pooled_exceedance(const std::vector<ReportRow>& rows,
                                    Method method);

// Same, restricted to rows at one alpha level.
ExceedanceSummary guarantee_sweep(const std::vector<ReportRow>& rows,
                                  Method method, double alpha);

struct WilcoxonResult {
  double statistic = 0.0;  // sum of ranks of positive differences
  double p_two_sided = 1.0;
  bool exact = false;
};

// Zeros are discarded; ties get midranks. Exact sign-assignment
// enumeration up to 12 non-zero differences, tie-corrected normal
// approximation with continuity correction beyond that.
WilcoxonResult wilcoxon_signed_rank(const std::vector<double>& differences);

struct McGuaranteeResult {
  long trials = 0;
  long exceeded = 0;   // draws whose selected policy truly violates alpha
  long abstained = 0;  // draws that selected no threshold
  double exceedance_fraction = 0.0;
};

// Repeatedly draws a calibration set from the binormal spec, selects a
// policy, and checks its closed-form true violation against alpha.
McGuaranteeResult mc_guarantee(const BinormalSpec& spec,
                               std::size_t calibration_n, double alpha,
                               double delta, long trials, std::uint64_t seed);

}  // namespace saferoute
