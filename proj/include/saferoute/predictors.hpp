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
#include <vector>

namespace saferoute {

// One labeled example after both models have produced predictions.
// degradation is the extra absolute error paid for using the surrogate;
// safe is 1 when that cost stays within the tolerance tau.
struct PredictionRecord {
  std::vector<double> features;
  double y = 0.0;
  double f_pred = 0.0;
  double g_pred = 0.0;
  double degradation = 0.0;
  int safe = 0;
};

// |y - g_pred| - |y - f_pred|; positive means the surrogate is worse.
double degradation(double y, double f_pred, double g_pred);

// 1 iff d <= tau, boundary inclusive.
int safety_label(double d, double tau);

std::vector<PredictionRecord> build_records(
    const std::vector<std::vector<double>>& features,
    const std::vector<double>& y, const std::vector<double>& f_pred,
    const std::vector<double>& g_pred, double tau);

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;
};

struct TreeConfig {
  int max_depth = 5;
  int min_leaf = 1;
  std::uint64_t seed = 1;
};

struct TreeModel {
  std::vector<TreeNode> nodes;

  double predict(const std::vector<double>& x) const;
  std::vector<double> predict_all(
      const std::vector<std::vector<double>>& rows) const;
  int depth() const;
};

// Greedy variance-reduction regression tree. The seed shuffles the
// per-node feature scan order, which breaks exact-gain ties.
TreeModel fit_tree(const std::vector<std::vector<double>>& features,
                   const std::vector<double>& targets,
                   const TreeConfig& config = {});

struct ForestConfig {
  int num_trees = 100;
  int max_depth = 15;
  int min_leaf = 1;
  bool bootstrap = true;
  int features_per_split = 0;  // 0 selects ceil(sqrt(d))
  std::uint64_t seed = 1;
};

struct ForestModel {
  std::vector<TreeModel> trees;

  double predict(const std::vector<double>& x) const;
  std::vector<double> predict_all(
      const std::vector<std::vector<double>>& rows) const;
};

ForestModel fit_forest(const std::vector<std::vector<double>>& features,
                       const std::vector<double>& targets,
                       const ForestConfig& config = {});

struct RidgeModel {
  std::vector<double> weights;
  std::vector<double> feature_means;
  double bias = 0.0;  // training target mean; prediction is centered-affine
  double lambda = 0.0;

  double predict(const std::vector<double>& x) const;
  std::vector<double> predict_all(
      const std::vector<std::vector<double>>& rows) const;
};

// Minimizes squared error + lambda * ||weights||^2 with the bias
// unpenalized, via the mean-centered normal equations.
RidgeModel fit_ridge(const std::vector<std::vector<double>>& features,
                     const std::vector<double>& targets, double lambda);

const std::vector<int>& default_surrogate_depth_grid();

// Depth from the grid minimizing validation MAE; ties go to the
// smaller depth.
int select_surrogate_depth(
    const std::vector<std::vector<double>>& train_features,
    const std::vector<double>& train_targets,
    const std::vector<std::vector<double>>& valid_features,
    const std::vector<double>& valid_targets,
    const std::vector<int>& depth_grid, int min_leaf = 1,
    std::uint64_t seed = 1);

double mean_absolute_error(const std::vector<double>& predictions,
                           const std::vector<double>& targets);

}  // namespace saferoute

