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
#include "saferoute/predictors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "saferoute/numeric.hpp"
#include "saferoute/rng.hpp"

namespace saferoute {

double degradation(double y, double f_pred, double g_pred) {
  if (!std::isfinite(y) || !std::isfinite(f_pred) || !std::isfinite(g_pred)) {
    throw std::invalid_argument("degradation: non-finite input");
  }
  return std::fabs(y - g_pred) - std::fabs(y - f_pred);
}

int safety_label(double d, double tau) { return d <= tau ? 1 : 0; }

std::vector<PredictionRecord> build_records(
    const std::vector<std::vector<double>>& features,
    const std::vector<double>& y, const std::vector<double>& f_pred,
    const std::vector<double>& g_pred, double tau) {
  const std::size_t n = features.size();
  if (y.size() != n || f_pred.size() != n || g_pred.size() != n) {
    throw std::invalid_argument("build_records: column lengths differ");
  }
  std::vector<PredictionRecord> records;
  records.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    PredictionRecord r;
    r.features = features[i];
    r.y = y[i];
    r.f_pred = f_pred[i];
    r.g_pred = g_pred[i];
    r.degradation = degradation(y[i], f_pred[i], g_pred[i]);
    r.safe = safety_label(r.degradation, tau);
    records.push_back(std::move(r));
  }
  return records;
}

namespace {

struct TreeBuilder {
  const std::vector<std::vector<double>>& x;
  const std::vector<double>& y;
  int max_depth;
  int min_leaf;
  int mtry;
  Rng& rng;
  std::vector<TreeNode>& nodes;
  std::vector<int> feature_order;
  std::vector<std::size_t> scratch;

  // Sum of squared deviations from the mean, computed from moment sums;
  // clamped at zero so a constant target never reads as improvable.
  static double sse(double sum, double sum_sq, double n) {
    return std::max(0.0, sum_sq - sum * sum / n);
  }

  int build(std::vector<std::size_t>& idx, int depth) {
    const double n = static_cast<double>(idx.size());
    double sum = 0.0, sum_sq = 0.0;
    for (std::size_t i : idx) {
      sum += y[i];
      sum_sq += y[i] * y[i];
    }
    const double node_value = sum / n;
    const double node_sse = sse(sum, sum_sq, n);

    const int node_id = static_cast<int>(nodes.size());
    nodes.push_back({-1, 0.0, -1, -1, node_value});

    if (depth >= max_depth || idx.size() < 2 * static_cast<std::size_t>(min_leaf) ||
        node_sse <= 0.0) {
      return node_id;
    }

    rng.shuffle(feature_order);
    int best_feature = -1;
    double best_threshold = 0.0;
    double best_children_sse = node_sse;

    for (int fi = 0; fi < mtry; ++fi) {
      const int f = feature_order[fi];
      scratch = idx;
      std::sort(scratch.begin(), scratch.end(),
                [&](std::size_t a, std::size_t b) { return x[a][f] < x[b][f]; });
      double left_sum = 0.0, left_sq = 0.0;
      for (std::size_t p = 0; p + 1 < scratch.size(); ++p) {
        const double yv = y[scratch[p]];
        left_sum += yv;
        left_sq += yv * yv;
        const std::size_t left_n = p + 1;
        const std::size_t right_n = scratch.size() - left_n;
        if (left_n < static_cast<std::size_t>(min_leaf) ||
            right_n < static_cast<std::size_t>(min_leaf)) {
          continue;
        }
        const double lo = x[scratch[p]][f];
        const double hi = x[scratch[p + 1]][f];
        if (!(lo < hi)) continue;
        const double children =
            sse(left_sum, left_sq, static_cast<double>(left_n)) +
            sse(sum - left_sum, sum_sq - left_sq, static_cast<double>(right_n));
        if (children < best_children_sse) {
          best_children_sse = children;
          best_feature = f;
          best_threshold = 0.5 * (lo + hi);
        }
      }
    }

    if (best_feature < 0) return node_id;

    std::vector<std::size_t> left_idx, right_idx;
    left_idx.reserve(idx.size());
    right_idx.reserve(idx.size());
    for (std::size_t i : idx) {
      (x[i][best_feature] <= best_threshold ? left_idx : right_idx).push_back(i);
    }
    idx.clear();
    idx.shrink_to_fit();

    nodes[node_id].feature = best_feature;
    nodes[node_id].threshold = best_threshold;
    nodes[node_id].left = build(left_idx, depth + 1);
    nodes[node_id].right = build(right_idx, depth + 1);
    return node_id;
  }
};

void check_regression_input(const std::vector<std::vector<double>>& features,
                            const std::vector<double>& targets,
                            const char* where) {
  if (features.empty()) {
    throw std::invalid_argument(std::string(where) + ": empty training data");
  }
  if (features.size() != targets.size()) {
    throw std::invalid_argument(std::string(where) +
                                ": features and targets differ in length");
  }
  const std::size_t d = features.front().size();
  if (d == 0) {
    throw std::invalid_argument(std::string(where) +
                                ": zero-dimensional features");
  }
  for (const auto& row : features) {
    if (row.size() != d) {
      throw std::invalid_argument(std::string(where) + ": ragged feature matrix");
    }
  }
}

TreeModel fit_tree_sampled(const std::vector<std::vector<double>>& features,
                           const std::vector<double>& targets,
                           std::vector<std::size_t> idx, int max_depth,
                           int min_leaf, int mtry, Rng& rng) {
  TreeModel model;
  const int d = static_cast<int>(features.front().size());
  TreeBuilder builder{features, targets, max_depth,
                      min_leaf, mtry,    rng,
                      model.nodes, {},   {}};
  builder.feature_order.resize(d);
  std::iota(builder.feature_order.begin(), builder.feature_order.end(), 0);
  builder.build(idx, 0);
  return model;
}

}  // namespace

double TreeModel::predict(const std::vector<double>& x) const {
  int node = 0;
  while (nodes[node].feature >= 0) {
    node = x[nodes[node].feature] <= nodes[node].threshold ? nodes[node].left
                                                           : nodes[node].right;
  }
  return nodes[node].value;
}

std::vector<double> TreeModel::predict_all(
    const std::vector<std::vector<double>>& rows) const {
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& row : rows) out.push_back(predict(row));
  return out;
}

int TreeModel::depth() const {
  std::vector<std::pair<int, int>> stack{{0, 0}};
  int deepest = 0;
  while (!stack.empty()) {
    auto [node, depth] = stack.back();
    stack.pop_back();
    deepest = std::max(deepest, depth);
    if (nodes[node].feature >= 0) {
      stack.push_back({nodes[node].left, depth + 1});
      stack.push_back({nodes[node].right, depth + 1});
    }
  }
  return deepest;
}

TreeModel fit_tree(const std::vector<std::vector<double>>& features,
                   const std::vector<double>& targets,
                   const TreeConfig& config) {
  check_regression_input(features, targets, "fit_tree");
  if (config.max_depth < 0 || config.min_leaf < 1) {
    throw std::invalid_argument("fit_tree: bad depth or leaf size");
  }
  Rng rng(config.seed);
  std::vector<std::size_t> idx(features.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  return fit_tree_sampled(features, targets, std::move(idx), config.max_depth,
                          config.min_leaf,
                          static_cast<int>(features.front().size()), rng);
}

double ForestModel::predict(const std::vector<double>& x) const {
  double total = 0.0;
  for (const TreeModel& tree : trees) total += tree.predict(x);
  return total / static_cast<double>(trees.size());
}

std::vector<double> ForestModel::predict_all(
    const std::vector<std::vector<double>>& rows) const {
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& row : rows) out.push_back(predict(row));
  return out;
}

ForestModel fit_forest(const std::vector<std::vector<double>>& features,
                       const std::vector<double>& targets,
                       const ForestConfig& config) {
  check_regression_input(features, targets, "fit_forest");
  if (config.num_trees < 1) {
    throw std::invalid_argument("fit_forest: need at least one tree");
  }
  const int d = static_cast<int>(features.front().size());
  int mtry = config.features_per_split;
  if (mtry <= 0) {
    mtry = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(d))));
  }
  mtry = std::min(mtry, d);

  ForestModel model;
  model.trees.reserve(config.num_trees);
  const std::size_t n = features.size();
  for (int t = 0; t < config.num_trees; ++t) {
    Rng rng(derive_seed(config.seed, static_cast<std::uint64_t>(t)));
    std::vector<std::size_t> idx(n);
    if (config.bootstrap) {
      for (std::size_t i = 0; i < n; ++i) idx[i] = rng.below(n);
    } else {
      std::iota(idx.begin(), idx.end(), std::size_t{0});
    }
    model.trees.push_back(fit_tree_sampled(features, targets, std::move(idx),
                                           config.max_depth, config.min_leaf,
                                           mtry, rng));
  }
  return model;
}

double RidgeModel::predict(const std::vector<double>& x) const {
  double value = bias;
  for (std::size_t j = 0; j < weights.size(); ++j) {
    value += weights[j] * (x[j] - feature_means[j]);
  }
  return value;
}

std::vector<double> RidgeModel::predict_all(
    const std::vector<std::vector<double>>& rows) const {
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& row : rows) out.push_back(predict(row));
  return out;
}

RidgeModel fit_ridge(const std::vector<std::vector<double>>& features,
                     const std::vector<double>& targets, double lambda) {
  check_regression_input(features, targets, "fit_ridge");
  if (!(lambda >= 0.0)) {
    throw std::invalid_argument("fit_ridge: lambda must be non-negative");
  }
  const std::size_t n = features.size();
  const std::size_t d = features.front().size();

  RidgeModel model;
  model.lambda = lambda;
  model.feature_means.assign(d, 0.0);
  for (std::size_t j = 0; j < d; ++j) {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) m += features[i][j];
    model.feature_means[j] = m / static_cast<double>(n);
  }
  model.bias =
      std::accumulate(targets.begin(), targets.end(), 0.0) / static_cast<double>(n);

  // Normal equations on centered data: (Xc'Xc + lambda I) w = Xc'yc.
  std::vector<std::vector<double>> a(d, std::vector<double>(d, 0.0));
  std::vector<double> b(d, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      const double xj = features[i][j] - model.feature_means[j];
      b[j] += xj * (targets[i] - model.bias);
      for (std::size_t k = j; k < d; ++k) {
        a[j][k] += xj * (features[i][k] - model.feature_means[k]);
      }
    }
  }
  for (std::size_t j = 0; j < d; ++j) {
    for (std::size_t k = 0; k < j; ++k) a[j][k] = a[k][j];
    a[j][j] += lambda;
  }

  // Gaussian elimination with partial pivoting.
  for (std::size_t col = 0; col < d; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < d; ++r) {
      if (std::fabs(a[r][col]) > std::fabs(a[pivot][col])) pivot = r;
    }
    if (std::fabs(a[pivot][col]) < 1e-12) {
      throw degenerate_error("fit_ridge: singular system");
    }
    std::swap(a[col], a[pivot]);
    std::swap(b[col], b[pivot]);
    for (std::size_t r = col + 1; r < d; ++r) {
      const double factor = a[r][col] / a[col][col];
      for (std::size_t k = col; k < d; ++k) a[r][k] -= factor * a[col][k];
      b[r] -= factor * b[col];
    }
  }
  model.weights.assign(d, 0.0);
  for (std::size_t col = d; col-- > 0;) {
    double value = b[col];
    for (std::size_t k = col + 1; k < d; ++k) value -= a[col][k] * model.weights[k];
    model.weights[col] = value / a[col][col];
  }
  return model;
}

const std::vector<int>& default_surrogate_depth_grid() {
  static const std::vector<int> grid{2, 3, 4, 5, 7, 9, 11, 13, 15};
  return grid;
}

int select_surrogate_depth(
    const std::vector<std::vector<double>>& train_features,
    const std::vector<double>& train_targets,
    const std::vector<std::vector<double>>& valid_features,
    const std::vector<double>& valid_targets, const std::vector<int>& depth_grid,
    int min_leaf, std::uint64_t seed) {
  if (depth_grid.empty()) {
    throw std::invalid_argument("select_surrogate_depth: empty depth grid");
  }
  int best_depth = 0;
  double best_mae = kInf;
  for (int depth : depth_grid) {
    TreeConfig config;
    config.max_depth = depth;
    config.min_leaf = min_leaf;
    config.seed = seed;
    TreeModel tree = fit_tree(train_features, train_targets, config);
    const double mae =
        mean_absolute_error(tree.predict_all(valid_features), valid_targets);
    if (mae < best_mae || (mae == best_mae && depth < best_depth)) {
      best_mae = mae;
      best_depth = depth;
    }
  }
  return best_depth;
}

double mean_absolute_error(const std::vector<double>& predictions,
                           const std::vector<double>& targets) {
  if (predictions.empty() || predictions.size() != targets.size()) {
    throw std::invalid_argument("mean_absolute_error: bad input lengths");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    total += std::fabs(predictions[i] - targets[i]);
  }
  return total / static_cast<double>(predictions.size());
}

}  // namespace saferoute
