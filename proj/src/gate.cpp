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
#include "saferoute/gate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "saferoute/numeric.hpp"

namespace saferoute {
namespace {

void check_matrix(const std::vector<std::vector<double>>& features,
                  const std::vector<int>& labels) {
  if (features.empty()) {
    throw std::invalid_argument("train_gate: empty training set");
  }
  if (features.size() != labels.size()) {
    throw std::invalid_argument("train_gate: features and labels differ in length");
  }
  const std::size_t d = features.front().size();
  if (d == 0) {
    throw std::invalid_argument("train_gate: zero-dimensional features");
  }
  for (const auto& row : features) {
    if (row.size() != d) {
      throw std::invalid_argument("train_gate: ragged feature matrix");
    }
  }
}

double mean_log_loss(const std::vector<std::vector<double>>& x,
                     const std::vector<int>& y,
                     const std::vector<double>& w, double bias, double l2) {
  const std::size_t n = x.size();
  double loss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double eta = bias;
    for (std::size_t j = 0; j < w.size(); ++j) eta += w[j] * x[i][j];
    // log(1 + exp(-zeta * eta)) with zeta in {-1, +1}
    loss += log1pexp(y[i] != 0 ? -eta : eta);
  }
  double penalty = 0.0;
  for (double wj : w) penalty += wj * wj;
  return loss / static_cast<double>(n) +
         0.5 * l2 * penalty / static_cast<double>(n);
}

}  // namespace

double GateModel::score(const std::vector<double>& features) const {
  if (features.size() != weights.size()) {
    throw std::invalid_argument("GateModel::score: feature dimension mismatch");
  }
  double eta = bias;
  for (std::size_t j = 0; j < weights.size(); ++j) {
    eta += weights[j] * (features[j] - feature_means[j]) / feature_scales[j];
  }
  double s = sigmoid(eta);
  if (platt) {
    s = sigmoid(platt->first * logit(s) + platt->second);
  }
  return s;
}

std::vector<double> GateModel::score_all(
    const std::vector<std::vector<double>>& rows) const {
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& row : rows) out.push_back(score(row));
  return out;
}

GateModel train_gate(const std::vector<std::vector<double>>& features,
                     const std::vector<int>& labels, const GateConfig& config) {
  check_matrix(features, labels);
  const bool has_pos = std::any_of(labels.begin(), labels.end(),
                                   [](int y) { return y != 0; });
  const bool has_neg = std::any_of(labels.begin(), labels.end(),
                                   [](int y) { return y == 0; });
  if (!has_pos || !has_neg) {
    throw degenerate_error("train_gate: labels are single class");
  }

  const std::size_t n = features.size();
  const std::size_t d = features.front().size();

  GateModel model;
  model.feature_means.assign(d, 0.0);
  model.feature_scales.assign(d, 1.0);
  for (std::size_t j = 0; j < d; ++j) {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) m += features[i][j];
    m /= static_cast<double>(n);
    double v = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double c = features[i][j] - m;
      v += c * c;
    }
    v /= static_cast<double>(n);
    model.feature_means[j] = m;
    model.feature_scales[j] = v > 0.0 ? std::sqrt(v) : 1.0;
  }

  std::vector<std::vector<double>> x(n, std::vector<double>(d));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      x[i][j] = (features[i][j] - model.feature_means[j]) / model.feature_scales[j];
    }
  }

  std::vector<double> w(d, 0.0);
  double bias = 0.0;
  std::vector<double> grad_w(d);
  std::vector<double> trial_w(d);
  double step = 1.0;
  double loss = mean_log_loss(x, labels, w, bias, config.l2_strength);

  int iter = 0;
  for (; iter < config.max_iterations; ++iter) {
    std::fill(grad_w.begin(), grad_w.end(), 0.0);
    double grad_b = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double eta = bias;
      for (std::size_t j = 0; j < d; ++j) eta += w[j] * x[i][j];
      const double r = sigmoid(eta) - (labels[i] != 0 ? 1.0 : 0.0);
      for (std::size_t j = 0; j < d; ++j) grad_w[j] += r * x[i][j];
      grad_b += r;
    }
    double grad_norm_sq = 0.0;
    double grad_inf = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      grad_w[j] = (grad_w[j] + config.l2_strength * w[j]) / static_cast<double>(n);
      grad_norm_sq += grad_w[j] * grad_w[j];
      grad_inf = std::max(grad_inf, std::fabs(grad_w[j]));
    }
    grad_b /= static_cast<double>(n);
    grad_norm_sq += grad_b * grad_b;
    grad_inf = std::max(grad_inf, std::fabs(grad_b));
    if (grad_inf < config.tolerance) {
      model.converged = true;
      break;
    }

    // Backtracking line search (Armijo). The accepted step seeds the
    // next iteration so well-conditioned fits do not re-shrink from 1.
    step = std::min(step * 2.0, 1e6);
    bool accepted = false;
    for (int half = 0; half < 60; ++half) {
      for (std::size_t j = 0; j < d; ++j) trial_w[j] = w[j] - step * grad_w[j];
      const double trial_b = bias - step * grad_b;
      const double trial_loss =
          mean_log_loss(x, labels, trial_w, trial_b, config.l2_strength);
      if (trial_loss <= loss - 1e-4 * step * grad_norm_sq) {
        w = trial_w;
        bias = trial_b;
        loss = trial_loss;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      // Gradient too small to make progress in double precision.
      model.converged = true;
      break;
    }
  }
  model.iterations = iter;
  model.weights = std::move(w);
  model.bias = bias;
  return model;
}

double auc(const std::vector<ScoredExample>& examples) {
  if (examples.empty()) {
    throw std::invalid_argument("auc: empty input");
  }
  if (!both_classes_present(examples)) {
    throw degenerate_error("auc: labels are single class");
  }
  // Rank-sum form with midranks; identical to pairwise comparison with
  // half credit for ties.
  std::vector<std::size_t> order(examples.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return examples[a].score < examples[b].score;
  });
  double rank_sum_pos = 0.0;
  std::size_t n_pos = 0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() &&
           examples[order[j + 1]].score == examples[order[i]].score) {
      ++j;
    }
    const double midrank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) {
      if (examples[order[k]].label != 0) {
        rank_sum_pos += midrank;
        ++n_pos;
      }
    }
    i = j + 1;
  }
  const std::size_t n_neg = examples.size() - n_pos;
  return (rank_sum_pos - 0.5 * static_cast<double>(n_pos) *
                             static_cast<double>(n_pos + 1)) /
         (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

double ece(const std::vector<ScoredExample>& examples, int bins) {
  if (examples.empty()) {
    throw std::invalid_argument("ece: empty input");
  }
  if (bins <= 0) {
    throw std::invalid_argument("ece: bins must be positive");
  }
  std::vector<double> sum_score(bins, 0.0), sum_label(bins, 0.0);
  std::vector<std::size_t> count(bins, 0);
  for (const ScoredExample& e : examples) {
    if (!(e.score >= 0.0) || !(e.score <= 1.0)) {
      throw std::invalid_argument("ece: scores must lie in [0, 1]");
    }
    int b = static_cast<int>(e.score * bins);
    if (b == bins) b = bins - 1;  // score exactly 1.0
    sum_score[b] += e.score;
    sum_label[b] += e.label != 0 ? 1.0 : 0.0;
    ++count[b];
  }
  double total = 0.0;
  for (int b = 0; b < bins; ++b) {
    if (count[b] == 0) continue;
    const double nb = static_cast<double>(count[b]);
    total += nb * std::fabs(sum_score[b] / nb - sum_label[b] / nb);
  }
  return total / static_cast<double>(examples.size());
}

RocCurve empirical_roc(const std::vector<ScoredExample>& examples) {
  if (examples.empty()) {
    throw std::invalid_argument("empirical_roc: empty input");
  }
  if (!both_classes_present(examples)) {
    throw degenerate_error("empirical_roc: labels are single class");
  }
  std::vector<ScoredExample> sorted = examples;
  std::sort(sorted.begin(), sorted.end(),
            [](const ScoredExample& a, const ScoredExample& b) {
              return a.score > b.score;
            });
  std::size_t n_pos = 0, n_neg = 0;
  for (const ScoredExample& e : sorted) (e.label != 0 ? n_pos : n_neg)++;

  std::vector<RocPoint> points;
  points.push_back({0.0, 0.0, kInf});
  std::size_t tp = 0, fp = 0;
  std::size_t i = 0;
  while (i < sorted.size()) {
    const double t = sorted[i].score;
    while (i < sorted.size() && sorted[i].score == t) {
      (sorted[i].label != 0 ? tp : fp)++;
      ++i;
    }
    points.push_back({static_cast<double>(fp) / static_cast<double>(n_neg),
                      static_cast<double>(tp) / static_cast<double>(n_pos), t});
  }
  return make_roc_curve(std::move(points));
}

void save_gate_model(std::ostream& out, const GateModel& model) {
  char buf[64];
  auto num = [&buf](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
  };
  out << "saferoute_gate_model v1\n";
  out << "dim " << model.weights.size() << "\n";
  for (std::size_t j = 0; j < model.weights.size(); ++j) {
    out << "mean " << j << " " << num(model.feature_means[j]) << "\n";
  }
  for (std::size_t j = 0; j < model.weights.size(); ++j) {
    out << "scale " << j << " " << num(model.feature_scales[j]) << "\n";
  }
  for (std::size_t j = 0; j < model.weights.size(); ++j) {
    out << "weight " << j << " " << num(model.weights[j]) << "\n";
  }
  out << "bias " << num(model.bias) << "\n";
  if (model.platt) {
    out << "platt " << num(model.platt->first) << " " << num(model.platt->second)
        << "\n";
  }
  out << "converged " << (model.converged ? 1 : 0) << "\n";
  out << "iterations " << model.iterations << "\n";
}

GateModel load_gate_model(std::istream& in) {
  std::string header;
  if (!std::getline(in, header) || header != "saferoute_gate_model v1") {
    throw std::invalid_argument("load_gate_model: bad header");
  }
  GateModel model;
  std::size_t dim = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (key == "dim") {
      ls >> dim;
      model.feature_means.assign(dim, 0.0);
      model.feature_scales.assign(dim, 1.0);
      model.weights.assign(dim, 0.0);
    } else if (key == "mean" || key == "scale" || key == "weight") {
      std::size_t j;
      double v;
      ls >> j >> v;
      if (!ls || j >= dim) {
        throw std::invalid_argument("load_gate_model: bad " + key + " line");
      }
      if (key == "mean") model.feature_means[j] = v;
      if (key == "scale") model.feature_scales[j] = v;
      if (key == "weight") model.weights[j] = v;
    } else if (key == "bias") {
      ls >> model.bias;
    } else if (key == "platt") {
      double a, b;
      ls >> a >> b;
      model.platt = {a, b};
    } else if (key == "converged") {
      int c;
      ls >> c;
      model.converged = c != 0;
    } else if (key == "iterations") {
      ls >> model.iterations;
    } else {
      throw std::invalid_argument("load_gate_model: unknown key " + key);
    }
    if (!ls) {
      throw std::invalid_argument("load_gate_model: malformed line: " + line);
    }
  }
  if (model.weights.empty()) {
    throw std::invalid_argument("load_gate_model: missing dim");
  }
  return model;
}

void save_gate_model_file(const std::string& path, const GateModel& model) {
  std::ofstream out(path);
  if (!out) {
    throw std::invalid_argument("save_gate_model_file: cannot open " + path);
  }
  save_gate_model(out, model);
}

GateModel load_gate_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("load_gate_model_file: cannot open " + path);
  }
  return load_gate_model(in);
}

}  // namespace saferoute
