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
#include "saferoute/recalibration.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

#include "saferoute/numeric.hpp"

namespace saferoute {
namespace {

constexpr double kScoreClamp = 1e-6;
constexpr double kParamFloor = 1e-6;

double clamp_score(double s) {
  return std::min(1.0 - kScoreClamp, std::max(kScoreClamp, s));
}

void check_fit_input(const std::vector<ScoredExample>& examples,
                     const char* where) {
  if (examples.empty()) {
    throw std::invalid_argument(std::string(where) + ": empty input");
  }
  for (const ScoredExample& e : examples) {
    if (!(e.score >= 0.0) || !(e.score <= 1.0)) {
      throw std::invalid_argument(std::string(where) +
                                  ": scores must lie in [0, 1]");
    }
  }
  if (!both_classes_present(examples)) {
    throw degenerate_error(std::string(where) + ": labels are single class");
  }
}

// Damped Newton minimization of a log-loss objective over a small
// parameter vector, with a projection applied after every step.
struct NewtonProblem {
  std::function<double(const std::vector<double>&)> loss;
  std::function<void(const std::vector<double>&, std::vector<double>&,
                     std::vector<std::vector<double>>&)>
      grad_hess;
  std::function<void(std::vector<double>&)> project;
};

void solve_small_system(std::vector<std::vector<double>> a,
                        std::vector<double>& b) {
  const std::size_t d = b.size();
  for (std::size_t col = 0; col < d; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < d; ++r) {
      if (std::fabs(a[r][col]) > std::fabs(a[pivot][col])) pivot = r;
    }
    if (std::fabs(a[pivot][col]) < 1e-300) {
      b.assign(d, 0.0);
      return;
    }
    std::swap(a[col], a[pivot]);
    std::swap(b[col], b[pivot]);
    for (std::size_t r = col + 1; r < d; ++r) {
      const double factor = a[r][col] / a[col][col];
      for (std::size_t k = col; k < d; ++k) a[r][k] -= factor * a[col][k];
      b[r] -= factor * b[col];
    }
  }
  for (std::size_t col = d; col-- > 0;) {
    for (std::size_t k = col + 1; k < d; ++k) b[col] -= a[col][k] * b[k];
    b[col] /= a[col][col];
  }
}

std::vector<double> newton_minimize(const NewtonProblem& problem,
                                    std::vector<double> params) {
  const std::size_t d = params.size();
  std::vector<double> grad(d);
  std::vector<std::vector<double>> hess(d, std::vector<double>(d));
  double loss = problem.loss(params);
  for (int iter = 0; iter < 200; ++iter) {
    problem.grad_hess(params, grad, hess);
    for (std::size_t j = 0; j < d; ++j) hess[j][j] += 1e-12;
    std::vector<double> step = grad;
    solve_small_system(hess, step);
    double scale = 1.0;
    bool moved = false;
    for (int half = 0; half < 50; ++half) {
      std::vector<double> trial = params;
      for (std::size_t j = 0; j < d; ++j) trial[j] -= scale * step[j];
      problem.project(trial);
      const double trial_loss = problem.loss(trial);
      if (trial_loss < loss) {
        double delta = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
          delta = std::max(delta, std::fabs(trial[j] - params[j]));
        }
        params = std::move(trial);
        loss = trial_loss;
        moved = delta > 1e-11;
        break;
      }
      scale *= 0.5;
    }
    if (!moved) break;
  }
  return params;
}

CalibrationMap fit_logit_linear(const std::vector<ScoredExample>& examples,
                                CalibrationKind kind) {
  // platt uses features (z, 1); beta uses (ln s, -ln(1-s), 1).
  std::vector<std::vector<double>> feats;
  feats.reserve(examples.size());
  std::vector<int> labels;
  labels.reserve(examples.size());
  for (const ScoredExample& e : examples) {
    const double s = clamp_score(e.score);
    if (kind == CalibrationKind::platt) {
      feats.push_back({std::log(s) - std::log1p(-s), 1.0});
    } else {
      feats.push_back({std::log(s), -std::log1p(-s), 1.0});
    }
    labels.push_back(e.label);
  }
  const std::size_t d = feats.front().size();
  const std::size_t free_count = d - 1;  // last coordinate is the intercept

  NewtonProblem problem;
  problem.loss = [&](const std::vector<double>& w) {
    double total = 0.0;
    for (std::size_t i = 0; i < feats.size(); ++i) {
      double eta = 0.0;
      for (std::size_t j = 0; j < d; ++j) eta += w[j] * feats[i][j];
      total += log1pexp(labels[i] != 0 ? -eta : eta);
    }
    return total;
  };
  problem.grad_hess = [&](const std::vector<double>& w, std::vector<double>& g,
                          std::vector<std::vector<double>>& h) {
    std::fill(g.begin(), g.end(), 0.0);
    for (auto& row : h) std::fill(row.begin(), row.end(), 0.0);
    for (std::size_t i = 0; i < feats.size(); ++i) {
      double eta = 0.0;
      for (std::size_t j = 0; j < d; ++j) eta += w[j] * feats[i][j];
      const double p = sigmoid(eta);
      const double r = p - (labels[i] != 0 ? 1.0 : 0.0);
      const double v = p * (1.0 - p);
      for (std::size_t j = 0; j < d; ++j) {
        g[j] += r * feats[i][j];
        for (std::size_t k = 0; k < d; ++k) {
          h[j][k] += v * feats[i][j] * feats[i][k];
        }
      }
    }
  };
  problem.project = [free_count](std::vector<double>& w) {
    for (std::size_t j = 0; j < free_count; ++j) {
      w[j] = std::max(w[j], kParamFloor);
    }
  };

  std::vector<double> start(d, 0.0);
  for (std::size_t j = 0; j < free_count; ++j) start[j] = 1.0;
  const std::vector<double> w = newton_minimize(problem, start);

  CalibrationMap map;
  map.kind = kind;
  if (kind == CalibrationKind::platt) {
    map.a = w[0];
    map.b = w[1];
  } else {
    map.a = w[0];
    map.b = w[1];
    map.c = w[2];
  }
  return map;
}

}  // namespace

std::string calibration_kind_name(CalibrationKind kind) {
  switch (kind) {
    case CalibrationKind::identity:
      return "none";
    case CalibrationKind::platt:
      return "platt";
    case CalibrationKind::temperature:
      return "temperature";
    case CalibrationKind::isotonic:
      return "isotonic";
    case CalibrationKind::beta:
      return "beta";
  }
  return "none";
}

CalibrationKind parse_calibration_kind(const std::string& name) {
  if (name == "none" || name == "identity") return CalibrationKind::identity;
  if (name == "platt") return CalibrationKind::platt;
  if (name == "temperature") return CalibrationKind::temperature;
  if (name == "isotonic") return CalibrationKind::isotonic;
  if (name == "beta") return CalibrationKind::beta;
  throw std::invalid_argument("unknown recalibration kind '" + name + "'");
}

double CalibrationMap::apply(double s) const {
  switch (kind) {
    case CalibrationKind::identity:
      return s;
    case CalibrationKind::platt: {
      const double z = clamp_score(s);
      return sigmoid(a * (std::log(z) - std::log1p(-z)) + b);
    }
    case CalibrationKind::temperature: {
      const double z = clamp_score(s);
      return sigmoid((std::log(z) - std::log1p(-z)) / t);
    }
    case CalibrationKind::isotonic: {
      auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), s);
      if (it == breakpoints.begin()) return values.front();
      return values[static_cast<std::size_t>(it - breakpoints.begin()) - 1];
    }
    case CalibrationKind::beta: {
      const double z = clamp_score(s);
      return sigmoid(a * std::log(z) - b * std::log1p(-z) + c);
    }
  }
  return s;
}

std::vector<double> CalibrationMap::apply_all(
    const std::vector<double>& scores) const {
  std::vector<double> out;
  out.reserve(scores.size());
  for (double s : scores) out.push_back(apply(s));
  return out;
}

std::vector<ScoredExample> CalibrationMap::apply_all(
    const std::vector<ScoredExample>& examples) const {
  std::vector<ScoredExample> out = examples;
  for (ScoredExample& e : out) e.score = apply(e.score);
  return out;
}

CalibrationMap identity_map() { return {}; }

CalibrationMap fit_platt(const std::vector<ScoredExample>& examples) {
  check_fit_input(examples, "fit_platt");
  return fit_logit_linear(examples, CalibrationKind::platt);
}

CalibrationMap fit_beta(const std::vector<ScoredExample>& examples) {
  check_fit_input(examples, "fit_beta");
  return fit_logit_linear(examples, CalibrationKind::beta);
}

CalibrationMap fit_temperature(const std::vector<ScoredExample>& examples) {
  check_fit_input(examples, "fit_temperature");
  std::vector<double> z;
  z.reserve(examples.size());
  std::vector<int> labels;
  labels.reserve(examples.size());
  for (const ScoredExample& e : examples) {
    const double s = clamp_score(e.score);
    z.push_back(std::log(s) - std::log1p(-s));
    labels.push_back(e.label);
  }

  // Convex in the inverse temperature u = 1/t.
  NewtonProblem problem;
  problem.loss = [&](const std::vector<double>& w) {
    double total = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
      total += log1pexp(labels[i] != 0 ? -w[0] * z[i] : w[0] * z[i]);
    }
    return total;
  };
  problem.grad_hess = [&](const std::vector<double>& w, std::vector<double>& g,
                          std::vector<std::vector<double>>& h) {
    g[0] = 0.0;
    h[0][0] = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
      const double p = sigmoid(w[0] * z[i]);
      g[0] += (p - (labels[i] != 0 ? 1.0 : 0.0)) * z[i];
      h[0][0] += p * (1.0 - p) * z[i] * z[i];
    }
  };
  problem.project = [](std::vector<double>& w) {
    w[0] = std::min(std::max(w[0], kParamFloor), 1.0 / kParamFloor);
  };
  const std::vector<double> w = newton_minimize(problem, {1.0});

  CalibrationMap map;
  map.kind = CalibrationKind::temperature;
  map.t = 1.0 / w[0];
  return map;
}

CalibrationMap fit_isotonic(const std::vector<ScoredExample>& examples) {
  check_fit_input(examples, "fit_isotonic");
  std::vector<ScoredExample> sorted = examples;
  std::sort(sorted.begin(), sorted.end(),
            [](const ScoredExample& x, const ScoredExample& y) {
              return x.score < y.score;
            });

  // Blocks start as tie groups so equal scores share one fitted value,
  // then pool-adjacent-violators merges until the means are monotone.
  struct Block {
    double min_score;
    double sum;
    double weight;
  };
  std::vector<Block> blocks;
  std::size_t i = 0;
  while (i < sorted.size()) {
    std::size_t j = i;
    double sum = 0.0;
    while (j < sorted.size() && sorted[j].score == sorted[i].score) {
      sum += sorted[j].label != 0 ? 1.0 : 0.0;
      ++j;
    }
    blocks.push_back({sorted[i].score, sum, static_cast<double>(j - i)});
    while (blocks.size() >= 2) {
      const Block& prev = blocks[blocks.size() - 2];
      const Block& last = blocks.back();
      if (prev.sum / prev.weight <= last.sum / last.weight) break;
      Block merged{prev.min_score, prev.sum + last.sum,
                   prev.weight + last.weight};
      blocks.pop_back();
      blocks.back() = merged;
    }
    i = j;
  }

  CalibrationMap map;
  map.kind = CalibrationKind::isotonic;
  for (const Block& blk : blocks) {
    map.breakpoints.push_back(blk.min_score);
    map.values.push_back(blk.sum / blk.weight);
  }
  return map;
}

CalibrationMap fit_recalibration(CalibrationKind kind,
                                 const std::vector<ScoredExample>& examples) {
  switch (kind) {
    case CalibrationKind::identity:
      return identity_map();
    case CalibrationKind::platt:
      return fit_platt(examples);
    case CalibrationKind::temperature:
      return fit_temperature(examples);
    case CalibrationKind::isotonic:
      return fit_isotonic(examples);
    case CalibrationKind::beta:
      return fit_beta(examples);
  }
  return identity_map();
}

}  // namespace saferoute
