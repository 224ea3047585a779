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
#include "saferoute/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "saferoute/dataset.hpp"
#include "saferoute/gate.hpp"
#include "saferoute/numeric.hpp"
#include "saferoute/rng.hpp"

namespace saferoute {
namespace {

constexpr std::uint64_t kStreamSplit = 1;
constexpr std::uint64_t kStreamForest = 2;
constexpr std::uint64_t kStreamSurrogate = 3;
constexpr std::uint64_t kStreamRandom = 4;

constexpr char kReportHeader[] =
    "dataset,method,tau,alpha,coverage,violation,ece,auc,pi,threshold,"
    "exceeded_alpha";

std::string trim(const std::string& s) {
  std::size_t first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  std::size_t last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

long parse_long_strict(const std::string& token, const std::string& where) {
  long value = 0;
  auto [ptr, ec] =
      std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size() || token.empty()) {
    throw std::invalid_argument(where + ": cannot parse integer '" + token + "'");
  }
  return value;
}

std::uint64_t parse_u64_strict(const std::string& token,
                               const std::string& where) {
  std::uint64_t value = 0;
  auto [ptr, ec] =
      std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size() || token.empty()) {
    throw std::invalid_argument(where + ": cannot parse seed '" + token + "'");
  }
  return value;
}

template <typename T>
std::vector<T> gather(const std::vector<T>& all,
                      const std::vector<std::size_t>& idx) {
  std::vector<T> out;
  out.reserve(idx.size());
  for (std::size_t i : idx) out.push_back(all[i]);
  return out;
}

std::string fixed6(double v) {
  if (v == 0.0) v = 0.0;  // normalize -0.0
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

std::string opt6(const std::optional<double>& v) {
  return v ? fixed6(*v) : std::string();
}

struct EvalCounts {
  double coverage = 0.0;
  std::optional<double> violation;
};

EvalCounts eval_decisions(const std::vector<Decision>& decisions,
                          const std::vector<int>& labels) {
  long routed = 0;
  long unsafe = 0;
  for (std::size_t i = 0; i < decisions.size(); ++i) {
    if (decisions[i] == Decision::surrogate) {
      ++routed;
      if (labels[i] == 0) ++unsafe;
    }
  }
  EvalCounts counts;
  counts.coverage =
      static_cast<double>(routed) / static_cast<double>(decisions.size());
  if (routed > 0) {
    counts.violation = static_cast<double>(unsafe) / static_cast<double>(routed);
  }
  return counts;
}

bool contains(const std::vector<Method>& methods, Method m) {
  return std::find(methods.begin(), methods.end(), m) != methods.end();
}

std::optional<double> safe_auc(const std::vector<ScoredExample>& examples) {
  try {
    return auc(examples);
  } catch (const degenerate_error&) {
    return std::nullopt;
  }
}

double label_mean(const std::vector<int>& labels) {
  long sum = 0;
  for (int y : labels) sum += y != 0 ? 1 : 0;
  return static_cast<double>(sum) / static_cast<double>(labels.size());
}

// Everything fixed for one (seed, tau) before the alpha sweep.
struct TauContext {
  std::vector<ScoredExample> calib;
  std::vector<ScoredExample> test;
  std::vector<int> test_labels;
  double pi = 0.0;
  std::optional<double> auc_value;
  std::optional<double> ece_value;
};

TauContext make_tau_context(const std::vector<double>& scores,
                            const std::vector<int>& labels,
                            const SplitIndices& split) {
  TauContext ctx;
  ctx.calib.reserve(split.calib.size());
  for (std::size_t i : split.calib) ctx.calib.push_back({scores[i], labels[i]});
  ctx.test.reserve(split.test.size());
  for (std::size_t i : split.test) ctx.test.push_back({scores[i], labels[i]});
  ctx.test_labels = gather(labels, split.test);
  ctx.pi = label_mean(ctx.test_labels);
  ctx.auc_value = safe_auc(ctx.test);
  ctx.ece_value = ece(ctx.test);
  return ctx;
}

ReportRow base_row(const ExperimentConfig& config, Method method,
                   std::optional<double> tau, double alpha,
                   const TauContext& ctx) {
  ReportRow row;
  row.dataset = config.dataset_id;
  row.method = method_name(method);
  row.tau = tau;
  row.alpha = alpha;
  row.ece = ctx.ece_value;
  row.auc = ctx.auc_value;
  row.pi = ctx.pi;
  return row;
}

void finish_row(ReportRow& row) {
  row.exceeded_alpha = row.violation && *row.violation > row.alpha;
}

// Emits the per-method rows for one (tau, alpha) cell. route_test gives
// each non-gate method's decision vector over the test split.
void emit_rows(const ExperimentConfig& config, std::optional<double> tau,
               std::size_t tau_index, std::size_t alpha_index, double alpha,
               const TauContext& ctx, const RoutingPolicy& gate_policy,
               const PolicyEvaluation& gate_eval,
               const std::function<std::optional<EvalCounts>(Method)>& route_test,
               std::uint64_t seed, std::vector<ReportRow>& rows) {
  for (Method method : config.methods) {
    ReportRow row = base_row(config, method, tau, alpha, ctx);
    switch (method) {
      case Method::gate_conformal: {
        row.coverage = gate_eval.coverage;
        row.violation = gate_eval.violation;
        if (gate_policy.routes_nothing()) {
          row.abstained = true;
        } else {
          row.threshold = *gate_policy.threshold;
        }
        break;
      }
      case Method::random_matched: {
        const std::uint64_t stream = derive_seed(
            derive_seed(seed, kStreamRandom),
            tau_index * 1000003ULL + static_cast<std::uint64_t>(alpha_index));
        const std::vector<Decision> decisions = random_matched_route(
            gate_eval.coverage, stream, ctx.test_labels.size());
        const EvalCounts counts = eval_decisions(decisions, ctx.test_labels);
        row.coverage = counts.coverage;
        row.violation = counts.violation;
        break;
      }
      case Method::always_bb: {
        row.coverage = 0.0;
        break;
      }
      case Method::always_cm: {
        row.coverage = 1.0;
        row.violation = 1.0 - ctx.pi;
        break;
      }
      default: {
        const std::optional<EvalCounts> counts = route_test(method);
        if (!counts) continue;  // method undefined for this source
        row.coverage = counts->coverage;
        row.violation = counts->violation;
        break;
      }
    }
    finish_row(row);
    rows.push_back(std::move(row));
  }
}

void run_binormal_seed(const ExperimentConfig& config, std::uint64_t seed,
                       std::vector<ReportRow>& rows) {
  BinormalSpec spec = config.binormal;
  spec.seed = seed;
  BinormalDraw draw = generate(spec, config.binormal_n);
  const SplitIndices split = split_dataset(
      config.binormal_n, config.split_ratios, derive_seed(seed, kStreamSplit));

  std::vector<double> scores(config.binormal_n);
  std::vector<int> labels(config.binormal_n);
  for (std::size_t i = 0; i < draw.examples.size(); ++i) {
    scores[i] = draw.examples[i].score;
    labels[i] = draw.examples[i].label;
  }
  if (config.recalibration != CalibrationKind::identity) {
    std::vector<ScoredExample> valid;
    valid.reserve(split.valid.size());
    for (std::size_t i : split.valid) valid.push_back({scores[i], labels[i]});
    if (both_classes_present(valid)) {
      const CalibrationMap map = fit_recalibration(config.recalibration, valid);
      for (double& s : scores) s = map.apply(s);
    }
  }

  const TauContext ctx = make_tau_context(scores, labels, split);
  const std::vector<int>& test_labels = ctx.test_labels;

  for (std::size_t ai = 0; ai < config.alpha_grid.size(); ++ai) {
    const double alpha = config.alpha_grid[ai];
    const RoutingPolicy policy = select_threshold(ctx.calib, alpha, config.delta);
    const PolicyEvaluation gate_eval = evaluate_policy(policy, ctx.test);

    auto route_test = [&](Method method) -> std::optional<EvalCounts> {
      std::vector<Decision> decisions(ctx.test.size(), Decision::reference);
      switch (method) {
        case Method::naive:
          for (std::size_t i = 0; i < ctx.test.size(); ++i) {
            decisions[i] = naive_route(ctx.test[i].score);
          }
          break;
        case Method::oracle:
          // The binormal label is the safety label itself.
          for (std::size_t i = 0; i < ctx.test.size(); ++i) {
            if (test_labels[i] != 0) decisions[i] = Decision::surrogate;
          }
          break;
        case Method::reg_conformal:
          return std::nullopt;  // needs features and degradations
        default:
          return std::nullopt;
      }
      return eval_decisions(decisions, test_labels);
    };

    emit_rows(config, std::nullopt, 0, ai, alpha, ctx, policy, gate_eval,
              route_test, seed, rows);
  }
}

void run_csv_seed(const ExperimentConfig& config, const Dataset& data,
                  std::uint64_t seed, std::vector<ReportRow>& rows) {
  const std::size_t n = data.size();
  const SplitIndices split =
      split_dataset(n, config.split_ratios, derive_seed(seed, kStreamSplit));

  const std::vector<std::vector<double>>& x = data.features;
  const std::vector<std::vector<double>> train_x = gather(x, split.train);

  std::vector<double> f_pred;
  std::vector<double> g_pred;
  if (data.has_predictions) {
    f_pred = data.f_pred;
    g_pred = data.g_pred;
  } else {
    const std::vector<double> train_y = gather(data.y, split.train);
    ForestConfig forest_config;
    forest_config.num_trees = config.forest_trees;
    forest_config.max_depth = config.forest_max_depth;
    forest_config.min_leaf = config.forest_min_leaf;
    forest_config.seed = derive_seed(seed, kStreamForest);
    const ForestModel forest = fit_forest(train_x, train_y, forest_config);

    const std::uint64_t surrogate_seed = derive_seed(seed, kStreamSurrogate);
    const int depth = select_surrogate_depth(
        train_x, train_y, gather(x, split.valid), gather(data.y, split.valid),
        config.surrogate_depths, config.surrogate_min_leaf, surrogate_seed);
    TreeConfig tree_config;
    tree_config.max_depth = depth;
    tree_config.min_leaf = config.surrogate_min_leaf;
    tree_config.seed = surrogate_seed;
    const TreeModel surrogate = fit_tree(train_x, train_y, tree_config);

    f_pred = forest.predict_all(x);
    g_pred = surrogate.predict_all(x);
  }

  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) {
    d[i] = degradation(data.y[i], f_pred[i], g_pred[i]);
  }

  std::optional<RidgeModel> ridge;
  if (contains(config.methods, Method::reg_conformal)) {
    ridge = fit_ridge(train_x, gather(d, split.train), config.ridge_lambda);
  }

  for (std::size_t ti = 0; ti < config.tau_grid.size(); ++ti) {
    const double tau = config.tau_grid[ti];
    std::vector<int> labels(n);
    for (std::size_t i = 0; i < n; ++i) labels[i] = safety_label(d[i], tau);

    const std::vector<int> train_labels = gather(labels, split.train);
    std::vector<double> scores(n);
    const double train_rate = label_mean(train_labels);
    if (train_rate == 0.0 || train_rate == 1.0) {
      // Degenerate tolerance: the gate cannot be trained, fall back to
      // a constant score so downstream stages still run.
      std::fill(scores.begin(), scores.end(), train_rate);
    } else {
      GateConfig gate_config;
      gate_config.l2_strength = config.gate_l2;
      const GateModel gate = train_gate(train_x, train_labels, gate_config);
      scores = gate.score_all(x);
      if (config.recalibration != CalibrationKind::identity) {
        std::vector<ScoredExample> valid;
        valid.reserve(split.valid.size());
        for (std::size_t i : split.valid) {
          valid.push_back({scores[i], labels[i]});
        }
        if (both_classes_present(valid)) {
          const CalibrationMap map =
              fit_recalibration(config.recalibration, valid);
          for (double& s : scores) s = map.apply(s);
        }
      }
    }

    const TauContext ctx = make_tau_context(scores, labels, split);
    const std::vector<double> calib_d = gather(d, split.calib);
    const std::vector<std::vector<double>> calib_x = gather(x, split.calib);
    const std::vector<std::vector<double>> test_x = gather(x, split.test);
    const std::vector<double> test_d = gather(d, split.test);

    for (std::size_t ai = 0; ai < config.alpha_grid.size(); ++ai) {
      const double alpha = config.alpha_grid[ai];
      const RoutingPolicy policy =
          select_threshold(ctx.calib, alpha, config.delta);
      const PolicyEvaluation gate_eval = evaluate_policy(policy, ctx.test);

      auto route_test = [&](Method method) -> std::optional<EvalCounts> {
        std::vector<Decision> decisions(ctx.test.size(), Decision::reference);
        switch (method) {
          case Method::naive:
            for (std::size_t i = 0; i < ctx.test.size(); ++i) {
              decisions[i] = naive_route(ctx.test[i].score);
            }
            break;
          case Method::oracle:
            for (std::size_t i = 0; i < test_d.size(); ++i) {
              decisions[i] = oracle_route(test_d[i], tau);
            }
            break;
          case Method::reg_conformal: {
            const RegressionConformalPolicy reg = fit_regression_conformal(
                calib_x, calib_d, *ridge, alpha, tau);
            for (std::size_t i = 0; i < test_x.size(); ++i) {
              decisions[i] = regression_route(reg, test_x[i], tau);
            }
            break;
          }
          default:
            return std::nullopt;
        }
        return eval_decisions(decisions, ctx.test_labels);
      };

      emit_rows(config, tau, ti, ai, alpha, ctx, policy, gate_eval, route_test,
                seed, rows);
    }
  }
}

}  // namespace

std::vector<std::size_t> largest_remainder_sizes(
    std::size_t n, const std::vector<double>& ratios) {
  if (ratios.empty()) {
    throw std::invalid_argument("largest_remainder_sizes: empty ratios");
  }
  std::vector<std::size_t> sizes(ratios.size());
  std::vector<double> fractions(ratios.size());
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < ratios.size(); ++i) {
    const double quota = ratios[i] * static_cast<double>(n);
    sizes[i] = static_cast<std::size_t>(std::floor(quota));
    fractions[i] = quota - std::floor(quota);
    assigned += sizes[i];
  }
  std::vector<std::size_t> order(ratios.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return fractions[a] > fractions[b];
  });
  for (std::size_t i = 0; assigned < n; ++i) {
    ++sizes[order[i % order.size()]];
    ++assigned;
  }
  return sizes;
}

SplitIndices split_dataset(std::size_t n, const std::vector<double>& ratios,
                           std::uint64_t seed) {
  if (ratios.size() != 4) {
    throw std::invalid_argument("split_dataset: need exactly four ratios");
  }
  double sum = 0.0;
  for (double r : ratios) {
    if (!(r > 0.0)) {
      throw std::invalid_argument("split_dataset: ratios must be positive");
    }
    sum += r;
  }
  if (std::fabs(sum - 1.0) > 1e-9) {
    throw std::invalid_argument("split_dataset: ratios must sum to 1");
  }

  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  Rng rng(seed);
  rng.shuffle(perm);

  const std::vector<std::size_t> sizes = largest_remainder_sizes(n, ratios);
  SplitIndices split;
  std::size_t offset = 0;
  std::vector<std::size_t>* parts[4] = {&split.train, &split.valid, &split.calib,
                                        &split.test};
  for (int p = 0; p < 4; ++p) {
    parts[p]->assign(perm.begin() + offset, perm.begin() + offset + sizes[p]);
    offset += sizes[p];
  }
  return split;
}

const std::vector<double>& default_alpha_grid() {
  static const std::vector<double> grid = [] {
    std::vector<double> g;
    for (int i = 1; i <= 16; ++i) g.push_back(0.05 * i);
    return g;
  }();
  return grid;
}

void validate(const ExperimentConfig& config) {
  const bool has_csv = !config.dataset_path.empty();
  if (has_csv == config.use_binormal) {
    throw std::invalid_argument(
        "config: need exactly one data source (dataset path or binormal "
        "parameters)");
  }
  if (config.split_ratios.size() != 4) {
    throw std::invalid_argument("config: need exactly four split ratios");
  }
  double sum = 0.0;
  for (double r : config.split_ratios) {
    if (!(r > 0.0)) {
      throw std::invalid_argument("config: split ratios must be positive");
    }
    sum += r;
  }
  if (std::fabs(sum - 1.0) > 1e-9) {
    throw std::invalid_argument("config: split ratios must sum to 1");
  }
  if (!config.use_binormal && config.tau_grid.empty()) {
    throw std::invalid_argument("config: tau grid must be non-empty");
  }
  for (double alpha : config.alpha_grid) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
      throw std::invalid_argument("config: alpha values must be in (0,1)");
    }
  }
  if (!(config.delta > 0.0 && config.delta < 1.0)) {
    throw std::invalid_argument("config: delta must be in (0,1)");
  }
  if (config.seeds.empty()) {
    throw std::invalid_argument("config: need at least one seed");
  }
  if (config.use_binormal) {
    validate(config.binormal);
    if (config.binormal_n < 4) {
      throw std::invalid_argument("config: binormal_n must be at least 4");
    }
  }
  if (config.forest_trees < 1 || config.forest_max_depth < 0 ||
      config.forest_min_leaf < 1 || config.surrogate_min_leaf < 1) {
    throw std::invalid_argument("config: bad model hyperparameters");
  }
  for (int depth : config.surrogate_depths) {
    if (depth < 0) {
      throw std::invalid_argument("config: surrogate depths must be >= 0");
    }
  }
  if (!(config.gate_l2 >= 0.0) || !(config.ridge_lambda >= 0.0)) {
    throw std::invalid_argument("config: regularization must be >= 0");
  }
}

ExperimentConfig parse_experiment_config(std::istream& in) {
  ExperimentConfig config;
  bool saw_ratio = false;
  bool saw_tau = false;
  bool saw_seed = false;

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string s = trim(line);
    if (s.empty() || s[0] == '#') continue;
    const std::string where = "config line " + std::to_string(line_no);
    const std::size_t eq = s.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument(where + ": expected 'key = value'");
    }
    const std::string key = trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw std::invalid_argument(where + ": empty key or value");
    }

    if (key == "dataset") {
      config.dataset_path = value;
    } else if (key == "dataset_id") {
      config.dataset_id = value;
    } else if (key == "binormal_pi") {
      config.binormal.pi = parse_double_strict(value, where);
      config.use_binormal = true;
    } else if (key == "binormal_mu0") {
      config.binormal.mu0 = parse_double_strict(value, where);
      config.use_binormal = true;
    } else if (key == "binormal_mu1") {
      config.binormal.mu1 = parse_double_strict(value, where);
      config.use_binormal = true;
    } else if (key == "binormal_sigma") {
      config.binormal.sigma = parse_double_strict(value, where);
      config.use_binormal = true;
    } else if (key == "binormal_n") {
      config.binormal_n =
          static_cast<std::size_t>(parse_long_strict(value, where));
      config.use_binormal = true;
    } else if (key == "ratio") {
      if (!saw_ratio) {
        config.split_ratios.clear();
        saw_ratio = true;
      }
      config.split_ratios.push_back(parse_double_strict(value, where));
    } else if (key == "tau") {
      if (!saw_tau) {
        config.tau_grid.clear();
        saw_tau = true;
      }
      config.tau_grid.push_back(parse_double_strict(value, where));
    } else if (key == "alpha") {
      config.alpha_grid.push_back(parse_double_strict(value, where));
    } else if (key == "delta") {
      config.delta = parse_double_strict(value, where);
    } else if (key == "method") {
      config.methods.push_back(parse_method(value));
    } else if (key == "recalibrate") {
      config.recalibration = parse_calibration_kind(value);
    } else if (key == "seed") {
      if (!saw_seed) {
        config.seeds.clear();
        saw_seed = true;
      }
      config.seeds.push_back(parse_u64_strict(value, where));
    } else if (key == "forest_trees") {
      config.forest_trees = static_cast<int>(parse_long_strict(value, where));
    } else if (key == "forest_max_depth") {
      config.forest_max_depth =
          static_cast<int>(parse_long_strict(value, where));
    } else if (key == "forest_min_leaf") {
      config.forest_min_leaf = static_cast<int>(parse_long_strict(value, where));
    } else if (key == "surrogate_depth") {
      config.surrogate_depths.push_back(
          static_cast<int>(parse_long_strict(value, where)));
    } else if (key == "surrogate_min_leaf") {
      config.surrogate_min_leaf =
          static_cast<int>(parse_long_strict(value, where));
    } else if (key == "gate_l2") {
      config.gate_l2 = parse_double_strict(value, where);
    } else if (key == "ridge_lambda") {
      config.ridge_lambda = parse_double_strict(value, where);
    } else {
      throw std::invalid_argument(where + ": unknown key '" + key + "'");
    }
  }
  validate(config);
  return config;
}

ExperimentConfig parse_experiment_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("cannot open " + path);
  }
  return parse_experiment_config(in);
}

std::vector<ReportRow> run_pipeline(const ExperimentConfig& config_in) {
  ExperimentConfig config = config_in;
  if (config.alpha_grid.empty()) config.alpha_grid = default_alpha_grid();
  if (config.methods.empty()) config.methods = all_methods();
  if (config.surrogate_depths.empty()) {
    config.surrogate_depths = default_surrogate_depth_grid();
  }
  validate(config);

  std::vector<ReportRow> rows;
  if (config.use_binormal) {
    for (std::uint64_t seed : config.seeds) {
      run_binormal_seed(config, seed, rows);
    }
    return rows;
  }

  const Dataset data = read_dataset_csv_file(config.dataset_path);
  const std::vector<std::size_t> sizes =
      largest_remainder_sizes(data.size(), config.split_ratios);
  for (std::size_t size : sizes) {
    if (size == 0) {
      throw std::invalid_argument(
          "config: dataset too small for the split ratios");
    }
  }
  for (std::uint64_t seed : config.seeds) {
    run_csv_seed(config, data, seed, rows);
  }
  return rows;
}

void write_report_csv(std::ostream& out, const std::vector<ReportRow>& rows) {
  out << kReportHeader << "\n";
  for (const ReportRow& row : rows) {
    if (row.dataset.find(',') != std::string::npos ||
        row.method.find(',') != std::string::npos) {
      throw std::invalid_argument("write_report_csv: comma in identifier");
    }
    out << row.dataset << "," << row.method << "," << opt6(row.tau) << ","
        << fixed6(row.alpha) << "," << fixed6(row.coverage) << ","
        << opt6(row.violation) << "," << opt6(row.ece) << "," << opt6(row.auc)
        << "," << fixed6(row.pi) << ",";
    if (row.abstained) {
      out << "abstain";
    } else {
      out << opt6(row.threshold);
    }
    out << "," << (row.exceeded_alpha ? 1 : 0) << "\n";
  }
}

void write_report_csv_file(const std::string& path,
                           const std::vector<ReportRow>& rows) {
  std::ofstream out(path);
  if (!out) {
    throw std::invalid_argument("cannot open " + path);
  }
  write_report_csv(out, rows);
}

std::vector<ReportRow> read_report_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || trim(line) != kReportHeader) {
    throw std::invalid_argument("report: bad header");
  }
  std::vector<ReportRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const std::vector<std::string> fields = split_csv_line(line);
    const std::string where = "report line " + std::to_string(line_no);
    if (fields.size() != 11) {
      throw std::invalid_argument(where + ": expected 11 fields");
    }
    auto opt_field = [&](const std::string& f) -> std::optional<double> {
      if (f.empty()) return std::nullopt;
      return parse_double_strict(f, where);
    };
    ReportRow row;
    row.dataset = fields[0];
    row.method = fields[1];
    row.tau = opt_field(fields[2]);
    row.alpha = parse_double_strict(fields[3], where);
    row.coverage = parse_double_strict(fields[4], where);
    row.violation = opt_field(fields[5]);
    row.ece = opt_field(fields[6]);
    row.auc = opt_field(fields[7]);
    row.pi = parse_double_strict(fields[8], where);
    if (fields[9] == "abstain") {
      row.abstained = true;
    } else {
      row.threshold = opt_field(fields[9]);
    }
    if (fields[10] == "0") {
      row.exceeded_alpha = false;
    } else if (fields[10] == "1") {
      row.exceeded_alpha = true;
    } else {
      throw std::invalid_argument(where + ": exceeded_alpha must be 0 or 1");
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<ReportRow> read_report_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("cannot open " + path);
  }
  return read_report_csv(in);
}

std::string format_report_table(const std::vector<ReportRow>& rows) {
  std::vector<std::vector<std::string>> cells;
  cells.push_back(split_csv_line(kReportHeader));
  for (const ReportRow& row : rows) {
    std::ostringstream line;
    write_report_csv(line, {row});
    std::string text = line.str();
    const std::size_t newline = text.find('\n');
    cells.push_back(split_csv_line(text.substr(newline + 1,
                                               text.size() - newline - 2)));
  }
  std::vector<std::size_t> widths(cells.front().size(), 0);
  for (const auto& row : cells) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      widths[c] = std::max(widths[c], row[c].size());
    }
  }
  std::ostringstream out;
  for (const auto& row : cells) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      out << row[c] << std::string(widths[c] - row[c].size(), ' ');
      out << (c + 1 < row.size() ? "  " : "");
    }
    out << "\n";
  }
  return out.str();
}

ExceedanceSummary pooled_exceedance(const std::vector<ReportRow>& rows,
                                    Method method) {
  const std::string name = method_name(method);
  ExceedanceSummary summary;
  for (const ReportRow& row : rows) {
    if (row.method != name || !(row.coverage > 0.0)) continue;
    ++summary.eligible;
    if (row.violation && *row.violation > row.alpha) ++summary.exceeded;
  }
  if (summary.eligible > 0) {
    summary.fraction = static_cast<double>(summary.exceeded) /
                       static_cast<double>(summary.eligible);
  }
  return summary;
}

ExceedanceSummary guarantee_sweep(const std::vector<ReportRow>& rows,
                                  Method method, double alpha) {
  std::vector<ReportRow> filtered;
  for (const ReportRow& row : rows) {
    if (std::fabs(row.alpha - alpha) <= 1e-9) filtered.push_back(row);
  }
  return pooled_exceedance(filtered, method);
}

WilcoxonResult wilcoxon_signed_rank(const std::vector<double>& differences) {
  std::vector<double> nonzero;
  for (double d : differences) {
    if (d != 0.0) nonzero.push_back(d);
  }
  if (nonzero.empty()) {
    throw degenerate_error("wilcoxon_signed_rank: all differences are zero");
  }
  const std::size_t n = nonzero.size();

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::fabs(nonzero[a]) < std::fabs(nonzero[b]);
  });

  // Doubled midranks stay integral under ties.
  std::vector<long> rank2(n, 0);
  std::vector<std::size_t> tie_sizes;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n &&
           std::fabs(nonzero[order[j + 1]]) == std::fabs(nonzero[order[i]])) {
      ++j;
    }
    const long midrank2 = static_cast<long>(i + j) + 2;
    for (std::size_t k = i; k <= j; ++k) rank2[order[k]] = midrank2;
    tie_sizes.push_back(j - i + 1);
    i = j + 1;
  }

  long w2 = 0;
  for (std::size_t k = 0; k < n; ++k) {
    if (nonzero[k] > 0.0) w2 += rank2[k];
  }

  WilcoxonResult result;
  result.statistic = static_cast<double>(w2) / 2.0;

  if (n <= 12) {
    result.exact = true;
    const std::uint32_t total = 1u << n;
    long count_le = 0;
    long count_ge = 0;
    for (std::uint32_t mask = 0; mask < total; ++mask) {
      long sum = 0;
      for (std::size_t k = 0; k < n; ++k) {
        if (mask & (1u << k)) sum += rank2[k];
      }
      if (sum <= w2) ++count_le;
      if (sum >= w2) ++count_ge;
    }
    const double tail =
        static_cast<double>(std::min(count_le, count_ge)) / total;
    result.p_two_sided = std::min(1.0, 2.0 * tail);
    return result;
  }

  const double nn = static_cast<double>(n);
  const double mean2 = nn * (nn + 1.0) / 2.0;
  double var2 = nn * (nn + 1.0) * (2.0 * nn + 1.0) / 6.0;
  for (std::size_t t : tie_sizes) {
    const double tt = static_cast<double>(t);
    var2 -= (tt * tt * tt - tt) / 12.0;
  }
  const double sd2 = std::sqrt(var2);
  const double delta = static_cast<double>(w2) - mean2;
  // Continuity correction of half a rank (one doubled-rank unit).
  const double z = std::max(0.0, std::fabs(delta) - 1.0) / sd2;
  result.p_two_sided = std::min(1.0, 2.0 * normal_sf(z));
  return result;
}

McGuaranteeResult mc_guarantee(const BinormalSpec& spec,
                               std::size_t calibration_n, double alpha,
                               double delta, long trials, std::uint64_t seed) {
  validate(spec);
  if (calibration_n == 0 || trials < 1) {
    throw std::invalid_argument("mc_guarantee: need positive sizes");
  }
  McGuaranteeResult result;
  result.trials = trials;
  for (long trial = 0; trial < trials; ++trial) {
    BinormalSpec draw_spec = spec;
    draw_spec.seed = derive_seed(seed, static_cast<std::uint64_t>(trial));
    const BinormalDraw draw = generate(draw_spec, calibration_n);
    const RoutingPolicy policy = select_threshold(draw.examples, alpha, delta);
    if (policy.routes_nothing()) {
      ++result.abstained;
    } else if (true_violation(spec, *policy.threshold) > alpha) {
      ++result.exceeded;
    }
  }
  result.exceedance_fraction =
      static_cast<double>(result.exceeded) / static_cast<double>(result.trials);
  return result;
}

}  // namespace saferoute
