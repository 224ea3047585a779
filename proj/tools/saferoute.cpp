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
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "saferoute/baselines.hpp"
#include "saferoute/conformal.hpp"
#include "saferoute/dataset.hpp"
#include "saferoute/feasibility.hpp"
#include "saferoute/harness.hpp"
#include "saferoute/numeric.hpp"
#include "saferoute/synthetic.hpp"

namespace {

using namespace saferoute;

std::uint64_t env_default_seed() {
  const char* env = std::getenv("SAFEROUTE_SEED");
  if (env == nullptr) return 1;
  const std::string token(env);
  std::uint64_t value = 0;
  auto [ptr, ec] =
      std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size() || token.empty()) {
    throw std::invalid_argument("SAFEROUTE_SEED: cannot parse '" + token + "'");
  }
  return value;
}

std::uint64_t resolve_seed(const CLI::Option* seed_option,
                           std::uint64_t cli_value) {
  if (seed_option != nullptr && seed_option->count() > 0) return cli_value;
  return env_default_seed();
}

template <typename Fn>
void with_output(const std::string& path, Fn&& fn) {
  if (path == "-") {
    fn(std::cout);
    return;
  }
  std::ofstream file(path);
  if (!file) throw std::invalid_argument("cannot open " + path);
  fn(file);
}

// Accepts either the labeled scores schema or a bare score column.
std::vector<double> read_score_column(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path);
  std::string header;
  if (!std::getline(in, header)) {
    throw std::invalid_argument(path + ": empty file");
  }
  if (!header.empty() && header.back() == '\r') header.pop_back();
  if (header == "s,Y") {
    in.clear();
    in.seekg(0);
    const std::vector<ScoredExample> examples = read_scores_csv(in);
    std::vector<double> scores;
    scores.reserve(examples.size());
    for (const ScoredExample& e : examples) scores.push_back(e.score);
    return scores;
  }
  if (header != "s") {
    throw std::invalid_argument(path + ": expected header 's' or 's,Y'");
  }
  std::vector<double> scores;
  std::string line;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    scores.push_back(parse_double_strict(
        line, path + " line " + std::to_string(line_no)));
  }
  return scores;
}

void print_policy_summary(std::ostream& out, const RoutingPolicy& policy) {
  if (policy.routes_nothing()) {
    out << "threshold=abstain\n";
  } else {
    out << "threshold=" << format_double_roundtrip(*policy.threshold) << "\n";
  }
  out << "alpha=" << format_double_roundtrip(policy.alpha) << "\n"
      << "delta=" << format_double_roundtrip(policy.delta) << "\n"
      << "routed_calibration=" << policy.routed_count << "\n"
      << "unsafe_calibration=" << policy.unsafe_count << "\n"
      << "ucb=" << format_double_roundtrip(policy.ucb_at_selection) << "\n";
}

void add_feasibility_command(CLI::App& app) {
  auto* cmd = app.add_subcommand(
      "feasibility", "Critical ratio and gate-AUC levels for a workload");
  auto pis = std::make_shared<std::vector<double>>();
  auto alphas = std::make_shared<std::vector<double>>();
  auto auc_value = std::make_shared<double>(0.0);
  auto grid = std::make_shared<bool>(false);
  auto out = std::make_shared<std::string>("-");
  cmd->add_option("--pi", *pis, "Safe fraction(s) in (0,1)");
  cmd->add_option("--alpha", *alphas, "Risk budget(s) in (0,1)");
  auto* auc_opt =
      cmd->add_option("--auc", *auc_value, "Gate ROC AUC to check, in [0,1]");
  cmd->add_flag("--grid", *grid, "Emit a pi x alpha CSV of critical AUC levels");
  cmd->add_option("--out", *out, "Output path, - for stdout");
  cmd->callback([=]() {
    if (*grid) {
      std::vector<double> pi_grid = *pis;
      std::vector<double> alpha_grid = *alphas;
      if (pi_grid.empty()) {
        for (int i = 1; i <= 49; ++i) pi_grid.push_back(0.02 * i);
      }
      if (alpha_grid.empty()) alpha_grid = {0.05, 0.10, 0.20, 0.30, 0.50};
      with_output(*out, [&](std::ostream& stream) {
        write_feasibility_grid_csv(stream, pi_grid, alpha_grid);
      });
      return;
    }
    if (pis->size() != 1 || alphas->size() != 1) {
      throw std::invalid_argument(
          "feasibility: need exactly one --pi and one --alpha (or --grid)");
    }
    std::optional<double> auc;
    if (auc_opt->count() > 0) auc = *auc_value;
    const FeasibilityReport report =
        make_feasibility_report(pis->front(), alphas->front(), auc);
    with_output(*out, [&](std::ostream& stream) {
      write_feasibility_report(stream, report);
    });
  });
}

void add_simulate_command(CLI::App& app) {
  auto* cmd = app.add_subcommand(
      "simulate", "Draw binormal gate scores and safety labels as CSV");
  auto pi = std::make_shared<double>(0.7);
  auto mu0 = std::make_shared<double>(0.0);
  auto mu1 = std::make_shared<double>(1.0);
  auto sigma = std::make_shared<double>(1.0);
  auto auc = std::make_shared<double>(0.75);
  auto n = std::make_shared<std::size_t>(2000);
  auto seed = std::make_shared<std::uint64_t>(1);
  auto out = std::make_shared<std::string>("-");
  cmd->add_option("--pi", *pi, "Safe fraction in (0,1)");
  auto* mu0_opt = cmd->add_option("--mu0", *mu0, "Unsafe-class latent mean");
  auto* mu1_opt = cmd->add_option("--mu1", *mu1, "Safe-class latent mean");
  cmd->add_option("--sigma", *sigma, "Latent standard deviation");
  auto* auc_opt = cmd->add_option(
      "--auc", *auc, "Choose latent means to hit this score AUC");
  auc_opt->excludes(mu0_opt);
  auc_opt->excludes(mu1_opt);
  cmd->add_option("-n,--n", *n, "Number of examples");
  auto* seed_opt = cmd->add_option("--seed", *seed, "RNG seed");
  cmd->add_option("--out", *out, "Output path, - for stdout");
  cmd->callback([=]() {
    BinormalSpec spec;
    const std::uint64_t resolved = resolve_seed(seed_opt, *seed);
    if (auc_opt->count() > 0) {
      spec = binormal_from_auc(*pi, *auc, *sigma, resolved);
    } else {
      spec.pi = *pi;
      spec.mu0 = *mu0;
      spec.mu1 = *mu1;
      spec.sigma = *sigma;
      spec.seed = resolved;
    }
    const BinormalDraw draw = generate(spec, *n);
    with_output(*out, [&](std::ostream& stream) {
      write_scores_csv(stream, draw.examples);
    });
  });
}

void add_calibrate_command(CLI::App& app) {
  auto* cmd = app.add_subcommand(
      "calibrate", "Select a routing threshold from labeled scores");
  auto scores = std::make_shared<std::string>();
  auto alpha = std::make_shared<double>(0.0);
  auto delta = std::make_shared<double>(0.1);
  auto out = std::make_shared<std::string>("-");
  cmd->add_option("--scores", *scores, "Calibration CSV with header s,Y")
      ->required();
  cmd->add_option("--alpha", *alpha, "Risk budget in (0,1)")->required();
  cmd->add_option("--delta", *delta, "Failure probability in (0,1)");
  cmd->add_option("--out", *out, "Policy file path, - for stdout");
  cmd->callback([=]() {
    const std::vector<ScoredExample> calibration =
        read_scores_csv_file(*scores);
    const RoutingPolicy policy = select_threshold(calibration, *alpha, *delta);
    with_output(*out, [&](std::ostream& stream) {
      save_policy(stream, policy);
    });
    if (*out != "-") print_policy_summary(std::cout, policy);
  });
}

void add_route_command(CLI::App& app) {
  auto* cmd = app.add_subcommand(
      "route", "Apply a policy to scores, emitting per-row decisions");
  auto policy_path = std::make_shared<std::string>();
  auto scores_path = std::make_shared<std::string>();
  auto out = std::make_shared<std::string>("-");
  cmd->add_option("--policy", *policy_path, "Policy file from calibrate")
      ->required();
  cmd->add_option("--scores", *scores_path, "CSV with header s or s,Y")
      ->required();
  cmd->add_option("--out", *out, "Output path, - for stdout");
  cmd->callback([=]() {
    const RoutingPolicy policy = load_policy_file(*policy_path);
    const std::vector<double> scores = read_score_column(*scores_path);
    with_output(*out, [&](std::ostream& stream) {
      stream << "s,decision\n";
      for (double s : scores) {
        const Decision decision = route(policy, s);
        stream << format_double_roundtrip(s) << ","
               << (decision == Decision::surrogate ? "surrogate" : "reference")
               << "\n";
      }
    });
  });
}

void add_evaluate_command(CLI::App& app) {
  auto* cmd = app.add_subcommand(
      "evaluate", "Coverage and routed violation of a policy on labeled scores");
  auto policy_path = std::make_shared<std::string>();
  auto scores_path = std::make_shared<std::string>();
  auto out = std::make_shared<std::string>("-");
  cmd->add_option("--policy", *policy_path, "Policy file from calibrate")
      ->required();
  cmd->add_option("--scores", *scores_path, "Test CSV with header s,Y")
      ->required();
  cmd->add_option("--out", *out, "Output path, - for stdout");
  cmd->callback([=]() {
    const RoutingPolicy policy = load_policy_file(*policy_path);
    const std::vector<ScoredExample> test = read_scores_csv_file(*scores_path);
    const PolicyEvaluation eval = evaluate_policy(policy, test);
    with_output(*out, [&](std::ostream& stream) {
      print_policy_summary(stream, policy);
      stream << "coverage=" << format_double_roundtrip(eval.coverage) << "\n";
      if (eval.violation) {
        stream << "violation=" << format_double_roundtrip(*eval.violation)
               << "\n";
      } else {
        stream << "violation=none\n";
      }
      stream << "routed=" << eval.routed_count << "\n"
             << "total=" << eval.total_count << "\n";
    });
  });
}

void add_pipeline_command(CLI::App& app) {
  auto* cmd = app.add_subcommand(
      "pipeline", "Run the full routing experiment described by a config file");
  auto config_path = std::make_shared<std::string>();
  auto out = std::make_shared<std::string>("-");
  auto table = std::make_shared<bool>(false);
  cmd->add_option("--config", *config_path, "Flat key = value config file")
      ->required();
  cmd->add_option("--out", *out, "Report path, - for stdout");
  cmd->add_flag("--table", *table, "Aligned text table instead of CSV");
  cmd->callback([=]() {
    const ExperimentConfig config = parse_experiment_config_file(*config_path);
    const std::vector<ReportRow> rows = run_pipeline(config);
    with_output(*out, [&](std::ostream& stream) {
      if (*table) {
        stream << format_report_table(rows);
      } else {
        write_report_csv(stream, rows);
      }
    });
  });
}

void add_mc_guarantee_command(CLI::App& app) {
  auto* cmd = app.add_subcommand(
      "mc-guarantee",
      "Monte Carlo check of the selection guarantee on the binormal oracle");
  auto pi = std::make_shared<double>(0.7);
  auto mu0 = std::make_shared<double>(0.0);
  auto mu1 = std::make_shared<double>(1.0);
  auto sigma = std::make_shared<double>(1.0);
  auto auc = std::make_shared<double>(0.75);
  auto n = std::make_shared<std::size_t>(300);
  auto alpha = std::make_shared<double>(0.0);
  auto delta = std::make_shared<double>(0.1);
  auto trials = std::make_shared<long>(2000);
  auto seed = std::make_shared<std::uint64_t>(1);
  cmd->add_option("--pi", *pi, "Safe fraction in (0,1)");
  auto* mu0_opt = cmd->add_option("--mu0", *mu0, "Unsafe-class latent mean");
  auto* mu1_opt = cmd->add_option("--mu1", *mu1, "Safe-class latent mean");
  cmd->add_option("--sigma", *sigma, "Latent standard deviation");
  auto* auc_opt = cmd->add_option(
      "--auc", *auc, "Choose latent means to hit this score AUC");
  auc_opt->excludes(mu0_opt);
  auc_opt->excludes(mu1_opt);
  cmd->add_option("-n,--n", *n, "Calibration set size per trial");
  cmd->add_option("--alpha", *alpha, "Risk budget in (0,1)")->required();
  cmd->add_option("--delta", *delta, "Failure probability in (0,1)");
  cmd->add_option("--trials", *trials, "Number of calibration draws");
  auto* seed_opt = cmd->add_option("--seed", *seed, "RNG seed");
  cmd->callback([=]() {
    BinormalSpec spec;
    const std::uint64_t resolved = resolve_seed(seed_opt, *seed);
    if (auc_opt->count() > 0) {
      spec = binormal_from_auc(*pi, *auc, *sigma, resolved);
    } else {
      spec.pi = *pi;
      spec.mu0 = *mu0;
      spec.mu1 = *mu1;
      spec.sigma = *sigma;
    }
    const McGuaranteeResult result =
        mc_guarantee(spec, *n, *alpha, *delta, *trials, resolved);
    std::cout << "trials=" << result.trials << "\n"
              << "exceeded=" << result.exceeded << "\n"
              << "abstained=" << result.abstained << "\n"
              << "exceedance="
              << format_double_roundtrip(result.exceedance_fraction) << "\n";
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Risk-controlled routing between a surrogate and a reference model"};
  app.require_subcommand(1);
  add_feasibility_command(app);
  add_simulate_command(app);
  add_calibrate_command(app);
  add_route_command(app);
  add_evaluate_command(app);
  add_pipeline_command(app);
  add_mc_guarantee_command(app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const saferoute::degenerate_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
