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

#include <iosfwd>
#include <string>
#include <vector>

#include "saferoute/scored.hpp"

namespace saferoute {

// Tabular regression data. Schema A carries targets and features only
// (header y,x1..xd); schema B additionally carries precomputed model
// outputs (header y,f_pred,g_pred,x1..xd) so the pipeline can skip
// model fitting.
struct Dataset {
  bool has_predictions = false;
  std::vector<double> y;
  std::vector<double> f_pred;
  std::vector<double> g_pred;
  std::vector<std::vector<double>> features;

  std::size_t size() const { return y.size(); }
};

Dataset read_dataset_csv(std::istream& in);
Dataset read_dataset_csv_file(const std::string& path);
void write_dataset_csv(std::ostream& out, const Dataset& data);
void write_dataset_csv_file(const std::string& path, const Dataset& data);

// Score/label pairs, header s,Y.
std::vector<ScoredExample> read_scores_csv(std::istream& in);
std::vector<ScoredExample> read_scores_csv_file(const std::string& path);
void write_scores_csv(std::ostream& out,
                      const std::vector<ScoredExample>& examples);
void write_scores_csv_file(const std::string& path,
                           const std::vector<ScoredExample>& examples);

// Shared CSV plumbing, exposed for the report reader.
std::vector<std::string> split_csv_line(const std::string& line);
double parse_double_strict(const std::string& token, const std::string& where);
std::string format_double_roundtrip(double value);

}  // namespace saferoute

