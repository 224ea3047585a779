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
#include "saferoute/dataset.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace saferoute {
namespace {

std::string trim(const std::string& s) {
  std::size_t first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  std::size_t last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::ifstream open_or_throw(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("cannot open " + path);
  }
  return in;
}

void expect_feature_names(const std::vector<std::string>& header,
                          std::size_t start) {
  for (std::size_t j = start; j < header.size(); ++j) {
    const std::string expected = "x" + std::to_string(j - start + 1);
    if (header[j] != expected) {
      throw std::invalid_argument("dataset header: expected column '" +
                                  expected + "', found '" + header[j] + "'");
    }
  }
}

}  // namespace

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(trim(field));
  if (!line.empty() && line.back() == ',') fields.push_back("");
  return fields;
}

double parse_double_strict(const std::string& token, const std::string& where) {
  double value = 0.0;
  const char* begin = token.data();
  const char* end = begin + token.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end || token.empty()) {
    throw std::invalid_argument(where + ": cannot parse number '" + token + "'");
  }
  return value;
}

std::string format_double_roundtrip(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

Dataset read_dataset_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) {
    throw std::invalid_argument("dataset: empty file");
  }
  const std::vector<std::string> header = split_csv_line(line);
  if (header.empty() || header[0] != "y") {
    throw std::invalid_argument("dataset header: first column must be 'y'");
  }

  Dataset data;
  std::size_t feature_start = 1;
  if (header.size() >= 3 && header[1] == "f_pred" && header[2] == "g_pred") {
    data.has_predictions = true;
    feature_start = 3;
  }
  expect_feature_names(header, feature_start);
  const std::size_t d = header.size() - feature_start;
  if (d == 0) {
    throw std::invalid_argument("dataset header: no feature columns");
  }

  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const std::vector<std::string> fields = split_csv_line(line);
    if (fields.size() != header.size()) {
      throw std::invalid_argument("dataset line " + std::to_string(line_no) +
                                  ": expected " + std::to_string(header.size()) +
                                  " fields, found " +
                                  std::to_string(fields.size()));
    }
    const std::string where = "dataset line " + std::to_string(line_no);
    data.y.push_back(parse_double_strict(fields[0], where));
    if (data.has_predictions) {
      data.f_pred.push_back(parse_double_strict(fields[1], where));
      data.g_pred.push_back(parse_double_strict(fields[2], where));
    }
    std::vector<double> row(d);
    for (std::size_t j = 0; j < d; ++j) {
      row[j] = parse_double_strict(fields[feature_start + j], where);
    }
    data.features.push_back(std::move(row));
  }
  if (data.y.empty()) {
    throw std::invalid_argument("dataset: no data rows");
  }
  return data;
}

Dataset read_dataset_csv_file(const std::string& path) {
  std::ifstream in = open_or_throw(path);
  return read_dataset_csv(in);
}

void write_dataset_csv(std::ostream& out, const Dataset& data) {
  const std::size_t d = data.features.empty() ? 0 : data.features.front().size();
  out << "y";
  if (data.has_predictions) out << ",f_pred,g_pred";
  for (std::size_t j = 1; j <= d; ++j) out << ",x" << j;
  out << "\n";
  for (std::size_t i = 0; i < data.size(); ++i) {
    out << format_double_roundtrip(data.y[i]);
    if (data.has_predictions) {
      out << "," << format_double_roundtrip(data.f_pred[i]) << ","
          << format_double_roundtrip(data.g_pred[i]);
    }
    for (double v : data.features[i]) out << "," << format_double_roundtrip(v);
    out << "\n";
  }
}

void write_dataset_csv_file(const std::string& path, const Dataset& data) {
  std::ofstream out(path);
  if (!out) {
    throw std::invalid_argument("cannot open " + path);
  }
  write_dataset_csv(out, data);
}

std::vector<ScoredExample> read_scores_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) {
    throw std::invalid_argument("scores: empty file");
  }
  const std::vector<std::string> header = split_csv_line(line);
  if (header.size() != 2 || header[0] != "s" || header[1] != "Y") {
    throw std::invalid_argument("scores header: expected 's,Y'");
  }
  std::vector<ScoredExample> examples;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const std::vector<std::string> fields = split_csv_line(line);
    const std::string where = "scores line " + std::to_string(line_no);
    if (fields.size() != 2) {
      throw std::invalid_argument(where + ": expected 2 fields");
    }
    ScoredExample e;
    e.score = parse_double_strict(fields[0], where);
    if (fields[1] == "0") {
      e.label = 0;
    } else if (fields[1] == "1") {
      e.label = 1;
    } else {
      throw std::invalid_argument(where + ": label must be 0 or 1, found '" +
                                  fields[1] + "'");
    }
    examples.push_back(e);
  }
  if (examples.empty()) {
    throw std::invalid_argument("scores: no data rows");
  }
  return examples;
}

std::vector<ScoredExample> read_scores_csv_file(const std::string& path) {
  std::ifstream in = open_or_throw(path);
  return read_scores_csv(in);
}

void write_scores_csv(std::ostream& out,
                      const std::vector<ScoredExample>& examples) {
  out << "s,Y\n";
  for (const ScoredExample& e : examples) {
    out << format_double_roundtrip(e.score) << "," << e.label << "\n";
  }
}

void write_scores_csv_file(const std::string& path,
                           const std::vector<ScoredExample>& examples) {
  std::ofstream out(path);
  if (!out) {
    throw std::invalid_argument("cannot open " + path);
  }
  write_scores_csv(out, examples);
}

}  // namespace saferoute
