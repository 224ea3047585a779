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

// Regenerates the bundled synthetic regression dataset. The target mixes
// a multiplicative interaction on one half of the input space with a
// step function on the other, so a deep ensemble beats a shallow tree by
// a margin that depends on where the input lands. x4 duplicates |x2| and
// x5, x6 are pure noise columns.
//
// Usage: make_synthetic [out.csv] [rows] [seed]

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <string>

#include "saferoute/dataset.hpp"
#include "saferoute/rng.hpp"

int main(int argc, char** argv) {
  const std::string path = argc > 1 ? argv[1] : "data/synthetic_2000.csv";
  const long rows = argc > 2 ? std::atol(argv[2]) : 2000;
  const std::uint64_t seed = argc > 3 ? std::strtoull(argv[3], nullptr, 10) : 7;
  if (rows < 1) {
    std::fprintf(stderr, "make_synthetic: rows must be positive\n");
    return 2;
  }

  saferoute::Rng rng(seed);
  saferoute::Dataset data;
  data.y.reserve(rows);
  data.features.reserve(rows);
  for (long i = 0; i < rows; ++i) {
    const double u1 = rng.uniform(-1.0, 1.0);
    const double u2 = rng.uniform(-1.0, 1.0);
    const double u3 = rng.uniform(-1.0, 1.0);
    const double u4 = rng.uniform(-1.0, 1.0);
    const double u5 = rng.uniform(-1.0, 1.0);
    const double signal =
        u1 > 0.0 ? 8.0 * u1 * u2 : (u2 >= 0.0 ? 3.0 : -3.0);
    const double y = signal + 2.0 * u3 + 1.2 * rng.normal();
    data.y.push_back(y);
    data.features.push_back({u1, u2, std::fabs(u2), u3, u4, u5});
  }

  try {
    saferoute::write_dataset_csv_file(path, data);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "make_synthetic: %s\n", e.what());
    return 1;
  }
  std::printf("wrote %ld rows to %s (seed %llu)\n", rows, path.c_str(),
              static_cast<unsigned long long>(seed));
  return 0;
}
