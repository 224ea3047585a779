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
#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "saferoute/exact_binomial.hpp"
#include "saferoute/rng.hpp"

using namespace saferoute;

TEST_CASE("incomplete beta matches closed forms") {
  // I_x(1, 1) = x.
  for (double x : {0.0, 0.1, 0.37, 0.5, 0.93, 1.0}) {
    CHECK(incomplete_beta_ratio(x, 1.0, 1.0) == doctest::Approx(x).epsilon(1e-13));
  }
  // I_x(a, 1) = x^a and I_x(1, b) = 1 - (1-x)^b.
  for (double x : {0.05, 0.3, 0.71, 0.99}) {
    for (double s : {1.0, 2.0, 3.5, 10.0}) {
      CHECK(incomplete_beta_ratio(x, s, 1.0) ==
            doctest::Approx(std::pow(x, s)).epsilon(1e-12));
      CHECK(incomplete_beta_ratio(x, 1.0, s) ==
            doctest::Approx(1.0 - std::pow(1.0 - x, s)).epsilon(1e-12));
    }
  }
  // Symmetry I_x(a, b) = 1 - I_{1-x}(b, a).
  for (double x : {0.12, 0.4, 0.5, 0.83}) {
    CHECK(incomplete_beta_ratio(x, 3.0, 7.0) ==
          doctest::Approx(1.0 - incomplete_beta_ratio(1.0 - x, 7.0, 3.0))
              .epsilon(1e-12));
  }
  // Beta(2, 2): I_x = x^2 (3 - 2x).
  CHECK(incomplete_beta_ratio(0.3, 2.0, 2.0) ==
        doctest::Approx(0.09 * (3.0 - 0.6)).epsilon(1e-12));
}

TEST_CASE("incomplete beta is monotone in x") {
  double prev = 0.0;
  for (int i = 1; i <= 40; ++i) {
    const double x = i / 40.0;
    const double v = incomplete_beta_ratio(x, 2.5, 6.0);
    CHECK(v >= prev);
    prev = v;
  }
  CHECK(prev == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("beta quantile inverts the cdf") {
  for (double p : {0.001, 0.05, 0.25, 0.5, 0.75, 0.9, 0.999}) {
    for (double a : {0.5, 1.0, 3.0, 12.0}) {
      for (double b : {0.5, 1.0, 4.0, 40.0}) {
        const double x = beta_quantile(p, a, b);
        CHECK(incomplete_beta_ratio(x, a, b) == doctest::Approx(p).epsilon(1e-8));
      }
    }
  }
  // Beta(1, b): quantile(p) = 1 - (1-p)^(1/b).
  CHECK(beta_quantile(0.9, 1.0, 300.0) ==
        doctest::Approx(1.0 - std::pow(0.1, 1.0 / 300.0)).epsilon(1e-10));
  // Beta(a, 1): quantile(p) = p^(1/a).
  CHECK(beta_quantile(0.3, 5.0, 1.0) ==
        doctest::Approx(std::pow(0.3, 0.2)).epsilon(1e-10));
  CHECK(beta_quantile(0.0, 2.0, 3.0) == 0.0);
  CHECK(beta_quantile(1.0, 2.0, 3.0) == 1.0);
}

TEST_CASE("cp upper bound closed forms and edges") {
  // k = n is exactly 1.
  CHECK(cp_upper_bound(7, 7, 0.1) == 1.0);
  CHECK(cp_upper_bound(0, 1, 0.5) == doctest::Approx(0.5).epsilon(1e-10));
  // k = 0: ucb = 1 - delta^(1/n).
  for (std::int64_t n : {10, 50, 300}) {
    for (double delta : {0.05, 0.1, 0.5}) {
      CHECK(cp_upper_bound(0, n, delta) ==
            doctest::Approx(1.0 - std::pow(delta, 1.0 / n)).epsilon(1e-10));
    }
  }
  CHECK(cp_upper_bound(0, 300, 0.1) == doctest::Approx(0.0076449).epsilon(1e-4));
}

TEST_CASE("cp upper bound monotonicity") {
  for (std::int64_t k = 0; k < 20; ++k) {
    CHECK(cp_upper_bound(k, 20, 0.1) < cp_upper_bound(k + 1, 20, 0.1));
    CHECK(cp_upper_bound(k, 20, 0.1) >
          static_cast<double>(k) / 20.0);  // strictly above the MLE
  }
  for (std::int64_t n : {10, 20, 40, 80}) {
    CHECK(cp_upper_bound(3, 2 * n, 0.1) < cp_upper_bound(3, n, 0.1));
  }
  CHECK(cp_upper_bound(5, 50, 0.2) < cp_upper_bound(5, 50, 0.1));
}

TEST_CASE("cp upper bound rejects bad arguments") {
  CHECK_THROWS_AS(cp_upper_bound(-1, 10, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(cp_upper_bound(11, 10, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(cp_upper_bound(0, 0, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(cp_upper_bound(0, 10, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(cp_upper_bound(0, 10, 1.0), std::invalid_argument);
}

TEST_CASE("cp upper bound has at least nominal coverage") {
  // Draw K ~ Binomial(n, p) and check how often p > ucb(K, n). The
  // exact interval guarantees this happens with probability <= delta.
  Rng rng(20260819);
  const double delta = 0.1;
  for (double p : {0.05, 0.15, 0.4}) {
    for (std::int64_t n : {25, 120}) {
      int misses = 0;
      const int trials = 2000;
      for (int t = 0; t < trials; ++t) {
        std::int64_t k = 0;
        for (std::int64_t i = 0; i < n; ++i) {
          if (rng.bernoulli(p)) ++k;
        }
        if (p > cp_upper_bound(k, n, delta)) ++misses;
      }
      CHECK(static_cast<double>(misses) / trials <= delta + 0.025);
    }
  }
}

TEST_CASE("minimum calibration size") {
  CHECK(min_calibration_size(0.2, 0.1) == 11);
  CHECK(min_calibration_size(0.05, 0.1) == 45);
  // Defining property: the size works and one fewer does not.
  for (double alpha : {0.02, 0.1, 0.25, 0.5}) {
    for (double delta : {0.01, 0.1, 0.3}) {
      const std::int64_t n = min_calibration_size(alpha, delta);
      CHECK(cp_upper_bound(0, n, delta) <= alpha + 1e-12);
      if (n > 1) {
        CHECK(cp_upper_bound(0, n - 1, delta) > alpha);
      }
    }
  }
  CHECK_THROWS_AS(min_calibration_size(0.0, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(min_calibration_size(0.2, 1.0), std::invalid_argument);
}
