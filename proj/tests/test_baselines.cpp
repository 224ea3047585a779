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
#include "saferoute/baselines.hpp"
#include "saferoute/rng.hpp"

using namespace saferoute;

TEST_CASE("method names round trip") {
  for (Method m : all_methods()) {
    CHECK(parse_method(method_name(m)) == m);
  }
  CHECK(method_name(Method::random_matched) == "random");
  CHECK_THROWS_AS(parse_method("bogus"), std::invalid_argument);
  REQUIRE(all_methods().size() == 7);
  CHECK(all_methods().front() == Method::gate_conformal);
  CHECK(all_methods().back() == Method::always_cm);
}

TEST_CASE("conformal residual quantile arithmetic") {
  std::vector<double> residuals;
  for (int i = 1; i <= 99; ++i) residuals.push_back(i);
  const std::vector<double> original = residuals;
  // ceil(100 * 0.9) = 90th smallest.
  CHECK(conformal_residual_quantile(residuals, 0.1) == 90.0);
  CHECK(residuals == original);

  CHECK(conformal_residual_quantile({0.0, 0.0, 0.0}, 0.5) == 0.0);
  // ceil(4 * 0.9) = 4 > 3: no finite quantile.
  CHECK(std::isinf(conformal_residual_quantile({1.0, 2.0, 3.0}, 0.1)));
  // ceil(4 * 0.5) = 2nd smallest.
  CHECK(conformal_residual_quantile({5.0, -1.0, 3.0}, 0.5) == 3.0);
  CHECK_THROWS_AS(conformal_residual_quantile({}, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(conformal_residual_quantile({1.0}, 0.0),
                  std::invalid_argument);
}

TEST_CASE("regression conformal policy routes by upper bound") {
  // One feature, model learnt elsewhere: d = x with lambda ~ 0.
  const std::vector<std::vector<double>> x{{0.0}, {1.0}, {2.0}, {3.0}};
  const std::vector<double> d{0.0, 1.0, 2.0, 3.0};
  const RidgeModel model = fit_ridge(x, d, 1e-9);

  const RegressionConformalPolicy policy =
      fit_regression_conformal(x, d, model, 0.5, 1.5);
  CHECK(policy.alpha == 0.5);
  CHECK(policy.tau == 1.5);
  // Residuals ~ 0: q_hat ~ 0, so routing follows d_hat <= tau.
  CHECK(std::fabs(policy.q_hat) < 1e-6);
  CHECK(regression_route(policy, {1.0}, 1.5) == Decision::surrogate);
  CHECK(regression_route(policy, {2.0}, 1.5) == Decision::reference);

  // Tiny calibration set: infinite quantile, never routes.
  const RegressionConformalPolicy tiny = fit_regression_conformal(
      {{0.0}, {1.0}}, {0.0, 1.0}, model, 0.05, 1.5);
  CHECK(std::isinf(tiny.q_hat));
  CHECK(regression_route(tiny, {0.0}, 1.5) == Decision::reference);
}

TEST_CASE("boundary routing is inclusive") {
  const std::vector<std::vector<double>> x{{1.0}, {2.0}, {3.0}};
  const std::vector<double> d{1.0, 2.0, 3.0};
  const RidgeModel model = fit_ridge(x, d, 1e-9);
  // Shift residuals so d_hat(x) + q_hat == tau exactly at x = 1.
  const RegressionConformalPolicy policy =
      fit_regression_conformal(x, d, model, 0.5, 1.0);
  const double pred = model.predict({1.0});
  const double tau = pred + policy.q_hat;
  CHECK(regression_route(policy, {1.0}, tau) == Decision::surrogate);

  CHECK(naive_route(0.5) == Decision::surrogate);
  CHECK(naive_route(0.49) == Decision::reference);
  CHECK(oracle_route(0.4, 0.4) == Decision::surrogate);
  CHECK(oracle_route(0.401, 0.4) == Decision::reference);
}

TEST_CASE("regression conformal is marginally valid on exchangeable data") {
  // Pooled over trials: Pr(d <= d_hat + q_hat) >= 1 - alpha.
  const double alpha = 0.2;
  long covered = 0;
  long total = 0;
  for (int trial = 0; trial < 400; ++trial) {
    Rng rng(9000 + trial);
    const auto draw = [&](std::size_t n, std::vector<std::vector<double>>& xs,
                          std::vector<double>& ds) {
      for (std::size_t i = 0; i < n; ++i) {
        const double v = rng.uniform(-1.0, 1.0);
        xs.push_back({v});
        ds.push_back(0.7 * v + rng.normal(0.0, 0.4));
      }
    };
    std::vector<std::vector<double>> xtr, xcal, xte;
    std::vector<double> dtr, dcal, dte;
    draw(60, xtr, dtr);
    draw(60, xcal, dcal);
    draw(20, xte, dte);
    const RidgeModel model = fit_ridge(xtr, dtr, 1.0);
    const RegressionConformalPolicy policy =
        fit_regression_conformal(xcal, dcal, model, alpha, 0.0);
    for (std::size_t i = 0; i < xte.size(); ++i) {
      if (dte[i] <= model.predict(xte[i]) + policy.q_hat) ++covered;
      ++total;
    }
  }
  const double coverage = static_cast<double>(covered) / total;
  CHECK(coverage >= 1.0 - alpha - 0.015);
}

TEST_CASE("group-skewed data breaks conditional validity") {
  // Two groups: a noisy risky one and a tight safe one. The pooled
  // residual quantile certifies the marginal rate, but everything the
  // policy routes comes from the noisy group, whose conditional unsafe
  // rate stays above alpha.
  const double tau = 0.5;
  const double alpha = 0.2;
  long routed = 0;
  long routed_unsafe = 0;
  for (int trial = 0; trial < 20; ++trial) {
    Rng rng(11000 + trial);
    const auto draw = [&](std::size_t n, std::vector<std::vector<double>>& xs,
                          std::vector<double>& ds) {
      for (std::size_t i = 0; i < n; ++i) {
        const double group = rng.bernoulli(0.5) ? 1.0 : 0.0;
        xs.push_back({group, rng.normal()});
        ds.push_back(group == 1.0 ? rng.normal(0.3, 0.1)
                                  : rng.normal(-1.0, 3.0));
      }
    };
    std::vector<std::vector<double>> xtr, xcal, xte;
    std::vector<double> dtr, dcal, dte;
    draw(500, xtr, dtr);
    draw(300, xcal, dcal);
    draw(300, xte, dte);
    const RidgeModel model = fit_ridge(xtr, dtr, 1.0);
    const RegressionConformalPolicy policy =
        fit_regression_conformal(xcal, dcal, model, alpha, tau);
    for (std::size_t i = 0; i < xte.size(); ++i) {
      if (regression_route(policy, xte[i], tau) == Decision::surrogate) {
        ++routed;
        if (dte[i] > tau) ++routed_unsafe;
      }
    }
  }
  REQUIRE(routed > 0);
  const double conditional = static_cast<double>(routed_unsafe) / routed;
  CHECK(conditional > alpha + 0.05);
}

TEST_CASE("random matched routing hits its target coverage") {
  const std::vector<Decision> none = random_matched_route(0.0, 42, 500);
  for (Decision d : none) CHECK(d == Decision::reference);
  const std::vector<Decision> all = random_matched_route(1.0, 42, 500);
  for (Decision d : all) CHECK(d == Decision::surrogate);

  const std::vector<Decision> some = random_matched_route(0.3, 42, 10000);
  long count = 0;
  for (Decision d : some) {
    if (d == Decision::surrogate) ++count;
  }
  CHECK(std::fabs(static_cast<double>(count) / 10000 - 0.3) <= 0.02);

  CHECK(random_matched_route(0.3, 42, 100) == random_matched_route(0.3, 42, 100));
  CHECK(random_matched_route(0.3, 42, 100) != random_matched_route(0.3, 43, 100));
  CHECK_THROWS_AS(random_matched_route(1.5, 42, 10), std::invalid_argument);
}

TEST_CASE("always route passthrough") {
  CHECK(always_route(Decision::surrogate) == Decision::surrogate);
  CHECK(always_route(Decision::reference) == Decision::reference);
}
