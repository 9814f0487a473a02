// Copyright 2026 The toptwo Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include <json.hpp>

#include "toptwo/dist.hpp"
#include "toptwo/posterior.hpp"

using namespace toptwo;
using nlohmann::json;

namespace {

// Grid belief over an explicit support, built through the checkpoint format.
BeliefState grid_from_support(const ObservationModel& model,
                              const std::vector<double>& support,
                              const std::vector<std::vector<double>>& log_w,
                              long n = 0) {
  json j;
  j["model"] = {{"kind", model.kind_name()},
                {"sigma", model.sigma},
                {"mean_lo", model.mean_lo},
                {"mean_hi", model.mean_hi}};
  j["kind"] = "grid";
  j["n"] = n;
  j["support"] = support;
  j["arms"] = json::array();
  for (const auto& w : log_w) j["arms"].push_back({{"log_weights", w}});
  return BeliefState::from_json(j);
}

}  // namespace

TEST_CASE("conjugate updates") {
  const auto bern = ObservationModel::bernoulli();
  BeliefState beta = BeliefState::beta_prior(bern, 2);
  const BeliefState next = beta.updated(0, 1.0);
  CHECK(next.beta_a(0) == 2.0);
  CHECK(next.beta_b(0) == 1.0);
  CHECK(next.beta_a(1) == 1.0);
  CHECK(next.n() == 1);
  CHECK(beta.n() == 0);  // value semantics
  CHECK_THROWS_AS(beta.apply(0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(beta.apply(5, 1.0), std::out_of_range);

  const auto gauss = ObservationModel::gaussian(1.0, -10.0, 10.0);
  BeliefState normal = BeliefState::normal_prior(gauss, 2, 0.0, 1.0);
  normal.apply(0, 2.0);
  CHECK(normal.normal_mean(0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(normal.normal_var(0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(normal.normal_mean(1) == 0.0);
}

TEST_CASE("grid update is Bayes rule by hand") {
  const auto bern = ObservationModel::bernoulli();
  const double u = std::log(1.0 / 3.0);
  BeliefState grid = grid_from_support(bern, {0.25, 0.5, 0.75},
                                       {{u, u, u}, {u, u, u}});
  grid.apply(0, 1.0);
  const auto w = grid.grid_log_weights(0);
  CHECK(std::exp(w[0]) == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
  CHECK(std::exp(w[1]) == doctest::Approx(2.0 / 6.0).epsilon(1e-12));
  CHECK(std::exp(w[2]) == doctest::Approx(3.0 / 6.0).epsilon(1e-12));
  // Untouched arm stays normalized and uniform.
  const auto w1 = grid.grid_log_weights(1);
  CHECK(log_sum_exp(w1) == doctest::Approx(0.0).epsilon(1e-10));
}

TEST_CASE("sampling from the posterior") {
  const auto bern = ObservationModel::bernoulli();
  std::mt19937_64 rng(29);

  json j;
  j["model"] = {{"kind", "bernoulli"}, {"sigma", 1.0}, {"mean_lo", 0.0},
                {"mean_hi", 1.0}};
  j["kind"] = "beta";
  j["n"] = 0;
  j["arms"] = {{{"a", 1e9}, {"b", 1.0}}, {{"a", 1e9}, {"b", 1.0}}};
  const BeliefState concentrated = BeliefState::from_json(j);
  for (int i = 0; i < 20; ++i) {
    for (double v : concentrated.sample_means(rng)) {
      CHECK(v > 1.0 - 1e-3);
    }
  }

  BeliefState b21 = BeliefState::beta_prior(bern, 2, 2.0, 1.0);
  double sum = 0.0;
  const int n = 1000000;
  std::vector<double> buf(2);
  for (int i = 0; i < n; ++i) {
    b21.sample_means_into(buf, rng);
    sum += buf[0];
  }
  CHECK(std::abs(sum / n - 2.0 / 3.0) < 0.002);

  // Point mass on the middle support point always returns it.
  BeliefState point = grid_from_support(
      bern, {0.25, 0.5, 0.75},
      {{-1e30, 0.0, -1e30}, {-1e30, 0.0, -1e30}});
  for (int i = 0; i < 100; ++i) {
    for (double v : point.sample_means(rng)) CHECK(v == 0.5);
  }
}

TEST_CASE("marginal pdf and cdf") {
  const auto bern = ObservationModel::bernoulli();
  BeliefState uniform = BeliefState::beta_prior(bern, 2);
  auto [pdf, cdf] = uniform.marginal_pdf_cdf(0, 0.3);
  CHECK(pdf == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(cdf == doctest::Approx(0.3).epsilon(1e-12));

  const auto gauss = ObservationModel::gaussian(1.0, -10.0, 10.0);
  BeliefState normal = BeliefState::normal_prior(gauss, 2, 0.0, 1.0);
  CHECK(normal.marginal_pdf_cdf(0, 0.0).second ==
        doctest::Approx(0.5).epsilon(1e-12));

  BeliefState b21 = BeliefState::beta_prior(bern, 2, 2.0, 1.0);
  CHECK(b21.marginal_pdf_cdf(0, 0.5).second ==
        doctest::Approx(0.25).epsilon(1e-10));  // x^2 at 0.5
}

TEST_CASE("conjugate and grid beliefs agree on one observation stream") {
  const auto bern = ObservationModel::bernoulli();
  BeliefState beta = BeliefState::beta_prior(bern, 2);
  BeliefState grid = BeliefState::grid_prior(bern, 2, 1001);
  std::mt19937_64 rng(3);

  for (int i = 0; i < 200; ++i) {
    const double y = sample_observation(bern, 0.35, rng);
    beta.apply(0, y);
    grid.apply(0, y);
  }
  // Compare the discrete CDF at each support point against the exact CDF
  // at the matching cell edge (support points sit at cell midpoints).
  const auto& xs = grid.grid_support();
  const double half = 0.5 * (xs[1] - xs[0]);
  double worst = 0.0;
  for (size_t m = 0; m < xs.size(); ++m) {
    const double approx = grid.marginal_pdf_cdf(0, xs[m]).second;
    const double exact = beta.marginal_pdf_cdf(0, xs[m] + half).second;
    worst = std::max(worst, std::abs(approx - exact));
  }
  CHECK(worst < 2e-3);
}

TEST_CASE("posterior concentrates at the true mean") {
  const auto bern = ObservationModel::bernoulli();
  BeliefState beta = BeliefState::beta_prior(bern, 2);
  BeliefState grid = BeliefState::grid_prior(bern, 2, 1001);
  std::mt19937_64 rng(5);
  const double truth = 0.62;
  for (int i = 0; i < 100000; ++i) {
    const double y = sample_observation(bern, truth, rng);
    beta.apply(0, y);
    grid.apply(0, y);
  }
  const double band_beta = beta.marginal_pdf_cdf(0, truth + 0.05).second -
                           beta.marginal_pdf_cdf(0, truth - 0.05).second;
  const double band_grid = grid.marginal_pdf_cdf(0, truth + 0.05).second -
                           grid.marginal_pdf_cdf(0, truth - 0.05).second;
  CHECK(band_beta > 0.999);
  CHECK(band_grid > 0.999);
}

TEST_CASE("update order does not matter for exchangeable data") {
  const auto bern = ObservationModel::bernoulli();
  BeliefState a = BeliefState::beta_prior(bern, 2);
  BeliefState b = BeliefState::beta_prior(bern, 2);
  const std::vector<double> ys = {1, 0, 0, 1, 1, 1, 0, 1};
  for (double y : ys) a.apply(0, y);
  std::vector<double> rev(ys.rbegin(), ys.rend());
  for (double y : rev) b.apply(0, y);
  CHECK(a.beta_a(0) == b.beta_a(0));
  CHECK(a.beta_b(0) == b.beta_b(0));
}

TEST_CASE("checkpoint round trip") {
  const auto bern = ObservationModel::bernoulli();
  const auto gauss = ObservationModel::gaussian(0.8, -2.0, 2.0);
  std::mt19937_64 rng(17);

  BeliefState beta = BeliefState::beta_prior(bern, 3);
  beta.apply(1, 1.0);
  beta.apply(2, 0.0);
  BeliefState normal = BeliefState::normal_prior(gauss, 2, 0.1, 0.9);
  normal.apply(0, 0.4);
  BeliefState grid = BeliefState::grid_prior(gauss, 2, 51);
  grid.apply(1, -0.3);

  for (const BeliefState* s : {&beta, &normal, &grid}) {
    const auto j = s->to_json();
    const BeliefState back = BeliefState::from_json(j);
    CHECK(back.to_json() == j);
    CHECK(back.n() == s->n());
    CHECK(back.k() == s->k());
  }

  json bad = beta.to_json();
  bad["arms"][0]["a"] = -1.0;
  CHECK_THROWS_AS(BeliefState::from_json(bad), std::invalid_argument);
}
