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

#ifndef TOPTWO_POSTERIOR_HPP_
#define TOPTWO_POSTERIOR_HPP_

#include <memory>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "toptwo/expfam.hpp"

namespace toptwo {

enum class BeliefKind { kBeta, kNormal, kGrid };

// Independent per-arm posterior over arm means. Three representations:
//   kBeta   — conjugate Beta(a, b) per arm, Bernoulli observations.
//   kNormal — conjugate Normal(mean, var) per arm, Gaussian observations
//             with known noise variance taken from the model.
//   kGrid   — discrete posterior on a support shared by all arms, weights
//             kept in log space and renormalized after every update. This
//             is the representation that stays exact when posterior error
//             mass decays below linear-space precision.
//
// A BeliefState is a plain value: updated() returns a modified copy,
// apply() mutates in place for owners running long loops.
class BeliefState {
 public:
  static BeliefState beta_prior(const ObservationModel& model, int k,
                                double a0 = 1.0, double b0 = 1.0);
  static BeliefState normal_prior(const ObservationModel& model, int k,
                                  double prior_mean, double prior_var);
  // Uniform prior on `points` equispaced support points strictly inside the
  // mean domain (endpoints excluded by a half step).
  static BeliefState grid_prior(const ObservationModel& model, int k,
                                int points = 1001);

  BeliefKind kind() const { return kind_; }
  const ObservationModel& model() const { return model_; }
  int k() const { return k_; }
  long n() const { return count_; }

  void apply(int arm, double y);
  BeliefState updated(int arm, double y) const;

  // One independent draw per arm from its marginal posterior, in mean space.
  void sample_means_into(std::span<double> out, std::mt19937_64& rng) const;
  std::vector<double> sample_means(std::mt19937_64& rng) const;

  double posterior_mean(int arm) const;

  // Marginal (density or discrete mass, CDF) of the arm's mean at x.
  // Grid CDF is the left-closed cumulative sum.
  std::pair<double, double> marginal_pdf_cdf(int arm, double x) const;

  // Conjugate accessors.
  double beta_a(int arm) const;
  double beta_b(int arm) const;
  double normal_mean(int arm) const;
  double normal_var(int arm) const;

  // Grid accessors.
  const std::vector<double>& grid_support() const;
  std::span<const double> grid_log_weights(int arm) const;

  nlohmann::ordered_json to_json() const;
  static BeliefState from_json(const nlohmann::json& j);

 private:
  BeliefState() = default;

  ObservationModel model_;
  BeliefKind kind_ = BeliefKind::kBeta;
  int k_ = 0;
  long count_ = 0;
  std::vector<double> a_, b_;          // kBeta
  std::vector<double> mean_, var_;     // kNormal
  std::shared_ptr<const std::vector<double>> support_;  // kGrid, shared
  std::vector<double> logw_;           // kGrid, k rows of M log weights
};

// Snapshot of a belief state prepared for repeated joint draws. Grid arms
// get a linear cumulative table so each draw is a binary search instead
// of an O(points) scan.
class PosteriorSampler {
 public:
  explicit PosteriorSampler(const BeliefState& state);
  void sample_into(std::span<double> out, std::mt19937_64& rng) const;
  int k() const { return state_->k(); }

 private:
  const BeliefState* state_;
  std::vector<double> cum_;  // grid only: k rows of cumulative weights
};

}  // namespace toptwo

#endif  // TOPTWO_POSTERIOR_HPP_
