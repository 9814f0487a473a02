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

#ifndef TOPTWO_EXPFAM_HPP_
#define TOPTWO_EXPFAM_HPP_

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace toptwo {

enum class ModelKind { kBernoulli, kGaussian };

// An observation family in mean parameterization. Only the mean of each
// arm is ever exposed; natural parameters never appear in the interface.
struct ObservationModel {
  ModelKind kind = ModelKind::kBernoulli;
  double sigma = 1.0;  // observation noise scale; Gaussian only
  double mean_lo = 0.0;
  double mean_hi = 1.0;

  static ObservationModel bernoulli();
  static ObservationModel gaussian(double sigma, double mean_lo, double mean_hi);

  bool contains(double mean) const { return mean > mean_lo && mean < mean_hi; }
  void require_valid() const;  // throws std::invalid_argument
  std::string kind_name() const;
};

// A ground-truth problem: k arms with pairwise-distinct means inside the
// model's mean domain. The top-two gap must exceed 1e-9 so downstream
// solves are well conditioned.
struct InstanceSpec {
  ObservationModel model;
  std::vector<double> means;

  int k() const { return static_cast<int>(means.size()); }
  int best_arm() const;
  double gap(int arm) const;                // best mean minus arm's mean
  std::vector<double> suboptimal_gaps() const;
  void validate() const;                    // throws std::invalid_argument
  std::uint64_t fingerprint() const;
};

// One draw from the model at the given mean. Bernoulli returns 0 or 1.
double sample_observation(const ObservationModel& model, double mean,
                          std::mt19937_64& rng);

// KL divergence between two distributions of the same family, identified
// by their means, in nats. Bernoulli means are clamped to
// [1e-12, 1 - 1e-12] before evaluation.
double kl(const ObservationModel& model, double p, double q);

// Pairwise evidence rate for separating two arms when per-step efforts
// (beta, psi) go to them: the minimum over x of
//   beta * kl(mean_top, x) + psi * kl(mean_alt, x),
// attained at the effort-weighted mean. Returns 0 when beta + psi == 0
// (the infimum), so callers never divide by zero.
double c_cost(const ObservationModel& model, double beta, double psi,
              double mean_top, double mean_alt);

// Gaussian specialization in closed form:
//   (beta * psi / (beta + psi)) * delta^2 / (2 sigma^2).
double c_gaussian_closed_form(double beta, double psi, double delta,
                              double sigma);

}  // namespace toptwo

#endif  // TOPTWO_EXPFAM_HPP_
