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

#ifndef TOPTWO_RULES_HPP_
#define TOPTWO_RULES_HPP_

#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "toptwo/exponent.hpp"
#include "toptwo/optprob.hpp"
#include "toptwo/posterior.hpp"

namespace toptwo {

struct RuleConfig {
  double beta = 0.5;              // probability of playing the leader
  long mc_samples = 10000;        // joint draws for Monte Carlo alpha/value
  int quadrature_points = 1001;
  long resample_cap = 1000000;    // max redraws in the top-two Thompson loop
  Utility utility = Utility::kIdentity;
  // Beta posteriors more concentrated than this switch the alpha pipeline
  // from quadrature to Monte Carlo (the grid stops resolving the density).
  double concentration_threshold = 1e4;

  void validate() const;  // throws std::invalid_argument
};

struct SelectionOutcome {
  int chosen = 0;
  int top = 0;
  std::optional<int> alternative;
  // Exact conditional selection probabilities when the rule knows them.
  std::optional<std::vector<double>> psi;
};

// One arm selection per call. Rules may carry caches or phase state, but
// the selected-arm distribution depends only on (state, config). Every
// tie is broken toward the lowest index so runs reproduce per seed.
class Rule {
 public:
  virtual ~Rule() = default;
  virtual SelectionOutcome select(const BeliefState& state,
                                  std::mt19937_64& rng) = 0;
  virtual std::string name() const = 0;
  // How often a top-two Thompson redraw loop was cut off at the cap.
  virtual long fallback_count() const { return 0; }
};

// The selection probabilities induced by the top-two Thompson redraw
// loop, as a function of the optimal-arm probabilities:
//   psi_i = alpha_i * (beta + (1 - beta) * sum_{j != i} alpha_j / (1 - alpha_j)).
// Throws std::domain_error if any alpha_j == 1.
std::vector<double> psi_ttts_formula(std::span<const double> alpha,
                                     double beta);

std::unique_ptr<Rule> make_thompson(RuleConfig cfg = {});
std::unique_ptr<Rule> make_top_two_thompson(RuleConfig cfg = {});
std::unique_ptr<Rule> make_top_two_probability(RuleConfig cfg = {});
std::unique_ptr<Rule> make_top_two_value(RuleConfig cfg = {});
std::unique_ptr<Rule> make_uniform();
std::unique_ptr<Rule> make_fixed(std::vector<double> psi);
// Uniform exploration for explore_len steps, then a plug-in solve of the
// optimal allocation from posterior means, played fixed thereafter.
std::unique_ptr<Rule> make_two_stage(long explore_len, RuleConfig cfg = {});
std::unique_ptr<Rule> make_expected_improvement();
std::unique_ptr<Rule> make_map_top_two(RuleConfig cfg = {});

// Default two-stage exploration length for a total budget: ceil(N^(2/3)).
long two_stage_default_explore(long budget);

// Factory keyed by the config-file rule names: ts, ttts, ttps, ttvs,
// uniform, fixed, two_stage, ei, map_toptwo.
std::unique_ptr<Rule> make_rule(const std::string& name, const RuleConfig& cfg,
                                const std::vector<double>* fixed_psi = nullptr,
                                std::optional<long> two_stage_explore = {});

}  // namespace toptwo

#endif  // TOPTWO_RULES_HPP_
