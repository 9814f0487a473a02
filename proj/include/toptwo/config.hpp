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

#ifndef TOPTWO_CONFIG_HPP_
#define TOPTWO_CONFIG_HPP_

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "toptwo/sim.hpp"

namespace toptwo {

// A config problem: unknown key, missing key, type mismatch, or a value
// violating a validation rule. The message names the offending key.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct BeliefConfig {
  enum class Type { kConjugate, kGrid };
  Type type = Type::kConjugate;
  int grid_points = 1001;
  double normal_prior_mean = 0.0;
  double normal_prior_var = 1.0;
};

struct RuleEntry {
  std::string name;
  RuleConfig cfg;
  std::optional<std::vector<double>> fixed_psi;
  std::optional<long> two_stage_explore;
};

struct SolverConfig {
  std::vector<double> betas = {0.5};
  bool solve_star = true;
  double tolerance = 1e-12;
};

struct ExperimentConfig {
  InstanceSpec instance;
  BeliefConfig belief;
  std::vector<RuleEntry> rules;
  StoppingSpec stopping;
  int seed_count = 1;
  std::uint64_t base_seed = 1;
  std::string out_dir = "out";
  RecordingSpec recording;
  SolverConfig solver;

  BeliefState make_belief() const;
  std::unique_ptr<Rule> make_rule_instance(const RuleEntry& entry) const;
};

// Parse and validate; rejects unknown keys at every level.
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);

}  // namespace toptwo

#endif  // TOPTWO_CONFIG_HPP_
