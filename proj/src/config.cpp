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

#include "toptwo/config.hpp"

#include <fstream>
#include <initializer_list>
#include <string>

namespace toptwo {
namespace {

using nlohmann::json;

void check_keys(const json& j, const std::string& ctx,
                std::initializer_list<const char*> allowed) {
  if (!j.is_object()) {
    throw ConfigError("config section '" + ctx + "' must be an object");
  }
  for (const auto& item : j.items()) {
    bool ok = false;
    for (const char* key : allowed) {
      if (item.key() == key) {
        ok = true;
        break;
      }
    }
    if (!ok) {
      throw ConfigError("unknown key '" + item.key() + "' in '" + ctx + "'");
    }
  }
}

template <typename T>
T require(const json& j, const std::string& ctx, const char* key) {
  if (!j.contains(key)) {
    throw ConfigError("missing key '" + std::string(key) + "' in '" + ctx + "'");
  }
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("key '" + std::string(key) + "' in '" + ctx +
                      "' has the wrong type");
  }
}

template <typename T>
T optional_or(const json& j, const std::string& ctx, const char* key,
              T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("key '" + std::string(key) + "' in '" + ctx +
                      "' has the wrong type");
  }
}

InstanceSpec parse_instance(const json& j) {
  check_keys(j, "instance", {"kind", "sigma", "means", "mean_lo", "mean_hi"});
  InstanceSpec spec;
  const std::string kind = require<std::string>(j, "instance", "kind");
  if (kind == "bernoulli") {
    spec.model = ObservationModel::bernoulli();
    if (j.contains("sigma") || j.contains("mean_lo") || j.contains("mean_hi")) {
      throw ConfigError(
          "instance: 'sigma'/'mean_lo'/'mean_hi' apply to the gaussian kind only");
    }
  } else if (kind == "gaussian") {
    spec.model = ObservationModel::gaussian(
        require<double>(j, "instance", "sigma"),
        require<double>(j, "instance", "mean_lo"),
        require<double>(j, "instance", "mean_hi"));
  } else {
    throw ConfigError("instance: 'kind' must be 'bernoulli' or 'gaussian'");
  }
  spec.means = require<std::vector<double>>(j, "instance", "means");
  try {
    spec.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("instance: 'means' invalid: ") + e.what());
  }
  return spec;
}

BeliefConfig parse_belief(const json& j) {
  check_keys(j, "belief",
             {"type", "grid_points", "normal_prior_mean", "normal_prior_var"});
  BeliefConfig b;
  const std::string type = optional_or<std::string>(j, "belief", "type", "conjugate");
  if (type == "conjugate") {
    b.type = BeliefConfig::Type::kConjugate;
  } else if (type == "grid") {
    b.type = BeliefConfig::Type::kGrid;
  } else {
    throw ConfigError("belief: 'type' must be 'conjugate' or 'grid'");
  }
  b.grid_points = optional_or<int>(j, "belief", "grid_points", 1001);
  b.normal_prior_mean = optional_or<double>(j, "belief", "normal_prior_mean", 0.0);
  b.normal_prior_var = optional_or<double>(j, "belief", "normal_prior_var", 1.0);
  if (b.grid_points < 3) throw ConfigError("belief: 'grid_points' must be >= 3");
  if (!(b.normal_prior_var > 0.0)) {
    throw ConfigError("belief: 'normal_prior_var' must be positive");
  }
  return b;
}

Utility parse_utility(const std::string& name) {
  if (name == "identity" || name == "mean") return Utility::kIdentity;
  if (name == "natural") return Utility::kNaturalParam;
  throw ConfigError("rule: 'utility' must be 'identity', 'mean', or 'natural'");
}

RuleEntry parse_rule(const json& j, int index) {
  const std::string ctx = "rules[" + std::to_string(index) + "]";
  check_keys(j, ctx,
             {"name", "beta", "mc_samples", "quadrature_points", "resample_cap",
              "utility", "concentration_threshold", "psi", "explore_len"});
  RuleEntry entry;
  entry.name = require<std::string>(j, ctx, "name");
  entry.cfg.beta = optional_or<double>(j, ctx, "beta", 0.5);
  entry.cfg.mc_samples = optional_or<long>(j, ctx, "mc_samples", 10000);
  entry.cfg.quadrature_points = optional_or<int>(j, ctx, "quadrature_points", 1001);
  entry.cfg.resample_cap = optional_or<long>(j, ctx, "resample_cap", 1000000);
  entry.cfg.utility =
      parse_utility(optional_or<std::string>(j, ctx, "utility", "identity"));
  entry.cfg.concentration_threshold =
      optional_or<double>(j, ctx, "concentration_threshold", 1e4);
  if (j.contains("psi")) {
    entry.fixed_psi = require<std::vector<double>>(j, ctx, "psi");
  }
  if (j.contains("explore_len")) {
    entry.two_stage_explore = require<long>(j, ctx, "explore_len");
  }
  try {
    entry.cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(ctx + ": " + e.what());
  }
  return entry;
}

StoppingSpec parse_stopping(const json& j) {
  check_keys(j, "stopping", {"mode", "horizon", "delta", "cap"});
  const std::string mode = require<std::string>(j, "stopping", "mode");
  try {
    if (mode == "fixed_horizon") {
      const long horizon = require<long>(j, "stopping", "horizon");
      StoppingSpec s = StoppingSpec::fixed_horizon(horizon);
      s.cap = optional_or<long>(j, "stopping", "cap", horizon);
      s.validate();
      return s;
    }
    if (mode == "confidence") {
      return StoppingSpec::confidence(require<double>(j, "stopping", "delta"),
                                      require<long>(j, "stopping", "cap"));
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("stopping: ") + e.what());
  }
  throw ConfigError("stopping: 'mode' must be 'fixed_horizon' or 'confidence'");
}

}  // namespace

BeliefState ExperimentConfig::make_belief() const {
  if (belief.type == BeliefConfig::Type::kGrid) {
    return BeliefState::grid_prior(instance.model, instance.k(),
                                   belief.grid_points);
  }
  if (instance.model.kind == ModelKind::kBernoulli) {
    return BeliefState::beta_prior(instance.model, instance.k());
  }
  return BeliefState::normal_prior(instance.model, instance.k(),
                                   belief.normal_prior_mean,
                                   belief.normal_prior_var);
}

std::unique_ptr<Rule> ExperimentConfig::make_rule_instance(
    const RuleEntry& entry) const {
  std::optional<long> explore = entry.two_stage_explore;
  if (entry.name == "two_stage" && !explore.has_value()) {
    const long budget = stopping.mode == StoppingSpec::Mode::kFixedHorizon
                            ? stopping.horizon
                            : stopping.cap;
    explore = two_stage_default_explore(budget);
  }
  const std::vector<double>* psi =
      entry.fixed_psi.has_value() ? &*entry.fixed_psi : nullptr;
  try {
    return make_rule(entry.name, entry.cfg, psi, explore);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("rules: ") + e.what());
  }
}

ExperimentConfig parse_config(const json& j) {
  check_keys(j, "config",
             {"instance", "belief", "rules", "stopping", "seeds", "output",
              "solver"});
  ExperimentConfig cfg;
  if (!j.contains("instance")) throw ConfigError("missing 'instance' section");
  cfg.instance = parse_instance(j.at("instance"));
  if (j.contains("belief")) cfg.belief = parse_belief(j.at("belief"));

  if (j.contains("rules")) {
    if (!j.at("rules").is_array()) throw ConfigError("'rules' must be an array");
    int idx = 0;
    for (const auto& rj : j.at("rules")) {
      cfg.rules.push_back(parse_rule(rj, idx++));
    }
  }
  if (j.contains("stopping")) {
    cfg.stopping = parse_stopping(j.at("stopping"));
  } else {
    cfg.stopping = StoppingSpec::fixed_horizon(1000);
  }
  if (j.contains("seeds")) {
    const auto& js = j.at("seeds");
    check_keys(js, "seeds", {"count", "base"});
    cfg.seed_count = optional_or<int>(js, "seeds", "count", 1);
    cfg.base_seed = optional_or<std::uint64_t>(js, "seeds", "base", 1);
    if (cfg.seed_count < 1) throw ConfigError("seeds: 'count' must be >= 1");
  }
  if (j.contains("output")) {
    const auto& jo = j.at("output");
    check_keys(jo, "output", {"dir", "cadence_dense", "cadence_stride"});
    cfg.out_dir = optional_or<std::string>(jo, "output", "dir", "out");
    cfg.recording.dense_until =
        optional_or<long>(jo, "output", "cadence_dense", 1000);
    cfg.recording.stride = optional_or<long>(jo, "output", "cadence_stride", 10);
    if (cfg.recording.dense_until < 1 || cfg.recording.stride < 1) {
      throw ConfigError("output: cadence values must be >= 1");
    }
  }
  if (j.contains("solver")) {
    const auto& js = j.at("solver");
    check_keys(js, "solver", {"betas", "solve_star", "tolerance"});
    cfg.solver.betas =
        optional_or<std::vector<double>>(js, "solver", "betas", {0.5});
    cfg.solver.solve_star = optional_or<bool>(js, "solver", "solve_star", true);
    cfg.solver.tolerance = optional_or<double>(js, "solver", "tolerance", 1e-12);
    for (double b : cfg.solver.betas) {
      if (!(b > 0.0 && b < 1.0)) {
        throw ConfigError("solver: each beta must lie in (0, 1)");
      }
    }
    if (!(cfg.solver.tolerance > 0.0 && cfg.solver.tolerance <= 1e-6)) {
      throw ConfigError("solver: 'tolerance' must lie in (0, 1e-6]");
    }
  }
  // Rule-level checks that need the instance.
  for (const RuleEntry& r : cfg.rules) {
    if (r.fixed_psi.has_value() &&
        static_cast<int>(r.fixed_psi->size()) != cfg.instance.k()) {
      throw ConfigError("rules: 'psi' length must equal the number of arms");
    }
    if ((r.name == "ei" || r.name == "map_toptwo") &&
        (cfg.instance.model.kind != ModelKind::kGaussian ||
         cfg.belief.type != BeliefConfig::Type::kConjugate)) {
      throw ConfigError("rules: '" + r.name +
                        "' requires a gaussian instance with conjugate beliefs");
    }
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config is not valid JSON: " + std::string(e.what()));
  }
  return parse_config(j);
}

}  // namespace toptwo
