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

#ifndef TOPTWO_SIM_HPP_
#define TOPTWO_SIM_HPP_

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "toptwo/rules.hpp"

namespace toptwo {

struct StoppingSpec {
  enum class Mode { kFixedHorizon, kConfidence };

  Mode mode = Mode::kFixedHorizon;
  long horizon = 0;   // fixed-horizon length
  double delta = 0.0; // confidence mode: stop when max alpha > 1 - delta
  long cap = 0;       // hard step limit in either mode

  static StoppingSpec fixed_horizon(long n);
  static StoppingSpec confidence(double delta, long cap);
  void validate() const;
};

// Recording cadence: every step up to dense_until, then every stride-th
// step. The stopping condition is evaluated at recorded steps, and the
// final step of a trial is always recorded.
struct RecordingSpec {
  long dense_until = 1000;
  long stride = 10;
};

struct TraceRecord {
  long n = 0;
  int arm = 0;
  double y = 0.0;
  std::vector<double> alpha;            // linear scale, floors near 1e-308
  std::vector<double> log10_inv_alpha;  // exact for grid beliefs
  std::vector<double> psibar;           // per-arm count / n
};

struct Trace {
  std::string rule;
  std::uint64_t seed = 0;
  std::uint64_t fingerprint = 0;
  int k = 0;
  int best_arm = 0;
  bool censored = false;   // confidence target not reached before the cap
  bool exact_log = false;  // alpha tracked in log space (grid beliefs)
  long length = 0;
  long ttts_fallbacks = 0;
  std::vector<long> counts;       // per-arm observation counts at the end
  std::vector<TraceRecord> records;
};

struct TrialOptions {
  StoppingSpec stopping;
  RecordingSpec recording;
  int quadrature_points = 1001;
};

// Run one trial: select, observe at the instance's true mean, update.
// Deterministic given the seed. Grid belief states use the exact
// log-space alpha pipeline; conjugate states use incremental quadrature.
Trace run_trial(const InstanceSpec& instance, Rule& rule,
                const BeliefState& init, const TrialOptions& options,
                std::uint64_t seed);

using RuleFactory = std::function<std::unique_ptr<Rule>()>;

// Trials with seeds base_seed .. base_seed + n_seeds - 1, executed on up
// to `threads` workers. Output order follows seed order regardless of
// scheduling.
std::vector<Trace> run_many(const InstanceSpec& instance,
                            const RuleFactory& factory,
                            const BeliefState& init,
                            const TrialOptions& options, int n_seeds,
                            std::uint64_t base_seed, int threads = 0);

// First recorded step where max alpha >= level, per level; nullopt when
// never crossed. Nondecreasing in the level.
std::vector<std::optional<long>> hitting_times(const Trace& trace,
                                               std::span<const double> levels);

struct ExponentFit {
  double slope = 0.0;
  int points = 0;
  bool truncated = false;  // window cut where error mass hit the 1e-300 floor
};

// Least-squares slope of -log(posterior error mass) against n over the
// last tail_fraction of recorded points.
ExponentFit fit_exponent(const Trace& trace, double tail_fraction);

struct LevelStat {
  double level = 0.0;
  double mean = 0.0;  // over trials that crossed
  double se = 0.0;
  int censored = 0;
};

struct Summary {
  std::string rule;
  int trials = 0;
  std::vector<LevelStat> hits;
  std::vector<double> mean_share;         // terminal per-arm count share
  std::vector<double> mean_log10_inv;     // terminal log10(1/alpha) per arm
  double mean_length = 0.0;
  int censored = 0;
};

// Fold homogeneous traces (same rule and instance fingerprint) into
// summary statistics. Censored trials are excluded from hitting-time
// means and counted.
Summary aggregate(std::span<const Trace> traces,
                  std::span<const double> levels);

}  // namespace toptwo

#endif  // TOPTWO_SIM_HPP_
