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

#include "toptwo/sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "toptwo/dist.hpp"

namespace toptwo {
namespace {

constexpr double kLn10 = 2.302585092994046;
// Linear-space alpha values below this are flooring artifacts; the grid
// pipeline never hits it because it works in log space throughout.
constexpr double kLinearFloorLog10 = 300.0;

}  // namespace

StoppingSpec StoppingSpec::fixed_horizon(long n) {
  StoppingSpec s;
  s.mode = Mode::kFixedHorizon;
  s.horizon = n;
  s.cap = n;
  s.validate();
  return s;
}

StoppingSpec StoppingSpec::confidence(double delta, long cap) {
  StoppingSpec s;
  s.mode = Mode::kConfidence;
  s.delta = delta;
  s.cap = cap;
  s.validate();
  return s;
}

void StoppingSpec::validate() const {
  if (mode == Mode::kFixedHorizon) {
    if (horizon < 1) {
      throw std::invalid_argument("stopping: fixed horizon must be >= 1");
    }
    if (cap < horizon) {
      throw std::invalid_argument("stopping: cap must be >= horizon");
    }
  } else {
    if (!(delta > 0.0 && delta < 1.0)) {
      throw std::invalid_argument("stopping: delta must lie in (0, 1)");
    }
    if (cap < 1) throw std::invalid_argument("stopping: cap must be >= 1");
  }
}

Trace run_trial(const InstanceSpec& instance, Rule& rule,
                const BeliefState& init, const TrialOptions& options,
                std::uint64_t seed) {
  instance.validate();
  options.stopping.validate();
  if (init.k() != instance.k()) {
    throw std::invalid_argument("run_trial: belief arity does not match instance");
  }

  std::mt19937_64 rng(seed);
  BeliefState state = init;
  const int k = instance.k();
  const bool exact_log = state.kind() == BeliefKind::kGrid;
  IncrementalAlpha inc(options.quadrature_points);

  Trace trace;
  trace.rule = rule.name();
  trace.seed = seed;
  trace.fingerprint = instance.fingerprint();
  trace.k = k;
  trace.best_arm = instance.best_arm();
  trace.counts.assign(k, 0);

  const StoppingSpec& stop = options.stopping;
  const RecordingSpec& rec = options.recording;
  std::vector<double> alpha(k), log10inv(k);

  for (long n = 1; n <= stop.cap; ++n) {
    const SelectionOutcome sel = rule.select(state, rng);
    if (sel.chosen < 0 || sel.chosen >= k) {
      throw std::logic_error("run_trial: rule selected an invalid arm");
    }
    const double y = sample_observation(instance.model,
                                        instance.means[sel.chosen], rng);
    state.apply(sel.chosen, y);
    ++trace.counts[sel.chosen];

    const bool cadence_hit =
        n <= rec.dense_until || (rec.stride > 0 && n % rec.stride == 0);
    const bool last_step =
        n == stop.cap ||
        (stop.mode == StoppingSpec::Mode::kFixedHorizon && n == stop.horizon);

    bool crossed = false;
    if (cadence_hit || last_step) {
      if (exact_log) {
        const GridLogAlpha la = grid_log_alpha(state);
        for (int i = 0; i < k; ++i) {
          alpha[i] = std::exp(la.log_alpha[i]);
          log10inv[i] = -la.log_alpha[i] / kLn10;
        }
      } else {
        const std::vector<double>& a = inc.alpha(state);
        for (int i = 0; i < k; ++i) {
          alpha[i] = a[i];
          log10inv[i] =
              a[i] > 0.0 ? std::min(-std::log10(a[i]), kLinearFloorLog10)
                         : kLinearFloorLog10;
        }
      }
      TraceRecord record;
      record.n = n;
      record.arm = sel.chosen;
      record.y = y;
      record.alpha = alpha;
      record.log10_inv_alpha = log10inv;
      record.psibar.resize(k);
      for (int i = 0; i < k; ++i) {
        record.psibar[i] = static_cast<double>(trace.counts[i]) / n;
      }
      trace.records.push_back(std::move(record));

      if (stop.mode == StoppingSpec::Mode::kConfidence) {
        const double top = *std::max_element(alpha.begin(), alpha.end());
        crossed = top > 1.0 - stop.delta;
      }
    }

    if (crossed || last_step) {
      trace.length = n;
      trace.censored =
          stop.mode == StoppingSpec::Mode::kConfidence && !crossed;
      break;
    }
  }
  trace.exact_log = exact_log;
  trace.ttts_fallbacks = rule.fallback_count();
  return trace;
}

std::vector<Trace> run_many(const InstanceSpec& instance,
                            const RuleFactory& factory,
                            const BeliefState& init,
                            const TrialOptions& options, int n_seeds,
                            std::uint64_t base_seed, int threads) {
  if (n_seeds < 1) throw std::invalid_argument("run_many: need >= 1 seed");
  if (threads <= 0) {
    threads = static_cast<int>(std::thread::hardware_concurrency());
    if (threads <= 0) threads = 1;
  }
  threads = std::min(threads, n_seeds);

  std::vector<Trace> out(n_seeds);
  std::atomic<int> next{0};
  auto worker = [&]() {
    for (;;) {
      const int idx = next.fetch_add(1);
      if (idx >= n_seeds) return;
      auto rule = factory();
      out[idx] = run_trial(instance, *rule, init, options, base_seed + idx);
    }
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return out;
}

std::vector<std::optional<long>> hitting_times(const Trace& trace,
                                               std::span<const double> levels) {
  std::vector<std::optional<long>> out(levels.size());
  for (size_t li = 0; li < levels.size(); ++li) {
    for (const TraceRecord& r : trace.records) {
      const double top = *std::max_element(r.alpha.begin(), r.alpha.end());
      if (top >= levels[li]) {
        out[li] = r.n;
        break;
      }
    }
  }
  return out;
}

ExponentFit fit_exponent(const Trace& trace, double tail_fraction) {
  if (!(tail_fraction > 0.0 && tail_fraction <= 1.0)) {
    throw std::invalid_argument("fit_exponent: tail_fraction must lie in (0, 1]");
  }
  ExponentFit fit;

  // -log error mass per record, stopping where the linear pipeline floors.
  std::vector<double> xs, ys;
  xs.reserve(trace.records.size());
  ys.reserve(trace.records.size());
  for (const TraceRecord& r : trace.records) {
    double log_err = kNegInf;  // natural log of sum of suboptimal alpha
    for (int i = 0; i < trace.k; ++i) {
      if (i == trace.best_arm) continue;
      // Floored linear-pipeline entries are below everything that still
      // resolves; dropping them changes the sum by less than the floor.
      if (!trace.exact_log && r.log10_inv_alpha[i] >= kLinearFloorLog10) {
        continue;
      }
      log_err = log_add_exp(log_err, -r.log10_inv_alpha[i] * kLn10);
    }
    if (log_err == kNegInf) {
      fit.truncated = true;
      break;
    }
    xs.push_back(static_cast<double>(r.n));
    ys.push_back(-log_err);
  }
  if (xs.size() < 2) {
    throw std::invalid_argument("fit_exponent: too few usable records");
  }
  const size_t tail = std::max<size_t>(
      2, static_cast<size_t>(std::ceil(tail_fraction * xs.size())));
  const size_t first = xs.size() - std::min(tail, xs.size());
  fit.points = static_cast<int>(xs.size() - first);
  fit.slope = ls_slope(std::span(xs).subspan(first), std::span(ys).subspan(first));
  return fit;
}

Summary aggregate(std::span<const Trace> traces,
                  std::span<const double> levels) {
  if (traces.empty()) throw std::invalid_argument("aggregate: no traces");
  const Trace& head = traces.front();
  for (const Trace& t : traces) {
    if (t.rule != head.rule || t.fingerprint != head.fingerprint ||
        t.k != head.k) {
      throw std::invalid_argument("aggregate: traces are not homogeneous");
    }
  }

  Summary s;
  s.rule = head.rule;
  s.trials = static_cast<int>(traces.size());
  s.mean_share.assign(head.k, 0.0);
  s.mean_log10_inv.assign(head.k, 0.0);

  std::vector<std::vector<long>> hits(levels.size());
  for (const Trace& t : traces) {
    const auto ht = hitting_times(t, levels);
    for (size_t li = 0; li < levels.size(); ++li) {
      if (ht[li].has_value()) hits[li].push_back(*ht[li]);
    }
    for (int i = 0; i < head.k; ++i) {
      s.mean_share[i] += static_cast<double>(t.counts[i]) / t.length;
      s.mean_log10_inv[i] += t.records.back().log10_inv_alpha[i];
    }
    s.mean_length += static_cast<double>(t.length);
    if (t.censored) ++s.censored;
  }
  for (int i = 0; i < head.k; ++i) {
    s.mean_share[i] /= s.trials;
    s.mean_log10_inv[i] /= s.trials;
  }
  s.mean_length /= s.trials;

  s.hits.resize(levels.size());
  for (size_t li = 0; li < levels.size(); ++li) {
    LevelStat& stat = s.hits[li];
    stat.level = levels[li];
    stat.censored = s.trials - static_cast<int>(hits[li].size());
    if (hits[li].empty()) {
      stat.mean = std::numeric_limits<double>::quiet_NaN();
      stat.se = std::numeric_limits<double>::quiet_NaN();
      continue;
    }
    double mean = 0.0;
    for (long h : hits[li]) mean += static_cast<double>(h);
    mean /= hits[li].size();
    double var = 0.0;
    for (long h : hits[li]) var += (h - mean) * (h - mean);
    var = hits[li].size() > 1 ? var / (hits[li].size() - 1) : 0.0;
    stat.mean = mean;
    stat.se = std::sqrt(var / hits[li].size());
  }
  return s;
}

}  // namespace toptwo
