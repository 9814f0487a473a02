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

#include "toptwo/rules.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "toptwo/dist.hpp"

namespace toptwo {
namespace {

int argmax_lowest(std::span<const double> xs) {
  int best = 0;
  for (int i = 1; i < static_cast<int>(xs.size()); ++i) {
    if (xs[i] > xs[best]) best = i;
  }
  return best;
}

int argmax_lowest_excluding(std::span<const double> xs, int skip) {
  int best = skip == 0 ? 1 : 0;
  for (int i = 0; i < static_cast<int>(xs.size()); ++i) {
    if (i == skip) continue;
    if (xs[i] > xs[best]) best = i;
  }
  return best;
}

int argmin_lowest_excluding(std::span<const double> xs, int skip) {
  int best = skip == 0 ? 1 : 0;
  for (int i = 0; i < static_cast<int>(xs.size()); ++i) {
    if (i == skip) continue;
    if (xs[i] < xs[best]) best = i;
  }
  return best;
}

bool coin(double p, std::mt19937_64& rng) {
  std::bernoulli_distribution d(p);
  return d(rng);
}

void require_normal(const BeliefState& state, const char* who) {
  if (state.kind() != BeliefKind::kNormal) {
    throw std::invalid_argument(std::string(who) +
                                ": requires Gaussian-conjugate beliefs");
  }
}

std::vector<double> top_two_psi(int k, int top, int alt, double beta) {
  std::vector<double> psi(k, 0.0);
  psi[top] = beta;
  psi[alt] = 1.0 - beta;
  return psi;
}

class ThompsonRule final : public Rule {
 public:
  explicit ThompsonRule(RuleConfig cfg) : cfg_(cfg) { cfg_.validate(); }

  SelectionOutcome select(const BeliefState& state,
                          std::mt19937_64& rng) override {
    buf_.resize(state.k());
    state.sample_means_into(buf_, rng);
    const int pick = argmax_lowest(buf_);
    return {.chosen = pick, .top = pick};
  }
  std::string name() const override { return "ts"; }

 private:
  RuleConfig cfg_;
  std::vector<double> buf_;
};

class TopTwoThompsonRule final : public Rule {
 public:
  explicit TopTwoThompsonRule(RuleConfig cfg)
      : cfg_(cfg), cache_(cfg.quadrature_points) {
    cfg_.validate();
  }

  SelectionOutcome select(const BeliefState& state,
                          std::mt19937_64& rng) override {
    buf_.resize(state.k());
    PosteriorSampler sampler(state);
    sampler.sample_into(buf_, rng);
    const int leader = argmax_lowest(buf_);
    if (coin(cfg_.beta, rng)) {
      return {.chosen = leader, .top = leader};
    }
    int challenger = -1;
    for (long t = 0; t < cfg_.resample_cap; ++t) {
      sampler.sample_into(buf_, rng);
      const int j = argmax_lowest(buf_);
      if (j != leader) {
        challenger = j;
        break;
      }
    }
    if (challenger < 0) {
      // The redraw loop exceeded its cap because the posterior is nearly
      // decided. Deterministic fallback: the most probable alternative
      // under the most precise alpha pipeline available.
      ++fallbacks_;
      challenger = fallback_challenger(state);
    }
    return {.chosen = challenger, .top = leader, .alternative = challenger};
  }

  std::string name() const override { return "ttts"; }
  long fallback_count() const override { return fallbacks_; }

 private:
  int fallback_challenger(const BeliefState& state) {
    if (state.kind() == BeliefKind::kGrid) {
      const GridLogAlpha la = grid_log_alpha(state);
      return la.argmax_excluding(la.argmax());
    }
    const std::vector<double>& a = cache_.alpha(state);
    return argmax_lowest_excluding(a, argmax_lowest(a));
  }

  RuleConfig cfg_;
  IncrementalAlpha cache_;
  std::vector<double> buf_;
  long fallbacks_ = 0;
};

class TopTwoProbabilityRule final : public Rule {
 public:
  explicit TopTwoProbabilityRule(RuleConfig cfg)
      : cfg_(cfg), cache_(cfg.quadrature_points) {
    cfg_.validate();
  }

  SelectionOutcome select(const BeliefState& state,
                          std::mt19937_64& rng) override {
    int leader = 0;
    int runner = 0;
    if (state.kind() == BeliefKind::kGrid) {
      const GridLogAlpha la = grid_log_alpha(state);
      leader = la.argmax();
      runner = la.argmax_excluding(leader);
    } else if (too_concentrated(state)) {
      const OptimalityEstimate est =
          sample_approx(state, cfg_.mc_samples, cfg_.utility, rng);
      leader = argmax_lowest(est.alpha);
      runner = argmax_lowest_excluding(est.alpha, leader);
    } else {
      const std::vector<double>& a = cache_.alpha(state);
      leader = argmax_lowest(a);
      runner = argmax_lowest_excluding(a, leader);
    }
    const int pick = coin(cfg_.beta, rng) ? leader : runner;
    return {.chosen = pick,
            .top = leader,
            .alternative = runner,
            .psi = top_two_psi(state.k(), leader, runner, cfg_.beta)};
  }

  std::string name() const override { return "ttps"; }

 private:
  bool too_concentrated(const BeliefState& state) const {
    if (state.kind() != BeliefKind::kBeta) return false;
    for (int i = 0; i < state.k(); ++i) {
      if (state.beta_a(i) + state.beta_b(i) > cfg_.concentration_threshold) {
        return true;
      }
    }
    return false;
  }

  RuleConfig cfg_;
  IncrementalAlpha cache_;
};

class TopTwoValueRule final : public Rule {
 public:
  explicit TopTwoValueRule(RuleConfig cfg) : cfg_(cfg) { cfg_.validate(); }

  SelectionOutcome select(const BeliefState& state,
                          std::mt19937_64& rng) override {
    const OptimalityEstimate est =
        sample_approx(state, cfg_.mc_samples, cfg_.utility, rng);
    const int leader = argmax_lowest(est.value);
    const int runner = argmax_lowest_excluding(est.value, leader);
    const int pick = coin(cfg_.beta, rng) ? leader : runner;
    return {.chosen = pick,
            .top = leader,
            .alternative = runner,
            .psi = top_two_psi(state.k(), leader, runner, cfg_.beta)};
  }

  std::string name() const override { return "ttvs"; }

 private:
  RuleConfig cfg_;
};

class UniformRule final : public Rule {
 public:
  SelectionOutcome select(const BeliefState& state,
                          std::mt19937_64& rng) override {
    std::uniform_int_distribution<int> pick(0, state.k() - 1);
    const int arm = pick(rng);
    return {.chosen = arm,
            .top = arm,
            .psi = std::vector<double>(state.k(), 1.0 / state.k())};
  }
  std::string name() const override { return "uniform"; }
};

class FixedRule final : public Rule {
 public:
  explicit FixedRule(std::vector<double> psi) : psi_(std::move(psi)) {
    if (psi_.empty()) throw std::invalid_argument("fixed rule: psi is empty");
    double total = 0.0;
    for (double p : psi_) {
      if (p < 0.0) throw std::invalid_argument("fixed rule: negative weight");
      total += p;
    }
    if (std::abs(total - 1.0) > 1e-9) {
      throw std::invalid_argument("fixed rule: psi must sum to 1");
    }
  }

  SelectionOutcome select(const BeliefState& state,
                          std::mt19937_64& rng) override {
    if (static_cast<int>(psi_.size()) != state.k()) {
      throw std::invalid_argument("fixed rule: psi size does not match k");
    }
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const double u = unif(rng);
    double cum = 0.0;
    int arm = state.k() - 1;
    for (int i = 0; i < state.k(); ++i) {
      cum += psi_[i];
      if (u < cum) {
        arm = i;
        break;
      }
    }
    return {.chosen = arm, .top = arm, .psi = psi_};
  }
  std::string name() const override { return "fixed"; }

 private:
  std::vector<double> psi_;
};

class TwoStageRule final : public Rule {
 public:
  TwoStageRule(long explore_len, RuleConfig cfg)
      : explore_len_(explore_len), cfg_(cfg) {
    if (explore_len_ < 1) {
      throw std::invalid_argument("two-stage rule: exploration length must be >= 1");
    }
    cfg_.validate();
  }

  SelectionOutcome select(const BeliefState& state,
                          std::mt19937_64& rng) override {
    if (state.n() < explore_len_) {
      std::uniform_int_distribution<int> pick(0, state.k() - 1);
      const int arm = pick(rng);
      return {.chosen = arm,
              .top = arm,
              .psi = std::vector<double>(state.k(), 1.0 / state.k())};
    }
    if (!solved_) solve_plugin(state);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const double u = unif(rng);
    double cum = 0.0;
    int arm = state.k() - 1;
    for (int i = 0; i < state.k(); ++i) {
      cum += psi_hat_[i];
      if (u < cum) {
        arm = i;
        break;
      }
    }
    return {.chosen = arm, .top = arm, .psi = psi_hat_};
  }

  std::string name() const override { return "two_stage"; }

 private:
  void solve_plugin(const BeliefState& state) {
    InstanceSpec plugin;
    plugin.model = state.model();
    plugin.means.resize(state.k());
    for (int i = 0; i < state.k(); ++i) {
      plugin.means[i] = state.posterior_mean(i);
    }
    // Tied or out-of-domain point estimates make the solve ill posed;
    // nudge deterministically until the instance validates.
    const double span = state.model().mean_hi - state.model().mean_lo;
    for (int attempt = 0; attempt < 4; ++attempt) {
      for (int i = 0; i < state.k(); ++i) {
        plugin.means[i] = std::clamp(plugin.means[i],
                                     state.model().mean_lo + 1e-9 * span,
                                     state.model().mean_hi - 1e-9 * span);
      }
      try {
        plugin.validate();
        psi_hat_ = solve_gamma_star(plugin).psi;
        solved_ = true;
        return;
      } catch (const std::invalid_argument&) {
        for (int i = 0; i < state.k(); ++i) {
          plugin.means[i] += (i + 1) * 1e-9 * span * (attempt + 1);
        }
      }
    }
    // Point estimates still degenerate: keep exploring uniformly.
    psi_hat_.assign(state.k(), 1.0 / state.k());
    solved_ = true;
  }

  long explore_len_;
  RuleConfig cfg_;
  bool solved_ = false;
  std::vector<double> psi_hat_;
};

class ExpectedImprovementRule final : public Rule {
 public:
  SelectionOutcome select(const BeliefState& state,
                          std::mt19937_64& /*rng*/) override {
    require_normal(state, "expected-improvement rule");
    const int k = state.k();
    int incumbent = 0;
    for (int i = 1; i < k; ++i) {
      if (state.normal_mean(i) > state.normal_mean(incumbent)) incumbent = i;
    }
    double second_mean = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < k; ++i) {
      if (i != incumbent) second_mean = std::max(second_mean, state.normal_mean(i));
    }
    const double m_star = state.normal_mean(incumbent);

    std::vector<double> ei(k, 0.0);
    for (int i = 0; i < k; ++i) {
      const double reference = i == incumbent ? second_mean : m_star;
      const double mean = state.normal_mean(i);
      const double sd = std::sqrt(state.normal_var(i));
      if (sd == 0.0) {
        ei[i] = std::max(0.0, mean - reference);
        continue;
      }
      const double z = (mean - reference) / sd;
      ei[i] = sd * normal_pdf(z, 0.0, 1.0) +
              (mean - reference) * normal_cdf(z, 0.0, 1.0);
    }
    const int pick = argmax_lowest(ei);
    std::vector<double> psi(k, 0.0);
    psi[pick] = 1.0;
    return {.chosen = pick, .top = pick, .psi = std::move(psi)};
  }
  std::string name() const override { return "ei"; }
};

class MapTopTwoRule final : public Rule {
 public:
  explicit MapTopTwoRule(RuleConfig cfg) : cfg_(cfg) { cfg_.validate(); }

  SelectionOutcome select(const BeliefState& state,
                          std::mt19937_64& rng) override {
    require_normal(state, "MAP top-two rule");
    const int k = state.k();
    std::vector<double> means(k);
    for (int i = 0; i < k; ++i) means[i] = state.normal_mean(i);
    const int leader = argmax_lowest(means);

    // Cheapest way to make arm j overtake the leader: pool both at their
    // precision-weighted average. The log-density drop is
    // (m_leader - m_j)^2 / (2 (v_leader + v_j)).
    std::vector<double> penalty(k, 0.0);
    for (int j = 0; j < k; ++j) {
      if (j == leader) continue;
      const double gap = means[leader] - means[j];
      penalty[j] =
          gap * gap / (2.0 * (state.normal_var(leader) + state.normal_var(j)));
    }
    const int challenger = argmin_lowest_excluding(penalty, leader);
    const int pick = coin(cfg_.beta, rng) ? leader : challenger;
    return {.chosen = pick,
            .top = leader,
            .alternative = challenger,
            .psi = top_two_psi(k, leader, challenger, cfg_.beta)};
  }
  std::string name() const override { return "map_toptwo"; }

 private:
  RuleConfig cfg_;
};

}  // namespace

void RuleConfig::validate() const {
  // beta == 1 is allowed as the degenerate leader-only rule.
  if (!(beta > 0.0 && beta <= 1.0)) {
    throw std::invalid_argument("rule config: beta must lie in (0, 1]");
  }
  if (mc_samples < 1) {
    throw std::invalid_argument("rule config: mc_samples must be >= 1");
  }
  if (quadrature_points < 3) {
    throw std::invalid_argument("rule config: quadrature_points must be >= 3");
  }
  if (resample_cap < 1) {
    throw std::invalid_argument("rule config: resample_cap must be >= 1");
  }
  if (!(concentration_threshold > 0.0)) {
    throw std::invalid_argument("rule config: concentration_threshold must be > 0");
  }
}

std::vector<double> psi_ttts_formula(std::span<const double> alpha,
                                     double beta) {
  if (!(beta > 0.0 && beta <= 1.0)) {
    throw std::invalid_argument("psi_ttts_formula: beta must lie in (0, 1]");
  }
  double total = 0.0;
  for (double a : alpha) {
    if (a >= 1.0) {
      throw std::domain_error("psi_ttts_formula: alpha entry equal to 1");
    }
    if (a < 0.0) {
      throw std::invalid_argument("psi_ttts_formula: negative alpha entry");
    }
    total += a;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw std::invalid_argument("psi_ttts_formula: alpha must sum to 1");
  }
  const int k = static_cast<int>(alpha.size());
  double odds_total = 0.0;
  for (double a : alpha) odds_total += a / (1.0 - a);
  std::vector<double> psi(k);
  for (int i = 0; i < k; ++i) {
    const double others = odds_total - alpha[i] / (1.0 - alpha[i]);
    psi[i] = alpha[i] * (beta + (1.0 - beta) * others);
  }
  return psi;
}

std::unique_ptr<Rule> make_thompson(RuleConfig cfg) {
  return std::make_unique<ThompsonRule>(cfg);
}
std::unique_ptr<Rule> make_top_two_thompson(RuleConfig cfg) {
  return std::make_unique<TopTwoThompsonRule>(cfg);
}
std::unique_ptr<Rule> make_top_two_probability(RuleConfig cfg) {
  return std::make_unique<TopTwoProbabilityRule>(cfg);
}
std::unique_ptr<Rule> make_top_two_value(RuleConfig cfg) {
  return std::make_unique<TopTwoValueRule>(cfg);
}
std::unique_ptr<Rule> make_uniform() { return std::make_unique<UniformRule>(); }
std::unique_ptr<Rule> make_fixed(std::vector<double> psi) {
  return std::make_unique<FixedRule>(std::move(psi));
}
std::unique_ptr<Rule> make_two_stage(long explore_len, RuleConfig cfg) {
  return std::make_unique<TwoStageRule>(explore_len, cfg);
}
std::unique_ptr<Rule> make_expected_improvement() {
  return std::make_unique<ExpectedImprovementRule>();
}
std::unique_ptr<Rule> make_map_top_two(RuleConfig cfg) {
  return std::make_unique<MapTopTwoRule>(cfg);
}

long two_stage_default_explore(long budget) {
  if (budget < 1) throw std::invalid_argument("two_stage_default_explore: budget >= 1");
  return static_cast<long>(std::ceil(std::pow(static_cast<double>(budget), 2.0 / 3.0)));
}

std::unique_ptr<Rule> make_rule(const std::string& name, const RuleConfig& cfg,
                                const std::vector<double>* fixed_psi,
                                std::optional<long> two_stage_explore) {
  if (name == "ts") return make_thompson(cfg);
  if (name == "ttts") return make_top_two_thompson(cfg);
  if (name == "ttps") return make_top_two_probability(cfg);
  if (name == "ttvs") return make_top_two_value(cfg);
  if (name == "uniform") return make_uniform();
  if (name == "fixed") {
    if (fixed_psi == nullptr) {
      throw std::invalid_argument("rule 'fixed' requires an allocation vector");
    }
    return make_fixed(*fixed_psi);
  }
  if (name == "two_stage") {
    if (!two_stage_explore.has_value()) {
      throw std::invalid_argument("rule 'two_stage' requires an exploration length");
    }
    return make_two_stage(*two_stage_explore, cfg);
  }
  if (name == "ei") return make_expected_improvement();
  if (name == "map_toptwo") return make_map_top_two(cfg);
  throw std::invalid_argument("unknown rule name: " + name);
}

}  // namespace toptwo
