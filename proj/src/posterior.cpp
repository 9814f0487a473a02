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

#include "toptwo/posterior.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "toptwo/dist.hpp"

namespace toptwo {
namespace {

void check_arm(int arm, int k) {
  if (arm < 0 || arm >= k) throw std::out_of_range("arm index out of range");
}

double grid_log_likelihood(const ObservationModel& model, double y, double x) {
  if (model.kind == ModelKind::kBernoulli) {
    return y == 1.0 ? std::log(x) : std::log1p(-x);
  }
  const double z = (y - x) / model.sigma;
  return -0.5 * z * z;  // constants cancel in the renormalization
}

}  // namespace

BeliefState BeliefState::beta_prior(const ObservationModel& model, int k,
                                    double a0, double b0) {
  model.require_valid();
  if (model.kind != ModelKind::kBernoulli) {
    throw std::invalid_argument("beta_prior: requires a Bernoulli model");
  }
  if (k < 2) throw std::invalid_argument("beta_prior: need k >= 2");
  if (!(a0 > 0.0 && b0 > 0.0)) {
    throw std::invalid_argument("beta_prior: prior parameters must be positive");
  }
  BeliefState s;
  s.model_ = model;
  s.kind_ = BeliefKind::kBeta;
  s.k_ = k;
  s.a_.assign(k, a0);
  s.b_.assign(k, b0);
  return s;
}

BeliefState BeliefState::normal_prior(const ObservationModel& model, int k,
                                      double prior_mean, double prior_var) {
  model.require_valid();
  if (model.kind != ModelKind::kGaussian) {
    throw std::invalid_argument("normal_prior: requires a Gaussian model");
  }
  if (k < 2) throw std::invalid_argument("normal_prior: need k >= 2");
  if (!(prior_var > 0.0)) {
    throw std::invalid_argument("normal_prior: prior variance must be positive");
  }
  BeliefState s;
  s.model_ = model;
  s.kind_ = BeliefKind::kNormal;
  s.k_ = k;
  s.mean_.assign(k, prior_mean);
  s.var_.assign(k, prior_var);
  return s;
}

BeliefState BeliefState::grid_prior(const ObservationModel& model, int k,
                                    int points) {
  model.require_valid();
  if (k < 2) throw std::invalid_argument("grid_prior: need k >= 2");
  if (points < 3) throw std::invalid_argument("grid_prior: need >= 3 points");
  auto support = std::make_shared<std::vector<double>>();
  support->reserve(points);
  const double step = (model.mean_hi - model.mean_lo) / points;
  for (int m = 0; m < points; ++m) {
    support->push_back(model.mean_lo + (m + 0.5) * step);
  }
  BeliefState s;
  s.model_ = model;
  s.kind_ = BeliefKind::kGrid;
  s.k_ = k;
  s.support_ = std::move(support);
  s.logw_.assign(static_cast<size_t>(k) * points,
                 -std::log(static_cast<double>(points)));
  return s;
}

void BeliefState::apply(int arm, double y) {
  check_arm(arm, k_);
  switch (kind_) {
    case BeliefKind::kBeta:
      if (y != 0.0 && y != 1.0) {
        throw std::invalid_argument("update: Bernoulli observation must be 0 or 1");
      }
      a_[arm] += y;
      b_[arm] += 1.0 - y;
      break;
    case BeliefKind::kNormal: {
      const double noise_var = model_.sigma * model_.sigma;
      const double precision = 1.0 / var_[arm] + 1.0 / noise_var;
      mean_[arm] = (mean_[arm] / var_[arm] + y / noise_var) / precision;
      var_[arm] = 1.0 / precision;
      break;
    }
    case BeliefKind::kGrid: {
      if (model_.kind == ModelKind::kBernoulli && y != 0.0 && y != 1.0) {
        throw std::invalid_argument("update: Bernoulli observation must be 0 or 1");
      }
      const auto& xs = *support_;
      const int m = static_cast<int>(xs.size());
      double* w = &logw_[static_cast<size_t>(arm) * m];
      for (int i = 0; i < m; ++i) {
        w[i] += grid_log_likelihood(model_, y, xs[i]);
      }
      const double lse = log_sum_exp(std::span<const double>(w, m));
      for (int i = 0; i < m; ++i) w[i] -= lse;
      break;
    }
  }
  ++count_;
}

BeliefState BeliefState::updated(int arm, double y) const {
  BeliefState next = *this;
  next.apply(arm, y);
  return next;
}

void BeliefState::sample_means_into(std::span<double> out,
                                    std::mt19937_64& rng) const {
  PosteriorSampler(*this).sample_into(out, rng);
}

std::vector<double> BeliefState::sample_means(std::mt19937_64& rng) const {
  std::vector<double> out(k_);
  sample_means_into(out, rng);
  return out;
}

double BeliefState::posterior_mean(int arm) const {
  check_arm(arm, k_);
  switch (kind_) {
    case BeliefKind::kBeta:
      return a_[arm] / (a_[arm] + b_[arm]);
    case BeliefKind::kNormal:
      return mean_[arm];
    case BeliefKind::kGrid: {
      const auto& xs = *support_;
      const int m = static_cast<int>(xs.size());
      const double* w = &logw_[static_cast<size_t>(arm) * m];
      double acc = 0.0;
      for (int i = 0; i < m; ++i) acc += std::exp(w[i]) * xs[i];
      return acc;
    }
  }
  return 0.0;
}

std::pair<double, double> BeliefState::marginal_pdf_cdf(int arm,
                                                        double x) const {
  check_arm(arm, k_);
  switch (kind_) {
    case BeliefKind::kBeta:
      return {beta_pdf(a_[arm], b_[arm], x), beta_cdf(a_[arm], b_[arm], x)};
    case BeliefKind::kNormal: {
      const double sd = std::sqrt(var_[arm]);
      return {normal_pdf(x, mean_[arm], sd), normal_cdf(x, mean_[arm], sd)};
    }
    case BeliefKind::kGrid: {
      const auto& xs = *support_;
      const int m = static_cast<int>(xs.size());
      const double* w = &logw_[static_cast<size_t>(arm) * m];
      double mass = 0.0, cum = 0.0;
      const double tol = 1e-12 * std::max(1.0, std::abs(x));
      for (int i = 0; i < m && xs[i] <= x + tol; ++i) {
        cum += std::exp(w[i]);
        if (std::abs(xs[i] - x) <= tol) mass = std::exp(w[i]);
      }
      return {mass, std::min(cum, 1.0)};
    }
  }
  return {0.0, 0.0};
}

double BeliefState::beta_a(int arm) const {
  check_arm(arm, k_);
  return a_[arm];
}
double BeliefState::beta_b(int arm) const {
  check_arm(arm, k_);
  return b_[arm];
}
double BeliefState::normal_mean(int arm) const {
  check_arm(arm, k_);
  return mean_[arm];
}
double BeliefState::normal_var(int arm) const {
  check_arm(arm, k_);
  return var_[arm];
}

const std::vector<double>& BeliefState::grid_support() const {
  if (kind_ != BeliefKind::kGrid) {
    throw std::logic_error("grid_support: not a grid belief");
  }
  return *support_;
}

std::span<const double> BeliefState::grid_log_weights(int arm) const {
  check_arm(arm, k_);
  if (kind_ != BeliefKind::kGrid) {
    throw std::logic_error("grid_log_weights: not a grid belief");
  }
  const size_t m = support_->size();
  return {&logw_[arm * m], m};
}

nlohmann::ordered_json BeliefState::to_json() const {
  nlohmann::ordered_json j;
  j["model"] = {{"kind", model_.kind_name()},
                {"sigma", model_.sigma},
                {"mean_lo", model_.mean_lo},
                {"mean_hi", model_.mean_hi}};
  j["n"] = count_;
  nlohmann::ordered_json arms = nlohmann::ordered_json::array();
  switch (kind_) {
    case BeliefKind::kBeta:
      j["kind"] = "beta";
      for (int i = 0; i < k_; ++i) arms.push_back({{"a", a_[i]}, {"b", b_[i]}});
      break;
    case BeliefKind::kNormal:
      j["kind"] = "normal";
      for (int i = 0; i < k_; ++i) {
        arms.push_back({{"mean", mean_[i]}, {"var", var_[i]}});
      }
      break;
    case BeliefKind::kGrid:
      j["kind"] = "grid";
      j["support"] = *support_;
      for (int i = 0; i < k_; ++i) {
        const auto w = grid_log_weights(i);
        arms.push_back(
            {{"log_weights", std::vector<double>(w.begin(), w.end())}});
      }
      break;
  }
  j["arms"] = std::move(arms);
  return j;
}

BeliefState BeliefState::from_json(const nlohmann::json& j) {
  ObservationModel model;
  const auto& jm = j.at("model");
  const std::string kind_name = jm.at("kind").get<std::string>();
  if (kind_name == "bernoulli") {
    model = ObservationModel::bernoulli();
  } else if (kind_name == "gaussian") {
    model = ObservationModel::gaussian(jm.at("sigma").get<double>(),
                                       jm.at("mean_lo").get<double>(),
                                       jm.at("mean_hi").get<double>());
  } else {
    throw std::invalid_argument("belief json: unknown model kind");
  }

  const std::string belief_kind = j.at("kind").get<std::string>();
  const auto& arms = j.at("arms");
  const int k = static_cast<int>(arms.size());
  BeliefState s;
  if (belief_kind == "beta") {
    s = beta_prior(model, k);
    for (int i = 0; i < k; ++i) {
      s.a_[i] = arms[i].at("a").get<double>();
      s.b_[i] = arms[i].at("b").get<double>();
      if (!(s.a_[i] > 0.0 && s.b_[i] > 0.0)) {
        throw std::invalid_argument("belief json: beta parameters must be positive");
      }
    }
  } else if (belief_kind == "normal") {
    s = normal_prior(model, k, 0.0, 1.0);
    for (int i = 0; i < k; ++i) {
      s.mean_[i] = arms[i].at("mean").get<double>();
      s.var_[i] = arms[i].at("var").get<double>();
      if (!(s.var_[i] > 0.0)) {
        throw std::invalid_argument("belief json: variance must be positive");
      }
    }
  } else if (belief_kind == "grid") {
    auto support = std::make_shared<std::vector<double>>(
        j.at("support").get<std::vector<double>>());
    if (support->size() < 3 || !std::is_sorted(support->begin(), support->end())) {
      throw std::invalid_argument("belief json: bad grid support");
    }
    s.model_ = model;
    s.kind_ = BeliefKind::kGrid;
    s.k_ = k;
    s.support_ = support;
    s.logw_.reserve(static_cast<size_t>(k) * support->size());
    for (int i = 0; i < k; ++i) {
      auto w = arms[i].at("log_weights").get<std::vector<double>>();
      if (w.size() != support->size()) {
        throw std::invalid_argument("belief json: weight/support size mismatch");
      }
      s.logw_.insert(s.logw_.end(), w.begin(), w.end());
    }
  } else {
    throw std::invalid_argument("belief json: unknown belief kind");
  }
  s.count_ = j.at("n").get<long>();
  return s;
}

PosteriorSampler::PosteriorSampler(const BeliefState& state) : state_(&state) {
  if (state.kind() == BeliefKind::kGrid) {
    const auto& xs = state.grid_support();
    const int m = static_cast<int>(xs.size());
    cum_.resize(static_cast<size_t>(state.k()) * m);
    for (int arm = 0; arm < state.k(); ++arm) {
      const auto w = state.grid_log_weights(arm);
      double hi = kNegInf;
      for (double v : w) hi = std::max(hi, v);
      double acc = 0.0;
      double* c = &cum_[static_cast<size_t>(arm) * m];
      for (int i = 0; i < m; ++i) {
        acc += std::exp(w[i] - hi);
        c[i] = acc;
      }
    }
  }
}

void PosteriorSampler::sample_into(std::span<double> out,
                                   std::mt19937_64& rng) const {
  const BeliefState& s = *state_;
  const int k = s.k();
  switch (s.kind()) {
    case BeliefKind::kBeta:
      for (int i = 0; i < k; ++i) {
        out[i] = sample_beta(s.beta_a(i), s.beta_b(i), rng);
      }
      break;
    case BeliefKind::kNormal:
      for (int i = 0; i < k; ++i) {
        std::normal_distribution<double> d(s.normal_mean(i),
                                           std::sqrt(s.normal_var(i)));
        out[i] = d(rng);
      }
      break;
    case BeliefKind::kGrid: {
      const auto& xs = s.grid_support();
      const int m = static_cast<int>(xs.size());
      std::uniform_real_distribution<double> unif(0.0, 1.0);
      for (int i = 0; i < k; ++i) {
        const double* c = &cum_[static_cast<size_t>(i) * m];
        const double u = unif(rng) * c[m - 1];
        const int idx = static_cast<int>(
            std::upper_bound(c, c + m, u) - c);
        out[i] = xs[std::min(idx, m - 1)];
      }
      break;
    }
  }
}

}  // namespace toptwo
