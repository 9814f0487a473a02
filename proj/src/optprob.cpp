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

#include "toptwo/optprob.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "toptwo/dist.hpp"

namespace toptwo {
namespace {

// After this many in-place CDF adjustments an arm's row is recomputed
// from scratch to shed accumulated rounding error.
constexpr int kResyncInterval = 4096;

int argmax_index(std::span<const double> xs) {
  int best = 0;
  for (int i = 1; i < static_cast<int>(xs.size()); ++i) {
    if (xs[i] > xs[best]) best = i;
  }
  return best;
}

}  // namespace

QuadratureGrid QuadratureGrid::midpoints(const ObservationModel& model,
                                         int m) {
  if (m < 3) throw std::invalid_argument("quadrature grid: need >= 3 points");
  QuadratureGrid g;
  g.points.reserve(m);
  const double step = (model.mean_hi - model.mean_lo) / m;
  for (int i = 0; i < m; ++i) {
    g.points.push_back(model.mean_lo + (i + 0.5) * step);
  }
  return g;
}

void QuadratureGrid::require_valid(const ObservationModel& model) const {
  if (size() < 3) throw std::invalid_argument("quadrature grid: need >= 3 points");
  if (!std::is_sorted(points.begin(), points.end())) {
    throw std::invalid_argument("quadrature grid: points must be increasing");
  }
  if (!(points.front() > model.mean_lo && points.back() < model.mean_hi)) {
    throw std::invalid_argument(
        "quadrature grid: points must lie strictly inside the mean domain");
  }
}

const std::vector<double>& IncrementalAlpha::alpha(const BeliefState& state) {
  if (state.kind() == BeliefKind::kGrid) {
    throw std::logic_error("IncrementalAlpha: use grid_log_alpha for grid beliefs");
  }
  if (!built_ || state.kind() != kind_ || state.k() != k_) {
    rebuild(state);
  } else {
    for (int i = 0; i < k_; ++i) {
      const double q1 = state.kind() == BeliefKind::kBeta ? state.beta_a(i)
                                                          : state.normal_mean(i);
      const double q2 = state.kind() == BeliefKind::kBeta ? state.beta_b(i)
                                                          : state.normal_var(i);
      if (q1 != p1_[i] || q2 != p2_[i]) refresh_arm(state, i);
    }
  }

  const int m = grid_.size();
  std::fill(alpha_.begin(), alpha_.end(), 0.0);
  for (int p = 0; p < m; ++p) {
    for (int i = 0; i < k_; ++i) {
      // Product over j != i built directly, never by dividing the full
      // product by F_i (which is 0 in the tails).
      double prod = dens_[static_cast<size_t>(i) * m + p];
      if (prod == 0.0) continue;
      for (int j = 0; j < k_; ++j) {
        if (j == i) continue;
        prod *= cdf_[static_cast<size_t>(j) * m + p];
        if (prod == 0.0) break;
      }
      alpha_[i] += prod;
    }
  }
  double total = 0.0;
  for (double a : alpha_) total += a;
  if (total > 0.0) {
    for (double& a : alpha_) a /= total;
  } else {
    // Posterior so concentrated that every product underflowed; fall back
    // to a point-mass on the arm with the largest posterior mean.
    std::fill(alpha_.begin(), alpha_.end(), 0.0);
    int best = 0;
    for (int i = 1; i < k_; ++i) {
      if (state.posterior_mean(i) > state.posterior_mean(best)) best = i;
    }
    alpha_[best] = 1.0;
  }
  return alpha_;
}

void IncrementalAlpha::rebuild(const BeliefState& state) {
  kind_ = state.kind();
  k_ = state.k();
  grid_ = QuadratureGrid::midpoints(state.model(), points_);
  const int m = grid_.size();
  dens_.assign(static_cast<size_t>(k_) * m, 0.0);
  cdf_.assign(static_cast<size_t>(k_) * m, 0.0);
  p1_.assign(k_, std::numeric_limits<double>::quiet_NaN());
  p2_.assign(k_, std::numeric_limits<double>::quiet_NaN());
  adjust_.assign(k_, 0);
  alpha_.assign(k_, 0.0);
  built_ = true;
  for (int i = 0; i < k_; ++i) refresh_arm(state, i);
}

void IncrementalAlpha::refresh_arm(const BeliefState& state, int arm) {
  const int m = grid_.size();
  double* f = &dens_[static_cast<size_t>(arm) * m];
  double* F = &cdf_[static_cast<size_t>(arm) * m];
  const auto& xs = grid_.points;

  if (kind_ == BeliefKind::kBeta) {
    const double a = state.beta_a(arm);
    const double b = state.beta_b(arm);
    const double a0 = p1_[arm];
    const double b0 = p2_[arm];
    const bool success_step = (a == a0 + 1.0 && b == b0);
    const bool failure_step = (a == a0 && b == b0 + 1.0);
    int& adj = adjust_[arm];
    if ((success_step || failure_step) && adj < kResyncInterval) {
      // One-observation update: the CDF row moves by an analytic term,
      //   I_x(a+1, b) = I_x(a, b) - x^a (1-x)^b / (a B(a, b))
      //   I_x(a, b+1) = I_x(a, b) + x^a (1-x)^b / (b B(a, b))
      // and the density row is re-evaluated directly.
      const double lb = log_beta_fn(a0, b0);
      const double lbn = log_beta_fn(a, b);
      for (int p = 0; p < m; ++p) {
        const double lx = std::log(xs[p]);
        const double l1x = std::log1p(-xs[p]);
        const double t = std::exp(a0 * lx + b0 * l1x - lb);
        F[p] = success_step ? std::max(0.0, F[p] - t / a0)
                            : std::min(1.0, F[p] + t / b0);
        f[p] = std::exp((a - 1.0) * lx + (b - 1.0) * l1x - lbn);
      }
      ++adj;
    } else {
      const double lbn = log_beta_fn(a, b);
      for (int p = 0; p < m; ++p) {
        const double lx = std::log(xs[p]);
        const double l1x = std::log1p(-xs[p]);
        f[p] = std::exp((a - 1.0) * lx + (b - 1.0) * l1x - lbn);
        F[p] = beta_cdf(a, b, xs[p]);
      }
      adj = 0;
    }
    p1_[arm] = a;
    p2_[arm] = b;
  } else {
    const double mean = state.normal_mean(arm);
    const double sd = std::sqrt(state.normal_var(arm));
    for (int p = 0; p < m; ++p) {
      f[p] = normal_pdf(xs[p], mean, sd);
      F[p] = normal_cdf(xs[p], mean, sd);
    }
    p1_[arm] = mean;
    p2_[arm] = state.normal_var(arm);
  }
}

OptimalityEstimate alpha_quadrature(const BeliefState& state,
                                    const QuadratureGrid& grid) {
  OptimalityEstimate est;
  est.method = OptimalityEstimate::Method::kQuadrature;
  if (state.kind() == BeliefKind::kGrid) {
    // The belief's own support is the exact quadrature rule.
    const GridLogAlpha la = grid_log_alpha(state);
    est.alpha.resize(state.k());
    for (int i = 0; i < state.k(); ++i) est.alpha[i] = std::exp(la.log_alpha[i]);
    est.samples_or_points = static_cast<long>(state.grid_support().size());
    return est;
  }
  grid.require_valid(state.model());
  IncrementalAlpha inc(grid.size());
  est.alpha = inc.alpha(state);
  est.samples_or_points = grid.size();
  return est;
}

double apply_utility(const ObservationModel& model, Utility u, double mean) {
  if (u == Utility::kIdentity) return mean;
  if (model.kind == ModelKind::kBernoulli) {
    const double p = std::clamp(mean, 1e-12, 1.0 - 1e-12);
    return std::log(p / (1.0 - p));
  }
  return mean / (model.sigma * model.sigma);
}

namespace {

template <typename UtilityFn>
OptimalityEstimate sample_approx_impl(const BeliefState& state, long m,
                                      UtilityFn&& utility,
                                      std::mt19937_64& rng) {
  if (m < 1) throw std::invalid_argument("sample_approx: need m >= 1");
  const int k = state.k();
  OptimalityEstimate est;
  est.method = OptimalityEstimate::Method::kMonteCarlo;
  est.samples_or_points = m;
  est.alpha.assign(k, 0.0);
  est.value.assign(k, 0.0);

  PosteriorSampler sampler(state);
  std::vector<double> draw(k);
  std::vector<int> ties;
  for (long s = 0; s < m; ++s) {
    sampler.sample_into(draw, rng);
    // Top value, tie set, and runner-up value in one pass.
    double top = -std::numeric_limits<double>::infinity();
    double second = -std::numeric_limits<double>::infinity();
    ties.clear();
    for (int i = 0; i < k; ++i) {
      if (draw[i] > top) {
        second = top;
        top = draw[i];
        ties.clear();
        ties.push_back(i);
      } else if (draw[i] == top) {
        second = top;
        ties.push_back(i);
      } else if (draw[i] > second) {
        second = draw[i];
      }
    }
    int winner = ties[0];
    if (ties.size() > 1) {
      std::uniform_int_distribution<int> pick(0, static_cast<int>(ties.size()) - 1);
      winner = ties[pick(rng)];
    }
    est.alpha[winner] += 1.0;
    est.value[winner] += utility(top) - utility(second);
  }
  for (int i = 0; i < k; ++i) {
    est.alpha[i] /= static_cast<double>(m);
    est.value[i] /= static_cast<double>(m);
  }
  return est;
}

}  // namespace

OptimalityEstimate sample_approx(const BeliefState& state, long m, Utility u,
                                 std::mt19937_64& rng) {
  const ObservationModel& model = state.model();
  return sample_approx_impl(
      state, m, [&model, u](double mean) { return apply_utility(model, u, mean); },
      rng);
}

OptimalityEstimate sample_approx(const BeliefState& state, long m,
                                 const std::function<double(double)>& u,
                                 std::mt19937_64& rng) {
  return sample_approx_impl(state, m, u, rng);
}

double posterior_error_mass(const OptimalityEstimate& estimate, int best) {
  if (best < 0 || best >= static_cast<int>(estimate.alpha.size())) {
    throw std::out_of_range("posterior_error_mass: best index out of range");
  }
  return 1.0 - estimate.alpha[best];
}

double GridLogAlpha::log_error_mass(int best) const {
  double acc = kNegInf;
  for (int i = 0; i < static_cast<int>(log_alpha.size()); ++i) {
    if (i != best) acc = log_add_exp(acc, log_alpha[i]);
  }
  return acc;
}

int GridLogAlpha::argmax() const { return argmax_index(log_alpha); }

int GridLogAlpha::argmax_excluding(int skip) const {
  int best = skip == 0 ? 1 : 0;
  for (int i = 0; i < static_cast<int>(log_alpha.size()); ++i) {
    if (i == skip) continue;
    if (log_alpha[i] > log_alpha[best]) best = i;
  }
  return best;
}

GridLogAlpha grid_log_alpha(const BeliefState& state) {
  if (state.kind() != BeliefKind::kGrid) {
    throw std::logic_error("grid_log_alpha: requires a grid belief");
  }
  const int k = state.k();
  const int m = static_cast<int>(state.grid_support().size());

  // Per-arm log CDF along the support (running log-sum-exp), then the
  // total across arms at each point.
  std::vector<double> logF(static_cast<size_t>(k) * m);
  std::vector<double> total(m, 0.0);
  for (int i = 0; i < k; ++i) {
    const auto w = state.grid_log_weights(i);
    double run = kNegInf;
    double* row = &logF[static_cast<size_t>(i) * m];
    for (int p = 0; p < m; ++p) {
      run = log_add_exp(run, w[p]);
      row[p] = std::min(run, 0.0);
      total[p] += row[p];
    }
  }

  GridLogAlpha out;
  out.log_alpha.assign(k, kNegInf);
  for (int i = 0; i < k; ++i) {
    const auto w = state.grid_log_weights(i);
    const double* row = &logF[static_cast<size_t>(i) * m];
    double acc = kNegInf;
    for (int p = 0; p < m; ++p) {
      acc = log_add_exp(acc, w[p] + (total[p] - row[p]));
    }
    out.log_alpha[i] = acc;
  }
  const double norm = log_sum_exp(out.log_alpha);
  for (double& v : out.log_alpha) v -= norm;
  return out;
}

}  // namespace toptwo
