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

#ifndef TOPTWO_OPTPROB_HPP_
#define TOPTWO_OPTPROB_HPP_

#include <functional>
#include <random>
#include <span>
#include <vector>

#include "toptwo/posterior.hpp"

namespace toptwo {

// Uniform quadrature abscissae strictly inside the mean domain.
struct QuadratureGrid {
  std::vector<double> points;

  static QuadratureGrid midpoints(const ObservationModel& model, int m);
  int size() const { return static_cast<int>(points.size()); }
  void require_valid(const ObservationModel& model) const;
};

// Per-arm probability of being the best under the current posterior, and
// optionally the expected improvement-over-best-alternative values.
struct OptimalityEstimate {
  enum class Method { kQuadrature, kMonteCarlo };

  std::vector<double> alpha;
  std::vector<double> value;  // empty unless produced by sample_approx
  Method method = Method::kQuadrature;
  long samples_or_points = 0;

  bool has_value() const { return !value.empty(); }
};

// alpha_i = integral of f_i(x) * prod_{j != i} F_j(x) dx on the grid,
// evaluated as a Riemann sum and renormalized to sum exactly 1. The
// product over j != i is accumulated in log space per point with explicit
// zero tracking, so F_i = 0 never produces a 0/0.
OptimalityEstimate alpha_quadrature(const BeliefState& state,
                                    const QuadratureGrid& grid);

// Same computation with a per-arm cache: a call only re-evaluates the
// density/CDF rows of arms whose posterior parameters changed since the
// previous call. Intended for step loops where one arm updates at a time.
class IncrementalAlpha {
 public:
  explicit IncrementalAlpha(int points = 1001) : points_(points) {}
  const std::vector<double>& alpha(const BeliefState& state);

 private:
  void rebuild(const BeliefState& state);
  void refresh_arm(const BeliefState& state, int arm);

  int points_;
  bool built_ = false;
  BeliefKind kind_ = BeliefKind::kBeta;
  int k_ = 0;
  QuadratureGrid grid_;
  std::vector<double> p1_, p2_;      // per-arm parameter snapshot
  std::vector<double> dens_, cdf_;   // k rows of m entries
  std::vector<int> adjust_;          // in-place CDF updates since last resync
  std::vector<double> alpha_;
};

// Monotone transforms of the arm mean used to rank improvement values.
// kIdentity scores an arm by its mean; kNaturalParam scores it by the
// natural parameter corresponding to that mean (logit for Bernoulli,
// mean / sigma^2 for Gaussian). Both are continuous and strictly
// increasing, so they induce the same top-arm ordering.
enum class Utility { kIdentity, kNaturalParam };

double apply_utility(const ObservationModel& model, Utility u, double mean);

// Monte Carlo estimate from m joint posterior draws:
//   alpha_i = fraction of draws where arm i attains the maximum
//             (argmax ties broken uniformly at random),
//   value_i = mean over those draws of u(mean_i) - max_{j != i} u(mean_j).
OptimalityEstimate sample_approx(const BeliefState& state, long m, Utility u,
                                 std::mt19937_64& rng);

// Same with an arbitrary strictly increasing utility.
OptimalityEstimate sample_approx(const BeliefState& state, long m,
                                 const std::function<double(double)>& u,
                                 std::mt19937_64& rng);

// 1 - alpha[best]: posterior mass on "some other arm is best".
double posterior_error_mass(const OptimalityEstimate& estimate, int best);

// Exact log-space optimal-arm probabilities for grid beliefs, using the
// belief's own support as the quadrature rule. Stays meaningful long
// after the linear-space error mass underflows.
struct GridLogAlpha {
  std::vector<double> log_alpha;  // normalized: logsumexp == 0

  double log_error_mass(int best) const;
  int argmax() const;
  int argmax_excluding(int skip) const;
};

GridLogAlpha grid_log_alpha(const BeliefState& state);

}  // namespace toptwo

#endif  // TOPTWO_OPTPROB_HPP_
