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

#include "toptwo/exponent.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace toptwo {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
// Effort values beyond this are treated as "the level is unreachable";
// the outer bisection responds by lowering the level.
constexpr double kPsiCeiling = 1e12;

// Invert psi -> c_cost(beta, psi, mean_top, mean_alt) at level c. The map
// is strictly increasing from 0 with supremum beta * kl(mean_top, mean_alt).
double invert_cost(const ObservationModel& model, double beta, double c,
                   double mean_top, double mean_alt, double tol) {
  if (c <= 0.0) return 0.0;
  double hi = 1e-3;
  while (c_cost(model, beta, hi, mean_top, mean_alt) < c) {
    hi *= 2.0;
    if (hi > kPsiCeiling) return kPsiCeiling;
  }
  double lo = hi > 1e-3 ? hi / 2.0 : 0.0;
  for (int it = 0; it < 200 && hi - lo > tol * std::max(1.0, hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (c_cost(model, beta, mid, mean_top, mean_alt) < c) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

ExponentSolution solve_gamma_beta(const InstanceSpec& instance, double beta,
                                  double tol) {
  instance.validate();
  if (!(beta > 0.0 && beta < 1.0)) {
    throw std::invalid_argument("solve_gamma_beta: beta must lie in (0, 1)");
  }
  const int k = instance.k();
  const int best = instance.best_arm();
  const double mean_top = instance.means[best];
  const ObservationModel& model = instance.model;

  ExponentSolution sol;
  sol.beta = beta;
  sol.best = best;
  sol.psi.assign(k, 0.0);
  sol.c_values.assign(k, kNaN);
  sol.psi[best] = beta;

  if (k == 2) {
    const int alt = 1 - best;
    sol.psi[alt] = 1.0 - beta;
    sol.c_values[alt] =
        c_cost(model, beta, 1.0 - beta, mean_top, instance.means[alt]);
    sol.gamma = sol.c_values[alt];
    return sol;
  }

  // Effort ceiling per arm: the level each pairwise cost can never reach.
  double c_max = std::numeric_limits<double>::infinity();
  for (int i = 0; i < k; ++i) {
    if (i == best) continue;
    c_max = std::min(c_max, beta * kl(model, mean_top, instance.means[i]));
  }

  const auto effort_sum = [&](double c) {
    double sum = 0.0;
    for (int i = 0; i < k; ++i) {
      if (i == best) continue;
      sum += invert_cost(model, beta, c, mean_top, instance.means[i], tol);
    }
    return sum;
  };

  double lo = 0.0;
  double hi = c_max * (1.0 - 1e-12);
  if (effort_sum(hi) < 1.0 - beta) {
    std::ostringstream msg;
    msg << "solve_gamma_beta: bisection bracket failed (beta=" << beta
        << ", c_max=" << c_max << ", effort=" << effort_sum(hi) << ")";
    throw SolverError(msg.str());
  }
  for (int it = 0; it < 200 && hi - lo > tol * c_max; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (effort_sum(mid) < 1.0 - beta) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double c_star = 0.5 * (lo + hi);

  double sub_total = 0.0;
  for (int i = 0; i < k; ++i) {
    if (i == best) continue;
    sol.psi[i] = invert_cost(model, beta, c_star, mean_top, instance.means[i], tol);
    sub_total += sol.psi[i];
  }
  // Scale suboptimal efforts so the allocation sums to exactly 1.
  const double scale = (1.0 - beta) / sub_total;
  sol.gamma = std::numeric_limits<double>::infinity();
  for (int i = 0; i < k; ++i) {
    if (i == best) continue;
    sol.psi[i] *= scale;
    sol.c_values[i] = c_cost(model, beta, sol.psi[i], mean_top, instance.means[i]);
    sol.gamma = std::min(sol.gamma, sol.c_values[i]);
  }
  return sol;
}

ExponentSolution solve_gamma_star(const InstanceSpec& instance,
                                  double beta_tol) {
  instance.validate();
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = 1e-6;
  double b = 1.0 - 1e-6;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = solve_gamma_beta(instance, x1).gamma;
  double f2 = solve_gamma_beta(instance, x2).gamma;
  while (b - a > beta_tol) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = solve_gamma_beta(instance, x2).gamma;
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = solve_gamma_beta(instance, x1).gamma;
    }
  }
  return solve_gamma_beta(instance, 0.5 * (a + b));
}

double ratio_bound(double beta, double beta_star) {
  if (!(beta > 0.0 && beta < 1.0 && beta_star > 0.0 && beta_star < 1.0)) {
    throw std::invalid_argument("ratio_bound: arguments must lie in (0, 1)");
  }
  return std::max(beta_star / beta, (1.0 - beta_star) / (1.0 - beta));
}

double bound_subgaussian(double sigma, std::span<const double> gaps) {
  if (!(sigma > 0.0)) {
    throw std::invalid_argument("bound_subgaussian: sigma must be positive");
  }
  double inv_sq = 0.0;
  for (double g : gaps) {
    if (!(g > 0.0)) {
      throw std::invalid_argument("bound_subgaussian: gaps must be positive");
    }
    inv_sq += 1.0 / (g * g);
  }
  return 1.0 / (16.0 * sigma * sigma * inv_sq);
}

double uniform_rate_gaussian(std::span<const double> gaps, int k,
                             double sigma) {
  if (k < 2) throw std::invalid_argument("uniform_rate_gaussian: need k >= 2");
  if (!(sigma > 0.0)) {
    throw std::invalid_argument("uniform_rate_gaussian: sigma must be positive");
  }
  double min_sq = std::numeric_limits<double>::infinity();
  for (double g : gaps) {
    if (!(g > 0.0)) {
      throw std::invalid_argument("uniform_rate_gaussian: gaps must be positive");
    }
    min_sq = std::min(min_sq, g * g);
  }
  return min_sq / (4.0 * k * sigma * sigma);
}

}  // namespace toptwo
