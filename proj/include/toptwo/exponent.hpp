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

#ifndef TOPTWO_EXPONENT_HPP_
#define TOPTWO_EXPONENT_HPP_

#include <span>
#include <stdexcept>
#include <vector>

#include "toptwo/expfam.hpp"

namespace toptwo {

// Raised when a solver bracket cannot be established; carries diagnostics.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Best achievable posterior-convergence rate for an instance, together
// with the allocation that attains it. At the optimum every suboptimal
// arm carries the same pairwise cost:
//   c_values[i] = c_cost(beta, psi[i], mean_best, mean_i)  (i != best)
// and gamma is their common value. psi[best] == beta, psi sums to 1.
// c_values[best] is NaN.
struct ExponentSolution {
  double gamma = 0.0;
  double beta = 0.0;
  std::vector<double> psi;
  std::vector<double> c_values;
  int best = 0;
};

// Solve the constrained max-min allocation problem with beta effort
// pinned on the best arm. For each candidate level c the strictly
// increasing map psi -> c_cost(beta, psi, ...) is inverted per arm by
// bisection, and an outer bisection finds the level where the suboptimal
// efforts sum to 1 - beta.
ExponentSolution solve_gamma_beta(const InstanceSpec& instance, double beta,
                                  double tol = 1e-12);

// Maximize gamma over beta in (0, 1) by golden-section search (the
// objective is concave in beta). beta_tol is the bracket width at which
// the search stops.
ExponentSolution solve_gamma_star(const InstanceSpec& instance,
                                  double beta_tol = 1e-6);

// max(beta_star / beta, (1 - beta_star) / (1 - beta)): an upper bound on
// how much rate is lost by running a fixed beta instead of beta_star.
double ratio_bound(double beta, double beta_star);

// Lower bound on the beta = 1/2 rate for sigma-sub-Gaussian observations:
//   1 / (16 sigma^2 sum_i gaps[i]^-2).
double bound_subgaussian(double sigma, std::span<const double> gaps);

// Rate of a uniform allocation with Gaussian noise: min_i gaps[i]^2 / (4 k sigma^2).
double uniform_rate_gaussian(std::span<const double> gaps, int k, double sigma);

}  // namespace toptwo

#endif  // TOPTWO_EXPONENT_HPP_
