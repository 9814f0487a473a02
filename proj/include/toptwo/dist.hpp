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

#ifndef TOPTWO_DIST_HPP_
#define TOPTWO_DIST_HPP_

#include <cmath>
#include <limits>
#include <random>
#include <span>

// Scalar density/CDF helpers shared by the posterior and quadrature code.
// Everything here is a pure function of its arguments.

namespace toptwo {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// log(exp(a) + exp(b)) without overflow; handles -inf operands.
inline double log_add_exp(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double hi = a > b ? a : b;
  const double lo = a > b ? b : a;
  return hi + std::log1p(std::exp(lo - hi));
}

double log_sum_exp(std::span<const double> xs);

inline double log_beta_fn(double a, double b) {
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

// Density of Beta(a, b) at x in (0, 1); returns 0 outside the open interval.
double beta_pdf(double a, double b, double x);
double beta_log_pdf(double a, double b, double x);

// Regularized incomplete beta I_x(a, b).
double beta_cdf(double a, double b, double x);

inline double normal_pdf(double x, double mean, double sd) {
  const double z = (x - mean) / sd;
  return std::exp(-0.5 * z * z) / (sd * std::sqrt(2.0 * M_PI));
}

inline double normal_cdf(double x, double mean, double sd) {
  return 0.5 * std::erfc(-(x - mean) / (sd * std::sqrt(2.0)));
}

// log Phi(z); switches to an asymptotic expansion in the far left tail
// where erfc underflows.
double log_normal_cdf(double z);

// One Beta(a, b) draw via a pair of gamma draws.
double sample_beta(double a, double b, std::mt19937_64& rng);

// Ordinary least squares slope of y against x.
double ls_slope(std::span<const double> x, std::span<const double> y);

}  // namespace toptwo

#endif  // TOPTWO_DIST_HPP_
