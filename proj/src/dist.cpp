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

#include "toptwo/dist.hpp"

#include <algorithm>
#include <stdexcept>

#include <boost/math/special_functions/beta.hpp>

namespace toptwo {

double log_sum_exp(std::span<const double> xs) {
  double hi = kNegInf;
  for (double x : xs) hi = std::max(hi, x);
  if (hi == kNegInf) return kNegInf;
  double acc = 0.0;
  for (double x : xs) acc += std::exp(x - hi);
  return hi + std::log(acc);
}

double beta_log_pdf(double a, double b, double x) {
  if (!(x > 0.0 && x < 1.0)) return kNegInf;
  double t = -log_beta_fn(a, b);
  if (a != 1.0) t += (a - 1.0) * std::log(x);
  if (b != 1.0) t += (b - 1.0) * std::log1p(-x);
  return t;
}

double beta_pdf(double a, double b, double x) {
  const double lp = beta_log_pdf(a, b, x);
  return lp == kNegInf ? 0.0 : std::exp(lp);
}

double beta_cdf(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  return boost::math::ibeta(a, b, x);
}

double log_normal_cdf(double z) {
  if (z > -10.0) {
    return std::log(0.5 * std::erfc(-z / std::sqrt(2.0)));
  }
  // Mills-ratio expansion: Phi(z) ~ phi(z)/|z| * (1 - 1/z^2 + 3/z^4 - ...)
  const double z2 = z * z;
  const double series = 1.0 - 1.0 / z2 + 3.0 / (z2 * z2);
  return -0.5 * z2 - std::log(-z) - 0.5 * std::log(2.0 * M_PI) +
         std::log(series);
}

double sample_beta(double a, double b, std::mt19937_64& rng) {
  std::gamma_distribution<double> ga(a, 1.0);
  std::gamma_distribution<double> gb(b, 1.0);
  for (int attempt = 0; attempt < 64; ++attempt) {
    const double x = ga(rng);
    const double y = gb(rng);
    if (x + y > 0.0) return x / (x + y);
  }
  // Both shapes so small that gamma draws keep underflowing; use the mean.
  return a / (a + b);
}

double ls_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw std::invalid_argument("ls_slope: need >= 2 paired points");
  }
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  if (sxx == 0.0) throw std::invalid_argument("ls_slope: degenerate x");
  return sxy / sxx;
}

}  // namespace toptwo
