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

#include "toptwo/expfam.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace toptwo {
namespace {

constexpr double kBernoulliClamp = 1e-12;
constexpr double kMinTopGap = 1e-9;

double clamp01(double p) {
  return std::clamp(p, kBernoulliClamp, 1.0 - kBernoulliClamp);
}

void require_in_domain(const ObservationModel& model, double mean,
                       const char* what) {
  if (!model.contains(mean)) {
    throw std::domain_error(std::string(what) + " outside the mean domain");
  }
}

}  // namespace

ObservationModel ObservationModel::bernoulli() {
  ObservationModel m;
  m.kind = ModelKind::kBernoulli;
  m.mean_lo = 0.0;
  m.mean_hi = 1.0;
  return m;
}

ObservationModel ObservationModel::gaussian(double sigma, double mean_lo,
                                            double mean_hi) {
  ObservationModel m;
  m.kind = ModelKind::kGaussian;
  m.sigma = sigma;
  m.mean_lo = mean_lo;
  m.mean_hi = mean_hi;
  m.require_valid();
  return m;
}

void ObservationModel::require_valid() const {
  if (!(mean_lo < mean_hi)) {
    throw std::invalid_argument("observation model: mean_lo must be < mean_hi");
  }
  if (kind == ModelKind::kGaussian && !(sigma > 0.0)) {
    throw std::invalid_argument("observation model: sigma must be positive");
  }
  if (kind == ModelKind::kBernoulli && (mean_lo < 0.0 || mean_hi > 1.0)) {
    throw std::invalid_argument(
        "observation model: Bernoulli means live in (0, 1)");
  }
}

std::string ObservationModel::kind_name() const {
  return kind == ModelKind::kBernoulli ? "bernoulli" : "gaussian";
}

int InstanceSpec::best_arm() const {
  int best = 0;
  for (int i = 1; i < k(); ++i) {
    if (means[i] > means[best]) best = i;
  }
  return best;
}

double InstanceSpec::gap(int arm) const {
  return means[best_arm()] - means[arm];
}

std::vector<double> InstanceSpec::suboptimal_gaps() const {
  const int star = best_arm();
  std::vector<double> gaps;
  gaps.reserve(means.size() - 1);
  for (int i = 0; i < k(); ++i) {
    if (i != star) gaps.push_back(means[star] - means[i]);
  }
  return gaps;
}

void InstanceSpec::validate() const {
  model.require_valid();
  if (k() < 2) {
    throw std::invalid_argument("instance: need at least 2 arms");
  }
  for (double m : means) {
    if (!model.contains(m)) {
      throw std::invalid_argument(
          "instance: mean outside the model's mean domain");
    }
  }
  for (int i = 0; i < k(); ++i) {
    for (int j = i + 1; j < k(); ++j) {
      if (means[i] == means[j]) {
        throw std::invalid_argument(
            "instance: arm means must be pairwise distinct");
      }
    }
  }
  // A near-tie at the top makes every rate quantity ill conditioned.
  std::vector<double> sorted = means;
  std::sort(sorted.begin(), sorted.end());
  if (sorted[k() - 1] - sorted[k() - 2] < kMinTopGap) {
    throw std::invalid_argument(
        "instance: top-two means closer than 1e-9");
  }
}

std::uint64_t InstanceSpec::fingerprint() const {
  // FNV-1a over the model fields and means.
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](const void* data, size_t len) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (size_t i = 0; i < len; ++i) {
      h ^= p[i];
      h *= 1099511628211ULL;
    }
  };
  const int kind = static_cast<int>(model.kind);
  mix(&kind, sizeof(kind));
  mix(&model.sigma, sizeof(double));
  mix(&model.mean_lo, sizeof(double));
  mix(&model.mean_hi, sizeof(double));
  for (double m : means) mix(&m, sizeof(double));
  return h;
}

double sample_observation(const ObservationModel& model, double mean,
                          std::mt19937_64& rng) {
  require_in_domain(model, mean, "observation mean");
  if (model.kind == ModelKind::kBernoulli) {
    std::bernoulli_distribution coin(mean);
    return coin(rng) ? 1.0 : 0.0;
  }
  std::normal_distribution<double> noise(mean, model.sigma);
  return noise(rng);
}

double kl(const ObservationModel& model, double p, double q) {
  require_in_domain(model, p, "kl argument p");
  require_in_domain(model, q, "kl argument q");
  if (model.kind == ModelKind::kGaussian) {
    const double d = p - q;
    return d * d / (2.0 * model.sigma * model.sigma);
  }
  const double pc = clamp01(p);
  const double qc = clamp01(q);
  if (pc == qc) return 0.0;
  return pc * std::log(pc / qc) + (1.0 - pc) * std::log((1.0 - pc) / (1.0 - qc));
}

double c_cost(const ObservationModel& model, double beta, double psi,
              double mean_top, double mean_alt) {
  if (beta < 0.0 || psi < 0.0) {
    throw std::domain_error("c_cost: efforts must be nonnegative");
  }
  if (beta + psi == 0.0) return 0.0;  // infimum by convention
  if (beta == 0.0 || psi == 0.0 || mean_top == mean_alt) return 0.0;
  require_in_domain(model, mean_top, "c_cost mean_top");
  require_in_domain(model, mean_alt, "c_cost mean_alt");
  // The inner minimum is attained where the mean equals the effort-weighted
  // average of the two arm means.
  const double pooled = (beta * mean_top + psi * mean_alt) / (beta + psi);
  return beta * kl(model, mean_top, pooled) + psi * kl(model, mean_alt, pooled);
}

double c_gaussian_closed_form(double beta, double psi, double delta,
                              double sigma) {
  if (beta < 0.0 || psi < 0.0 || beta + psi == 0.0) {
    throw std::domain_error("c_gaussian_closed_form: need beta, psi >= 0, not both 0");
  }
  if (!(sigma > 0.0)) {
    throw std::domain_error("c_gaussian_closed_form: sigma must be positive");
  }
  return (beta * psi / (beta + psi)) * delta * delta / (2.0 * sigma * sigma);
}

}  // namespace toptwo
