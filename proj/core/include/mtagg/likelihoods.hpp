/*
 * Copyright 2026 The mtagg Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef MTAGG_LIKELIHOODS_HPP_
#define MTAGG_LIKELIHOODS_HPP_

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace mtagg {

constexpr std::size_t kDefaultHermiteOrder = 20;

enum class LikelihoodKind { Gaussian, Poisson, HetGaussian };

std::string_view to_string(LikelihoodKind kind);
/// Accepts "gaussian", "poisson", "het_gaussian" (also "hetgaussian").
LikelihoodKind parse_likelihood_kind(std::string_view name);

/// Per-task observation model.
///
/// Gaussian: y ~ N(f, noise_variance), one latent slot.
/// Poisson: y ~ Poisson(exp(f)), one latent slot.
/// HetGaussian: y ~ N(f, exp(g)), two latent slots (f, g).
struct Likelihood {
  LikelihoodKind kind = LikelihoodKind::Gaussian;
  double noise_variance = 1.0;

  static Likelihood gaussian(double noise_variance);
  static Likelihood poisson() { return {LikelihoodKind::Poisson, 1.0}; }
  static Likelihood het_gaussian() { return {LikelihoodKind::HetGaussian, 1.0}; }

  std::size_t num_slots() const {
    return kind == LikelihoodKind::HetGaussian ? 2 : 1;
  }
  bool has_noise_parameter() const { return kind == LikelihoodKind::Gaussian; }
  /// Throws if y is not a valid observation (e.g. non-integer Poisson count).
  void check_observation(double y) const;
};

/// Gauss-Hermite rule for integrals against exp(-t^2).
struct GaussHermiteRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t order() const { return nodes.size(); }
};

/// Golub-Welsch construction; weights sum to sqrt(pi).
GaussHermiteRule gauss_hermite(std::size_t order);
/// Cached rule of the default order.
const GaussHermiteRule &default_hermite_rule();

/// E_q[log p(y | f)] and its derivatives w.r.t. the per-slot marginal means
/// and variances of q(f), plus w.r.t. log noise variance (Gaussian only).
struct ExpectedLogLik {
  double value = 0.0;
  std::array<double, 2> d_mean{};
  std::array<double, 2> d_var{};
  double d_log_noise = 0.0;
};

double expected_loglik(double y, std::span<const double> mean,
                       std::span<const double> var, const Likelihood &lik,
                       const GaussHermiteRule &rule = default_hermite_rule());

ExpectedLogLik
expected_loglik_with_grad(double y, std::span<const double> mean,
                          std::span<const double> var, const Likelihood &lik,
                          const GaussHermiteRule &rule = default_hermite_rule());

/// Mean and variance of y under the predictive distribution.
std::pair<double, double>
predictive_y_moments(std::span<const double> mean, std::span<const double> var,
                     const Likelihood &lik);

/// log p(y*) with p(y*) = integral of p(y* | f) q(f) df.
double log_predictive_density(
    double y, std::span<const double> mean, std::span<const double> var,
    const Likelihood &lik,
    const GaussHermiteRule &rule = default_hermite_rule());

} // namespace mtagg

#endif // MTAGG_LIKELIHOODS_HPP_
