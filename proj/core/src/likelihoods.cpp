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

#include "mtagg/likelihoods.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

namespace mtagg {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;
constexpr double kSqrtPi = 1.7724538509055160273;

void check_slots(std::span<const double> mean, std::span<const double> var,
                 const Likelihood &lik) {
  if (mean.size() != lik.num_slots() || var.size() != lik.num_slots()) {
    throw std::invalid_argument(
        "likelihood " + std::string(to_string(lik.kind)) + " expects " +
        std::to_string(lik.num_slots()) + " latent slot(s)");
  }
  for (double v : var) {
    if (!(v >= 0.0)) {
      throw std::invalid_argument("q(f) variance must be non-negative");
    }
  }
}

double log_sum_exp(const std::vector<double> &xs) {
  const double mx = *std::max_element(xs.begin(), xs.end());
  if (!std::isfinite(mx)) {
    return mx;
  }
  double s = 0.0;
  for (double x : xs) {
    s += std::exp(x - mx);
  }
  return mx + std::log(s);
}

double log_normal_pdf(double y, double mean, double var) {
  const double r = y - mean;
  return -0.5 * (kLog2Pi + std::log(var)) - 0.5 * r * r / var;
}

} // namespace

std::string_view to_string(LikelihoodKind kind) {
  switch (kind) {
  case LikelihoodKind::Gaussian:
    return "gaussian";
  case LikelihoodKind::Poisson:
    return "poisson";
  case LikelihoodKind::HetGaussian:
    return "het_gaussian";
  }
  return "unknown";
}

LikelihoodKind parse_likelihood_kind(std::string_view name) {
  if (name == "gaussian") {
    return LikelihoodKind::Gaussian;
  }
  if (name == "poisson") {
    return LikelihoodKind::Poisson;
  }
  if (name == "het_gaussian" || name == "hetgaussian") {
    return LikelihoodKind::HetGaussian;
  }
  throw std::invalid_argument("unknown likelihood '" + std::string(name) + "'");
}

Likelihood Likelihood::gaussian(double noise_variance) {
  if (!(noise_variance > 0.0) || !std::isfinite(noise_variance)) {
    throw std::invalid_argument("Gaussian noise variance must be positive");
  }
  return {LikelihoodKind::Gaussian, noise_variance};
}

void Likelihood::check_observation(double y) const {
  if (!std::isfinite(y)) {
    throw std::invalid_argument("observation is not finite");
  }
  if (kind == LikelihoodKind::Poisson && (y < 0.0 || std::floor(y) != y)) {
    throw std::invalid_argument("Poisson observation must be a non-negative "
                                "integer, got " +
                                std::to_string(y));
  }
}

GaussHermiteRule gauss_hermite(std::size_t order) {
  if (order == 0) {
    throw std::invalid_argument("Gauss-Hermite order must be positive");
  }
  const auto n = static_cast<Eigen::Index>(order);
  // Jacobi matrix of the physicists' Hermite recurrence.
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 1; i < n; ++i) {
    const double b = std::sqrt(static_cast<double>(i) / 2.0);
    jac(i, i - 1) = b;
    jac(i - 1, i) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jac);
  GaussHermiteRule rule;
  rule.nodes.resize(order);
  rule.weights.resize(order);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double v0 = eig.eigenvectors()(0, i);
    rule.nodes[static_cast<std::size_t>(i)] = eig.eigenvalues()[i];
    rule.weights[static_cast<std::size_t>(i)] = kSqrtPi * v0 * v0;
  }
  // Symmetrise to remove eigen-solver round-off.
  for (std::size_t i = 0; i < order / 2; ++i) {
    const std::size_t j = order - 1 - i;
    const double t = 0.5 * (rule.nodes[j] - rule.nodes[i]);
    const double w = 0.5 * (rule.weights[i] + rule.weights[j]);
    rule.nodes[i] = -t;
    rule.nodes[j] = t;
    rule.weights[i] = w;
    rule.weights[j] = w;
  }
  if (order % 2 == 1) {
    rule.nodes[order / 2] = 0.0;
  }
  return rule;
}

const GaussHermiteRule &default_hermite_rule() {
  static const GaussHermiteRule rule = gauss_hermite(kDefaultHermiteOrder);
  return rule;
}

ExpectedLogLik expected_loglik_with_grad(double y, std::span<const double> mean,
                                         std::span<const double> var,
                                         const Likelihood &lik,
                                         const GaussHermiteRule &rule) {
  check_slots(mean, var, lik);
  lik.check_observation(y);
  ExpectedLogLik out;
  switch (lik.kind) {
  case LikelihoodKind::Gaussian: {
    const double s2 = lik.noise_variance;
    const double r = y - mean[0];
    const double q = r * r + var[0];
    out.value = -0.5 * (kLog2Pi + std::log(s2)) - 0.5 * q / s2;
    out.d_mean[0] = r / s2;
    out.d_var[0] = -0.5 / s2;
    out.d_log_noise = -0.5 + 0.5 * q / s2;
    break;
  }
  case LikelihoodKind::Poisson: {
    const double scale = std::sqrt(2.0 * var[0]);
    double e = 0.0;
    double ef = 0.0;
    for (std::size_t i = 0; i < rule.order(); ++i) {
      const double f = mean[0] + scale * rule.nodes[i];
      const double w = rule.weights[i] / kSqrtPi;
      const double rate = std::exp(f);
      e += w * (y * f - rate);
      ef += w * rate;
    }
    out.value = e - std::lgamma(y + 1.0);
    out.d_mean[0] = y - ef;
    // d/dv E[g(f)] = E[g''(f)] / 2 with g'' = -exp(f)
    out.d_var[0] = -0.5 * ef;
    break;
  }
  case LikelihoodKind::HetGaussian: {
    const double r = y - mean[0];
    const double q = r * r + var[0];
    const double e = std::exp(-mean[1] + 0.5 * var[1]);
    out.value = -0.5 * kLog2Pi - 0.5 * mean[1] - 0.5 * q * e;
    out.d_mean[0] = r * e;
    out.d_var[0] = -0.5 * e;
    out.d_mean[1] = -0.5 + 0.5 * q * e;
    out.d_var[1] = -0.25 * q * e;
    break;
  }
  }
  return out;
}

double expected_loglik(double y, std::span<const double> mean,
                       std::span<const double> var, const Likelihood &lik,
                       const GaussHermiteRule &rule) {
  return expected_loglik_with_grad(y, mean, var, lik, rule).value;
}

std::pair<double, double> predictive_y_moments(std::span<const double> mean,
                                               std::span<const double> var,
                                               const Likelihood &lik) {
  check_slots(mean, var, lik);
  switch (lik.kind) {
  case LikelihoodKind::Gaussian:
    return {mean[0], var[0] + lik.noise_variance};
  case LikelihoodKind::Poisson: {
    const double rate_mean = std::exp(mean[0] + 0.5 * var[0]);
    const double rate_var =
        std::exp(2.0 * mean[0] + var[0]) * std::expm1(var[0]);
    return {rate_mean, rate_mean + rate_var};
  }
  case LikelihoodKind::HetGaussian:
    return {mean[0], var[0] + std::exp(mean[1] + 0.5 * var[1])};
  }
  return {0.0, 0.0};
}

double log_predictive_density(double y, std::span<const double> mean,
                              std::span<const double> var,
                              const Likelihood &lik,
                              const GaussHermiteRule &rule) {
  check_slots(mean, var, lik);
  lik.check_observation(y);
  switch (lik.kind) {
  case LikelihoodKind::Gaussian:
    return log_normal_pdf(y, mean[0], var[0] + lik.noise_variance);
  case LikelihoodKind::Poisson: {
    const double scale = std::sqrt(2.0 * var[0]);
    const double lfact = std::lgamma(y + 1.0);
    std::vector<double> terms(rule.order());
    for (std::size_t i = 0; i < rule.order(); ++i) {
      const double f = mean[0] + scale * rule.nodes[i];
      terms[i] = std::log(rule.weights[i] / kSqrtPi) + y * f - std::exp(f) -
                 lfact;
    }
    return log_sum_exp(terms);
  }
  case LikelihoodKind::HetGaussian: {
    const double scale = std::sqrt(2.0 * var[1]);
    std::vector<double> terms(rule.order());
    for (std::size_t i = 0; i < rule.order(); ++i) {
      const double g = mean[1] + scale * rule.nodes[i];
      terms[i] = std::log(rule.weights[i] / kSqrtPi) +
                 log_normal_pdf(y, mean[0], var[0] + std::exp(g));
    }
    return log_sum_exp(terms);
  }
  }
  return std::numeric_limits<double>::quiet_NaN();
}

} // namespace mtagg
