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

#include "mtagg/predict.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "mtagg/variational.hpp"

namespace mtagg {

namespace {

double population_variance(const Eigen::VectorXd &y) {
  return (y.array() - y.mean()).square().mean();
}

} // namespace

FPrediction predict_f(const Model &model, Eigen::Index task,
                      std::span<const Support> supports) {
  const Eigen::Index slots = model.index_map.slots_of(task);
  const Eigen::Index p = model.lmc.input_dim();
  std::vector<LatentRow> rows;
  rows.reserve(supports.size() * static_cast<std::size_t>(slots));
  for (std::size_t i = 0; i < supports.size(); ++i) {
    if (supports[i].dimension() != p) {
      throw std::invalid_argument(
          "test support " + std::to_string(i) + " has dimension " +
          std::to_string(supports[i].dimension()) + ", model expects " +
          std::to_string(p));
    }
    for (Eigen::Index k = 0; k < slots; ++k) {
      rows.push_back({model.index_map.slot(task, k), std::cref(supports[i])});
    }
  }
  const auto n = static_cast<Eigen::Index>(supports.size());
  FPrediction out{Eigen::MatrixXd(n, slots), Eigen::MatrixXd(n, slots)};
  if (n == 0) {
    return out;
  }
  const auto qf =
      qf_marginals(rows, model.q, model.lmc, model.inducing, model.options);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index k = 0; k < slots; ++k) {
      out.mean(i, k) = qf.mean[i * slots + k];
      out.var(i, k) = qf.var[i * slots + k];
    }
  }
  return out;
}

YPrediction predict_y(const Model &model, Eigen::Index task,
                      std::span<const Support> supports,
                      const std::optional<Eigen::VectorXd> &targets) {
  const auto n = static_cast<Eigen::Index>(supports.size());
  if (targets && targets->size() != n) {
    throw std::invalid_argument("predict_y: one target per test support needed");
  }
  const FPrediction f = predict_f(model, task, supports);
  const Likelihood &lik = model.likelihoods.at(static_cast<std::size_t>(task));
  const GaussHermiteRule rule = model.options.hermite_order == kDefaultHermiteOrder
                                    ? default_hermite_rule()
                                    : gauss_hermite(model.options.hermite_order);
  YPrediction out;
  out.mean.resize(n);
  out.variance.resize(n);
  if (targets) {
    out.log_density = Eigen::VectorXd(n);
  }
  const auto slots = static_cast<std::size_t>(f.mean.cols());
  for (Eigen::Index i = 0; i < n; ++i) {
    double m[2] = {0.0, 0.0};
    double v[2] = {0.0, 0.0};
    for (std::size_t k = 0; k < slots; ++k) {
      m[k] = f.mean(i, static_cast<Eigen::Index>(k));
      v[k] = f.var(i, static_cast<Eigen::Index>(k));
    }
    const std::span<const double> ms(m, slots);
    const std::span<const double> vs(v, slots);
    const auto [ym, yv] = predictive_y_moments(ms, vs, lik);
    out.mean[i] = ym;
    out.variance[i] = yv;
    if (targets) {
      (*out.log_density)[i] =
          log_predictive_density((*targets)[i], ms, vs, lik, rule);
    }
  }
  return out;
}

YPrediction predict_y(const Model &model, Eigen::Index task,
                      const TaskDataset &test) {
  std::vector<Support> supports;
  supports.reserve(test.rows.size());
  for (const auto &obs : test.rows) {
    supports.push_back(obs.support);
  }
  return predict_y(model, task, supports, test.targets());
}

double smse(const Eigen::VectorXd &y_true, const Eigen::VectorXd &y_pred) {
  if (y_true.size() != y_pred.size()) {
    throw std::invalid_argument("smse: length mismatch");
  }
  if (y_true.size() < 2) {
    throw std::invalid_argument("smse: need at least two targets");
  }
  const double var = population_variance(y_true);
  if (!(var > 0.0)) {
    throw std::invalid_argument("smse: targets have zero variance");
  }
  return (y_true - y_pred).squaredNorm() / static_cast<double>(y_true.size()) /
         var;
}

double snlp(const Eigen::VectorXd &log_densities, const Eigen::VectorXd &y_true,
            double train_mean, double train_variance) {
  if (log_densities.size() != y_true.size() || y_true.size() == 0) {
    throw std::invalid_argument("snlp: length mismatch or empty input");
  }
  if (!(train_variance > 0.0)) {
    throw std::invalid_argument("snlp: training targets have zero variance");
  }
  const double log2pi = std::log(2.0 * std::numbers::pi);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < y_true.size(); ++i) {
    const double r = y_true[i] - train_mean;
    const double base =
        0.5 * (log2pi + std::log(train_variance)) + 0.5 * r * r / train_variance;
    acc += -log_densities[i] - base;
  }
  return acc / static_cast<double>(y_true.size());
}

double snlp(const Eigen::VectorXd &log_densities, const Eigen::VectorXd &y_true,
            const Eigen::VectorXd &y_train) {
  if (y_train.size() < 2) {
    throw std::invalid_argument("snlp: need at least two training targets");
  }
  return snlp(log_densities, y_true, y_train.mean(), population_variance(y_train));
}

} // namespace mtagg
