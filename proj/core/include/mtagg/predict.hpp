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

#ifndef MTAGG_PREDICT_HPP_
#define MTAGG_PREDICT_HPP_

#include <optional>
#include <span>

#include <Eigen/Core>

#include "mtagg/dataset.hpp"
#include "mtagg/model.hpp"

namespace mtagg {

/// Marginals of q(f*) for every latent slot of one task: row i, column k is
/// slot k of the task at test support i.
struct FPrediction {
  Eigen::MatrixXd mean;
  Eigen::MatrixXd var;
};

/// Predictive moments of y*; log_density is filled only when targets are given.
struct YPrediction {
  Eigen::VectorXd mean;
  Eigen::VectorXd variance;
  std::optional<Eigen::VectorXd> log_density;
};

/// Test supports may be of any kind, independent of the training supports.
FPrediction predict_f(const Model &model, Eigen::Index task,
                      std::span<const Support> supports);

YPrediction predict_y(const Model &model, Eigen::Index task,
                      std::span<const Support> supports,
                      const std::optional<Eigen::VectorXd> &targets = {});

/// Supports and targets taken from `test`.
YPrediction predict_y(const Model &model, Eigen::Index task,
                      const TaskDataset &test);

/// mean((y - y_hat)^2) / var(y), population variance of y.
double smse(const Eigen::VectorXd &y_true, const Eigen::VectorXd &y_pred);

/// Mean negative log density minus that of a Gaussian with the training
/// targets' mean and population variance. Negative is better than baseline.
double snlp(const Eigen::VectorXd &log_densities, const Eigen::VectorXd &y_true,
            const Eigen::VectorXd &y_train);

/// Same, with the baseline moments given directly.
double snlp(const Eigen::VectorXd &log_densities, const Eigen::VectorXd &y_true,
            double train_mean, double train_variance);

} // namespace mtagg

#endif // MTAGG_PREDICT_HPP_
