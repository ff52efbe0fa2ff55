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

#ifndef MTAGG_ADAM_HPP_
#define MTAGG_ADAM_HPP_

#include <cstdint>

#include <Eigen/Core>

namespace mtagg {

struct AdamConfig {
  double learning_rate = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  void validate() const;
};

/// First/second moment estimates; start at zero.
struct AdamMoments {
  Eigen::VectorXd first;
  Eigen::VectorXd second;
  std::int64_t step = 0;

  AdamMoments() = default;
  explicit AdamMoments(Eigen::Index n)
      : first(Eigen::VectorXd::Zero(n)), second(Eigen::VectorXd::Zero(n)) {}
};

/// One bias-corrected Adam update that *ascends* along `grad`.
void adam_step(Eigen::VectorXd &params, const Eigen::VectorXd &grad,
               AdamMoments &moments, const AdamConfig &config);

} // namespace mtagg

#endif // MTAGG_ADAM_HPP_
