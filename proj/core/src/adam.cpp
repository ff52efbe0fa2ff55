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

#include "mtagg/adam.hpp"

#include <cmath>
#include <stdexcept>

namespace mtagg {

void AdamConfig::validate() const {
  if (!(learning_rate > 0.0) || !(epsilon > 0.0)) {
    throw std::invalid_argument("Adam learning rate and epsilon must be positive");
  }
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
    throw std::invalid_argument("Adam betas must lie in [0, 1)");
  }
}

void adam_step(Eigen::VectorXd &params, const Eigen::VectorXd &grad,
               AdamMoments &moments, const AdamConfig &config) {
  if (grad.size() != params.size()) {
    throw std::invalid_argument("adam_step: gradient size mismatch");
  }
  if (moments.first.size() != params.size()) {
    moments = AdamMoments(params.size());
  }
  ++moments.step;
  moments.first = config.beta1 * moments.first + (1.0 - config.beta1) * grad;
  moments.second = config.beta2 * moments.second +
                   (1.0 - config.beta2) * grad.array().square().matrix();
  const double t = static_cast<double>(moments.step);
  const double c1 = 1.0 - std::pow(config.beta1, t);
  const double c2 = 1.0 - std::pow(config.beta2, t);
  params.array() += config.learning_rate * (moments.first.array() / c1) /
                    ((moments.second.array() / c2).sqrt() + config.epsilon);
}

} // namespace mtagg
