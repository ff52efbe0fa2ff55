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

#ifndef MTAGG_SYNTHETIC_HPP_
#define MTAGG_SYNTHETIC_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "mtagg/dataset.hpp"

namespace mtagg {

/// Two Poisson tasks sharing one latent EQ process.
///
/// Task 1 observes 250 unit intervals tiling [0, 250]; task 2 observes 125
/// two-unit intervals over the same range. Each interval average of the latent
/// process is drawn jointly, then counts ~ Poisson(exp(f)). Task 1 rows whose
/// midpoint lies in the gap form the test set.
struct PoissonTwoTask {
  std::vector<TaskDataset> train;
  TaskDataset test;
  /// The latent interval averages behind the test rows.
  Eigen::VectorXd test_latent;
  std::map<std::string, std::string> metadata;
};

struct PoissonTwoTaskSettings {
  double lengthscale = 10.0;
  Eigen::Vector2d mixing{1.0, 0.8};
  double gap_lower = 130.0;
  double gap_upper = 180.0;
};

PoissonTwoTask synth_poisson_two_task(std::uint64_t seed,
                                      const PoissonTwoTaskSettings &settings = {});

/// Smooth 2-D Gaussian surface on a 40 x 66 unit grid with additive noise.
///
/// `train_pool` and `test` split the grid points 1640 / 1000 at random;
/// `aggregated` holds 2 x 2 block means of the full noisy grid as a second
/// task.
struct SurfaceAnalog {
  TaskDataset grid;
  TaskDataset train_pool;
  TaskDataset test;
  TaskDataset aggregated;
  std::map<std::string, std::string> metadata;
};

struct SurfaceSettings {
  int rows = 40;
  int cols = 66;
  Eigen::Index test_count = 1000;
  Eigen::Vector2d lengthscales{6.0, 10.0};
  double noise_variance = 0.01;
  double block = 2.0;
};

SurfaceAnalog synth_surface(std::uint64_t seed,
                            const SurfaceSettings &settings = {});

} // namespace mtagg

#endif // MTAGG_SYNTHETIC_HPP_
