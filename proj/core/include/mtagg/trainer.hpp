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

#ifndef MTAGG_TRAINER_HPP_
#define MTAGG_TRAINER_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "mtagg/adam.hpp"
#include "mtagg/dataset.hpp"
#include "mtagg/model.hpp"

namespace mtagg {

/// Variational EM schedule. Each cycle runs `e_steps` Adam updates of q(u)
/// followed by `m_steps` Adam updates of the hyperparameters, each on a fresh
/// minibatch, then evaluates the full bound.
struct TrainConfig {
  /// Rows per minibatch across all tasks; empty means full batch.
  std::optional<std::size_t> minibatch_size;
  std::size_t e_steps = 10;
  std::size_t m_steps = 10;
  std::size_t cycles = 200;
  AdamConfig e_adam;
  AdamConfig m_adam;
  /// Stop when the relative change of the full bound between cycles drops
  /// below this value.
  double tolerance = 1e-6;
  std::uint64_t seed = 0;
  /// Run the E-step Adam updates on (Lk^-1 mu, Lk^-1 L), with Lk the
  /// Cholesky factor of K_uu at the start of the cycle. The bound, its
  /// gradients and the stored state are unaffected; only the optimiser's
  /// coordinates change.
  bool whiten = true;

  void validate(std::size_t total_rows) const;
};

/// Structure of the model to build before training.
struct ModelSpec {
  /// R_q for each latent process; the size is Q.
  std::vector<Eigen::Index> ranks{1};
  Eigen::Index num_inducing = 20;
  /// Initial lengthscales per latent process. When empty, every latent starts
  /// at a tenth of the data extent in each dimension.
  std::vector<Eigen::VectorXd> init_lengthscales;
  ModelOptions options;
};

struct TraceEntry {
  std::size_t cycle;
  std::size_t step;
  double elbo;
};

struct FitResult {
  Model model;
  std::vector<TraceEntry> trace;
  bool converged = false;
  /// Total count of clamped negative q(f) variances seen during training.
  std::size_t clamped_variances = 0;
};

/// Stratified minibatches: each task contributes rows in proportion to its
/// size, drawn without replacement within an epoch of that task.
class MinibatchSampler {
public:
  MinibatchSampler(std::vector<Eigen::Index> task_sizes,
                   std::optional<std::size_t> batch_size);

  struct Batch {
    std::vector<RowRef> rows;
    /// N_d / (rows drawn from task d).
    std::vector<double> scale;
  };

  Batch next(std::mt19937_64 &rng);
  bool full_batch() const { return full_; }

private:
  std::vector<Eigen::Index> sizes_;
  std::vector<std::size_t> per_task_;
  std::vector<std::vector<Eigen::Index>> order_;
  std::vector<std::size_t> cursor_;
  bool full_ = true;
};

/// Builds the initial model: k-means inducing inputs over support centroids,
/// random mixing weights, q(u) equal to the prior. Likelihoods (and initial
/// Gaussian noise variances) are taken from the datasets.
Model initialize_model(std::span<const TaskDataset> data, const ModelSpec &spec,
                       std::uint64_t seed);

/// Runs variational EM from `model`.
FitResult train(Model model, std::span<const TaskDataset> data,
                const TrainConfig &config);

/// initialize_model followed by train, both seeded from config.seed.
FitResult fit(std::span<const TaskDataset> data, const ModelSpec &spec,
              const TrainConfig &config);

} // namespace mtagg

#endif // MTAGG_TRAINER_HPP_
