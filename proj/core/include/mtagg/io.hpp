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

#ifndef MTAGG_IO_HPP_
#define MTAGG_IO_HPP_

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mtagg/dataset.hpp"
#include "mtagg/model.hpp"
#include "mtagg/trainer.hpp"

namespace mtagg {

/// Task CSV format.
///
/// Header: `kind,<p coordinate names>,y`. Rows:
///   point,x_1,...,x_p,y
///   box,lo_1,...,lo_p,hi_1,...,hi_p,y
///   polytope,<id>,y          (p = 2; rings in <csv>.polytopes.json)
/// The companion JSON maps each id to a list of [x, y] vertices.
/// Errors name the file and line.
TaskDataset load_task_csv(const std::filesystem::path &path,
                          const Likelihood &likelihood, std::string name = {});

/// Writes the format above; polygons go to the companion file keyed by row
/// index. Bag supports cannot be written.
void save_task_csv(const std::filesystem::path &path, const TaskDataset &data);

std::filesystem::path polytope_companion(const std::filesystem::path &csv);

/// Checkpoint as one JSON document; every real is written with 17
/// significant digits so a save/load round trip is bit-exact.
std::string model_to_json(const Model &model);
Model model_from_json(const std::string &text);
void save_model(const std::filesystem::path &path, const Model &model);
Model load_model(const std::filesystem::path &path);

struct TaskSpec {
  std::string name;
  LikelihoodKind likelihood = LikelihoodKind::Gaussian;
  /// Initial Gaussian noise variance; when empty, a tenth of the sample
  /// variance of the training targets.
  std::optional<double> noise_variance;

  Likelihood resolve(const Eigen::VectorXd &targets) const;
};

/// Experiment configuration read from JSON:
///
///   { "tasks": [{"name": "...", "likelihood": "poisson", "noise_variance": 0.1}],
///     "Q": 1, "R": [1], "M": 20, "quad_resolution": 32, "jitter": 1e-6,
///     "hermite_order": 20, "init_lengthscale": [10.0],
///     "train": {"minibatch_size": 100, "e_steps": 10, "m_steps": 10,
///               "cycles": 200, "learning_rate": 0.01, "beta1": 0.9,
///               "beta2": 0.999, "epsilon": 1e-8, "tolerance": 1e-6,
///               "seed": 0} }
///
/// Everything except "tasks" is optional. Unknown keys are rejected.
struct ExperimentConfig {
  std::vector<TaskSpec> tasks;
  /// Initial lengthscales are left empty here; see model_spec.
  ModelSpec model;
  /// One value for every dimension, or one per dimension. Empty selects the
  /// data-extent default.
  std::vector<double> init_lengthscale;
  TrainConfig train;

  /// The model structure for inputs of dimension p.
  ModelSpec model_spec(Eigen::Index p) const;
};

ExperimentConfig parse_config(const std::string &text);
ExperimentConfig load_config(const std::filesystem::path &path);

/// Flat JSON object of string values, keys sorted.
std::string string_map_to_json(const std::map<std::string, std::string> &m);

std::string read_text_file(const std::filesystem::path &path);
void write_text_file(const std::filesystem::path &path, const std::string &text);

} // namespace mtagg

#endif // MTAGG_IO_HPP_
