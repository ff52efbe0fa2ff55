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

#ifndef MTAGG_DATASET_HPP_
#define MTAGG_DATASET_HPP_

#include <string>
#include <vector>

#include "mtagg/likelihoods.hpp"
#include "mtagg/support.hpp"

namespace mtagg {

struct Observation {
  Support support;
  double y;
};

/// All observations of one task together with its observation model.
struct TaskDataset {
  std::string name;
  Likelihood likelihood;
  std::vector<Observation> rows;

  Eigen::Index size() const { return static_cast<Eigen::Index>(rows.size()); }
  /// Input dimension of the first row; 0 when empty.
  Eigen::Index dimension() const;
  /// Throws on mixed dimensions or observations the likelihood rejects.
  void validate() const;
  Eigen::VectorXd targets() const;
};

/// Reference to one observation of one task.
struct RowRef {
  Eigen::Index task;
  Eigen::Index row;
};

} // namespace mtagg

#endif // MTAGG_DATASET_HPP_
