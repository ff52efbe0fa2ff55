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

#include "mtagg/dataset.hpp"
#include "mtagg/model.hpp"

#include <stdexcept>
#include <string>

#include <Eigen/Cholesky>

namespace mtagg {

Eigen::Index TaskDataset::dimension() const {
  return rows.empty() ? 0 : rows.front().support.dimension();
}

void TaskDataset::validate() const {
  const Eigen::Index p = dimension();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].support.dimension() != p) {
      throw std::invalid_argument("task '" + name + "' row " + std::to_string(i) +
                                  " has dimension " +
                                  std::to_string(rows[i].support.dimension()) +
                                  ", expected " + std::to_string(p));
    }
    try {
      likelihood.check_observation(rows[i].y);
    } catch (const std::invalid_argument &e) {
      throw std::invalid_argument("task '" + name + "' row " +
                                  std::to_string(i) + ": " + e.what());
    }
  }
}

Eigen::VectorXd TaskDataset::targets() const {
  Eigen::VectorXd y(size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    y[static_cast<Eigen::Index>(i)] = rows[i].y;
  }
  return y;
}

void VariationalState::validate() const {
  if (chol.rows() != mean.size() || chol.cols() != mean.size()) {
    throw std::invalid_argument("variational state: chol must be T x T");
  }
  for (Eigen::Index i = 0; i < chol.rows(); ++i) {
    if (!(chol(i, i) > 0.0)) {
      throw std::invalid_argument(
          "variational state: chol diagonal must be positive");
    }
    for (Eigen::Index j = i + 1; j < chol.cols(); ++j) {
      if (chol(i, j) != 0.0) {
        throw std::invalid_argument(
            "variational state: chol must be lower triangular");
      }
    }
  }
  if (!mean.allFinite() || !chol.allFinite()) {
    throw std::invalid_argument("variational state has non-finite entries");
  }
}

VariationalState VariationalState::prior(const Eigen::MatrixXd &kuu) {
  Eigen::LLT<Eigen::MatrixXd> llt(kuu);
  if (llt.info() != Eigen::Success) {
    throw std::runtime_error("prior q(u): K_uu is not positive definite");
  }
  return {Eigen::VectorXd::Zero(kuu.rows()), llt.matrixL()};
}

void Model::rebuild_index_map() {
  std::vector<Eigen::Index> slots;
  slots.reserve(likelihoods.size());
  for (const auto &lik : likelihoods) {
    slots.push_back(static_cast<Eigen::Index>(lik.num_slots()));
  }
  index_map = LatentIndexMap(slots);
}

void Model::validate() const {
  lmc.validate();
  if (index_map.num_tasks() != num_tasks()) {
    throw std::invalid_argument("model index map does not match likelihoods");
  }
  if (index_map.num_slots() != lmc.num_slots()) {
    throw std::invalid_argument(
        "mixing matrices have " + std::to_string(lmc.num_slots()) +
        " rows but the likelihoods need " +
        std::to_string(index_map.num_slots()) + " latent functions");
  }
  if (inducing.size() < 1 || inducing.dimension() != lmc.input_dim()) {
    throw std::invalid_argument("inducing inputs missing or of wrong dimension");
  }
  if (q.size() != num_inducing_variables()) {
    throw std::invalid_argument("variational state size does not match M * R");
  }
  q.validate();
  for (const auto &lik : likelihoods) {
    if (lik.kind == LikelihoodKind::Gaussian && !(lik.noise_variance > 0.0)) {
      throw std::invalid_argument("Gaussian noise variance must be positive");
    }
  }
}

} // namespace mtagg
