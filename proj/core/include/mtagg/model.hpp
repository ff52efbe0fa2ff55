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

#ifndef MTAGG_MODEL_HPP_
#define MTAGG_MODEL_HPP_

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "mtagg/likelihoods.hpp"
#include "mtagg/lmc.hpp"

namespace mtagg {

/// q(u) = N(mean, chol * chol^T) with chol lower triangular, positive diagonal.
struct VariationalState {
  Eigen::VectorXd mean;
  Eigen::MatrixXd chol;

  Eigen::Index size() const { return mean.size(); }
  Eigen::MatrixXd covariance() const { return chol * chol.transpose(); }
  void validate() const;

  /// q(u) = p(u): zero mean, chol = Cholesky factor of kuu.
  static VariationalState prior(const Eigen::MatrixXd &kuu);
};

struct ModelOptions {
  std::size_t quad_resolution = kDefaultQuadResolution;
  double jitter = kDefaultJitter;
  std::size_t hermite_order = kDefaultHermiteOrder;
};

/// Everything needed to evaluate the bound and to predict.
struct Model {
  LmcParams lmc;
  std::vector<Likelihood> likelihoods;
  LatentIndexMap index_map;
  InducingSet inducing;
  VariationalState q;
  ModelOptions options;
  std::uint64_t seed = 0;
  std::map<std::string, std::string> metadata;

  Eigen::Index num_tasks() const {
    return static_cast<Eigen::Index>(likelihoods.size());
  }
  /// M * sum_q R_q.
  Eigen::Index num_inducing_variables() const {
    return inducing.size() * lmc.total_rank();
  }
  /// Rebuilds index_map from the likelihood slot counts.
  void rebuild_index_map();
  void validate() const;
};

} // namespace mtagg

#endif // MTAGG_MODEL_HPP_
