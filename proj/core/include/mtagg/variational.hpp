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

#ifndef MTAGG_VARIATIONAL_HPP_
#define MTAGG_VARIATIONAL_HPP_

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "mtagg/dataset.hpp"
#include "mtagg/lmc.hpp"
#include "mtagg/model.hpp"

namespace mtagg {

/// Cholesky factorisation of K_uu; throws std::runtime_error with a
/// conditioning estimate when the matrix is not numerically PD.
Eigen::LLT<Eigen::MatrixXd> factor_kuu(const Eigen::MatrixXd &kuu);

/// Marginals of q(f) = integral p(f | u) q(u) du at a set of latent rows.
struct QfMarginals {
  Eigen::VectorXd mean;
  Eigen::VectorXd var;
  /// Number of variances that came out negative and were clamped to zero.
  std::size_t clamped = 0;
  /// Smallest variance before clamping.
  double min_raw_var = 0.0;
};

/// mean = K_fu K_uu^-1 mu,
/// var  = diag K_ff - diag(K_fu K_uu^-1 K_uf) + diag(K_fu K_uu^-1 S K_uu^-1 K_uf).
/// All solves go through the Cholesky factor of K_uu.
QfMarginals qf_marginals(std::span<const LatentRow> rows,
                         const VariationalState &q, const LmcParams &lmc,
                         const InducingSet &z, const ModelOptions &options = {});

/// KL(N(mu, S) || N(0, K_uu)).
double kl_qu_pu(const VariationalState &q, const Eigen::MatrixXd &kuu);

/// Gradient of the bound w.r.t. every free parameter, in the unconstrained
/// parameterisation used by the optimiser: raw mean, chol with log diagonal,
/// log lengthscales, raw mixing weights, log Gaussian noise variances.
struct ElboGradients {
  double elbo = 0.0;
  Eigen::VectorXd d_mean;
  /// Lower triangular; diagonal entries are w.r.t. log chol(i, i).
  Eigen::MatrixXd d_chol;
  std::vector<Eigen::VectorXd> d_log_lengthscale;
  std::vector<Eigen::MatrixXd> d_mixing;
  /// Per task; zero for tasks without a noise parameter.
  Eigen::VectorXd d_log_noise;
  std::size_t clamped = 0;
};

enum class GradientParts { Variational, Hyper, All };

/// Sum over tasks d of scale[d] * sum over batch rows of E_q[log p(y | f)],
/// minus KL(q(u) || p(u)). Pass scale = 1 for every task for the full bound.
double elbo(const Model &model, std::span<const TaskDataset> data,
            std::span<const RowRef> batch, std::span<const double> scale);

/// Bound over every row of every task with unit scale.
double full_elbo(const Model &model, std::span<const TaskDataset> data);

ElboGradients elbo_gradients(const Model &model,
                             std::span<const TaskDataset> data,
                             std::span<const RowRef> batch,
                             std::span<const double> scale,
                             GradientParts parts = GradientParts::All);

std::vector<RowRef> all_rows(std::span<const TaskDataset> data);

// Flat parameter vectors for the optimiser.

/// [mean; lower triangle of chol row by row, diagonal as log].
Eigen::VectorXd pack_variational(const VariationalState &q);
void unpack_variational(const Eigen::VectorXd &theta, VariationalState &q);
Eigen::VectorXd flatten_variational_gradient(const ElboGradients &g);

/// [log lengthscales per latent; mixing entries row-major per latent;
///  log noise variance of each Gaussian task].
Eigen::VectorXd pack_hyper(const Model &model);
void unpack_hyper(const Eigen::VectorXd &theta, Model &model);
Eigen::VectorXd flatten_hyper_gradient(const ElboGradients &g,
                                       const Model &model);

} // namespace mtagg

#endif // MTAGG_VARIATIONAL_HPP_
