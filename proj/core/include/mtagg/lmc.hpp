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

#ifndef MTAGG_LMC_HPP_
#define MTAGG_LMC_HPP_

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "mtagg/kernels.hpp"
#include "mtagg/support.hpp"

namespace mtagg {

constexpr double kDefaultJitter = 1e-6;

/// One latent process u_q, sampled R_q times, with its mixing weights.
///
/// `mixing` is J x R_q: row j holds the weights of latent parameter function j
/// on the R_q realisations. The coregionalisation matrix is mixing * mixing^T.
/// The kernel variance is held at one; output scale lives in the mixing.
struct LatentKernel {
  EQParams kernel;
  Eigen::MatrixXd mixing;

  Eigen::Index rank() const { return mixing.cols(); }
  Eigen::MatrixXd coregionalisation() const {
    return mixing * mixing.transpose();
  }
};

struct LmcParams {
  std::vector<LatentKernel> latents;

  Eigen::Index num_latents() const {
    return static_cast<Eigen::Index>(latents.size());
  }
  /// J, the number of latent parameter functions across all tasks.
  Eigen::Index num_slots() const;
  Eigen::Index input_dim() const;
  /// Sum over q of R_q.
  Eigen::Index total_rank() const;

  void validate() const;

  /// Mixing entries drawn i.i.d. from N(0, 0.5^2) with a fixed seed.
  static LmcParams random_init(Eigen::Index num_slots,
                               const std::vector<Eigen::Index> &ranks,
                               const std::vector<Eigen::VectorXd> &lengthscales,
                               std::uint64_t seed);
};

/// Inducing inputs shared by all latent processes, one point per row (M x p).
struct InducingSet {
  Eigen::MatrixXd points;

  Eigen::Index size() const { return points.rows(); }
  Eigen::Index dimension() const { return points.cols(); }
};

/// Maps (task, slot-within-task) to a row of the mixing matrices.
class LatentIndexMap {
public:
  LatentIndexMap() = default;
  /// Slots are numbered consecutively, task by task.
  explicit LatentIndexMap(const std::vector<Eigen::Index> &slots_per_task);

  Eigen::Index num_tasks() const {
    return static_cast<Eigen::Index>(first_.size());
  }
  Eigen::Index num_slots() const { return total_; }
  Eigen::Index slots_of(Eigen::Index task) const;
  Eigen::Index slot(Eigen::Index task, Eigen::Index k) const;

private:
  std::vector<Eigen::Index> first_;
  std::vector<Eigen::Index> count_;
  Eigen::Index total_ = 0;
};

/// A latent parameter function evaluated on a support.
struct LatentRow {
  Eigen::Index slot;
  std::reference_wrapper<const Support> support;
};

/// Sum_q B_q[j, j2] * k_q(s, s2).
double cov_ff(Eigen::Index j, Eigen::Index j2, const Support &s,
              const Support &s2, const LmcParams &params,
              std::size_t quad_resolution = kDefaultQuadResolution);

/// Column of the inducing block for (latent q, realisation r, inducing m).
Eigen::Index inducing_column(const LmcParams &params, Eigen::Index q,
                             Eigen::Index r, Eigen::Index m,
                             Eigen::Index num_inducing);

/// Block-diagonal prior covariance of the inducing variables, T x T with
/// T = M * total_rank, plus `jitter` on the diagonal.
Eigen::MatrixXd build_kuu(const InducingSet &z, const LmcParams &params,
                          double jitter = kDefaultJitter);

/// Cross-covariance between latent rows and inducing variables (N x T).
Eigen::MatrixXd build_kfu(std::span<const LatentRow> rows, const InducingSet &z,
                          const LmcParams &params,
                          std::size_t quad_resolution = kDefaultQuadResolution);

Eigen::VectorXd kff_diag(std::span<const LatentRow> rows,
                         const LmcParams &params,
                         std::size_t quad_resolution = kDefaultQuadResolution);

/// Full prior Gram over latent rows (N x N). Intended for small problems,
/// exact-marginal oracles and sampling.
Eigen::MatrixXd build_kff(std::span<const LatentRow> rows,
                          const LmcParams &params,
                          std::size_t quad_resolution = kDefaultQuadResolution);

} // namespace mtagg

#endif // MTAGG_LMC_HPP_
