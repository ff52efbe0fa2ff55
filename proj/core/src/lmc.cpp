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

#include "mtagg/lmc.hpp"

#include <random>
#include <stdexcept>
#include <string>

namespace mtagg {

Eigen::Index LmcParams::num_slots() const {
  return latents.empty() ? 0 : latents.front().mixing.rows();
}

Eigen::Index LmcParams::input_dim() const {
  return latents.empty() ? 0 : latents.front().kernel.dimension();
}

Eigen::Index LmcParams::total_rank() const {
  Eigen::Index t = 0;
  for (const auto &l : latents) {
    t += l.rank();
  }
  return t;
}

void LmcParams::validate() const {
  if (latents.empty()) {
    throw std::invalid_argument("LMC needs at least one latent process");
  }
  const Eigen::Index j = num_slots();
  const Eigen::Index p = input_dim();
  for (std::size_t q = 0; q < latents.size(); ++q) {
    const auto &l = latents[q];
    l.kernel.validate();
    if (l.kernel.dimension() != p) {
      throw std::invalid_argument("LMC latent " + std::to_string(q) +
                                  " has a different input dimension");
    }
    if (l.mixing.rows() != j || l.mixing.cols() < 1) {
      throw std::invalid_argument("LMC latent " + std::to_string(q) +
                                  " mixing matrix must be J x R_q, R_q >= 1");
    }
    if (!l.mixing.allFinite()) {
      throw std::invalid_argument("LMC mixing matrix has non-finite entries");
    }
  }
}

LmcParams LmcParams::random_init(Eigen::Index num_slots,
                                 const std::vector<Eigen::Index> &ranks,
                                 const std::vector<Eigen::VectorXd> &lengthscales,
                                 std::uint64_t seed) {
  if (ranks.size() != lengthscales.size()) {
    throw std::invalid_argument("random_init: ranks/lengthscales size mismatch");
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 0.5);
  LmcParams params;
  for (std::size_t q = 0; q < ranks.size(); ++q) {
    LatentKernel l;
    l.kernel.lengthscales = lengthscales[q];
    l.kernel.variance = 1.0;
    l.mixing.resize(num_slots, ranks[q]);
    for (Eigen::Index r = 0; r < num_slots; ++r) {
      for (Eigen::Index c = 0; c < ranks[q]; ++c) {
        l.mixing(r, c) = normal(rng);
      }
    }
    params.latents.push_back(std::move(l));
  }
  params.validate();
  return params;
}

LatentIndexMap::LatentIndexMap(const std::vector<Eigen::Index> &slots_per_task) {
  for (std::size_t d = 0; d < slots_per_task.size(); ++d) {
    if (slots_per_task[d] < 1) {
      throw std::invalid_argument("task " + std::to_string(d) +
                                  " must own at least one latent slot");
    }
    first_.push_back(total_);
    count_.push_back(slots_per_task[d]);
    total_ += slots_per_task[d];
  }
}

Eigen::Index LatentIndexMap::slots_of(Eigen::Index task) const {
  if (task < 0 || task >= num_tasks()) {
    throw std::out_of_range("task index " + std::to_string(task) +
                            " out of range");
  }
  return count_[static_cast<std::size_t>(task)];
}

Eigen::Index LatentIndexMap::slot(Eigen::Index task, Eigen::Index k) const {
  if (k < 0 || k >= slots_of(task)) {
    throw std::out_of_range("slot " + std::to_string(k) + " out of range for task " +
                            std::to_string(task));
  }
  return first_[static_cast<std::size_t>(task)] + k;
}

double cov_ff(Eigen::Index j, Eigen::Index j2, const Support &s,
              const Support &s2, const LmcParams &params,
              std::size_t quad_resolution) {
  const Eigen::Index num_slots = params.num_slots();
  if (j < 0 || j >= num_slots || j2 < 0 || j2 >= num_slots) {
    throw std::out_of_range("cov_ff: latent slot index out of range");
  }
  double acc = 0.0;
  for (const auto &l : params.latents) {
    const double b = l.mixing.row(j).dot(l.mixing.row(j2));
    if (b != 0.0) {
      acc += b * k_support(s, s2, l.kernel, quad_resolution);
    }
  }
  return acc;
}

Eigen::Index inducing_column(const LmcParams &params, Eigen::Index q,
                             Eigen::Index r, Eigen::Index m,
                             Eigen::Index num_inducing) {
  Eigen::Index offset = 0;
  for (Eigen::Index k = 0; k < q; ++k) {
    offset += params.latents[static_cast<std::size_t>(k)].rank();
  }
  return (offset + r) * num_inducing + m;
}

Eigen::MatrixXd build_kuu(const InducingSet &z, const LmcParams &params,
                          double jitter) {
  const Eigen::Index m = z.size();
  if (m < 1) {
    throw std::invalid_argument("build_kuu: inducing set is empty");
  }
  if (z.dimension() != params.input_dim()) {
    throw std::invalid_argument("build_kuu: inducing dimension mismatch");
  }
  const Eigen::Index t = m * params.total_rank();
  Eigen::MatrixXd kuu = Eigen::MatrixXd::Zero(t, t);
  Eigen::Index offset = 0;
  for (const auto &l : params.latents) {
    Eigen::MatrixXd block(m, m);
    for (Eigen::Index a = 0; a < m; ++a) {
      const Eigen::VectorXd za = z.points.row(a).transpose();
      block(a, a) = l.kernel.variance;
      for (Eigen::Index b = 0; b < a; ++b) {
        const double k = k_point(za, z.points.row(b).transpose(), l.kernel);
        block(a, b) = k;
        block(b, a) = k;
      }
    }
    for (Eigen::Index r = 0; r < l.rank(); ++r) {
      kuu.block(offset, offset, m, m) = block;
      offset += m;
    }
  }
  kuu.diagonal().array() += jitter;
  return kuu;
}

Eigen::MatrixXd build_kfu(std::span<const LatentRow> rows, const InducingSet &z,
                          const LmcParams &params, std::size_t quad_resolution) {
  const Eigen::Index m = z.size();
  const Eigen::Index n = static_cast<Eigen::Index>(rows.size());
  const Eigen::Index t = m * params.total_rank();
  if (z.dimension() != params.input_dim()) {
    throw std::invalid_argument("build_kfu: inducing dimension mismatch");
  }
  std::vector<Support> inducing;
  inducing.reserve(static_cast<std::size_t>(m));
  for (Eigen::Index a = 0; a < m; ++a) {
    inducing.push_back(Support::point(z.points.row(a).transpose()));
  }
  Eigen::MatrixXd kfu = Eigen::MatrixXd::Zero(n, t);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto &row = rows[static_cast<std::size_t>(i)];
    if (row.slot < 0 || row.slot >= params.num_slots()) {
      throw std::out_of_range("build_kfu: latent slot index out of range");
    }
    Eigen::Index offset = 0;
    for (const auto &l : params.latents) {
      for (Eigen::Index a = 0; a < m; ++a) {
        const double k = k_support(row.support.get(),
                                   inducing[static_cast<std::size_t>(a)],
                                   l.kernel, quad_resolution);
        for (Eigen::Index r = 0; r < l.rank(); ++r) {
          kfu(i, offset + r * m + a) = l.mixing(row.slot, r) * k;
        }
      }
      offset += l.rank() * m;
    }
  }
  return kfu;
}

Eigen::VectorXd kff_diag(std::span<const LatentRow> rows,
                         const LmcParams &params, std::size_t quad_resolution) {
  Eigen::VectorXd d(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    d[static_cast<Eigen::Index>(i)] =
        cov_ff(rows[i].slot, rows[i].slot, rows[i].support.get(),
               rows[i].support.get(), params, quad_resolution);
  }
  return d;
}

Eigen::MatrixXd build_kff(std::span<const LatentRow> rows,
                          const LmcParams &params, std::size_t quad_resolution) {
  const Eigen::Index n = static_cast<Eigen::Index>(rows.size());
  Eigen::MatrixXd k(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto &a = rows[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j <= i; ++j) {
      const auto &b = rows[static_cast<std::size_t>(j)];
      const double v = cov_ff(a.slot, b.slot, a.support.get(), b.support.get(),
                              params, quad_resolution);
      k(i, j) = v;
      k(j, i) = v;
    }
  }
  return k;
}

} // namespace mtagg
