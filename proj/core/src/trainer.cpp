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

#include "mtagg/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>

#include "mtagg/kmeans.hpp"
#include "mtagg/variational.hpp"

namespace mtagg {

void TrainConfig::validate(std::size_t total_rows) const {
  if (minibatch_size &&
      (*minibatch_size == 0 || *minibatch_size > total_rows)) {
    throw std::invalid_argument("minibatch size must lie in [1, " +
                                std::to_string(total_rows) + "]");
  }
  if (cycles == 0) {
    throw std::invalid_argument("training needs at least one cycle");
  }
  if (!(tolerance >= 0.0)) {
    throw std::invalid_argument("convergence tolerance must be non-negative");
  }
  e_adam.validate();
  m_adam.validate();
}

MinibatchSampler::MinibatchSampler(std::vector<Eigen::Index> task_sizes,
                                   std::optional<std::size_t> batch_size)
    : sizes_(std::move(task_sizes)) {
  const auto total = std::accumulate(sizes_.begin(), sizes_.end(), Eigen::Index{0});
  full_ = !batch_size || static_cast<Eigen::Index>(*batch_size) >= total;
  per_task_.resize(sizes_.size());
  order_.resize(sizes_.size());
  cursor_.assign(sizes_.size(), 0);
  for (std::size_t d = 0; d < sizes_.size(); ++d) {
    if (full_) {
      per_task_[d] = static_cast<std::size_t>(sizes_[d]);
      continue;
    }
    const double share = static_cast<double>(*batch_size) *
                         static_cast<double>(sizes_[d]) /
                         static_cast<double>(total);
    per_task_[d] = std::clamp<std::size_t>(
        static_cast<std::size_t>(std::llround(share)), 1,
        static_cast<std::size_t>(sizes_[d]));
    order_[d].resize(static_cast<std::size_t>(sizes_[d]));
    std::iota(order_[d].begin(), order_[d].end(), Eigen::Index{0});
    cursor_[d] = order_[d].size(); // forces a shuffle on first use
  }
}

MinibatchSampler::Batch MinibatchSampler::next(std::mt19937_64 &rng) {
  Batch b;
  b.scale.assign(sizes_.size(), 1.0);
  for (std::size_t d = 0; d < sizes_.size(); ++d) {
    const auto task = static_cast<Eigen::Index>(d);
    if (full_) {
      for (Eigen::Index i = 0; i < sizes_[d]; ++i) {
        b.rows.push_back({task, i});
      }
      continue;
    }
    for (std::size_t k = 0; k < per_task_[d]; ++k) {
      if (cursor_[d] == order_[d].size()) {
        std::shuffle(order_[d].begin(), order_[d].end(), rng);
        cursor_[d] = 0;
      }
      b.rows.push_back({task, order_[d][cursor_[d]++]});
    }
    b.scale[d] =
        static_cast<double>(sizes_[d]) / static_cast<double>(per_task_[d]);
  }
  return b;
}

Model initialize_model(std::span<const TaskDataset> data, const ModelSpec &spec,
                       std::uint64_t seed) {
  if (data.empty()) {
    throw std::invalid_argument("need at least one task");
  }
  const Eigen::Index p = data.front().dimension();
  Eigen::Index total = 0;
  for (const auto &task : data) {
    if (task.size() == 0) {
      throw std::invalid_argument("task '" + task.name + "' has no observations");
    }
    task.validate();
    if (task.dimension() != p) {
      throw std::invalid_argument("task '" + task.name +
                                  "' has a different input dimension");
    }
    total += task.size();
  }
  if (spec.ranks.empty()) {
    throw std::invalid_argument("model needs at least one latent process");
  }

  Eigen::MatrixXd centroids(total, p);
  Eigen::Index k = 0;
  for (const auto &task : data) {
    for (const auto &obs : task.rows) {
      centroids.row(k++) = obs.support.centroid().transpose();
    }
  }

  Model model;
  model.seed = seed;
  model.options = spec.options;
  for (const auto &task : data) {
    model.likelihoods.push_back(task.likelihood);
  }
  model.rebuild_index_map();

  std::vector<Eigen::VectorXd> ls = spec.init_lengthscales;
  if (ls.empty()) {
    const Eigen::VectorXd extent =
        centroids.colwise().maxCoeff() - centroids.colwise().minCoeff();
    const Eigen::VectorXd init = (extent / 10.0).cwiseMax(1e-3);
    ls.assign(spec.ranks.size(), init);
  }
  if (ls.size() != spec.ranks.size()) {
    throw std::invalid_argument("need one initial lengthscale vector per latent");
  }
  for (const auto &l : ls) {
    if (l.size() != p) {
      throw std::invalid_argument("initial lengthscale has wrong dimension");
    }
  }

  model.inducing = kmeans_init(centroids, spec.num_inducing, seed);
  model.lmc = LmcParams::random_init(model.index_map.num_slots(), spec.ranks, ls,
                                     seed);
  model.q = VariationalState::prior(
      build_kuu(model.inducing, model.lmc, model.options.jitter));
  model.validate();
  return model;
}

namespace {

[[noreturn]] void abort_non_finite(const Model &model, std::size_t cycle,
                                   std::size_t step, double value) {
  std::ostringstream msg;
  msg << "non-finite ELBO (" << value << ") at cycle " << cycle << ", step "
      << step << "; |mu| = " << model.q.mean.norm()
      << ", |L| = " << model.q.chol.norm()
      << ", |hyper| = " << pack_hyper(model).norm();
  throw std::runtime_error(msg.str());
}

// Coordinates v with u = Lk v, where Lk is the Cholesky factor of K_uu.
VariationalState whiten(const VariationalState &q, const Eigen::MatrixXd &lk) {
  const auto tri = lk.triangularView<Eigen::Lower>();
  VariationalState w;
  w.mean = tri.solve(q.mean);
  w.chol = tri.solve(q.chol);
  w.chol = w.chol.triangularView<Eigen::Lower>();
  return w;
}

VariationalState unwhiten(const VariationalState &w, const Eigen::MatrixXd &lk) {
  VariationalState q;
  q.mean = lk * w.mean;
  q.chol = (lk.triangularView<Eigen::Lower>() * w.chol).triangularView<Eigen::Lower>();
  return q;
}

// Chain rule from the packed (mu, L) gradient to the packed whitened one.
Eigen::VectorXd whitened_gradient(const ElboGradients &g,
                                  const VariationalState &q,
                                  const Eigen::MatrixXd &lk) {
  const Eigen::Index t = q.size();
  Eigen::MatrixXd raw = g.d_chol;
  for (Eigen::Index i = 0; i < t; ++i) {
    raw(i, i) /= q.chol(i, i);
  }
  const Eigen::MatrixXd lw = lk.triangularView<Eigen::Lower>().solve(q.chol);
  ElboGradients gw;
  gw.d_mean = lk.transpose() * g.d_mean;
  gw.d_chol = (lk.transpose() * raw).triangularView<Eigen::Lower>();
  for (Eigen::Index i = 0; i < t; ++i) {
    gw.d_chol(i, i) *= lw(i, i);
  }
  return flatten_variational_gradient(gw);
}

} // namespace

FitResult train(Model model, std::span<const TaskDataset> data,
                const TrainConfig &config) {
  std::vector<Eigen::Index> sizes;
  std::size_t total = 0;
  for (const auto &task : data) {
    sizes.push_back(task.size());
    total += static_cast<std::size_t>(task.size());
  }
  config.validate(total);
  model.validate();

  std::mt19937_64 rng(config.seed);
  MinibatchSampler sampler(sizes, config.minibatch_size);

  Eigen::VectorXd theta_h = pack_hyper(model);
  AdamMoments e_moments(pack_variational(model.q).size());
  AdamMoments m_moments(theta_h.size());

  FitResult result;
  std::size_t step = 0;
  double previous = full_elbo(model, data);
  if (!std::isfinite(previous)) {
    abort_non_finite(model, 0, 0, previous);
  }
  result.trace.push_back({0, 0, previous});

  for (std::size_t cycle = 1; cycle <= config.cycles; ++cycle) {
    const Eigen::MatrixXd lk =
        config.whiten
            ? Eigen::MatrixXd(factor_kuu(build_kuu(model.inducing, model.lmc,
                                                   model.options.jitter))
                                  .matrixL())
            : Eigen::MatrixXd::Identity(model.q.size(), model.q.size());
    Eigen::VectorXd theta_q = pack_variational(whiten(model.q, lk));
    for (std::size_t i = 0; i < config.e_steps; ++i, ++step) {
      const auto batch = sampler.next(rng);
      const auto g = elbo_gradients(model, data, batch.rows, batch.scale,
                                    GradientParts::Variational);
      result.clamped_variances += g.clamped;
      const Eigen::VectorXd grad = whitened_gradient(g, model.q, lk);
      if (!std::isfinite(g.elbo) || !grad.allFinite()) {
        abort_non_finite(model, cycle, step, g.elbo);
      }
      adam_step(theta_q, grad, e_moments, config.e_adam);
      VariationalState w = model.q;
      unpack_variational(theta_q, w);
      model.q = unwhiten(w, lk);
    }
    for (std::size_t i = 0; i < config.m_steps; ++i, ++step) {
      const auto batch = sampler.next(rng);
      const auto g = elbo_gradients(model, data, batch.rows, batch.scale,
                                    GradientParts::Hyper);
      result.clamped_variances += g.clamped;
      const Eigen::VectorXd grad = flatten_hyper_gradient(g, model);
      if (!std::isfinite(g.elbo) || !grad.allFinite()) {
        abort_non_finite(model, cycle, step, g.elbo);
      }
      adam_step(theta_h, grad, m_moments, config.m_adam);
      unpack_hyper(theta_h, model);
    }
    const double current = full_elbo(model, data);
    if (!std::isfinite(current)) {
      abort_non_finite(model, cycle, step, current);
    }
    result.trace.push_back({cycle, step, current});
    const double rel =
        std::abs(current - previous) / std::max(std::abs(previous), 1e-300);
    previous = current;
    if (rel < config.tolerance) {
      result.converged = true;
      break;
    }
  }
  result.model = std::move(model);
  return result;
}

FitResult fit(std::span<const TaskDataset> data, const ModelSpec &spec,
              const TrainConfig &config) {
  return train(initialize_model(data, spec, config.seed), data, config);
}

} // namespace mtagg
