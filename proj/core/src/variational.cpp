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

#include "mtagg/variational.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

namespace mtagg {

namespace {

struct ExpandedBatch {
  std::vector<LatentRow> rows;
  // Index of the first latent row of each batch entry.
  std::vector<Eigen::Index> first;
};

ExpandedBatch expand(const Model &model, std::span<const TaskDataset> data,
                     std::span<const RowRef> batch) {
  ExpandedBatch out;
  out.first.reserve(batch.size());
  for (const auto &ref : batch) {
    if (ref.task < 0 || ref.task >= static_cast<Eigen::Index>(data.size())) {
      throw std::out_of_range("batch references unknown task " +
                              std::to_string(ref.task));
    }
    const auto &task = data[static_cast<std::size_t>(ref.task)];
    if (ref.row < 0 || ref.row >= task.size()) {
      throw std::out_of_range("batch references row " + std::to_string(ref.row) +
                              " outside task " + std::to_string(ref.task));
    }
    const auto &obs = task.rows[static_cast<std::size_t>(ref.row)];
    out.first.push_back(static_cast<Eigen::Index>(out.rows.size()));
    const Eigen::Index ns = model.index_map.slots_of(ref.task);
    for (Eigen::Index k = 0; k < ns; ++k) {
      out.rows.push_back({model.index_map.slot(ref.task, k), obs.support});
    }
  }
  return out;
}

// Shared forward pass of the bound.
struct Forward {
  Eigen::MatrixXd kuu;
  Eigen::LLT<Eigen::MatrixXd> llt;
  Eigen::MatrixXd kfu;
  Eigen::MatrixXd wt; // K_uu^-1 K_uf, T x N
  Eigen::VectorXd alpha;
  QfMarginals qf;
};

Forward forward(std::span<const LatentRow> rows, const VariationalState &q,
                const LmcParams &lmc, const InducingSet &z,
                const ModelOptions &options) {
  Forward f;
  f.kuu = build_kuu(z, lmc, options.jitter);
  if (q.size() != f.kuu.rows()) {
    throw std::invalid_argument("variational state has size " +
                                std::to_string(q.size()) + ", expected " +
                                std::to_string(f.kuu.rows()));
  }
  f.llt = factor_kuu(f.kuu);
  f.kfu = build_kfu(rows, z, lmc, options.quad_resolution);
  const Eigen::VectorXd kff = kff_diag(rows, lmc, options.quad_resolution);
  f.wt = f.llt.solve(f.kfu.transpose());
  f.alpha = f.llt.solve(q.mean);

  f.qf.mean = f.kfu * f.alpha;
  const Eigen::VectorXd qff =
      (f.kfu.transpose().array() * f.wt.array()).colwise().sum().transpose();
  const Eigen::MatrixXd b = q.chol.transpose() * f.wt;
  const Eigen::VectorXd sv = b.colwise().squaredNorm().transpose();
  f.qf.var = kff - qff + sv;
  f.qf.min_raw_var = f.qf.var.size() > 0 ? f.qf.var.minCoeff() : 0.0;
  for (Eigen::Index i = 0; i < f.qf.var.size(); ++i) {
    if (f.qf.var[i] < 0.0) {
      f.qf.var[i] = 0.0;
      ++f.qf.clamped;
    }
  }
  return f;
}

double kl_from_factor(const VariationalState &q,
                      const Eigen::LLT<Eigen::MatrixXd> &llt) {
  const Eigen::MatrixXd lk = llt.matrixL();
  const Eigen::Index t = q.size();
  const Eigen::MatrixXd a = lk.triangularView<Eigen::Lower>().solve(q.chol);
  const Eigen::VectorXd b = lk.triangularView<Eigen::Lower>().solve(q.mean);
  const double logdet_k = 2.0 * lk.diagonal().array().log().sum();
  const double logdet_s = 2.0 * q.chol.diagonal().array().log().sum();
  return 0.5 * (a.squaredNorm() + b.squaredNorm() - static_cast<double>(t) +
                logdet_k - logdet_s);
}

void check_scale(const Model &model, std::span<const TaskDataset> data,
                 std::span<const double> scale) {
  if (static_cast<Eigen::Index>(data.size()) != model.num_tasks()) {
    throw std::invalid_argument("model has " + std::to_string(model.num_tasks()) +
                                " tasks but " + std::to_string(data.size()) +
                                " datasets were given");
  }
  if (scale.size() != data.size()) {
    throw std::invalid_argument("need one minibatch scale per task");
  }
}

} // namespace

Eigen::LLT<Eigen::MatrixXd> factor_kuu(const Eigen::MatrixXd &kuu) {
  Eigen::LLT<Eigen::MatrixXd> llt(kuu);
  if (llt.info() != Eigen::Success) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(kuu,
                                                       Eigen::EigenvaluesOnly);
    const double lo = eig.eigenvalues().minCoeff();
    const double hi = eig.eigenvalues().maxCoeff();
    std::ostringstream msg;
    msg << "Cholesky of K_uu failed: eigenvalues in [" << lo << ", " << hi
        << "], condition estimate " << (lo > 0.0 ? hi / lo : INFINITY)
        << "; increase the jitter";
    throw std::runtime_error(msg.str());
  }
  return llt;
}

QfMarginals qf_marginals(std::span<const LatentRow> rows,
                         const VariationalState &q, const LmcParams &lmc,
                         const InducingSet &z, const ModelOptions &options) {
  return forward(rows, q, lmc, z, options).qf;
}

double kl_qu_pu(const VariationalState &q, const Eigen::MatrixXd &kuu) {
  if (q.size() != kuu.rows()) {
    throw std::invalid_argument("kl_qu_pu: size mismatch");
  }
  return kl_from_factor(q, factor_kuu(kuu));
}

std::vector<RowRef> all_rows(std::span<const TaskDataset> data) {
  std::vector<RowRef> rows;
  for (std::size_t d = 0; d < data.size(); ++d) {
    for (Eigen::Index i = 0; i < data[d].size(); ++i) {
      rows.push_back({static_cast<Eigen::Index>(d), i});
    }
  }
  return rows;
}

double elbo(const Model &model, std::span<const TaskDataset> data,
            std::span<const RowRef> batch, std::span<const double> scale) {
  check_scale(model, data, scale);
  const auto ex = expand(model, data, batch);
  const auto f =
      forward(ex.rows, model.q, model.lmc, model.inducing, model.options);
  const GaussHermiteRule rule = model.options.hermite_order == kDefaultHermiteOrder
                                    ? default_hermite_rule()
                                    : gauss_hermite(model.options.hermite_order);
  double acc = 0.0;
  for (std::size_t e = 0; e < batch.size(); ++e) {
    const auto d = static_cast<std::size_t>(batch[e].task);
    const auto &lik = model.likelihoods[d];
    const auto first = ex.first[e];
    const auto ns = static_cast<Eigen::Index>(lik.num_slots());
    const double y = data[d].rows[static_cast<std::size_t>(batch[e].row)].y;
    acc += scale[d] * expected_loglik(
                          y,
                          std::span<const double>(f.qf.mean.data() + first,
                                                  static_cast<std::size_t>(ns)),
                          std::span<const double>(f.qf.var.data() + first,
                                                  static_cast<std::size_t>(ns)),
                          lik, rule);
  }
  return acc - kl_from_factor(model.q, f.llt);
}

double full_elbo(const Model &model, std::span<const TaskDataset> data) {
  const auto rows = all_rows(data);
  const std::vector<double> ones(data.size(), 1.0);
  return elbo(model, data, rows, ones);
}

ElboGradients elbo_gradients(const Model &model,
                             std::span<const TaskDataset> data,
                             std::span<const RowRef> batch,
                             std::span<const double> scale,
                             GradientParts parts) {
  check_scale(model, data, scale);
  const auto &lmc = model.lmc;
  const auto &z = model.inducing;
  const auto ex = expand(model, data, batch);
  const auto f = forward(ex.rows, model.q, lmc, z, model.options);
  const GaussHermiteRule rule = model.options.hermite_order == kDefaultHermiteOrder
                                    ? default_hermite_rule()
                                    : gauss_hermite(model.options.hermite_order);

  const Eigen::Index n = static_cast<Eigen::Index>(ex.rows.size());
  const Eigen::Index t = model.q.size();
  Eigen::VectorXd gm = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd gv = Eigen::VectorXd::Zero(n);

  ElboGradients g;
  g.clamped = f.qf.clamped;
  g.d_log_noise = Eigen::VectorXd::Zero(model.num_tasks());
  double acc = 0.0;
  for (std::size_t e = 0; e < batch.size(); ++e) {
    const auto d = static_cast<std::size_t>(batch[e].task);
    const auto &lik = model.likelihoods[d];
    const auto first = ex.first[e];
    const auto ns = lik.num_slots();
    const double y = data[d].rows[static_cast<std::size_t>(batch[e].row)].y;
    const auto ell = expected_loglik_with_grad(
        y, std::span<const double>(f.qf.mean.data() + first, ns),
        std::span<const double>(f.qf.var.data() + first, ns), lik, rule);
    acc += scale[d] * ell.value;
    for (std::size_t k = 0; k < ns; ++k) {
      gm[first + static_cast<Eigen::Index>(k)] = scale[d] * ell.d_mean[k];
      gv[first + static_cast<Eigen::Index>(k)] = scale[d] * ell.d_var[k];
    }
    if (lik.has_noise_parameter()) {
      g.d_log_noise[static_cast<Eigen::Index>(d)] += scale[d] * ell.d_log_noise;
    }
  }
  g.elbo = acc - kl_from_factor(model.q, f.llt);

  const Eigen::MatrixXd &lq = model.q.chol;
  const Eigen::MatrixXd gvm = f.wt * gv.asDiagonal() * f.wt.transpose();

  if (parts != GradientParts::Hyper) {
    g.d_mean = f.wt * gm - f.alpha;
    const Eigen::MatrixXd pl = f.llt.solve(lq);
    Eigen::MatrixXd dl = 2.0 * gvm * lq - pl;
    dl = dl.triangularView<Eigen::Lower>();
    for (Eigen::Index i = 0; i < t; ++i) {
      dl(i, i) = (dl(i, i) + 1.0 / lq(i, i)) * lq(i, i);
    }
    g.d_chol = std::move(dl);
  }

  if (parts == GradientParts::Variational) {
    return g;
  }

  // Adjoints of the bound w.r.t. K_uu, K_fu and diag K_ff.
  const Eigen::MatrixXd p = f.llt.solve(Eigen::MatrixXd::Identity(t, t));
  const Eigen::MatrixXd s = model.q.covariance();
  const Eigen::MatrixXd gsp = gvm * s * p;
  const Eigen::MatrixXd psp = p * s * p;
  const Eigen::MatrixXd g_kuu =
      -(f.wt * gm) * f.alpha.transpose() + gvm - gsp - gsp.transpose() +
      0.5 * (psp + f.alpha * f.alpha.transpose() - p);
  const Eigen::MatrixXd pswt = p * (s * f.wt);
  const Eigen::MatrixXd g_kfu =
      gm * f.alpha.transpose() +
      2.0 * gv.asDiagonal() * (pswt - f.wt).transpose();

  const Eigen::Index m = z.size();
  const Eigen::Index dim = z.dimension();
  std::vector<Support> inducing;
  inducing.reserve(static_cast<std::size_t>(m));
  for (Eigen::Index a = 0; a < m; ++a) {
    inducing.push_back(Support::point(z.points.row(a).transpose()));
  }

  Eigen::Index offset = 0;
  for (const auto &latent : lmc.latents) {
    const auto &ell = latent.kernel.lengthscales;
    const auto &mix = latent.mixing;
    const Eigen::Index rank = latent.rank();
    Eigen::VectorXd d_ell = Eigen::VectorXd::Zero(dim);
    Eigen::MatrixXd d_mix = Eigen::MatrixXd::Zero(mix.rows(), rank);

    // K_uu blocks share the same kernel across realisations.
    Eigen::MatrixXd gq = Eigen::MatrixXd::Zero(m, m);
    for (Eigen::Index r = 0; r < rank; ++r) {
      gq += g_kuu.block(offset + r * m, offset + r * m, m, m);
    }
    for (Eigen::Index a = 0; a < m; ++a) {
      for (Eigen::Index b = 0; b < m; ++b) {
        if (a == b) {
          continue;
        }
        const Eigen::VectorXd za = z.points.row(a).transpose();
        const Eigen::VectorXd zb = z.points.row(b).transpose();
        const double k = k_point(za, zb, latent.kernel);
        for (Eigen::Index i = 0; i < dim; ++i) {
          const double r2 = (za[i] - zb[i]) * (za[i] - zb[i]) / (ell[i] * ell[i]);
          d_ell[i] += gq(a, b) * k * 2.0 * r2;
        }
      }
    }

    for (Eigen::Index row = 0; row < n; ++row) {
      const auto &lr = ex.rows[static_cast<std::size_t>(row)];
      const Eigen::Index j = lr.slot;
      for (Eigen::Index a = 0; a < m; ++a) {
        const auto kg = k_support_with_grad(
            lr.support.get(), inducing[static_cast<std::size_t>(a)],
            latent.kernel, model.options.quad_resolution);
        for (Eigen::Index r = 0; r < rank; ++r) {
          const double c = g_kfu(row, offset + r * m + a);
          d_ell += c * mix(j, r) * kg.d_log_lengthscale;
          d_mix(j, r) += c * kg.value;
        }
      }
      if (gv[row] != 0.0) {
        const auto ks = k_support_with_grad(lr.support.get(), lr.support.get(),
                                            latent.kernel,
                                            model.options.quad_resolution);
        const double bjj = mix.row(j).squaredNorm();
        d_ell += gv[row] * bjj * ks.d_log_lengthscale;
        for (Eigen::Index r = 0; r < rank; ++r) {
          d_mix(j, r) += gv[row] * 2.0 * mix(j, r) * ks.value;
        }
      }
    }
    g.d_log_lengthscale.push_back(std::move(d_ell));
    g.d_mixing.push_back(std::move(d_mix));
    offset += rank * m;
  }
  return g;
}

Eigen::VectorXd pack_variational(const VariationalState &q) {
  const Eigen::Index t = q.size();
  Eigen::VectorXd theta(t + t * (t + 1) / 2);
  theta.head(t) = q.mean;
  Eigen::Index k = t;
  for (Eigen::Index i = 0; i < t; ++i) {
    for (Eigen::Index j = 0; j < i; ++j) {
      theta[k++] = q.chol(i, j);
    }
    theta[k++] = std::log(q.chol(i, i));
  }
  return theta;
}

void unpack_variational(const Eigen::VectorXd &theta, VariationalState &q) {
  const Eigen::Index t = q.size();
  if (theta.size() != t + t * (t + 1) / 2) {
    throw std::invalid_argument("unpack_variational: wrong parameter count");
  }
  q.mean = theta.head(t);
  q.chol.setZero(t, t);
  Eigen::Index k = t;
  for (Eigen::Index i = 0; i < t; ++i) {
    for (Eigen::Index j = 0; j < i; ++j) {
      q.chol(i, j) = theta[k++];
    }
    q.chol(i, i) = std::exp(theta[k++]);
  }
}

Eigen::VectorXd flatten_variational_gradient(const ElboGradients &g) {
  const Eigen::Index t = g.d_mean.size();
  Eigen::VectorXd out(t + t * (t + 1) / 2);
  out.head(t) = g.d_mean;
  Eigen::Index k = t;
  for (Eigen::Index i = 0; i < t; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      out[k++] = g.d_chol(i, j);
    }
  }
  return out;
}

namespace {

Eigen::Index hyper_size(const Model &model) {
  Eigen::Index n = 0;
  for (const auto &l : model.lmc.latents) {
    n += l.kernel.dimension() + l.mixing.size();
  }
  for (const auto &lik : model.likelihoods) {
    n += lik.has_noise_parameter() ? 1 : 0;
  }
  return n;
}

} // namespace

Eigen::VectorXd pack_hyper(const Model &model) {
  Eigen::VectorXd theta(hyper_size(model));
  Eigen::Index k = 0;
  for (const auto &l : model.lmc.latents) {
    for (Eigen::Index i = 0; i < l.kernel.dimension(); ++i) {
      theta[k++] = std::log(l.kernel.lengthscales[i]);
    }
  }
  for (const auto &l : model.lmc.latents) {
    for (Eigen::Index r = 0; r < l.mixing.rows(); ++r) {
      for (Eigen::Index c = 0; c < l.mixing.cols(); ++c) {
        theta[k++] = l.mixing(r, c);
      }
    }
  }
  for (const auto &lik : model.likelihoods) {
    if (lik.has_noise_parameter()) {
      theta[k++] = std::log(lik.noise_variance);
    }
  }
  return theta;
}

void unpack_hyper(const Eigen::VectorXd &theta, Model &model) {
  if (theta.size() != hyper_size(model)) {
    throw std::invalid_argument("unpack_hyper: wrong parameter count");
  }
  Eigen::Index k = 0;
  for (auto &l : model.lmc.latents) {
    for (Eigen::Index i = 0; i < l.kernel.dimension(); ++i) {
      l.kernel.lengthscales[i] = std::exp(theta[k++]);
    }
  }
  for (auto &l : model.lmc.latents) {
    for (Eigen::Index r = 0; r < l.mixing.rows(); ++r) {
      for (Eigen::Index c = 0; c < l.mixing.cols(); ++c) {
        l.mixing(r, c) = theta[k++];
      }
    }
  }
  for (auto &lik : model.likelihoods) {
    if (lik.has_noise_parameter()) {
      lik.noise_variance = std::exp(theta[k++]);
    }
  }
}

Eigen::VectorXd flatten_hyper_gradient(const ElboGradients &g,
                                       const Model &model) {
  Eigen::VectorXd out(hyper_size(model));
  Eigen::Index k = 0;
  for (const auto &d : g.d_log_lengthscale) {
    for (Eigen::Index i = 0; i < d.size(); ++i) {
      out[k++] = d[i];
    }
  }
  for (const auto &d : g.d_mixing) {
    for (Eigen::Index r = 0; r < d.rows(); ++r) {
      for (Eigen::Index c = 0; c < d.cols(); ++c) {
        out[k++] = d(r, c);
      }
    }
  }
  for (std::size_t d = 0; d < model.likelihoods.size(); ++d) {
    if (model.likelihoods[d].has_noise_parameter()) {
      out[k++] = g.d_log_noise[static_cast<Eigen::Index>(d)];
    }
  }
  return out;
}

} // namespace mtagg
