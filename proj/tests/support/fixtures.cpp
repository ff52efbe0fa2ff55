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

#include "fixtures.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/Cholesky>

#include "mtagg/lmc.hpp"
#include "mtagg/variational.hpp"

namespace fixture {

using namespace mtagg;

std::string name(SupportKind kind) {
  switch (kind) {
  case SupportKind::Point:
    return "point";
  case SupportKind::Box:
    return "box";
  case SupportKind::Polygon:
    return "polygon";
  case SupportKind::Mixed:
    return "mixed";
  }
  return "?";
}

std::string name(LikelihoodKind kind) { return std::string(to_string(kind)); }

Support random_support(SupportKind kind, std::mt19937_64 &rng) {
  std::uniform_real_distribution<double> pos(0.0, 4.0);
  std::uniform_real_distribution<double> size(0.2, 1.5);
  switch (kind) {
  case SupportKind::Point:
    return Support::point(Eigen::Vector2d(pos(rng), pos(rng)));
  case SupportKind::Box: {
    const Eigen::Vector2d lo(pos(rng), pos(rng));
    const Eigen::Vector2d hi = lo + Eigen::Vector2d(size(rng), size(rng));
    return Support::box(lo, hi);
  }
  case SupportKind::Polygon: {
    // Star-shaped ring around a centre: angles sorted, radii jittered.
    const Eigen::Vector2d c(pos(rng), pos(rng));
    std::uniform_int_distribution<int> count(3, 6);
    const int n = count(rng);
    std::uniform_real_distribution<double> radius(0.3, 1.0);
    std::vector<Eigen::Vector2d> ring;
    for (int i = 0; i < n; ++i) {
      const double a = 2.0 * std::numbers::pi * (i + 0.3 * size(rng)) / n;
      const double r = radius(rng);
      ring.emplace_back(c.x() + r * std::cos(a), c.y() + r * std::sin(a));
    }
    return Support::polygon(ring);
  }
  case SupportKind::Mixed: {
    std::uniform_int_distribution<int> pick(0, 2);
    return random_support(static_cast<SupportKind>(pick(rng)), rng);
  }
  }
  return Support::point(Eigen::Vector2d::Zero());
}

std::vector<TaskDataset> random_tasks(const std::vector<LikelihoodKind> &kinds,
                                      SupportKind support, int rows,
                                      std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::poisson_distribution<int> counts(2.5);
  std::vector<TaskDataset> out;
  for (std::size_t d = 0; d < kinds.size(); ++d) {
    TaskDataset t;
    t.name = "task" + std::to_string(d);
    switch (kinds[d]) {
    case LikelihoodKind::Gaussian:
      t.likelihood = Likelihood::gaussian(0.3);
      break;
    case LikelihoodKind::Poisson:
      t.likelihood = Likelihood::poisson();
      break;
    case LikelihoodKind::HetGaussian:
      t.likelihood = Likelihood::het_gaussian();
      break;
    }
    for (int i = 0; i < rows; ++i) {
      const double y = kinds[d] == LikelihoodKind::Poisson ? counts(rng)
                                                           : normal(rng);
      t.rows.push_back({random_support(support, rng), y});
    }
    out.push_back(std::move(t));
  }
  return out;
}

Model random_model(const std::vector<TaskDataset> &data,
                   const std::vector<Eigen::Index> &ranks,
                   Eigen::Index num_inducing, std::uint64_t seed,
                   std::size_t quad_resolution) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  Model m;
  m.options.quad_resolution = quad_resolution;
  for (const auto &t : data) {
    m.likelihoods.push_back(t.likelihood);
  }
  m.rebuild_index_map();
  const Eigen::Index p = data.front().dimension();
  for (const Eigen::Index r : ranks) {
    LatentKernel l;
    l.kernel.lengthscales.resize(p);
    for (Eigen::Index i = 0; i < p; ++i) {
      l.kernel.lengthscales[i] = 0.8 + 1.5 * unit(rng);
    }
    l.mixing.resize(m.index_map.num_slots(), r);
    for (Eigen::Index a = 0; a < l.mixing.size(); ++a) {
      l.mixing.data()[a] = 0.4 + 0.6 * normal(rng);
    }
    m.lmc.latents.push_back(std::move(l));
  }
  m.inducing.points.resize(num_inducing, p);
  for (Eigen::Index a = 0; a < m.inducing.points.size(); ++a) {
    m.inducing.points.data()[a] = 4.0 * unit(rng);
  }
  // q(u) is a perturbation of the prior, expressed through its factor, so
  // marginal variances stay comparable to the prior ones.
  const Eigen::Index t = m.num_inducing_variables();
  const Eigen::MatrixXd lk =
      build_kuu(m.inducing, m.lmc, m.options.jitter).llt().matrixL();
  Eigen::VectorXd e(t);
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(t, t);
  for (Eigen::Index i = 0; i < t; ++i) {
    e[i] = 0.5 * normal(rng);
    c(i, i) = 0.5 + 0.7 * unit(rng);
    for (Eigen::Index j = 0; j < i; ++j) {
      c(i, j) = 0.1 * normal(rng);
    }
  }
  m.q.mean = lk * e;
  m.q.chol = (lk * c).triangularView<Eigen::Lower>();
  m.validate();
  return m;
}

GradientReport check_gradients(const Model &model,
                               const std::vector<TaskDataset> &data, double h,
                               double tol) {
  const auto rows = all_rows(data);
  const std::vector<double> ones(data.size(), 1.0);
  const ElboGradients g = elbo_gradients(model, data, rows, ones);
  GradientReport rep;
  std::ostringstream detail;
  const auto compare = [&](const char *group, const Eigen::VectorXd &analytic,
                           const auto &objective, const Eigen::VectorXd &theta) {
    for (Eigen::Index i = 0; i < theta.size(); ++i) {
      Eigen::VectorXd tp = theta;
      Eigen::VectorXd tm = theta;
      tp[i] += h;
      tm[i] -= h;
      const double fd = (objective(tp) - objective(tm)) / (2.0 * h);
      const double a = analytic[i];
      const double err =
          std::abs(a - fd) / std::max({1.0, std::abs(a), std::abs(fd)});
      ++rep.checked;
      rep.worst = std::max(rep.worst, err);
      if (!(err <= tol)) {
        ++rep.failed;
        detail << group << "[" << i << "]: analytic " << a << " fd " << fd
               << "\n";
      }
    }
  };

  const auto var_objective = [&](const Eigen::VectorXd &theta) {
    Model m = model;
    unpack_variational(theta, m.q);
    return elbo(m, data, rows, ones);
  };
  compare("variational", flatten_variational_gradient(g), var_objective,
          pack_variational(model.q));

  const auto hyper_objective = [&](const Eigen::VectorXd &theta) {
    Model m = model;
    unpack_hyper(theta, m);
    return elbo(m, data, rows, ones);
  };
  compare("hyper", flatten_hyper_gradient(g, model), hyper_objective,
          pack_hyper(model));
  rep.detail = detail.str();
  return rep;
}

} // namespace fixture
