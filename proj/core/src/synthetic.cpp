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

#include "mtagg/synthetic.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "mtagg/aggregate.hpp"
#include "mtagg/lmc.hpp"

namespace mtagg {

namespace {

std::string fmt(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

Eigen::VectorXd standard_normal(Eigen::Index n, std::mt19937_64 &rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd z(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    z[i] = normal(rng);
  }
  return z;
}

// Draw from N(0, k) through the symmetric square root; robust to a Gram that
// is only positive semi-definite.
Eigen::VectorXd sample_gaussian(const Eigen::MatrixXd &k, std::mt19937_64 &rng) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(k);
  if (eig.info() != Eigen::Success) {
    throw std::runtime_error("eigen-decomposition of the generator Gram failed");
  }
  const Eigen::VectorXd root = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return eig.eigenvectors() * root.cwiseProduct(standard_normal(k.rows(), rng));
}

Eigen::MatrixXd eq_gram_1d(int n, double lengthscale) {
  Eigen::MatrixXd k(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double r = (i - j) / lengthscale;
      k(i, j) = std::exp(-r * r);
    }
  }
  k.diagonal().array() += 1e-8;
  return k;
}

} // namespace

PoissonTwoTask synth_poisson_two_task(std::uint64_t seed,
                                      const PoissonTwoTaskSettings &settings) {
  std::vector<Support> supports;
  for (int i = 0; i < 250; ++i) {
    supports.push_back(Support::interval(i, i + 1.0));
  }
  for (int i = 0; i < 125; ++i) {
    supports.push_back(Support::interval(2.0 * i, 2.0 * i + 2.0));
  }
  std::vector<LatentRow> rows;
  for (std::size_t i = 0; i < supports.size(); ++i) {
    rows.push_back({i < 250 ? 0 : 1, std::cref(supports[i])});
  }

  LmcParams lmc;
  LatentKernel latent;
  latent.kernel.lengthscales = Eigen::VectorXd::Constant(1, settings.lengthscale);
  latent.mixing = settings.mixing;
  lmc.latents.push_back(latent);
  lmc.validate();

  std::mt19937_64 rng(seed);
  const Eigen::VectorXd f = sample_gaussian(build_kff(rows, lmc), rng);

  PoissonTwoTask out;
  out.train.resize(2);
  out.train[0].name = "task1";
  out.train[1].name = "task2";
  out.test.name = "task1";
  for (auto *t : {&out.train[0], &out.train[1], &out.test}) {
    t->likelihood = Likelihood::poisson();
  }
  std::vector<double> test_latent;
  for (std::size_t i = 0; i < supports.size(); ++i) {
    const double fi = f[static_cast<Eigen::Index>(i)];
    std::poisson_distribution<long> draw(std::exp(fi));
    const Observation obs{supports[i], static_cast<double>(draw(rng))};
    if (i >= 250) {
      out.train[1].rows.push_back(obs);
      continue;
    }
    const double mid = supports[i].centroid()[0];
    if (mid >= settings.gap_lower && mid <= settings.gap_upper) {
      out.test.rows.push_back(obs);
      test_latent.push_back(fi);
    } else {
      out.train[0].rows.push_back(obs);
    }
  }
  out.test_latent = Eigen::Map<const Eigen::VectorXd>(
      test_latent.data(), static_cast<Eigen::Index>(test_latent.size()));
  out.metadata = {
      {"generator", "poisson_two_task"},
      {"seed", std::to_string(seed)},
      {"lengthscale", fmt(settings.lengthscale)},
      {"mixing", fmt(settings.mixing[0]) + "," + fmt(settings.mixing[1])},
      {"gap", fmt(settings.gap_lower) + "," + fmt(settings.gap_upper)},
  };
  return out;
}

SurfaceAnalog synth_surface(std::uint64_t seed, const SurfaceSettings &settings) {
  const int n1 = settings.rows;
  const int n2 = settings.cols;
  const Eigen::Index total = static_cast<Eigen::Index>(n1) * n2;
  if (n1 < 2 || n2 < 2 || settings.test_count < 1 || settings.test_count >= total) {
    throw std::invalid_argument("surface generator: invalid grid or split size");
  }
  std::mt19937_64 rng(seed);
  // The product EQ kernel on a grid factorises as a Kronecker product.
  const Eigen::MatrixXd l1 =
      eq_gram_1d(n1, settings.lengthscales[0]).llt().matrixL();
  const Eigen::MatrixXd l2 =
      eq_gram_1d(n2, settings.lengthscales[1]).llt().matrixL();
  Eigen::MatrixXd z(n1, n2);
  z.reshaped() = standard_normal(total, rng);
  const Eigen::MatrixXd f = l1 * z * l2.transpose();

  std::normal_distribution<double> noise(0.0, std::sqrt(settings.noise_variance));
  SurfaceAnalog out;
  out.grid.name = "points";
  out.grid.likelihood = Likelihood::gaussian(settings.noise_variance);
  for (int i = 0; i < n1; ++i) {
    for (int j = 0; j < n2; ++j) {
      out.grid.rows.push_back(
          {Support::point(Eigen::Vector2d(i, j)), f(i, j) + noise(rng)});
    }
  }

  std::vector<std::size_t> order(static_cast<std::size_t>(total));
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng);
  out.test = out.train_pool = TaskDataset{out.grid.name, out.grid.likelihood, {}};
  const auto n_test = static_cast<std::size_t>(settings.test_count);
  for (std::size_t k = 0; k < order.size(); ++k) {
    auto &dst = k < n_test ? out.test : out.train_pool;
    dst.rows.push_back(out.grid.rows[order[k]]);
  }

  out.aggregated = aggregate(out.grid, Eigen::Vector2d::Constant(settings.block));
  out.aggregated.name = "blocks";
  out.metadata = {
      {"generator", "surface"},
      {"seed", std::to_string(seed)},
      {"grid", std::to_string(n1) + "x" + std::to_string(n2)},
      {"lengthscales",
       fmt(settings.lengthscales[0]) + "," + fmt(settings.lengthscales[1])},
      {"noise_variance", fmt(settings.noise_variance)},
  };
  return out;
}

} // namespace mtagg
