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

#include <cmath>
#include <numeric>
#include <random>

#include <Eigen/Cholesky>
#include <Eigen/LU>
#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "mtagg/adam.hpp"
#include "mtagg/trainer.hpp"
#include "mtagg/variational.hpp"
#include "oracles.hpp"

namespace {

using namespace mtagg;

TaskDataset gaussian_points(const Eigen::VectorXd &x, const Eigen::VectorXd &y,
                            double noise) {
  TaskDataset t{"g", Likelihood::gaussian(noise), {}};
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    t.rows.push_back({Support::point(Eigen::VectorXd::Constant(1, x[i])), y[i]});
  }
  return t;
}

Model single_latent_model(const Eigen::MatrixXd &z, double lengthscale,
                          const Likelihood &lik) {
  Model m;
  m.likelihoods = {lik};
  m.rebuild_index_map();
  LatentKernel l;
  l.kernel.lengthscales = Eigen::VectorXd::Constant(z.cols(), lengthscale);
  l.mixing = Eigen::MatrixXd::Ones(1, 1);
  m.lmc.latents = {l};
  m.inducing.points = z;
  m.q = VariationalState::prior(build_kuu(m.inducing, m.lmc, m.options.jitter));
  return m;
}

Eigen::MatrixXd point_gram(const Eigen::VectorXd &x, double l) {
  Eigen::MatrixXd k(x.size(), x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    for (Eigen::Index j = 0; j < x.size(); ++j) {
      const double r = (x[i] - x[j]) / l;
      k(i, j) = std::exp(-r * r);
    }
  }
  return k;
}

double exact_log_marginal(const Eigen::VectorXd &x, const Eigen::VectorXd &y,
                          double l, double noise) {
  Eigen::MatrixXd k = point_gram(x, l);
  k.diagonal().array() += noise;
  return oracle::gaussian_log_density(y, k);
}

// ---------------------------------------------------------------- q(f)

TEST(QfMarginals, PriorStateGivesPriorMarginals) {
  const auto data = fixture::random_tasks({LikelihoodKind::Gaussian},
                                          fixture::SupportKind::Mixed, 6, 3);
  Model m = fixture::random_model(data, {1, 2}, 4, 5);
  m.q = VariationalState::prior(build_kuu(m.inducing, m.lmc, m.options.jitter));
  std::vector<LatentRow> rows;
  for (const auto &obs : data[0].rows) {
    rows.push_back({0, std::cref(obs.support)});
  }
  const auto qf = qf_marginals(rows, m.q, m.lmc, m.inducing, m.options);
  const auto kff = kff_diag(rows, m.lmc, m.options.quad_resolution);
  for (Eigen::Index i = 0; i < kff.size(); ++i) {
    EXPECT_NEAR(qf.mean[i], 0.0, 1e-12);
    EXPECT_NEAR(qf.var[i], kff[i], 1e-9);
  }
}

TEST(QfMarginals, RowAtInducingPointRecoversQu) {
  Eigen::MatrixXd z(3, 1);
  z << 0.0, 1.0, 2.5;
  Model m = single_latent_model(z, 1.3, Likelihood::gaussian(0.1));
  m.options.jitter = 0.0;
  m.q.mean << 0.3, -1.2, 0.7;
  m.q.chol << 0.5, 0, 0, 0.1, 0.4, 0, -0.2, 0.3, 0.6;
  const Support s = Support::point(Eigen::VectorXd::Constant(1, 1.0));
  const std::vector<LatentRow> rows{{0, std::cref(s)}};
  const auto qf = qf_marginals(rows, m.q, m.lmc, m.inducing, m.options);
  const Eigen::MatrixXd cov = m.q.covariance();
  EXPECT_NEAR(qf.mean[0], m.q.mean[1], 1e-10);
  EXPECT_NEAR(qf.var[0], cov(1, 1), 1e-10);
}

TEST(QfMarginals, MatchesDenseInverseOracle) {
  const auto data = fixture::random_tasks({LikelihoodKind::Gaussian},
                                          fixture::SupportKind::Box, 3, 11);
  const Model m = fixture::random_model(data, {1}, 4, 12);
  std::vector<LatentRow> rows;
  for (const auto &obs : data[0].rows) {
    rows.push_back({0, std::cref(obs.support)});
  }
  const auto qf = qf_marginals(rows, m.q, m.lmc, m.inducing, m.options);

  const Eigen::MatrixXd kuu = build_kuu(m.inducing, m.lmc, m.options.jitter);
  const Eigen::MatrixXd kfu = build_kfu(rows, m.inducing, m.lmc);
  const Eigen::MatrixXd kff = build_kff(rows, m.lmc);
  const Eigen::MatrixXd inv = kuu.fullPivLu().inverse();
  const Eigen::MatrixXd s = m.q.chol * m.q.chol.transpose();
  const Eigen::VectorXd mean = kfu * inv * m.q.mean;
  const Eigen::MatrixXd cov =
      kff - kfu * inv * kfu.transpose() + kfu * inv * s * inv * kfu.transpose();
  for (Eigen::Index i = 0; i < 3; ++i) {
    EXPECT_NEAR(qf.mean[i], mean[i], 1e-10);
    EXPECT_NEAR(qf.var[i], cov(i, i), 1e-10);
  }
}

// ---------------------------------------------------------------- KL

TEST(KlQuPu, ZeroAtPrior) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Random(4, 4);
  const Eigen::MatrixXd k = a * a.transpose() + Eigen::MatrixXd::Identity(4, 4);
  EXPECT_NEAR(kl_qu_pu(VariationalState::prior(k), k), 0.0, 1e-12);
}

TEST(KlQuPu, ScalarCase) {
  VariationalState q{Eigen::VectorXd::Ones(1), Eigen::MatrixXd::Ones(1, 1)};
  EXPECT_NEAR(kl_qu_pu(q, Eigen::MatrixXd::Ones(1, 1)), 0.5, 1e-15);
}

TEST(KlQuPu, MatchesDenseFormula) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> normal;
  Eigen::MatrixXd a(5, 5);
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(5, 5);
  Eigen::VectorXd mu(5);
  for (Eigen::Index i = 0; i < 5; ++i) {
    mu[i] = normal(rng);
    for (Eigen::Index j = 0; j < 5; ++j) {
      a(i, j) = normal(rng);
      if (j < i) {
        l(i, j) = 0.3 * normal(rng);
      }
    }
    l(i, i) = 0.5 + std::abs(normal(rng));
  }
  const Eigen::MatrixXd k = a * a.transpose() + 0.5 * Eigen::MatrixXd::Identity(5, 5);
  const Eigen::MatrixXd s = l * l.transpose();
  const Eigen::MatrixXd inv = k.fullPivLu().inverse();
  const double expected =
      0.5 * ((inv * s).trace() + mu.dot(inv * mu) - 5.0 +
             std::log(k.fullPivLu().determinant()) -
             std::log(s.fullPivLu().determinant()));
  EXPECT_NEAR(kl_qu_pu({mu, l}, k), expected, 1e-10);
}

TEST(KlQuPu, MeanGradientAtPriorCovariance) {
  // With no data the bound is -KL; d/dmu of -KL is -K^-1 mu.
  Eigen::MatrixXd z(3, 1);
  z << 0.0, 0.7, 2.0;
  Model m = single_latent_model(z, 1.0, Likelihood::gaussian(0.5));
  m.q.mean << 0.4, -0.3, 1.1;
  const std::vector<TaskDataset> data{TaskDataset{"e", m.likelihoods[0], {}}};
  const std::vector<RowRef> none;
  const std::vector<double> ones{1.0};
  const auto g = elbo_gradients(m, data, none, ones);
  const Eigen::MatrixXd kuu = build_kuu(m.inducing, m.lmc, m.options.jitter);
  const Eigen::VectorXd expected = -kuu.fullPivLu().solve(m.q.mean);
  EXPECT_LT((g.d_mean - expected).norm(), 1e-9);
}

// ---------------------------------------------------------------- bound

TEST(Elbo, PriorStateIsExpectedLogLikUnderPrior) {
  const auto data = fixture::random_tasks({LikelihoodKind::Gaussian},
                                          fixture::SupportKind::Point, 5, 21);
  Model m = fixture::random_model(data, {1}, 3, 22);
  m.q = VariationalState::prior(build_kuu(m.inducing, m.lmc, m.options.jitter));
  std::vector<LatentRow> rows;
  for (const auto &obs : data[0].rows) {
    rows.push_back({0, std::cref(obs.support)});
  }
  const auto kff = kff_diag(rows, m.lmc);
  const double s2 = m.likelihoods[0].noise_variance;
  double expected = 0.0;
  for (Eigen::Index i = 0; i < kff.size(); ++i) {
    const double y = data[0].rows[static_cast<std::size_t>(i)].y;
    expected += -0.5 * std::log(2.0 * M_PI * s2) - 0.5 * (y * y + kff[i]) / s2;
  }
  EXPECT_NEAR(full_elbo(m, data), expected, 1e-8);
}

TEST(Elbo, MinibatchEstimateIsUnbiased) {
  const auto data = fixture::random_tasks(
      {LikelihoodKind::Gaussian, LikelihoodKind::Poisson},
      fixture::SupportKind::Point, 10, 31);
  const Model m = fixture::random_model(data, {1}, 4, 32);
  const double full = full_elbo(m, data);
  MinibatchSampler sampler({10, 10}, 6);
  std::mt19937_64 rng(33);
  const int n = 500;
  double s = 0.0;
  double s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const auto b = sampler.next(rng);
    const double v = elbo(m, data, b.rows, b.scale);
    s += v;
    s2 += v * v;
  }
  const double mean = s / n;
  const double se = std::sqrt((s2 / n - mean * mean) / (n - 1));
  EXPECT_LT(std::abs(mean - full), 3.0 * se);
}

TEST(Elbo, NeverExceedsExactMarginalForGaussianTasks) {
  Eigen::VectorXd x(6);
  x << 0.1, 0.9, 1.7, 2.2, 3.4, 4.0;
  Eigen::VectorXd y(6);
  y << 0.3, -0.5, 0.8, 1.1, -0.2, 0.4;
  const std::vector<TaskDataset> data{gaussian_points(x, y, 0.2)};
  std::mt19937_64 rng(41);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::MatrixXd z(4, 1);
    for (Eigen::Index a = 0; a < 4; ++a) {
      z(a, 0) = 4.0 * std::abs(normal(rng)) / 2.0;
    }
    Model m = single_latent_model(z, 1.1, Likelihood::gaussian(0.2));
    for (Eigen::Index i = 0; i < 4; ++i) {
      m.q.mean[i] = normal(rng);
    }
    const double exact = exact_log_marginal(x, y, 1.1, 0.2);
    EXPECT_LE(full_elbo(m, data), exact + 1e-8);
  }
}

TEST(Elbo, CollapsesToExactMarginalWithInducingAtData) {
  Eigen::VectorXd x(5);
  x << 0.0, 0.8, 1.5, 2.9, 3.6;
  Eigen::VectorXd y(5);
  y << 0.2, 0.9, 0.4, -0.7, -0.1;
  const double l = 1.2;
  const double noise = 0.1;
  const std::vector<TaskDataset> data{gaussian_points(x, y, noise)};
  Model m = single_latent_model(x, l, Likelihood::gaussian(noise));
  m.options.jitter = 1e-10;
  m.q = VariationalState::prior(build_kuu(m.inducing, m.lmc, m.options.jitter));

  // E-step only: Adam on (mu, L) until the bound stops moving.
  const auto rows = all_rows(data);
  const std::vector<double> ones{1.0};
  Eigen::VectorXd theta = pack_variational(m.q);
  AdamMoments moments(theta.size());
  AdamConfig cfg;
  cfg.learning_rate = 0.01;
  for (int it = 0; it < 20000; ++it) {
    const auto g = elbo_gradients(m, data, rows, ones, GradientParts::Variational);
    adam_step(theta, flatten_variational_gradient(g), moments, cfg);
    unpack_variational(theta, m.q);
  }
  const double exact = exact_log_marginal(x, y, l, noise);
  const double bound = full_elbo(m, data);
  EXPECT_NEAR(bound, exact, 1e-4);
  EXPECT_LE(bound, exact + 1e-8);
}

// ---------------------------------------------------------------- gradients

struct GradCase {
  LikelihoodKind lik;
  fixture::SupportKind support;
};

class GradientCheck : public ::testing::TestWithParam<GradCase> {};

TEST_P(GradientCheck, MatchesCentralDifferences) {
  const auto c = GetParam();
  const auto data = fixture::random_tasks({c.lik}, c.support, 6, 100);
  const Model m = fixture::random_model(data, {1, 2}, 3, 101);
  const auto rep = fixture::check_gradients(m, data);
  EXPECT_EQ(rep.failed, 0) << rep.detail;
  EXPECT_GT(rep.checked, 0);
}

INSTANTIATE_TEST_SUITE_P(
    LikelihoodBySupport, GradientCheck,
    ::testing::Values(GradCase{LikelihoodKind::Gaussian, fixture::SupportKind::Point},
                      GradCase{LikelihoodKind::Gaussian, fixture::SupportKind::Box},
                      GradCase{LikelihoodKind::Gaussian, fixture::SupportKind::Polygon},
                      GradCase{LikelihoodKind::Poisson, fixture::SupportKind::Point},
                      GradCase{LikelihoodKind::Poisson, fixture::SupportKind::Box},
                      GradCase{LikelihoodKind::Poisson, fixture::SupportKind::Polygon},
                      GradCase{LikelihoodKind::HetGaussian, fixture::SupportKind::Point},
                      GradCase{LikelihoodKind::HetGaussian, fixture::SupportKind::Box},
                      GradCase{LikelihoodKind::HetGaussian,
                               fixture::SupportKind::Polygon}),
    [](const auto &info) {
      return fixture::name(info.param.lik) + "_" + fixture::name(info.param.support);
    });

TEST(GradientCheck, MultiTaskMixedSupports) {
  const auto data = fixture::random_tasks(
      {LikelihoodKind::Gaussian, LikelihoodKind::Poisson, LikelihoodKind::HetGaussian},
      fixture::SupportKind::Mixed, 3, 200);
  const Model m = fixture::random_model(data, {2, 1}, 3, 201);
  const auto rep = fixture::check_gradients(m, data);
  EXPECT_EQ(rep.failed, 0) << rep.detail;
}

TEST(GradientCheck, StationaryAtPriorWhenTargetsAreZero) {
  Eigen::VectorXd x(4);
  x << 0.0, 1.0, 2.0, 3.0;
  const std::vector<TaskDataset> data{
      gaussian_points(x, Eigen::VectorXd::Zero(4), 0.3)};
  const Model m = single_latent_model(x, 1.0, Likelihood::gaussian(0.3));
  const auto rows = all_rows(data);
  const std::vector<double> ones{1.0};
  const auto g = elbo_gradients(m, data, rows, ones);
  EXPECT_LT(g.d_mean.norm(), 1e-10);
}

// ---------------------------------------------------------------- Adam

TEST(Adam, ZeroGradientLeavesParameters) {
  Eigen::VectorXd p(2);
  p << 1.0, -2.0;
  AdamMoments mom(2);
  adam_step(p, Eigen::VectorXd::Zero(2), mom, AdamConfig{});
  EXPECT_EQ(p[0], 1.0);
  EXPECT_EQ(p[1], -2.0);
}

TEST(Adam, FirstStepMovesByLearningRate) {
  Eigen::VectorXd p = Eigen::VectorXd::Zero(1);
  AdamMoments mom(1);
  adam_step(p, Eigen::VectorXd::Ones(1), mom, AdamConfig{});
  // m_hat = 1, v_hat = 1 -> step = lr / (1 + eps)
  EXPECT_NEAR(p[0], 0.01 / (1.0 + 1e-8), 1e-15);
}

TEST(Adam, AscendsQuadraticBowl) {
  Eigen::VectorXd x = Eigen::VectorXd::Zero(1);
  AdamMoments mom(1);
  AdamConfig cfg;
  cfg.learning_rate = 0.05;
  for (int i = 0; i < 2000; ++i) {
    adam_step(x, Eigen::VectorXd::Constant(1, -2.0 * (x[0] - 3.0)), mom, cfg);
  }
  EXPECT_NEAR(x[0], 3.0, 1e-2);
}

TEST(Adam, RejectsBadConfig) {
  AdamConfig cfg;
  cfg.beta1 = 1.0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
}

// ---------------------------------------------------------------- training

TEST(MinibatchSampler, StratifiesByTaskSize) {
  MinibatchSampler s({30, 10}, 8);
  std::mt19937_64 rng(1);
  const auto b = s.next(rng);
  int first = 0;
  for (const auto &r : b.rows) {
    first += r.task == 0 ? 1 : 0;
  }
  EXPECT_EQ(first, 6);
  EXPECT_EQ(b.rows.size(), 8u);
  EXPECT_DOUBLE_EQ(b.scale[0], 5.0);
  EXPECT_DOUBLE_EQ(b.scale[1], 5.0);
}

TEST(MinibatchSampler, CoversEachTaskOncePerEpoch) {
  MinibatchSampler s({12}, 4);
  std::mt19937_64 rng(2);
  std::vector<int> seen(12, 0);
  for (int i = 0; i < 3; ++i) {
    for (const auto &r : s.next(rng).rows) {
      ++seen[static_cast<std::size_t>(r.row)];
    }
  }
  for (int c : seen) {
    EXPECT_EQ(c, 1);
  }
}

TEST(MinibatchSampler, FullBatchWhenUnset) {
  MinibatchSampler s({3, 2}, std::nullopt);
  std::mt19937_64 rng(3);
  EXPECT_TRUE(s.full_batch());
  EXPECT_EQ(s.next(rng).rows.size(), 5u);
}

TEST(TrainConfig, RejectsOversizedMinibatch) {
  TrainConfig cfg;
  cfg.minibatch_size = 11;
  EXPECT_THROW(cfg.validate(10), std::invalid_argument);
}

TEST(Fit, InducingAtDataReachesExactMarginal) {
  Eigen::VectorXd x(8);
  x << 0.0, 0.6, 1.1, 1.9, 2.4, 3.3, 3.9, 4.5;
  Eigen::VectorXd y(8);
  y << 0.1, 0.7, 0.9, 0.2, -0.4, -0.9, -0.3, 0.5;
  const std::vector<TaskDataset> data{gaussian_points(x, y, 0.05)};
  ModelSpec spec;
  spec.num_inducing = 8;
  spec.init_lengthscales = {Eigen::VectorXd::Constant(1, 1.0)};
  TrainConfig cfg;
  cfg.cycles = 300;
  cfg.e_adam.learning_rate = 0.02;
  cfg.m_adam.learning_rate = 0.02;
  cfg.tolerance = 0.0;
  const auto res = fit(data, spec, cfg);
  const auto &m = res.model;
  const double l = m.lmc.latents[0].kernel.lengthscales[0];
  const double a = m.lmc.latents[0].mixing(0, 0);
  Eigen::MatrixXd k = a * a * point_gram(x, l);
  k.diagonal().array() += m.likelihoods[0].noise_variance;
  const double exact = oracle::gaussian_log_density(y, k);
  const double bound = full_elbo(m, data);
  EXPECT_LT(std::abs(bound - exact) / 8.0, 1e-2);
  EXPECT_LE(bound, exact + 1e-8);
}

TEST(Fit, CorrelatedTasksLearnCorrelatedMixing) {
  Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(15, 0.0, 7.0);
  const Eigen::VectorXd y = x.array().sin();
  auto t1 = gaussian_points(x, y, 0.05);
  auto t2 = gaussian_points(x, y, 0.05);
  t2.name = "g2";
  const std::vector<TaskDataset> data{t1, t2};
  ModelSpec spec;
  spec.num_inducing = 8;
  TrainConfig cfg;
  cfg.cycles = 100;
  cfg.e_adam.learning_rate = 0.05;
  cfg.m_adam.learning_rate = 0.05;
  const auto res = fit(data, spec, cfg);
  const Eigen::MatrixXd b = res.model.lmc.latents[0].coregionalisation();
  EXPECT_GT(b(0, 1) / std::sqrt(b(0, 0) * b(1, 1)), 0.9);
}

TEST(Fit, FinalBoundNotBelowInitial) {
  const auto data = fixture::random_tasks({LikelihoodKind::Poisson},
                                          fixture::SupportKind::Box, 10, 51);
  ModelSpec spec;
  spec.num_inducing = 4;
  TrainConfig cfg;
  cfg.cycles = 20;
  const auto res = fit(data, spec, cfg);
  EXPECT_GE(res.trace.back().elbo, res.trace.front().elbo);
}

TEST(Fit, DeterministicGivenSeed) {
  const auto data = fixture::random_tasks(
      {LikelihoodKind::Gaussian, LikelihoodKind::Poisson},
      fixture::SupportKind::Mixed, 8, 61);
  ModelSpec spec;
  spec.num_inducing = 4;
  TrainConfig cfg;
  cfg.cycles = 5;
  cfg.minibatch_size = 6;
  cfg.seed = 9;
  const auto a = fit(data, spec, cfg);
  const auto b = fit(data, spec, cfg);
  ASSERT_EQ(a.trace.size(), b.trace.size());
  for (std::size_t i = 0; i < a.trace.size(); ++i) {
    EXPECT_EQ(a.trace[i].elbo, b.trace[i].elbo);
  }
}

TEST(Fit, NonFiniteBoundAbortsWithDiagnostic) {
  Eigen::VectorXd x(3);
  x << 0.0, 1.0, 2.0;
  std::vector<TaskDataset> data{gaussian_points(x, Eigen::VectorXd::Ones(3), 0.1)};
  data[0].rows[1].y = 1e300;
  ModelSpec spec;
  spec.num_inducing = 2;
  TrainConfig cfg;
  cfg.cycles = 2;
  try {
    fit(data, spec, cfg);
    FAIL() << "expected an exception";
  } catch (const std::runtime_error &e) {
    EXPECT_NE(std::string(e.what()).find("cycle"), std::string::npos);
  }
}

TEST(Fit, RejectsEmptyTask) {
  const std::vector<TaskDataset> data{
      TaskDataset{"empty", Likelihood::gaussian(1.0), {}}};
  EXPECT_THROW(fit(data, ModelSpec{}, TrainConfig{}), std::invalid_argument);
}

} // namespace
