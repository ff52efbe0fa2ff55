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
#include <random>
#include <stdexcept>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/LU>
#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "mtagg/predict.hpp"
#include "oracles.hpp"

namespace {

using namespace mtagg;

Support pt(double x) { return Support::point(Eigen::VectorXd::Constant(1, x)); }

// One Gaussian task on 1-D points with inducing inputs at the data and q(u)
// set to the exact posterior of u = f(X).
struct ExactFixture {
  Eigen::VectorXd x;
  Eigen::VectorXd y;
  double noise;
  double lengthscale = 0.8;
  double a = 1.3;
  Model model;

  ExactFixture(Eigen::VectorXd xs, Eigen::VectorXd ys, double s2)
      : x(std::move(xs)), y(std::move(ys)), noise(s2) {
    LatentKernel lk;
    lk.kernel.lengthscales = Eigen::VectorXd::Constant(1, lengthscale);
    lk.mixing = Eigen::MatrixXd::Constant(1, 1, a);
    model.lmc.latents = {lk};
    model.likelihoods = {Likelihood::gaussian(noise)};
    model.rebuild_index_map();
    model.inducing.points = x;
    model.options.jitter = 1e-10;
    const Eigen::MatrixXd k = prior(x, x);
    const Eigen::MatrixXd c =
        (k + noise * Eigen::MatrixXd::Identity(x.size(), x.size())).fullPivLu().inverse();
    // u = f / a at the inducing inputs.
    model.q.mean = (k * c * y) / a;
    const Eigen::MatrixXd s = (k - k * c * k) / (a * a);
    model.q.chol = (s + 1e-12 * Eigen::MatrixXd::Identity(x.size(), x.size()))
                       .llt()
                       .matrixL();
  }

  Eigen::MatrixXd prior(const Eigen::VectorXd &u, const Eigen::VectorXd &v) const {
    Eigen::MatrixXd k(u.size(), v.size());
    for (Eigen::Index i = 0; i < u.size(); ++i) {
      for (Eigen::Index j = 0; j < v.size(); ++j) {
        const double d = (u[i] - v[j]) / lengthscale;
        k(i, j) = a * a * std::exp(-d * d);
      }
    }
    return k;
  }

  // Dense GP regression at test points.
  std::pair<Eigen::VectorXd, Eigen::VectorXd> exact(const Eigen::VectorXd &xs) const {
    const Eigen::MatrixXd kxx =
        prior(x, x) + noise * Eigen::MatrixXd::Identity(x.size(), x.size());
    const Eigen::MatrixXd ks = prior(xs, x);
    const Eigen::MatrixXd inv = kxx.fullPivLu().inverse();
    const Eigen::VectorXd mean = ks * inv * y;
    const Eigen::VectorXd var =
        (prior(xs, xs) - ks * inv * ks.transpose()).diagonal();
    return {mean, var};
  }
};

ExactFixture small_problem(double noise) {
  Eigen::VectorXd x(8), y(8);
  x << 0.1, 0.5, 1.2, 1.9, 2.4, 3.0, 3.3, 4.1;
  y << 0.3, 0.8, 1.1, 0.2, -0.5, -1.0, -0.7, 0.4;
  return ExactFixture(x, y, noise);
}

TEST(PredictF, MatchesExactRegression) {
  const auto fx = small_problem(0.05);
  Eigen::VectorXd xs(5);
  xs << -0.5, 0.7, 2.0, 3.15, 5.0;
  std::vector<Support> s;
  for (double v : xs) {
    s.push_back(pt(v));
  }
  const auto pred = predict_f(fx.model, 0, s);
  const auto [mean, var] = fx.exact(xs);
  for (Eigen::Index i = 0; i < xs.size(); ++i) {
    EXPECT_NEAR(pred.mean(i, 0), mean[i], 1e-6);
    EXPECT_NEAR(pred.var(i, 0), var[i], 1e-6);
  }
}

TEST(PredictF, NoiseFreeTaskInterpolatesTrainingTargets) {
  const auto fx = small_problem(1e-6);
  std::vector<Support> s;
  for (double v : fx.x) {
    s.push_back(pt(v));
  }
  const auto pred = predict_f(fx.model, 0, s);
  for (Eigen::Index i = 0; i < fx.x.size(); ++i) {
    EXPECT_NEAR(pred.mean(i, 0), fx.y[i], 1e-3);
  }
}

TEST(PredictF, FarFieldRevertsToPrior) {
  const auto fx = small_problem(0.05);
  const std::vector<Support> s{pt(60.0), Support::interval(-80.0, -70.0)};
  const auto pred = predict_f(fx.model, 0, s);
  EXPECT_NEAR(pred.mean(0, 0), 0.0, 1e-6);
  EXPECT_NEAR(pred.var(0, 0), fx.a * fx.a, 1e-6);
  EXPECT_NEAR(pred.mean(1, 0), 0.0, 1e-6);
  EXPECT_NEAR(pred.var(1, 0),
              fx.a * fx.a * k_interval_interval_1d(-80, -70, -80, -70, fx.lengthscale),
              1e-6);
}

TEST(PredictF, BoxMeanIsAverageOfPointMeans) {
  const auto fx = small_problem(0.05);
  const double lo = 0.9;
  const double hi = 2.7;
  const auto box = predict_f(fx.model, 0, std::vector<Support>{Support::interval(lo, hi)});
  const double avg =
      oracle::integrate(
          [&](double t) {
            return predict_f(fx.model, 0, std::vector<Support>{pt(t)}).mean(0, 0);
          },
          lo, hi) /
      (hi - lo);
  EXPECT_NEAR(box.mean(0, 0), avg, 1e-3);
}

TEST(PredictF, VarianceBelowPriorWhenPosteriorTighter) {
  const auto fx = small_problem(0.2);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-2.0, 6.0);
  std::vector<Support> s;
  std::vector<double> prior;
  for (int i = 0; i < 30; ++i) {
    const double a = u(rng);
    if (i % 2 == 0) {
      s.push_back(pt(a));
      prior.push_back(fx.a * fx.a);
    } else {
      s.push_back(Support::interval(a, a + 0.7));
      prior.push_back(fx.a * fx.a *
                      k_interval_interval_1d(a, a + 0.7, a, a + 0.7, fx.lengthscale));
    }
  }
  const auto pred = predict_f(fx.model, 0, s);
  for (std::size_t i = 0; i < s.size(); ++i) {
    EXPECT_LE(pred.var(static_cast<Eigen::Index>(i), 0), prior[i] + 1e-8);
  }
}

TEST(PredictF, DimensionMismatchThrows) {
  const auto fx = small_problem(0.05);
  const std::vector<Support> s{Support::point(Eigen::Vector2d(0.0, 1.0))};
  EXPECT_THROW(predict_f(fx.model, 0, s), std::invalid_argument);
}

TEST(PredictF, HetGaussianTaskHasTwoSlots) {
  const auto data = fixture::random_tasks({LikelihoodKind::HetGaussian,
                                           LikelihoodKind::Poisson},
                                          fixture::SupportKind::Box, 6, 3);
  const auto model = fixture::random_model(data, {2}, 4, 3);
  const std::vector<Support> s{data[0].rows[0].support, data[1].rows[1].support};
  EXPECT_EQ(predict_f(model, 0, s).mean.cols(), 2);
  EXPECT_EQ(predict_f(model, 1, s).mean.cols(), 1);
}

TEST(PredictY, ComposesLikelihoodMoments) {
  const auto data = fixture::random_tasks({LikelihoodKind::HetGaussian,
                                           LikelihoodKind::Poisson,
                                           LikelihoodKind::Gaussian},
                                          fixture::SupportKind::Mixed, 5, 8);
  const auto model = fixture::random_model(data, {1, 2}, 4, 8);
  for (Eigen::Index d = 0; d < 3; ++d) {
    const auto &task = data[static_cast<std::size_t>(d)];
    const auto y = predict_y(model, d, task);
    std::vector<Support> s;
    for (const auto &o : task.rows) {
      s.push_back(o.support);
    }
    const auto f = predict_f(model, d, s);
    ASSERT_TRUE(y.log_density.has_value());
    for (Eigen::Index i = 0; i < task.size(); ++i) {
      std::vector<double> m(f.mean.cols()), v(f.mean.cols());
      for (Eigen::Index k = 0; k < f.mean.cols(); ++k) {
        m[k] = f.mean(i, k);
        v[k] = f.var(i, k);
      }
      const auto [ym, yv] = predictive_y_moments(m, v, task.likelihood);
      EXPECT_EQ(y.mean[i], ym);
      EXPECT_EQ(y.variance[i], yv);
      EXPECT_EQ((*y.log_density)[i],
                log_predictive_density(task.rows[i].y, m, v, task.likelihood));
    }
  }
}

TEST(PredictY, NoTargetsNoDensity) {
  const auto fx = small_problem(0.05);
  const auto y = predict_y(fx.model, 0, std::vector<Support>{pt(1.0)});
  EXPECT_FALSE(y.log_density.has_value());
  EXPECT_THROW(predict_y(fx.model, 0, std::vector<Support>{pt(1.0)},
                         Eigen::VectorXd::Zero(2)),
               std::invalid_argument);
}

TEST(Smse, PerfectPredictionIsZero) {
  Eigen::VectorXd y(4);
  y << 1, 2, 5, -1;
  EXPECT_EQ(smse(y, y), 0.0);
}

TEST(Smse, PredictingTheMeanIsOne) {
  Eigen::VectorXd y(5);
  y << 1, 2, 5, -1, 0.5;
  EXPECT_NEAR(smse(y, Eigen::VectorXd::Constant(5, y.mean())), 1.0, 1e-15);
}

TEST(Smse, MatchesRecomputation) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::VectorXd y(50), p(50);
  for (int i = 0; i < 50; ++i) {
    y[i] = n(rng);
    p[i] = y[i] + 0.5 * n(rng);
  }
  double mean = 0.0;
  for (int i = 0; i < 50; ++i) {
    mean += y[i] / 50;
  }
  double mse = 0.0;
  double var = 0.0;
  for (int i = 0; i < 50; ++i) {
    mse += (y[i] - p[i]) * (y[i] - p[i]) / 50;
    var += (y[i] - mean) * (y[i] - mean) / 50;
  }
  EXPECT_NEAR(smse(y, p), mse / var, 1e-13);
}

TEST(Smse, ShiftInvariant) {
  // Dyadic values keep every operation exact.
  Eigen::VectorXd y(8), p(8);
  y << 0.5, 1.25, -2.0, 3.0, 0.125, -0.75, 1.5, 2.25;
  p << 0.25, 1.0, -1.5, 2.5, 0.5, -1.0, 1.0, 2.0;
  const double c = 8.0;
  EXPECT_EQ(smse(y.array() + c, p.array() + c), smse(y, p));
}

TEST(Smse, RejectsDegenerateInput) {
  EXPECT_THROW(smse(Eigen::VectorXd::Ones(3), Eigen::VectorXd::Zero(3)),
               std::invalid_argument);
  EXPECT_THROW(smse(Eigen::VectorXd::Ones(1), Eigen::VectorXd::Zero(1)),
               std::invalid_argument);
  EXPECT_THROW(smse(Eigen::VectorXd::Ones(3), Eigen::VectorXd::Zero(2)),
               std::invalid_argument);
}

double normal_logpdf(double y, double m, double v) {
  return -0.5 * std::log(2.0 * M_PI * v) - 0.5 * (y - m) * (y - m) / v;
}

TEST(Snlp, BaselineModelScoresZero) {
  Eigen::VectorXd train(6), test(4);
  train << 1.0, 2.0, 0.5, 3.0, 2.5, 1.5;
  test << 0.0, 1.7, 2.2, 4.0;
  const double m = train.mean();
  const double v = (train.array() - m).square().mean();
  Eigen::VectorXd logd(4);
  for (int i = 0; i < 4; ++i) {
    logd[i] = normal_logpdf(test[i], m, v);
  }
  EXPECT_NEAR(snlp(logd, test, train), 0.0, 1e-14);
}

TEST(Snlp, ConcentratedCorrectPredictionsAreNegative) {
  Eigen::VectorXd train(4), test(3);
  train << 0.0, 1.0, 2.0, 3.0;
  test << 0.5, 1.5, 2.5;
  Eigen::VectorXd logd(3);
  for (int i = 0; i < 3; ++i) {
    logd[i] = normal_logpdf(test[i], test[i], 1e-4);
  }
  EXPECT_LT(snlp(logd, test, train), -3.0);
}

TEST(Snlp, MatchesRecomputation) {
  Eigen::VectorXd train(5), test(3), logd(3);
  train << 2.0, 4.0, 1.0, 7.0, 3.0;
  test << 5.0, 0.0, 3.0;
  logd << -1.2, -3.4, -0.7;
  const double m = 17.0 / 5.0;
  const double v = ((2 - m) * (2 - m) + (4 - m) * (4 - m) + (1 - m) * (1 - m) +
                    (7 - m) * (7 - m) + (3 - m) * (3 - m)) /
                   5.0;
  double expected = 0.0;
  for (int i = 0; i < 3; ++i) {
    expected += (-logd[i] + normal_logpdf(test[i], m, v)) / 3.0;
  }
  EXPECT_NEAR(snlp(logd, test, train), expected, 1e-13);
  EXPECT_NEAR(snlp(logd, test, m, v), expected, 1e-13);
}

TEST(Snlp, RejectsDegenerateInput) {
  EXPECT_THROW(snlp(Eigen::VectorXd::Zero(2), Eigen::VectorXd::Zero(2),
                    Eigen::VectorXd::Ones(4)),
               std::invalid_argument);
  EXPECT_THROW(snlp(Eigen::VectorXd::Zero(2), Eigen::VectorXd::Zero(3), 0.0, 1.0),
               std::invalid_argument);
}

} // namespace
