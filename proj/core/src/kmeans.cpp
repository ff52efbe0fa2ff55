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

#include "mtagg/kmeans.hpp"

#include <algorithm>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace mtagg {

namespace {

Eigen::Index count_distinct(const Eigen::MatrixXd &x) {
  std::vector<std::vector<double>> rows;
  rows.reserve(static_cast<std::size_t>(x.rows()));
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    rows.emplace_back(static_cast<std::size_t>(x.cols()));
    for (Eigen::Index c = 0; c < x.cols(); ++c) {
      rows.back()[static_cast<std::size_t>(c)] = x(i, c);
    }
  }
  std::sort(rows.begin(), rows.end());
  return static_cast<Eigen::Index>(
      std::unique(rows.begin(), rows.end()) - rows.begin());
}

Eigen::VectorXd nearest_sq_dist(const Eigen::MatrixXd &x,
                                const Eigen::MatrixXd &centres,
                                Eigen::Index used, std::vector<Eigen::Index> *label) {
  Eigen::VectorXd d(x.rows());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    Eigen::Index arg = 0;
    for (Eigen::Index c = 0; c < used; ++c) {
      const double v = (x.row(i) - centres.row(c)).squaredNorm();
      if (v < best) {
        best = v;
        arg = c;
      }
    }
    d[i] = best;
    if (label) {
      (*label)[static_cast<std::size_t>(i)] = arg;
    }
  }
  return d;
}

Eigen::Index sample_weighted(const Eigen::VectorXd &w, std::mt19937_64 &rng) {
  std::discrete_distribution<Eigen::Index> pick(w.data(), w.data() + w.size());
  return pick(rng);
}

} // namespace

InducingSet kmeans_init(const Eigen::MatrixXd &inputs, Eigen::Index k,
                        std::uint64_t seed, std::size_t max_iterations) {
  if (k < 1) {
    throw std::invalid_argument("k-means needs k >= 1");
  }
  if (!inputs.allFinite()) {
    throw std::invalid_argument("k-means inputs must be finite");
  }
  const Eigen::Index distinct = count_distinct(inputs);
  if (k > distinct) {
    throw std::invalid_argument("cannot place " + std::to_string(k) +
                                " inducing points on " +
                                std::to_string(distinct) + " distinct inputs");
  }
  const Eigen::Index n = inputs.rows();
  std::mt19937_64 rng(seed);

  Eigen::MatrixXd centres(k, inputs.cols());
  std::uniform_int_distribution<Eigen::Index> first(0, n - 1);
  centres.row(0) = inputs.row(first(rng));
  for (Eigen::Index c = 1; c < k; ++c) {
    const Eigen::VectorXd d = nearest_sq_dist(inputs, centres, c, nullptr);
    centres.row(c) = inputs.row(sample_weighted(d, rng));
  }

  std::vector<Eigen::Index> label(static_cast<std::size_t>(n), 0);
  for (std::size_t it = 0; it < max_iterations; ++it) {
    Eigen::VectorXd d = nearest_sq_dist(inputs, centres, k, &label);
    Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(k, inputs.cols());
    Eigen::VectorXd count = Eigen::VectorXd::Zero(k);
    for (Eigen::Index i = 0; i < n; ++i) {
      sum.row(label[static_cast<std::size_t>(i)]) += inputs.row(i);
      count[label[static_cast<std::size_t>(i)]] += 1.0;
    }
    Eigen::MatrixXd next(k, inputs.cols());
    for (Eigen::Index c = 0; c < k; ++c) {
      if (count[c] > 0.0) {
        next.row(c) = sum.row(c) / count[c];
      } else {
        // Reseed an empty cluster at the point farthest from its centre.
        Eigen::Index far = 0;
        d.maxCoeff(&far);
        next.row(c) = inputs.row(far);
        d[far] = 0.0;
      }
    }
    const bool moved = !next.isApprox(centres, 1e-12);
    centres = std::move(next);
    if (!moved) {
      break;
    }
  }
  return InducingSet{centres};
}

} // namespace mtagg
