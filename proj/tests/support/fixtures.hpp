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

// Small randomised models shared by the unit and acceptance suites.

#ifndef MTAGG_TESTS_FIXTURES_HPP_
#define MTAGG_TESTS_FIXTURES_HPP_

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "mtagg/dataset.hpp"
#include "mtagg/model.hpp"

namespace fixture {

enum class SupportKind { Point, Box, Polygon, Mixed };

std::string name(SupportKind kind);
std::string name(mtagg::LikelihoodKind kind);

/// Random 2-D support of the given kind inside [0, 4]^2.
mtagg::Support random_support(SupportKind kind, std::mt19937_64 &rng);

/// One dataset per likelihood, `rows` observations each, with plausible
/// targets for that likelihood.
std::vector<mtagg::TaskDataset>
random_tasks(const std::vector<mtagg::LikelihoodKind> &kinds, SupportKind support,
             int rows, std::uint64_t seed);

/// A model for `data` with random mixing, lengthscales, inducing inputs and a
/// q(u) away from the prior.
mtagg::Model random_model(const std::vector<mtagg::TaskDataset> &data,
                          const std::vector<Eigen::Index> &ranks,
                          Eigen::Index num_inducing, std::uint64_t seed,
                          std::size_t quad_resolution = 8);

struct GradientReport {
  Eigen::Index checked = 0;
  Eigen::Index failed = 0;
  double worst = 0.0; // largest |a - b| / max(1, |a|, |b|)
  std::string detail;
};

/// Compares analytic gradients of the full bound with central differences
/// (step h) over every free parameter; a component fails when
/// |a - b| > tol * max(1, |a|, |b|).
GradientReport check_gradients(const mtagg::Model &model,
                               const std::vector<mtagg::TaskDataset> &data,
                               double h = 1e-5, double tol = 1e-4);

} // namespace fixture

#endif // MTAGG_TESTS_FIXTURES_HPP_
