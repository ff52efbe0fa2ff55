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

#ifndef MTAGG_KMEANS_HPP_
#define MTAGG_KMEANS_HPP_

#include <cstddef>
#include <cstdint>
#include <span>

#include <Eigen/Core>

#include "mtagg/lmc.hpp"

namespace mtagg {

/// Lloyd's algorithm with k-means++ seeding. Inputs are rows of `inputs`.
/// Throws if k exceeds the number of distinct inputs.
InducingSet kmeans_init(const Eigen::MatrixXd &inputs, Eigen::Index k,
                        std::uint64_t seed, std::size_t max_iterations = 100);

} // namespace mtagg

#endif // MTAGG_KMEANS_HPP_
