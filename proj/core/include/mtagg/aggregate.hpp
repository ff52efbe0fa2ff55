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

#ifndef MTAGG_AGGREGATE_HPP_
#define MTAGG_AGGREGATE_HPP_

#include <Eigen/Core>

#include "mtagg/dataset.hpp"

namespace mtagg {

/// Regular grid of cell-centred sites: site k along dimension i sits at
/// origin[i] + k * spacing[i], for k in [0, counts[i]).
struct RegularGrid {
  Eigen::VectorXd origin;
  Eigen::VectorXd spacing;
  Eigen::VectorXi counts;

  Eigen::Index dimension() const { return origin.size(); }
  /// Smallest grid holding every support centroid; spacing is the smallest
  /// positive gap between distinct coordinates in each dimension.
  static RegularGrid infer(const TaskDataset &points);
};

/// Averages observations over blocks of `block_edges` (coordinate units,
/// a multiple of the spacing) tiling the grid from its origin.
///
/// Only complete blocks that fit inside the grid are formed; sites in the
/// remainder strip along each dimension are dropped. Every block holding at
/// least one observation yields one Box row whose y is the arithmetic mean of
/// its members (density convention, not a sum). Observations are assigned by
/// support centroid.
TaskDataset aggregate(const TaskDataset &points, const RegularGrid &grid,
                      const Eigen::VectorXd &block_edges);

/// Same, with the grid inferred from the observations.
TaskDataset aggregate(const TaskDataset &points,
                      const Eigen::VectorXd &block_edges);

} // namespace mtagg

#endif // MTAGG_AGGREGATE_HPP_
