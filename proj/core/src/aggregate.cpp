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

#include "mtagg/aggregate.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace mtagg {

namespace {

constexpr double kGridTol = 1e-6;

Eigen::Index site_index(double coord, double origin, double spacing,
                        int count, Eigen::Index dim) {
  const double t = (coord - origin) / spacing;
  const double k = std::round(t);
  if (std::abs(t - k) > kGridTol || k < 0 || k >= count) {
    throw std::invalid_argument("coordinate " + std::to_string(coord) +
                                " in dimension " + std::to_string(dim) +
                                " does not lie on the grid");
  }
  return static_cast<Eigen::Index>(k);
}

} // namespace

RegularGrid RegularGrid::infer(const TaskDataset &points) {
  if (points.rows.empty()) {
    throw std::invalid_argument("cannot infer a grid from an empty dataset");
  }
  const Eigen::Index p = points.dimension();
  RegularGrid grid;
  grid.origin.resize(p);
  grid.spacing.resize(p);
  grid.counts.resize(p);
  for (Eigen::Index i = 0; i < p; ++i) {
    std::vector<double> c;
    c.reserve(points.rows.size());
    for (const auto &obs : points.rows) {
      c.push_back(obs.support.centroid()[i]);
    }
    std::sort(c.begin(), c.end());
    const double lo = c.front();
    const double hi = c.back();
    const double tol = kGridTol * std::max(1.0, hi - lo);
    double gap = 0.0;
    for (std::size_t k = 1; k < c.size(); ++k) {
      const double g = c[k] - c[k - 1];
      if (g > tol && (gap == 0.0 || g < gap)) {
        gap = g;
      }
    }
    if (gap == 0.0) {
      gap = 1.0;
    }
    grid.origin[i] = lo;
    grid.spacing[i] = gap;
    grid.counts[i] = static_cast<int>(std::llround((hi - lo) / gap)) + 1;
  }
  return grid;
}

TaskDataset aggregate(const TaskDataset &points, const RegularGrid &grid,
                      const Eigen::VectorXd &block_edges) {
  const Eigen::Index p = grid.dimension();
  if (grid.spacing.size() != p || grid.counts.size() != p ||
      block_edges.size() != p) {
    throw std::invalid_argument("grid and block sizes must share a dimension");
  }
  if (!points.rows.empty() && points.dimension() != p) {
    throw std::invalid_argument("observations do not match the grid dimension");
  }
  Eigen::VectorXi ratio(p);
  Eigen::VectorXi blocks(p);
  for (Eigen::Index i = 0; i < p; ++i) {
    if (!(grid.spacing[i] > 0.0) || grid.counts[i] < 1) {
      throw std::invalid_argument("grid spacing and counts must be positive");
    }
    const double r = block_edges[i] / grid.spacing[i];
    const double rr = std::round(r);
    if (!(rr >= 1.0) || std::abs(r - rr) > kGridTol) {
      throw std::invalid_argument(
          "block edge must be a positive multiple of the grid spacing");
    }
    ratio[i] = static_cast<int>(rr);
    blocks[i] = grid.counts[i] / ratio[i];
  }

  struct Acc {
    double sum = 0.0;
    std::size_t n = 0;
  };
  std::map<std::vector<Eigen::Index>, Acc> acc;
  for (const auto &obs : points.rows) {
    const Eigen::VectorXd c = obs.support.centroid();
    std::vector<Eigen::Index> key(static_cast<std::size_t>(p));
    bool inside = true;
    for (Eigen::Index i = 0; i < p; ++i) {
      const Eigen::Index k =
          site_index(c[i], grid.origin[i], grid.spacing[i], grid.counts[i], i);
      const Eigen::Index b = k / ratio[i];
      if (b >= blocks[i]) {
        inside = false;
        break;
      }
      key[static_cast<std::size_t>(i)] = b;
    }
    if (inside) {
      auto &a = acc[key];
      a.sum += obs.y;
      ++a.n;
    }
  }

  TaskDataset out;
  out.name = points.name;
  out.likelihood = points.likelihood;
  out.rows.reserve(acc.size());
  const Eigen::VectorXd start = grid.origin - 0.5 * grid.spacing;
  for (const auto &[key, a] : acc) {
    Eigen::VectorXd lo(p);
    Eigen::VectorXd hi(p);
    for (Eigen::Index i = 0; i < p; ++i) {
      const auto b = static_cast<double>(key[static_cast<std::size_t>(i)]);
      lo[i] = start[i] + b * block_edges[i];
      hi[i] = start[i] + (b + 1.0) * block_edges[i];
    }
    out.rows.push_back(
        {Support::box(std::move(lo), std::move(hi)), a.sum / static_cast<double>(a.n)});
  }
  return out;
}

TaskDataset aggregate(const TaskDataset &points,
                      const Eigen::VectorXd &block_edges) {
  return aggregate(points, RegularGrid::infer(points), block_edges);
}

} // namespace mtagg
