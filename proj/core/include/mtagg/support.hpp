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

#ifndef MTAGG_SUPPORT_HPP_
#define MTAGG_SUPPORT_HPP_

#include <cstddef>
#include <variant>
#include <vector>

#include <Eigen/Core>

namespace mtagg {

constexpr std::size_t kDefaultQuadResolution = 32;

struct PointSupport {
  Eigen::VectorXd coords;
};

/// Axis-aligned hyperrectangle, lower[i] < upper[i] in every dimension.
struct BoxSupport {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
};

/// Simple polygon in the plane, vertices in order (either orientation).
struct PolygonSupport {
  std::vector<Eigen::Vector2d> vertices;
};

/// Finite set of points; the observation is their empirical mean.
struct BagSupport {
  std::vector<Eigen::VectorXd> members;
};

/// Region over which a task observation is an average of the latent process.
///
/// Construct through the static factories, which enforce the invariants of
/// each variant (non-degenerate boxes, simple polygons, non-empty bags).
class Support {
public:
  using Variant =
      std::variant<PointSupport, BoxSupport, PolygonSupport, BagSupport>;

  static Support point(Eigen::VectorXd coords);
  static Support box(Eigen::VectorXd lower, Eigen::VectorXd upper);
  static Support polygon(std::vector<Eigen::Vector2d> vertices);
  static Support bag(std::vector<Eigen::VectorXd> members);

  /// 1-D interval shorthand.
  static Support interval(double lower, double upper);

  const Variant &variant() const { return value_; }

  bool is_point() const { return std::holds_alternative<PointSupport>(value_); }
  bool is_box() const { return std::holds_alternative<BoxSupport>(value_); }
  bool is_polygon() const {
    return std::holds_alternative<PolygonSupport>(value_);
  }
  bool is_bag() const { return std::holds_alternative<BagSupport>(value_); }

  const PointSupport &as_point() const { return std::get<PointSupport>(value_); }
  const BoxSupport &as_box() const { return std::get<BoxSupport>(value_); }
  const PolygonSupport &as_polygon() const {
    return std::get<PolygonSupport>(value_);
  }
  const BagSupport &as_bag() const { return std::get<BagSupport>(value_); }

  Eigen::Index dimension() const;

  /// Box centre, polygon area centroid, bag mean, or the point itself.
  Eigen::VectorXd centroid() const;

  /// Copy shifted by `offset` (same dimension).
  Support translated(const Eigen::VectorXd &offset) const;

private:
  explicit Support(Variant v) : value_(std::move(v)) {}
  Variant value_;
};

struct QuadratureRule {
  std::vector<Eigen::VectorXd> nodes;
  std::vector<double> weights;

  double weight_sum() const;
};

/// Box volume or polygon (shoelace) area. Throws for point and bag supports.
double measure(const Support &s);

/// Regular grid of `resolution` cells per dimension over the bounding box.
///
/// Box: plain midpoint rule. Polygon: every grid cell is clipped against the
/// polygon and contributes one node at the centroid of the clipped piece,
/// weighted by its area, so the weights sum to the polygon area up to
/// rounding. Throws for point/bag supports and resolution 0.
QuadratureRule quadrature(const Support &s, std::size_t resolution);

/// Signed shoelace area (positive for counter-clockwise rings).
double signed_area(const std::vector<Eigen::Vector2d> &ring);

/// Even-odd rule; points exactly on an edge may land on either side.
bool point_in_polygon(const std::vector<Eigen::Vector2d> &ring,
                      const Eigen::Vector2d &p);

} // namespace mtagg

#endif // MTAGG_SUPPORT_HPP_
