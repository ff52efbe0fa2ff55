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

#include "mtagg/support.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace mtagg {

namespace {

double cross(const Eigen::Vector2d &o, const Eigen::Vector2d &a,
             const Eigen::Vector2d &b) {
  return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
}

bool on_segment(const Eigen::Vector2d &p, const Eigen::Vector2d &q,
                const Eigen::Vector2d &r) {
  return std::min(p.x(), r.x()) <= q.x() && q.x() <= std::max(p.x(), r.x()) &&
         std::min(p.y(), r.y()) <= q.y() && q.y() <= std::max(p.y(), r.y());
}

int orientation(const Eigen::Vector2d &p, const Eigen::Vector2d &q,
                const Eigen::Vector2d &r) {
  const double v = cross(p, q, r);
  if (v > 0.0) {
    return 1;
  }
  if (v < 0.0) {
    return -1;
  }
  return 0;
}

bool segments_intersect(const Eigen::Vector2d &p1, const Eigen::Vector2d &p2,
                        const Eigen::Vector2d &q1, const Eigen::Vector2d &q2) {
  const int o1 = orientation(p1, p2, q1);
  const int o2 = orientation(p1, p2, q2);
  const int o3 = orientation(q1, q2, p1);
  const int o4 = orientation(q1, q2, p2);
  if (o1 != o2 && o3 != o4) {
    return true;
  }
  return (o1 == 0 && on_segment(p1, q1, p2)) ||
         (o2 == 0 && on_segment(p1, q2, p2)) ||
         (o3 == 0 && on_segment(q1, p1, q2)) ||
         (o4 == 0 && on_segment(q1, p2, q2));
}

bool is_simple(const std::vector<Eigen::Vector2d> &ring) {
  const std::size_t n = ring.size();
  for (std::size_t i = 0; i < n; ++i) {
    const auto &a1 = ring[i];
    const auto &a2 = ring[(i + 1) % n];
    for (std::size_t j = i + 1; j < n; ++j) {
      // adjacent edges share a vertex by construction
      if (j == i + 1 || (i == 0 && j == n - 1)) {
        continue;
      }
      if (segments_intersect(a1, a2, ring[j], ring[(j + 1) % n])) {
        return false;
      }
    }
  }
  return true;
}

// Sutherland-Hodgman against one half-plane of an axis-aligned window.
// `axis` selects x (0) or y (1); keep points with sign*(p[axis]-bound) <= 0.
std::vector<Eigen::Vector2d> clip_half_plane(
    const std::vector<Eigen::Vector2d> &poly, int axis, double bound,
    double sign) {
  std::vector<Eigen::Vector2d> out;
  if (poly.empty()) {
    return out;
  }
  out.reserve(poly.size() + 4);
  auto inside = [&](const Eigen::Vector2d &p) {
    return sign * (p[axis] - bound) <= 0.0;
  };
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Eigen::Vector2d &cur = poly[i];
    const Eigen::Vector2d &prev = poly[(i + poly.size() - 1) % poly.size()];
    const bool cur_in = inside(cur);
    const bool prev_in = inside(prev);
    if (cur_in != prev_in) {
      const double t = (bound - prev[axis]) / (cur[axis] - prev[axis]);
      Eigen::Vector2d x = prev + t * (cur - prev);
      x[axis] = bound;
      out.push_back(x);
    }
    if (cur_in) {
      out.push_back(cur);
    }
  }
  return out;
}

// Returns (area, centroid) of a possibly degenerate ring.
std::pair<double, Eigen::Vector2d>
area_and_centroid(const std::vector<Eigen::Vector2d> &ring) {
  double a2 = 0.0;
  Eigen::Vector2d c = Eigen::Vector2d::Zero();
  const std::size_t n = ring.size();
  for (std::size_t i = 0; i < n; ++i) {
    const auto &p = ring[i];
    const auto &q = ring[(i + 1) % n];
    const double w = p.x() * q.y() - q.x() * p.y();
    a2 += w;
    c += w * (p + q);
  }
  if (a2 == 0.0) {
    return {0.0, Eigen::Vector2d::Zero()};
  }
  return {0.5 * a2, c / (3.0 * a2)};
}

} // namespace

Support Support::point(Eigen::VectorXd coords) {
  if (coords.size() == 0) {
    throw std::invalid_argument("point support needs at least one coordinate");
  }
  if (!coords.allFinite()) {
    throw std::invalid_argument("point support has non-finite coordinates");
  }
  return Support(PointSupport{std::move(coords)});
}

Support Support::box(Eigen::VectorXd lower, Eigen::VectorXd upper) {
  if (lower.size() == 0 || lower.size() != upper.size()) {
    throw std::invalid_argument("box support: lower/upper dimension mismatch");
  }
  if (!lower.allFinite() || !upper.allFinite()) {
    throw std::invalid_argument("box support has non-finite bounds");
  }
  for (Eigen::Index i = 0; i < lower.size(); ++i) {
    if (!(lower[i] < upper[i])) {
      throw std::invalid_argument(
          "box support requires lower < upper in every dimension (dimension " +
          std::to_string(i) + "); use a point support for zero width");
    }
  }
  return Support(BoxSupport{std::move(lower), std::move(upper)});
}

Support Support::interval(double lower, double upper) {
  return box(Eigen::VectorXd::Constant(1, lower),
             Eigen::VectorXd::Constant(1, upper));
}

Support Support::polygon(std::vector<Eigen::Vector2d> vertices) {
  if (vertices.size() < 3) {
    throw std::invalid_argument("polygon support needs at least 3 vertices");
  }
  for (const auto &v : vertices) {
    if (!v.allFinite()) {
      throw std::invalid_argument("polygon support has non-finite vertices");
    }
  }
  if (!is_simple(vertices)) {
    throw std::invalid_argument("polygon support is self-intersecting");
  }
  if (signed_area(vertices) == 0.0) {
    throw std::invalid_argument("polygon support has zero area");
  }
  return Support(PolygonSupport{std::move(vertices)});
}

Support Support::bag(std::vector<Eigen::VectorXd> members) {
  if (members.empty()) {
    throw std::invalid_argument("bag support must contain at least one point");
  }
  const Eigen::Index p = members.front().size();
  if (p == 0) {
    throw std::invalid_argument("bag support members need coordinates");
  }
  for (const auto &m : members) {
    if (m.size() != p) {
      throw std::invalid_argument("bag support members differ in dimension");
    }
    if (!m.allFinite()) {
      throw std::invalid_argument("bag support has non-finite members");
    }
  }
  return Support(BagSupport{std::move(members)});
}

Eigen::Index Support::dimension() const {
  return std::visit(
      [](const auto &s) -> Eigen::Index {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, PointSupport>) {
          return s.coords.size();
        } else if constexpr (std::is_same_v<T, BoxSupport>) {
          return s.lower.size();
        } else if constexpr (std::is_same_v<T, PolygonSupport>) {
          return 2;
        } else {
          return s.members.front().size();
        }
      },
      value_);
}

Eigen::VectorXd Support::centroid() const {
  return std::visit(
      [](const auto &s) -> Eigen::VectorXd {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, PointSupport>) {
          return s.coords;
        } else if constexpr (std::is_same_v<T, BoxSupport>) {
          return 0.5 * (s.lower + s.upper);
        } else if constexpr (std::is_same_v<T, PolygonSupport>) {
          return area_and_centroid(s.vertices).second;
        } else {
          Eigen::VectorXd c = Eigen::VectorXd::Zero(s.members.front().size());
          for (const auto &m : s.members) {
            c += m;
          }
          return c / static_cast<double>(s.members.size());
        }
      },
      value_);
}

Support Support::translated(const Eigen::VectorXd &offset) const {
  if (offset.size() != dimension()) {
    throw std::invalid_argument("translation offset has wrong dimension");
  }
  return std::visit(
      [&](const auto &s) -> Support {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, PointSupport>) {
          return Support::point(s.coords + offset);
        } else if constexpr (std::is_same_v<T, BoxSupport>) {
          return Support::box(s.lower + offset, s.upper + offset);
        } else if constexpr (std::is_same_v<T, PolygonSupport>) {
          std::vector<Eigen::Vector2d> v = s.vertices;
          for (auto &x : v) {
            x += offset.head<2>();
          }
          return Support::polygon(std::move(v));
        } else {
          std::vector<Eigen::VectorXd> m = s.members;
          for (auto &x : m) {
            x += offset;
          }
          return Support::bag(std::move(m));
        }
      },
      value_);
}

double QuadratureRule::weight_sum() const {
  long double acc = 0.0L;
  for (double w : weights) {
    acc += w;
  }
  return static_cast<double>(acc);
}

double signed_area(const std::vector<Eigen::Vector2d> &ring) {
  double a2 = 0.0;
  const std::size_t n = ring.size();
  for (std::size_t i = 0; i < n; ++i) {
    const auto &p = ring[i];
    const auto &q = ring[(i + 1) % n];
    a2 += p.x() * q.y() - q.x() * p.y();
  }
  return 0.5 * a2;
}

bool point_in_polygon(const std::vector<Eigen::Vector2d> &ring,
                      const Eigen::Vector2d &p) {
  bool inside = false;
  const std::size_t n = ring.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const auto &a = ring[i];
    const auto &b = ring[j];
    if ((a.y() > p.y()) != (b.y() > p.y())) {
      const double x_cross =
          a.x() + (p.y() - a.y()) * (b.x() - a.x()) / (b.y() - a.y());
      if (p.x() < x_cross) {
        inside = !inside;
      }
    }
  }
  return inside;
}

double measure(const Support &s) {
  if (s.is_point()) {
    throw std::invalid_argument("point support has no measure");
  }
  if (s.is_bag()) {
    throw std::invalid_argument("bag support has no measure");
  }
  if (s.is_box()) {
    const auto &b = s.as_box();
    return (b.upper - b.lower).prod();
  }
  return std::abs(signed_area(s.as_polygon().vertices));
}

QuadratureRule quadrature(const Support &s, std::size_t resolution) {
  if (resolution == 0) {
    throw std::invalid_argument("quadrature resolution must be positive");
  }
  if (s.is_point()) {
    throw std::invalid_argument("point support has no quadrature rule");
  }
  if (s.is_bag()) {
    throw std::invalid_argument("bag support has no quadrature rule");
  }

  QuadratureRule rule;
  const double n = static_cast<double>(resolution);

  if (s.is_box()) {
    const auto &b = s.as_box();
    const Eigen::Index p = b.lower.size();
    const Eigen::VectorXd h = (b.upper - b.lower) / n;
    const double w = h.prod();
    std::size_t total = 1;
    for (Eigen::Index i = 0; i < p; ++i) {
      total *= resolution;
    }
    rule.nodes.reserve(total);
    rule.weights.assign(total, w);
    std::vector<std::size_t> idx(static_cast<std::size_t>(p), 0);
    for (std::size_t k = 0; k < total; ++k) {
      Eigen::VectorXd x(p);
      for (Eigen::Index i = 0; i < p; ++i) {
        x[i] = b.lower[i] + (static_cast<double>(idx[i]) + 0.5) * h[i];
      }
      rule.nodes.push_back(std::move(x));
      for (std::size_t i = 0; i < idx.size(); ++i) {
        if (++idx[i] < resolution) {
          break;
        }
        idx[i] = 0;
      }
    }
    return rule;
  }

  const auto &ring = s.as_polygon().vertices;
  Eigen::Vector2d lo = ring.front();
  Eigen::Vector2d hi = ring.front();
  for (const auto &v : ring) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
  const Eigen::Vector2d h = (hi - lo) / n;
  const double cell_area = h.prod();
  for (std::size_t iy = 0; iy < resolution; ++iy) {
    const double y0 = lo.y() + static_cast<double>(iy) * h.y();
    const double y1 = iy + 1 == resolution ? hi.y() : y0 + h.y();
    for (std::size_t ix = 0; ix < resolution; ++ix) {
      const double x0 = lo.x() + static_cast<double>(ix) * h.x();
      const double x1 = ix + 1 == resolution ? hi.x() : x0 + h.x();
      auto piece = clip_half_plane(ring, 0, x0, -1.0);
      piece = clip_half_plane(piece, 0, x1, 1.0);
      piece = clip_half_plane(piece, 1, y0, -1.0);
      piece = clip_half_plane(piece, 1, y1, 1.0);
      if (piece.size() < 3) {
        continue;
      }
      auto [area, c] = area_and_centroid(piece);
      area = std::abs(area);
      if (area <= 1e-14 * cell_area) {
        continue;
      }
      rule.nodes.emplace_back(c);
      rule.weights.push_back(area);
    }
  }
  return rule;
}

} // namespace mtagg
