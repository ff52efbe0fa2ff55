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

#include "mtagg/kernels.hpp"

#include <array>
#include <cmath>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace mtagg {

namespace {

constexpr double kSqrtPi = 1.7724538509055160273;
constexpr double kTwoOverSqrtPi = 1.1283791670955125739;

// Intervals narrower than this fraction of the lengthscale are integrated with
// a 4-point Gauss-Legendre rule instead of the closed forms, which lose all
// precision to cancellation as the width goes to zero.
constexpr double kNarrowWidth = 1e-3;

constexpr std::array<double, 4> kGlNodes = {
    -0.86113631159405257522, -0.33998104358485626480, 0.33998104358485626480,
    0.86113631159405257522};
// Normalised to sum to one.
constexpr std::array<double, 4> kGlWeights = {
    0.17392742256872692869, 0.32607257743127307131, 0.32607257743127307131,
    0.17392742256872692869};

double gl_node(double a, double b, std::size_t i) {
  return 0.5 * (a + b) + 0.5 * (b - a) * kGlNodes[i];
}

// Each 1-D factor returns (value, d value / d lengthscale) with unit variance.
using Factor = std::pair<double, double>;

Factor pp_1d(double x, double y, double ell) {
  const double r = x - y;
  const double v = std::exp(-(r * r) / (ell * ell));
  return {v, v * 2.0 * r * r / (ell * ell * ell)};
}

Factor ip_1d(double xa, double xb, double x, double ell) {
  const double width = xb - xa;
  if (width < kNarrowWidth * ell) {
    Factor acc{0.0, 0.0};
    for (std::size_t i = 0; i < kGlNodes.size(); ++i) {
      const auto f = pp_1d(gl_node(xa, xb, i), x, ell);
      acc.first += kGlWeights[i] * f.first;
      acc.second += kGlWeights[i] * f.second;
    }
    return acc;
  }
  const double u1 = (xb - x) / ell;
  const double u2 = (x - xa) / ell;
  const double c = kSqrtPi * ell / (2.0 * width);
  const double e = std::erf(u1) + std::erf(u2);
  const double de =
      kTwoOverSqrtPi * (std::exp(-u1 * u1) * (-u1) + std::exp(-u2 * u2) * (-u2)) /
      ell;
  return {c * e, kSqrtPi * e / (2.0 * width) + c * de};
}

Factor ii_1d(double xa, double xb, double ya, double yb, double ell) {
  const double w1 = xb - xa;
  const double w2 = yb - ya;
  const bool narrow1 = w1 < kNarrowWidth * ell;
  const bool narrow2 = w2 < kNarrowWidth * ell;
  if (narrow1 && narrow2) {
    Factor acc{0.0, 0.0};
    for (std::size_t i = 0; i < kGlNodes.size(); ++i) {
      for (std::size_t j = 0; j < kGlNodes.size(); ++j) {
        const auto f = pp_1d(gl_node(xa, xb, i), gl_node(ya, yb, j), ell);
        const double w = kGlWeights[i] * kGlWeights[j];
        acc.first += w * f.first;
        acc.second += w * f.second;
      }
    }
    return acc;
  }
  if (narrow1 || narrow2) {
    const double na = narrow1 ? xa : ya;
    const double nb = narrow1 ? xb : yb;
    const double wa = narrow1 ? ya : xa;
    const double wb = narrow1 ? yb : xb;
    Factor acc{0.0, 0.0};
    for (std::size_t i = 0; i < kGlNodes.size(); ++i) {
      const auto f = ip_1d(wa, wb, gl_node(na, nb, i), ell);
      acc.first += kGlWeights[i] * f.first;
      acc.second += kGlWeights[i] * f.second;
    }
    return acc;
  }
  const double u[4] = {(xb - ya) / ell, (xa - yb) / ell, (xa - ya) / ell,
                       (xb - yb) / ell};
  const double s = eq_h(u[0]) + eq_h(u[1]) - eq_h(u[2]) - eq_h(u[3]);
  // d h(d/ell) / d ell = -sqrt(pi) erf(u) u / ell
  const double ds = -kSqrtPi *
                    (std::erf(u[0]) * u[0] + std::erf(u[1]) * u[1] -
                     std::erf(u[2]) * u[2] - std::erf(u[3]) * u[3]) /
                    ell;
  const double denom = 2.0 * w1 * w2;
  const double c = ell * ell / denom;
  return {c * s, 2.0 * ell / denom * s + c * ds};
}

void check_dims(const Support &s, const Support &s2, const EQParams &params) {
  params.validate();
  if (s.dimension() != params.dimension() ||
      s2.dimension() != params.dimension()) {
    throw std::invalid_argument(
        "k_support: support dimensions (" + std::to_string(s.dimension()) +
        ", " + std::to_string(s2.dimension()) +
        ") do not match kernel dimension " +
        std::to_string(params.dimension()));
  }
}

// A support viewed as a measure: weighted nodes, row-major n x p, weights
// summing to one.
struct DiscreteMeasure {
  Eigen::Index dim = 0;
  std::vector<double> coords;
  std::vector<double> weights;

  std::size_t size() const { return weights.size(); }
  const double *node(std::size_t i) const {
    return coords.data() + i * static_cast<std::size_t>(dim);
  }
};

DiscreteMeasure build_discrete(const Support &s, std::size_t quad_resolution) {
  DiscreteMeasure d;
  d.dim = s.dimension();
  if (s.is_bag()) {
    const auto &members = s.as_bag().members;
    for (const auto &m : members) {
      d.coords.insert(d.coords.end(), m.data(), m.data() + m.size());
    }
    d.weights.assign(members.size(), 1.0 / static_cast<double>(members.size()));
    return d;
  }
  const auto rule = quadrature(s, quad_resolution);
  const double total = rule.weight_sum();
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const auto &x = rule.nodes[i];
    d.coords.insert(d.coords.end(), x.data(), x.data() + x.size());
    d.weights.push_back(rule.weights[i] / total);
  }
  return d;
}

// Polygon rules are costly to build and are requested for the same supports
// over and over during training, so they are memoised per thread, keyed by
// the exact vertex coordinates and resolution.
std::shared_ptr<const DiscreteMeasure> as_discrete(const Support &s,
                                                   std::size_t quad_resolution) {
  if (!s.is_polygon()) {
    return std::make_shared<const DiscreteMeasure>(
        build_discrete(s, quad_resolution));
  }
  constexpr std::size_t kMaxCached = 4096;
  thread_local std::map<std::vector<double>,
                        std::shared_ptr<const DiscreteMeasure>>
      cache;
  std::vector<double> key{static_cast<double>(quad_resolution)};
  for (const auto &v : s.as_polygon().vertices) {
    key.push_back(v.x());
    key.push_back(v.y());
  }
  if (const auto it = cache.find(key); it != cache.end()) {
    return it->second;
  }
  if (cache.size() >= kMaxCached) {
    cache.clear();
  }
  auto d = std::make_shared<const DiscreteMeasure>(
      build_discrete(s, quad_resolution));
  cache.emplace(std::move(key), d);
  return d;
}

// Unit-variance kernel between a node and a point or box, accumulating
// weight * value (and weight * d/dlog ell) into the outputs.
template <bool WithGrad>
void accumulate_node(const double *x, const Support &other,
                     const Eigen::VectorXd &ell, double weight, double &value,
                     double *grad, Factor *scratch) {
  const Eigen::Index p = ell.size();
  double v = 1.0;
  if (other.is_point()) {
    const double *y = other.as_point().coords.data();
    double r2 = 0.0;
    for (Eigen::Index k = 0; k < p; ++k) {
      const double d = (x[k] - y[k]) / ell[k];
      scratch[k].second = d * d;
      r2 += d * d;
    }
    v = std::exp(-r2);
    value += weight * v;
    if constexpr (WithGrad) {
      for (Eigen::Index k = 0; k < p; ++k) {
        grad[k] += weight * v * 2.0 * scratch[k].second;
      }
    }
    return;
  }
  const auto &bx = other.as_box();
  for (Eigen::Index k = 0; k < p; ++k) {
    scratch[k] = ip_1d(bx.lower[k], bx.upper[k], x[k], ell[k]);
    v *= scratch[k].first;
  }
  value += weight * v;
  if constexpr (WithGrad) {
    for (Eigen::Index k = 0; k < p; ++k) {
      double g = ell[k] * scratch[k].second;
      for (Eigen::Index j = 0; j < p; ++j) {
        if (j != k) {
          g *= scratch[j].first;
        }
      }
      grad[k] += weight * g;
    }
  }
}

// Product of 1-D factors. With WithGrad, also fills d/dlog(ell_i).
template <bool WithGrad, typename FactorFn>
void product_kernel(Eigen::Index p, const EQParams &params, FactorFn &&factor,
                    double &value, Eigen::VectorXd *grad) {
  if constexpr (!WithGrad) {
    double v = params.variance;
    for (Eigen::Index i = 0; i < p; ++i) {
      v *= factor(i).first;
    }
    value = v;
  } else {
    std::vector<Factor> f(static_cast<std::size_t>(p));
    double v = params.variance;
    for (Eigen::Index i = 0; i < p; ++i) {
      f[static_cast<std::size_t>(i)] = factor(i);
      v *= f[static_cast<std::size_t>(i)].first;
    }
    value = v;
    for (Eigen::Index i = 0; i < p; ++i) {
      double g = params.variance * params.lengthscales[i] *
                 f[static_cast<std::size_t>(i)].second;
      for (Eigen::Index j = 0; j < p; ++j) {
        if (j != i) {
          g *= f[static_cast<std::size_t>(j)].first;
        }
      }
      (*grad)[i] = g;
    }
  }
}

// Pairs where each side is a point or a box.
template <bool WithGrad>
void analytic_pair(const Support &a, const Support &b, const EQParams &params,
                   double &value, Eigen::VectorXd *grad) {
  const Eigen::Index p = params.dimension();
  const auto &ell = params.lengthscales;
  if (a.is_point() && b.is_point()) {
    const auto &x = a.as_point().coords;
    const auto &y = b.as_point().coords;
    product_kernel<WithGrad>(
        p, params, [&](Eigen::Index i) { return pp_1d(x[i], y[i], ell[i]); },
        value, grad);
  } else if (a.is_box() && b.is_box()) {
    const auto &x = a.as_box();
    const auto &y = b.as_box();
    product_kernel<WithGrad>(
        p, params,
        [&](Eigen::Index i) {
          return ii_1d(x.lower[i], x.upper[i], y.lower[i], y.upper[i], ell[i]);
        },
        value, grad);
  } else {
    const auto &bx = a.is_box() ? a.as_box() : b.as_box();
    const auto &pt = a.is_box() ? b.as_point().coords : a.as_point().coords;
    product_kernel<WithGrad>(
        p, params,
        [&](Eigen::Index i) {
          return ip_1d(bx.lower[i], bx.upper[i], pt[i], ell[i]);
        },
        value, grad);
  }
}

template <bool WithGrad>
void support_pair(const Support &a, const Support &b, const EQParams &params,
                  std::size_t quad_resolution, double &value,
                  Eigen::VectorXd *grad) {
  const bool a_discrete = a.is_polygon() || a.is_bag();
  const bool b_discrete = b.is_polygon() || b.is_bag();
  if (!a_discrete && !b_discrete) {
    analytic_pair<WithGrad>(a, b, params, value, grad);
    return;
  }

  const Eigen::Index p = params.dimension();
  const auto &ell = params.lengthscales;
  double acc = 0.0;
  std::vector<double> gacc(static_cast<std::size_t>(p), 0.0);
  std::vector<Factor> scratch(static_cast<std::size_t>(p));

  if (a_discrete && b_discrete) {
    const auto da = as_discrete(a, quad_resolution);
    const auto db = as_discrete(b, quad_resolution);
    std::vector<double> inv(static_cast<std::size_t>(p));
    for (Eigen::Index k = 0; k < p; ++k) {
      inv[static_cast<std::size_t>(k)] = 1.0 / ell[k];
    }
    for (std::size_t i = 0; i < da->size(); ++i) {
      const double *x = da->node(i);
      for (std::size_t j = 0; j < db->size(); ++j) {
        const double *y = db->node(j);
        double r2 = 0.0;
        for (Eigen::Index k = 0; k < p; ++k) {
          const double d = (x[k] - y[k]) * inv[static_cast<std::size_t>(k)];
          r2 += d * d;
        }
        const double wv = da->weights[i] * db->weights[j] * std::exp(-r2);
        acc += wv;
        if constexpr (WithGrad) {
          for (Eigen::Index k = 0; k < p; ++k) {
            const double d = (x[k] - y[k]) * inv[static_cast<std::size_t>(k)];
            gacc[static_cast<std::size_t>(k)] += wv * 2.0 * d * d;
          }
        }
      }
    }
  } else {
    const Support &disc = a_discrete ? a : b;
    const Support &other = a_discrete ? b : a;
    const auto d = as_discrete(disc, quad_resolution);
    for (std::size_t i = 0; i < d->size(); ++i) {
      accumulate_node<WithGrad>(d->node(i), other, ell, d->weights[i], acc,
                                gacc.data(), scratch.data());
    }
  }
  value = params.variance * acc;
  if constexpr (WithGrad) {
    for (Eigen::Index k = 0; k < p; ++k) {
      (*grad)[k] = params.variance * gacc[static_cast<std::size_t>(k)];
    }
  }
}

} // namespace

void EQParams::validate() const {
  if (lengthscales.size() == 0) {
    throw std::invalid_argument("EQ kernel needs at least one lengthscale");
  }
  for (Eigen::Index i = 0; i < lengthscales.size(); ++i) {
    if (!(lengthscales[i] > 0.0) || !std::isfinite(lengthscales[i])) {
      throw std::invalid_argument("EQ lengthscales must be positive and finite");
    }
  }
  if (!(variance > 0.0) || !std::isfinite(variance)) {
    throw std::invalid_argument("EQ variance must be positive and finite");
  }
}

double k_point(const Eigen::VectorXd &z, const Eigen::VectorXd &z2,
               const EQParams &params) {
  if (z.size() != params.dimension() || z2.size() != params.dimension()) {
    throw std::invalid_argument("k_point: dimension mismatch");
  }
  double r2 = 0.0;
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    const double d = (z[i] - z2[i]) / params.lengthscales[i];
    r2 += d * d;
  }
  return params.variance * std::exp(-r2);
}

double eq_h(double z) {
  return kSqrtPi * z * std::erf(z) + std::exp(-z * z);
}

double k_interval_interval_1d(double xa, double xb, double xa2, double xb2,
                              double lengthscale, double variance) {
  if (!(xa < xb) || !(xa2 < xb2)) {
    throw std::invalid_argument(
        "k_interval_interval_1d: intervals must satisfy lower < upper");
  }
  if (!(lengthscale > 0.0)) {
    throw std::invalid_argument("k_interval_interval_1d: lengthscale <= 0");
  }
  return variance * ii_1d(xa, xb, xa2, xb2, lengthscale).first;
}

double k_interval_point_1d(double xa, double xb, double x, double lengthscale,
                           double variance) {
  if (!(xa < xb)) {
    throw std::invalid_argument(
        "k_interval_point_1d: interval must satisfy lower < upper");
  }
  if (!(lengthscale > 0.0)) {
    throw std::invalid_argument("k_interval_point_1d: lengthscale <= 0");
  }
  return variance * ip_1d(xa, xb, x, lengthscale).first;
}

double k_support(const Support &s, const Support &s2, const EQParams &params,
                 std::size_t quad_resolution) {
  check_dims(s, s2, params);
  double v = 0.0;
  support_pair<false>(s, s2, params, quad_resolution, v, nullptr);
  return v;
}

KernelWithGrad k_support_with_grad(const Support &s, const Support &s2,
                                   const EQParams &params,
                                   std::size_t quad_resolution) {
  check_dims(s, s2, params);
  KernelWithGrad out;
  out.d_log_lengthscale.resize(params.dimension());
  support_pair<true>(s, s2, params, quad_resolution, out.value,
                     &out.d_log_lengthscale);
  return out;
}

} // namespace mtagg
