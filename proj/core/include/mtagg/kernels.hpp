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

#ifndef MTAGG_KERNELS_HPP_
#define MTAGG_KERNELS_HPP_

#include <cstddef>

#include <Eigen/Core>

#include "mtagg/support.hpp"

namespace mtagg {

/// Exponentiated-quadratic kernel parameters.
///
/// NOTE: the convention throughout this library is
///
///     k(z, z') = variance * prod_i exp(-(z_i - z'_i)^2 / lengthscale_i^2)
///
/// i.e. there is no factor of 2 in the denominator. A lengthscale here equals
/// sqrt(2) times the lengthscale of the more common exp(-r^2 / (2 l^2)) form.
struct EQParams {
  Eigen::VectorXd lengthscales;
  double variance = 1.0;

  Eigen::Index dimension() const { return lengthscales.size(); }
  void validate() const;
};

/// Kernel value plus derivatives w.r.t. log lengthscale, one per dimension.
struct KernelWithGrad {
  double value = 0.0;
  Eigen::VectorXd d_log_lengthscale;
};

double k_point(const Eigen::VectorXd &z, const Eigen::VectorXd &z2,
               const EQParams &params);

/// h(z) = sqrt(pi) z erf(z) + exp(-z^2). Even; h'(z) = sqrt(pi) erf(z).
double eq_h(double z);

/// Covariance of the averages of an EQ process over [xa, xb] and [xa2, xb2].
double k_interval_interval_1d(double xa, double xb, double xa2, double xb2,
                              double lengthscale, double variance = 1.0);

/// Covariance between the average over [xa, xb] and the value at x.
double k_interval_point_1d(double xa, double xb, double x, double lengthscale,
                           double variance = 1.0);

/// Covariance between averages of the latent process over two supports.
///
/// Boxes and points are handled analytically (product over dimensions of the
/// 1-D interval forms). Polygons are replaced by their quadrature nodes with
/// weights normalised to one; each node is then paired analytically with the
/// other support. Bags average over their members. Every support thus maps to
/// a fixed measure, so Gram matrices over mixed supports stay PSD.
double k_support(const Support &s, const Support &s2, const EQParams &params,
                 std::size_t quad_resolution = kDefaultQuadResolution);

KernelWithGrad
k_support_with_grad(const Support &s, const Support &s2, const EQParams &params,
                    std::size_t quad_resolution = kDefaultQuadResolution);

} // namespace mtagg

#endif // MTAGG_KERNELS_HPP_
