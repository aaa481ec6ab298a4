// Copyright 2026 The gxe Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <iterator>
#include <ranges>
#include <sstream>
#include <string_view>
#include <type_traits>

#include <Eigen/Dense>

#include "gxe/error.hpp"

namespace gxe {

template <typename Scalar = double>
using GramMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

namespace detail {
template <typename Scalar>
void check_length_scale(Scalar theta) {
  if (!(theta > Scalar(0))) throw DomainError("length scale must be positive");
}
}  // namespace detail

/// exp(-d / theta)
template <typename Scalar>
Scalar exp_kernel(Scalar distance, Scalar theta) {
  detail::check_length_scale(theta);
  if (distance < Scalar(0)) throw DomainError("distance must be nonnegative");
  using std::exp;
  return exp(-distance / theta);
}

/// exp(-d^2 / theta^2)
template <typename Scalar>
Scalar gau_kernel(Scalar distance, Scalar theta) {
  detail::check_length_scale(theta);
  if (distance < Scalar(0)) throw DomainError("distance must be nonnegative");
  using std::exp;
  const Scalar r = distance / theta;
  return exp(-r * r);
}

/// Symmetric Gram matrix of `kernel` over `inputs`. Only the upper
/// triangle is evaluated; NaN kernel values are reported with their pair.
template <std::ranges::random_access_range Range, typename Kernel>
auto gram(const Range& inputs, Kernel&& kernel) {
  using Input = std::ranges::range_value_t<Range>;
  using Scalar = std::decay_t<std::invoke_result_t<Kernel&, const Input&, const Input&>>;
  const auto n = static_cast<Eigen::Index>(std::ranges::size(inputs));
  if (n == 0) throw DomainError("gram: empty input list");
  auto first = std::ranges::begin(inputs);
  GramMatrix<Scalar> k(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      const Scalar v = kernel(first[i], first[j]);
      if (std::isnan(v)) {
        std::ostringstream msg;
        msg << "gram: kernel returned NaN for pair (" << i << ", " << j << ")";
        throw NumericalError(msg.str());
      }
      k(i, j) = v;
      k(j, i) = v;
    }
  }
  return k;
}

/// Rectangular kernel matrix with entry (i, j) = kernel(rows[i], cols[j]).
template <std::ranges::random_access_range Rows, std::ranges::random_access_range Cols,
          typename Kernel>
auto cross_gram(const Rows& rows, const Cols& cols, Kernel&& kernel) {
  using Input = std::ranges::range_value_t<Rows>;
  using Scalar = std::decay_t<std::invoke_result_t<Kernel&, const Input&, const Input&>>;
  const auto m = static_cast<Eigen::Index>(std::ranges::size(rows));
  const auto n = static_cast<Eigen::Index>(std::ranges::size(cols));
  auto r0 = std::ranges::begin(rows);
  auto c0 = std::ranges::begin(cols);
  GramMatrix<Scalar> k(m, n);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) k(i, j) = kernel(r0[i], c0[j]);
  }
  return k;
}

enum class CombinationMode { g_only, e_only, additive, product, full };

std::string_view to_string(CombinationMode mode);
/// Accepts G, E, +, x, ~ (and the long names).
CombinationMode parse_mode(std::string_view token);

/// Simplex weights of the genotype, environment and product terms.
struct CombinationWeights {
  double alpha = 1.0;
  double beta = 0.0;
  double gamma = 0.0;

  /// Barycenter of the weights a mode leaves free.
  static CombinationWeights barycenter(CombinationMode mode);
  bool on_simplex(double tol = 1e-12) const;
  /// True when the zero pattern matches the mode (G: beta = gamma = 0, ...).
  bool consistent_with(CombinationMode mode) const;
};

/// Which of (alpha, beta, gamma) a mode leaves free.
struct ActiveWeights {
  bool alpha, beta, gamma;
  int count() const { return int(alpha) + int(beta) + int(gamma); }
};
ActiveWeights active_weights(CombinationMode mode);

/// alpha * K_G + beta * K_E + gamma * (K_G o K_E) without any constraint
/// on the coefficients.
template <typename DerivedG, typename DerivedE>
typename DerivedG::PlainObject combine_linear(double alpha, double beta, double gamma,
                                              const Eigen::MatrixBase<DerivedG>& kg,
                                              const Eigen::MatrixBase<DerivedE>& ke) {
  if (kg.rows() != ke.rows() || kg.cols() != ke.cols()) {
    throw DomainError("combine: Gram matrices differ in shape");
  }
  using Scalar = typename DerivedG::Scalar;
  return (Scalar(alpha) * kg + Scalar(beta) * ke + Scalar(gamma) * kg.cwiseProduct(ke)).eval();
}

/// Product-space correlation for `mode`; weights must lie on the simplex
/// and respect the mode's zero pattern.
template <typename DerivedG, typename DerivedE>
typename DerivedG::PlainObject combine(CombinationMode mode, const CombinationWeights& w,
                                       const Eigen::MatrixBase<DerivedG>& kg,
                                       const Eigen::MatrixBase<DerivedE>& ke) {
  if (!w.on_simplex(1e-12)) throw DomainError("combine: weights must sum to one and be nonnegative");
  if (!w.consistent_with(mode)) throw DomainError("combine: weights inconsistent with mode");
  return combine_linear(w.alpha, w.beta, w.gamma, kg, ke);
}

struct PsdReport {
  bool psd = false;
  double min_eigenvalue = 0.0;
};

/// Minimum-eigenvalue check of a symmetric matrix.
template <typename Derived>
PsdReport assert_psd(const Eigen::MatrixBase<Derived>& k, double tol) {
  using Plain = typename Derived::PlainObject;
  Eigen::SelfAdjointEigenSolver<Plain> eig(k.eval(), Eigen::EigenvaluesOnly);
  const double min_eig = static_cast<double>(eig.eigenvalues().minCoeff());
  return {min_eig >= -tol, min_eig};
}

/// Mixed-model covariance sigma_g2 K_G + sigma_e2 K_E + sigma_ge2 (K_G o K_E) + tau2 I.
template <typename DerivedG, typename DerivedE>
typename DerivedG::PlainObject lmm_covariance(double sigma_g2, double sigma_e2, double sigma_ge2, double tau2,
                                              const Eigen::MatrixBase<DerivedG>& kg,
                                              const Eigen::MatrixBase<DerivedE>& ke) {
  using Scalar = typename DerivedG::Scalar;
  typename DerivedG::PlainObject c = combine_linear(sigma_g2, sigma_e2, sigma_ge2, kg, ke);
  c.diagonal().array() += Scalar(tau2);
  return c;
}

}  // namespace gxe
