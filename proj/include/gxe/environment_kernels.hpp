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

#include <Eigen/Dense>

#include "gxe/error.hpp"
#include "gxe/kernels.hpp"

namespace gxe {

/// Ordered period vectors of one environment; row t is period t.
using EnvSeries = Eigen::MatrixXd;

/// Euclidean distance of the flattened series divided by sqrt(T * p).
template <typename DerivedA, typename DerivedB>
double env_euclidean_distance(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DomainError("env_euclidean_distance: series differ in shape");
  }
  if (a.size() == 0) throw DomainError("env_euclidean_distance: empty series");
  return (a - b).norm() / std::sqrt(static_cast<double>(a.size()));
}

template <typename DerivedA, typename DerivedB>
double exp_eucl_kernel(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b,
                       double theta_e) {
  return exp_kernel(env_euclidean_distance(a, b), theta_e);
}

template <typename DerivedA, typename DerivedB>
double gau_eucl_kernel(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b,
                       double theta_e) {
  return gau_kernel(env_euclidean_distance(a, b), theta_e);
}

/// Log of the unnormalized global alignment kernel and its derivative
/// with respect to theta.
struct GakLogValue {
  double log_value = 0.0;
  double dlog_dtheta = 0.0;
};

/// Sum over all monotone alignments of prod exp(-|u - v|^2 / (2 theta^2)),
/// accumulated in log space. Series may differ in length but not in the
/// number of columns.
GakLogValue gak_log_raw(const EnvSeries& a, const EnvSeries& b, double theta_e);

/// Global alignment kernel normalized to unit self-similarity.
double gak_kernel(const EnvSeries& a, const EnvSeries& b, double theta_e);

/// Largest distance between any step of `a` and any step of `b`.
double max_step_distance(const EnvSeries& a, const EnvSeries& b);

}  // namespace gxe
