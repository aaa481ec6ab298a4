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

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "gxe/environment_kernels.hpp"

namespace gxe {
namespace {

using Index = Eigen::Index;

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void check_series(const EnvSeries& a, const EnvSeries& b) {
  if (a.rows() == 0 || b.rows() == 0) throw DomainError("gak: empty series");
  if (a.cols() != b.cols()) throw DomainError("gak: series differ in variable count");
  if (!a.allFinite() || !b.allFinite()) throw DomainError("gak: non-finite series values");
}

}  // namespace

GakLogValue gak_log_raw(const EnvSeries& a, const EnvSeries& b, double theta_e) {
  check_series(a, b);
  detail::check_length_scale(theta_e);
  const Index n = a.rows();
  const Index m = b.rows();
  const Index stride = m + 1;
  // log M and d(log M)/d(theta) on the (n+1) x (m+1) lattice.
  std::vector<double> logm(static_cast<std::size_t>((n + 1) * stride), kNegInf);
  std::vector<double> dlogm(logm.size(), 0.0);
  auto at = [stride](Index i, Index j) { return static_cast<std::size_t>(i * stride + j); };
  logm[at(0, 0)] = 0.0;
  const double inv2t2 = 1.0 / (2.0 * theta_e * theta_e);
  const double inv_t3 = 1.0 / (theta_e * theta_e * theta_e);
  for (Index i = 1; i <= n; ++i) {
    for (Index j = 1; j <= m; ++j) {
      const double sq = (a.row(i - 1) - b.row(j - 1)).squaredNorm();
      const double l1 = logm[at(i - 1, j)];
      const double l2 = logm[at(i, j - 1)];
      const double l3 = logm[at(i - 1, j - 1)];
      const double top = std::max({l1, l2, l3});
      const double w1 = std::exp(l1 - top);
      const double w2 = std::exp(l2 - top);
      const double w3 = std::exp(l3 - top);
      const double total = w1 + w2 + w3;
      logm[at(i, j)] = -sq * inv2t2 + top + std::log(total);
      dlogm[at(i, j)] = sq * inv_t3 +
                        (w1 * dlogm[at(i - 1, j)] + w2 * dlogm[at(i, j - 1)] + w3 * dlogm[at(i - 1, j - 1)]) /
                            total;
    }
  }
  return {logm[at(n, m)], dlogm[at(n, m)]};
}

double gak_kernel(const EnvSeries& a, const EnvSeries& b, double theta_e) {
  const double ab = gak_log_raw(a, b, theta_e).log_value;
  const double aa = gak_log_raw(a, a, theta_e).log_value;
  const double bb = gak_log_raw(b, b, theta_e).log_value;
  return std::exp(ab - 0.5 * (aa + bb));
}

double max_step_distance(const EnvSeries& a, const EnvSeries& b) {
  if (a.cols() != b.cols()) throw DomainError("max_step_distance: series differ in variable count");
  double best = 0.0;
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < b.rows(); ++j) best = std::max(best, (a.row(i) - b.row(j)).norm());
  }
  return best;
}

}  // namespace gxe
