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

// Brute-force reference implementations used by the tests. They favour
// directness over speed and refuse inputs where enumeration would explode.

#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "gxe/environment_kernels.hpp"

namespace gxe::oracle {

/// Sum over every monotone alignment path of the product of local kernels,
/// computed by explicit path enumeration. Series of at most 4 steps.
double gak_raw(const EnvSeries& a, const EnvSeries& b, double theta_e);
/// gak_raw(a, b) / sqrt(gak_raw(a, a) gak_raw(b, b)).
double gak(const EnvSeries& a, const EnvSeries& b, double theta_e);

/// Cosine of dense k-mer count vectors over {A,C,G,T,K,M,R,Y}; windows
/// with the missing symbol are skipped. k <= 4.
double spectrum(std::string_view a, std::string_view b, int k, char missing = '-');

/// Adaptive Gauss-Kronrod quadrature of the CRPS integral.
double crps(double mu, double sigma, double y);

struct Conditional {
  double mean = 0.0;
  double variance = 0.0;
};

/// Conditional law of component `target` of a zero-mean Gaussian vector
/// with covariance `joint + trend_variance * 1 1'`, given the components
/// in `observed` equal `z`.
Conditional posterior(const Eigen::MatrixXd& joint, const std::vector<Eigen::Index>& observed, Eigen::Index target,
                      const Eigen::VectorXd& z, double trend_variance = 1e6);

}  // namespace gxe::oracle
