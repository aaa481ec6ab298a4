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

#include <cstdint>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "gxe/kernels.hpp"

namespace gxe {

/// Added to the diagonal of every correlation matrix before factorization.
inline constexpr double kJitter = 1e-8;
/// Lower bound of the profiled total variance.
inline constexpr double kNuFloor = 1e-12;

struct Hyperparameters {
  double theta_g = 1.0;
  double theta_e = 1.0;
  CombinationWeights weights;
  /// Share of the total variance carried by the kernel term.
  double varsigma = 0.5;
  /// Total variance, kernel plus nugget.
  double nu = 1.0;
  /// Spectrum k; 0 when the genotype kernel has no discrete parameter.
  int spectrum_k = 0;

  double kernel_variance() const { return varsigma * nu; }
  double noise_variance() const { return (1.0 - varsigma) * nu; }
};

/// nu * (varsigma * K + (1 - varsigma) * I)
template <typename Derived>
typename Derived::PlainObject observation_covariance(double nu, double varsigma,
                                                     const Eigen::MatrixBase<Derived>& k) {
  using Scalar = typename Derived::Scalar;
  typename Derived::PlainObject c = Scalar(varsigma) * k;
  c.diagonal().array() += Scalar(1.0 - varsigma);
  return Scalar(nu) * c;
}

struct ProfiledLikelihood {
  double nll = 0.0;
  double m_hat = 0.0;
  double nu_hat = 0.0;
};

struct PredictiveDistribution {
  Eigen::VectorXd mean;
  Eigen::VectorXd sd_latent;
  Eigen::VectorXd sd_observation;
  /// Number of points whose latent variance was clamped at zero from below
  /// by more than 1e-8 * nu.
  int clamped = 0;
};

/// Ordinary kriging with the (nu, varsigma) parameterization: constant
/// unknown trend, K_s = varsigma K + (1 - varsigma) I + jitter, and the
/// trend and total variance profiled out of the likelihood.
class KrigingModel {
 public:
  /// `k` is the unit-diagonal training correlation matrix, `z` the responses.
  KrigingModel(const Eigen::MatrixXd& k, double varsigma, Eigen::VectorXd z);

  const ProfiledLikelihood& likelihood() const { return fit_; }
  double m_hat() const { return fit_.m_hat; }
  double nu_hat() const { return fit_.nu_hat; }
  double varsigma() const { return varsigma_; }
  Eigen::Index size() const { return z_.size(); }
  const Eigen::LLT<Eigen::MatrixXd>& factor() const { return llt_; }
  /// K_s^{-1} (z - 1 m_hat)
  const Eigen::VectorXd& weights() const { return alpha_; }

  /// Predictions at points whose combined correlations with the training
  /// inputs are the rows of `cross` (m x n). Uses nu_hat.
  PredictiveDistribution predict(const Eigen::MatrixXd& cross) const;
  PredictiveDistribution predict(const Eigen::MatrixXd& cross, double nu) const;

  /// Derivatives of the profiled negative log-likelihood for the given
  /// derivatives of K_s.
  Eigen::VectorXd nll_gradient(const std::vector<Eigen::MatrixXd>& dk_s) const;

 private:
  double varsigma_;
  Eigen::VectorXd z_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
  Eigen::VectorXd ones_solve_;
  double ones_quad_ = 0.0;
  Eigen::VectorXd alpha_;
  double nu_raw_ = 0.0;
  double log_det_ = 0.0;
  ProfiledLikelihood fit_;
};

/// Profiled negative log-likelihood of `z` under correlation `k`:
/// (n/2) log nu_hat + (1/2) log det K_s + (n/2)(1 + log 2 pi).
ProfiledLikelihood profiled_negloglik(const Eigen::MatrixXd& k, double varsigma, const Eigen::VectorXd& z);

/// Full Gaussian negative log-likelihood at an arbitrary trend and variance.
double gaussian_negloglik(const Eigen::MatrixXd& k, double varsigma, double m, double nu,
                          const Eigen::VectorXd& z);

/// Draw z ~ N(1 m, nu (varsigma K + (1 - varsigma) I)); deterministic in `seed`.
Eigen::VectorXd sample_prior(const Eigen::MatrixXd& k, double nu, double varsigma, double m, std::uint64_t seed);

}  // namespace gxe
