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
#include <numbers>
#include <random>
#include <sstream>

#include "gxe/error.hpp"
#include "gxe/gp.hpp"

namespace gxe {
namespace {

Eigen::MatrixXd regularized(const Eigen::MatrixXd& k, double varsigma) {
  if (k.rows() != k.cols() || k.rows() == 0) throw DomainError("correlation matrix must be square and nonempty");
  if (!(varsigma >= 0.0 && varsigma <= 1.0)) throw DomainError("varsigma must lie in [0, 1]");
  Eigen::MatrixXd ks = varsigma * k;
  ks.diagonal().array() += (1.0 - varsigma) + kJitter;
  return ks;
}

Eigen::LLT<Eigen::MatrixXd> factorize(const Eigen::MatrixXd& ks) {
  Eigen::LLT<Eigen::MatrixXd> llt(ks);
  if (llt.info() != Eigen::Success) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(ks, Eigen::EigenvaluesOnly);
    std::ostringstream msg;
    msg << "Cholesky factorization failed (n = " << ks.rows()
        << ", min eigenvalue = " << eig.eigenvalues().minCoeff() << ")";
    throw NumericalError(msg.str());
  }
  return llt;
}

}  // namespace

KrigingModel::KrigingModel(const Eigen::MatrixXd& k, double varsigma, Eigen::VectorXd z)
    : varsigma_(varsigma), z_(std::move(z)) {
  if (z_.size() != k.rows()) throw DomainError("response count does not match correlation matrix");
  if (!z_.allFinite()) throw DomainError("responses must be finite");
  llt_ = factorize(regularized(k, varsigma));
  const auto n = static_cast<double>(z_.size());
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(z_.size());
  ones_solve_ = llt_.solve(ones);
  ones_quad_ = ones.dot(ones_solve_);
  fit_.m_hat = ones_solve_.dot(z_) / ones_quad_;
  const Eigen::VectorXd resid = z_.array() - fit_.m_hat;
  alpha_ = llt_.solve(resid);
  nu_raw_ = resid.dot(alpha_) / n;
  fit_.nu_hat = std::max(nu_raw_, kNuFloor);
  log_det_ = 2.0 * llt_.matrixLLT().diagonal().array().log().sum();
  fit_.nll = 0.5 * n * std::log(fit_.nu_hat) + 0.5 * log_det_ + 0.5 * n * (1.0 + std::log(2.0 * std::numbers::pi));
}

PredictiveDistribution KrigingModel::predict(const Eigen::MatrixXd& cross) const {
  return predict(cross, fit_.nu_hat);
}

PredictiveDistribution KrigingModel::predict(const Eigen::MatrixXd& cross, double nu) const {
  if (cross.cols() != size()) throw DomainError("cross-correlation has wrong number of columns");
  const Eigen::MatrixXd r = varsigma_ * cross;  // m x n
  PredictiveDistribution out;
  out.mean = (r * alpha_).array() + fit_.m_hat;
  const Eigen::MatrixXd w = llt_.matrixL().solve(r.transpose());  // n x m
  const Eigen::VectorXd quad = w.colwise().squaredNorm().transpose();
  const Eigen::VectorXd trend = 1.0 - (r * ones_solve_).array();
  Eigen::VectorXd var = nu * (varsigma_ - quad.array() + trend.array().square() / ones_quad_);
  const Eigen::Index m = cross.rows();
  out.sd_latent.resize(m);
  out.sd_observation.resize(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    if (var(i) < -1e-8 * nu) ++out.clamped;
    const double latent = std::max(var(i), 0.0);
    out.sd_latent(i) = std::sqrt(latent);
    out.sd_observation(i) = std::sqrt(latent + (1.0 - varsigma_) * nu);
  }
  return out;
}

Eigen::VectorXd KrigingModel::nll_gradient(const std::vector<Eigen::MatrixXd>& dk_s) const {
  const Eigen::MatrixXd inv = llt_.solve(Eigen::MatrixXd::Identity(size(), size()));
  Eigen::VectorXd g(static_cast<Eigen::Index>(dk_s.size()));
  // With the trend and nu profiled out, only the explicit dependence on K_s
  // survives: -a' dK a / (2 nu) + tr(K_s^{-1} dK) / 2.
  const bool floored = nu_raw_ <= kNuFloor;
  for (std::size_t p = 0; p < dk_s.size(); ++p) {
    const double fit_term = floored ? 0.0 : -0.5 * alpha_.dot(dk_s[p] * alpha_) / nu_raw_;
    g(static_cast<Eigen::Index>(p)) = fit_term + 0.5 * inv.cwiseProduct(dk_s[p]).sum();
  }
  return g;
}

ProfiledLikelihood profiled_negloglik(const Eigen::MatrixXd& k, double varsigma, const Eigen::VectorXd& z) {
  return KrigingModel(k, varsigma, z).likelihood();
}

double gaussian_negloglik(const Eigen::MatrixXd& k, double varsigma, double m, double nu, const Eigen::VectorXd& z) {
  if (!(nu > 0.0)) throw DomainError("nu must be positive");
  const Eigen::MatrixXd ks = regularized(k, varsigma);
  const auto llt = factorize(ks);
  const Eigen::VectorXd resid = z.array() - m;
  const double n = static_cast<double>(z.size());
  const double log_det = 2.0 * llt.matrixLLT().diagonal().array().log().sum() + n * std::log(nu);
  return 0.5 * resid.dot(llt.solve(resid)) / nu + 0.5 * log_det + 0.5 * n * std::log(2.0 * std::numbers::pi);
}

Eigen::VectorXd sample_prior(const Eigen::MatrixXd& k, double nu, double varsigma, double m, std::uint64_t seed) {
  if (!(nu > 0.0)) throw DomainError("nu must be positive");
  const auto llt = factorize(regularized(k, varsigma));
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Eigen::VectorXd eps(k.rows());
  for (Eigen::Index i = 0; i < eps.size(); ++i) eps(i) = normal(rng);
  const Eigen::VectorXd draw = llt.matrixL() * eps;
  return (std::sqrt(nu) * draw).array() + m;
}

}  // namespace gxe
