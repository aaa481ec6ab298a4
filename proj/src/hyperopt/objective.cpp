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
#include <numeric>
#include <set>

#include "gxe/error.hpp"
#include "gxe/hyperopt.hpp"

namespace gxe {
namespace {

double logit(double p) { return std::log(p) - std::log1p(-p); }

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

std::vector<Index> unique_items(const std::vector<Index>& items) {
  std::set<Index> s(items.begin(), items.end());
  return {s.begin(), s.end()};
}

}  // namespace

ThetaBounds theta_max(const ProductKernel& kernel, const Observations& train) {
  ThetaBounds b;
  if (kernel.theta_g_free()) {
    const auto items = unique_items(train.variety);
    if (items.size() < 2) throw DomainError("theta_max: fewer than two training varieties");
    b.theta_g_max = kernel.genotype().max_distance(items);
    if (!(b.theta_g_max > 0.0)) throw DomainError("theta_max: all training genotypes are identical");
  }
  if (kernel.theta_e_free()) {
    const auto items = unique_items(train.environment);
    if (items.size() < 2) throw DomainError("theta_max: fewer than two training environments");
    b.theta_e_max = kernel.environment().max_distance(items);
    if (!(b.theta_e_max > 0.0)) throw DomainError("theta_max: all training environments are identical");
  }
  return b;
}

ParameterMap::ParameterMap(CombinationMode mode, bool theta_g_free, bool theta_e_free, ThetaBounds bounds)
    : mode_(mode), theta_g_free_(theta_g_free), theta_e_free_(theta_e_free), bounds_(bounds) {
  if (theta_g_free_) {
    idx_theta_g_ = static_cast<Index>(names_.size());
    names_.push_back("log_theta_g");
  }
  if (theta_e_free_) {
    idx_theta_e_ = static_cast<Index>(names_.size());
    names_.push_back("log_theta_e");
  }
  const auto active = active_weights(mode_);
  if (active.count() > 1) {
    idx_weights_ = static_cast<Index>(names_.size());
    weight_count_ = active.count();
    if (active.alpha) names_.push_back("logit_alpha");
    if (active.beta) names_.push_back("logit_beta");
    if (active.gamma) names_.push_back("logit_gamma");
  }
  idx_varsigma_ = static_cast<Index>(names_.size());
  names_.push_back("logit_varsigma");
}

Eigen::VectorXd ParameterMap::to_vector(const Hyperparameters& h) const {
  Eigen::VectorXd x(dimension());
  if (idx_theta_g_ >= 0) x(idx_theta_g_) = std::log(h.theta_g);
  if (idx_theta_e_ >= 0) x(idx_theta_e_) = std::log(h.theta_e);
  if (idx_weights_ >= 0) {
    const auto active = active_weights(mode_);
    Index j = idx_weights_;
    for (auto [on, w] : {std::pair{active.alpha, h.weights.alpha}, std::pair{active.beta, h.weights.beta},
                         std::pair{active.gamma, h.weights.gamma}}) {
      if (on) x(j++) = std::log(std::max(w, kWeightFloor));
    }
    const double mean = x.segment(idx_weights_, weight_count_).mean();
    x.segment(idx_weights_, weight_count_).array() -= mean;
  }
  x(idx_varsigma_) = logit(std::clamp(h.varsigma, 1e-9, 1.0 - 1e-9));
  project(x);
  return x;
}

Hyperparameters ParameterMap::from_vector(const Eigen::VectorXd& x, const Hyperparameters& template_h) const {
  if (x.size() != dimension()) throw DomainError("parameter vector has wrong dimension");
  Hyperparameters h = template_h;
  if (idx_theta_g_ >= 0) h.theta_g = std::exp(std::min(x(idx_theta_g_), std::log(bounds_.theta_g_max)));
  if (idx_theta_e_ >= 0) h.theta_e = std::exp(std::min(x(idx_theta_e_), std::log(bounds_.theta_e_max)));
  const auto active = active_weights(mode_);
  if (idx_weights_ >= 0) {
    const Eigen::ArrayXd u = x.segment(idx_weights_, weight_count_).array();
    const Eigen::ArrayXd e = (u - u.maxCoeff()).exp();
    const Eigen::ArrayXd w = e / e.sum();
    Index j = 0;
    h.weights.alpha = active.alpha ? w(j++) : 0.0;
    h.weights.beta = active.beta ? w(j++) : 0.0;
    h.weights.gamma = active.gamma ? w(j++) : 0.0;
  } else {
    h.weights = CombinationWeights::barycenter(mode_);
  }
  h.varsigma = sigmoid(x(idx_varsigma_));
  return h;
}

void ParameterMap::project(Eigen::VectorXd& x) const {
  if (idx_theta_g_ >= 0) x(idx_theta_g_) = std::min(x(idx_theta_g_), std::log(bounds_.theta_g_max));
  if (idx_theta_e_ >= 0) x(idx_theta_e_) = std::min(x(idx_theta_e_), std::log(bounds_.theta_e_max));
}

LikelihoodObjective::LikelihoodObjective(ProductKernel kernel, Observations train, Eigen::VectorXd z,
                                         Hyperparameters template_h)
    : kernel_(std::move(kernel)),
      train_(std::move(train)),
      z_(std::move(z)),
      template_(template_h),
      map_(kernel_.mode(), kernel_.theta_g_free(), kernel_.theta_e_free(), theta_max(kernel_, train_)) {
  if (train_.size() != z_.size()) throw DomainError("observation count does not match responses");
  if (z_.size() < 2) throw DomainError("need at least two training observations");
}

LikelihoodObjective::Evaluation LikelihoodObjective::evaluate(const Eigen::VectorXd& x,
                                                              const std::vector<Index>* subset,
                                                              bool with_gradient) const {
  const Hyperparameters h = hyperparameters(x);
  const FactorValues f = kernel_.factors(h, with_gradient);
  const Observations obs = subset ? train_.subset(*subset) : train_;
  const Eigen::VectorXd z = subset ? Eigen::VectorXd(z_(*subset)) : z_;

  const Eigen::MatrixXd kg = f.kg(obs.variety, obs.variety);
  const Eigen::MatrixXd ke = f.ke(obs.environment, obs.environment);
  const auto& w = h.weights;
  const Eigen::MatrixXd k = combine_linear(w.alpha, w.beta, w.gamma, kg, ke);
  const KrigingModel model(k, h.varsigma, z);

  Evaluation out;
  out.nll = model.likelihood().nll;
  out.m_hat = model.m_hat();
  out.nu_hat = model.nu_hat();
  if (!with_gradient) return out;

  const double s = h.varsigma;
  std::vector<Eigen::MatrixXd> dks;
  dks.reserve(static_cast<std::size_t>(map_.dimension()));
  if (kernel_.theta_g_free()) {
    const Eigen::MatrixXd dkg = f.dkg(obs.variety, obs.variety);
    dks.push_back(s * ((w.alpha + w.gamma * ke.array()) * dkg.array()).matrix());
  }
  if (kernel_.theta_e_free()) {
    const Eigen::MatrixXd dke = f.dke(obs.environment, obs.environment);
    dks.push_back(s * ((w.beta + w.gamma * kg.array()) * dke.array()).matrix());
  }
  const auto active = active_weights(kernel_.mode());
  if (active.count() > 1) {
    // Softmax Jacobian dw_i/du_j = w_i (delta_ij - w_j) over the free weights.
    std::vector<std::pair<double, Eigen::MatrixXd>> basis;
    if (active.alpha) basis.emplace_back(w.alpha, kg);
    if (active.beta) basis.emplace_back(w.beta, ke);
    if (active.gamma) basis.emplace_back(w.gamma, kg.cwiseProduct(ke));
    for (std::size_t j = 0; j < basis.size(); ++j) {
      Eigen::MatrixXd d = Eigen::MatrixXd::Zero(k.rows(), k.cols());
      for (std::size_t i = 0; i < basis.size(); ++i) {
        const double jac = basis[i].first * ((i == j ? 1.0 : 0.0) - basis[j].first);
        d += jac * basis[i].second;
      }
      dks.push_back(s * d);
    }
  }
  Eigen::MatrixXd dvs = k;
  dvs.diagonal().array() -= 1.0;
  dks.push_back(s * (1.0 - s) * dvs);
  out.gradient = model.nll_gradient(dks);
  return out;
}

std::array<std::vector<Index>, 2> random_halves(Index n, std::mt19937_64& rng, double batch_fraction) {
  if (!(batch_fraction > 0.0 && batch_fraction <= 0.5)) throw DomainError("batch_fraction must lie in (0, 0.5]");
  std::vector<Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), Index{0});
  std::shuffle(perm.begin(), perm.end(), rng);
  auto first = static_cast<std::size_t>(n / 2);
  auto second = static_cast<std::size_t>(n);
  if (batch_fraction < 0.5) {
    first = std::max<std::size_t>(2, static_cast<std::size_t>(batch_fraction * static_cast<double>(n)));
    second = std::min<std::size_t>(2 * first, static_cast<std::size_t>(n));
  }
  std::array<std::vector<Index>, 2> halves{std::vector<Index>(perm.begin(), perm.begin() + first),
                                           std::vector<Index>(perm.begin() + first, perm.begin() + second)};
  for (auto& h : halves) std::sort(h.begin(), h.end());
  return halves;
}

Eigen::VectorXd half_batch_gradient(const LikelihoodObjective& objective, const Eigen::VectorXd& x,
                                    std::mt19937_64& rng, double* nll_estimate,
                                    std::vector<std::string>* warnings, double batch_fraction) {
  if (objective.size() < 4) {
    if (warnings) warnings->push_back("fewer than 4 training points; using the full-data gradient");
    auto e = objective.evaluate(x, nullptr, true);
    if (nll_estimate) *nll_estimate = e.nll;
    return e.gradient;
  }
  const auto halves = random_halves(objective.size(), rng, batch_fraction);
  const auto a = objective.evaluate(x, &halves[0], true);
  const auto b = objective.evaluate(x, &halves[1], true);
  if (nll_estimate) *nll_estimate = 0.5 * (a.nll + b.nll);
  return 0.5 * (a.gradient + b.gradient);
}

}  // namespace gxe
