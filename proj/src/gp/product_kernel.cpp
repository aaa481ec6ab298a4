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

#include "gxe/error.hpp"
#include "gxe/product_kernel.hpp"

namespace gxe {

Observations Observations::subset(const std::vector<Index>& rows) const {
  Observations out;
  out.variety.reserve(rows.size());
  out.environment.reserve(rows.size());
  for (Index r : rows) {
    out.variety.push_back(variety[static_cast<std::size_t>(r)]);
    out.environment.push_back(environment[static_cast<std::size_t>(r)]);
  }
  return out;
}

ProductKernel::ProductKernel(std::shared_ptr<const FactorGram> genotype,
                             std::shared_ptr<const FactorGram> environment, CombinationMode mode)
    : genotype_(std::move(genotype)), environment_(std::move(environment)), mode_(mode) {
  if (!genotype_ || !environment_) throw DomainError("ProductKernel: missing factor Gram");
}

bool ProductKernel::uses_genotype() const { return mode_ != CombinationMode::e_only; }
bool ProductKernel::uses_environment() const { return mode_ != CombinationMode::g_only; }

FactorValues ProductKernel::factors(const Hyperparameters& h, bool with_derivatives) const {
  FactorValues f;
  if (uses_genotype()) {
    f.kg = genotype_->evaluate(h.theta_g, with_derivatives ? &f.dkg : nullptr);
  } else {
    f.kg = Eigen::MatrixXd::Ones(genotype_->size(), genotype_->size());
    if (with_derivatives) f.dkg = Eigen::MatrixXd::Zero(genotype_->size(), genotype_->size());
  }
  if (uses_environment()) {
    f.ke = environment_->evaluate(h.theta_e, with_derivatives ? &f.dke : nullptr);
  } else {
    f.ke = Eigen::MatrixXd::Ones(environment_->size(), environment_->size());
    if (with_derivatives) f.dke = Eigen::MatrixXd::Zero(environment_->size(), environment_->size());
  }
  return f;
}

Eigen::MatrixXd ProductKernel::correlation(const FactorValues& f, const CombinationWeights& w,
                                           const Observations& rows, const Observations& cols) {
  const Eigen::MatrixXd kg = f.kg(rows.variety, cols.variety);
  const Eigen::MatrixXd ke = f.ke(rows.environment, cols.environment);
  return combine_linear(w.alpha, w.beta, w.gamma, kg, ke);
}

Eigen::MatrixXd ProductKernel::correlation(const Hyperparameters& h, const Observations& rows,
                                           const Observations& cols) const {
  if (!h.weights.consistent_with(mode_) || !h.weights.on_simplex(1e-9)) {
    throw DomainError("weights inconsistent with combination mode " + std::string(to_string(mode_)));
  }
  return correlation(factors(h, false), h.weights, rows, cols);
}

}  // namespace gxe
