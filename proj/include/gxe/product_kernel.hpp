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

#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "gxe/factor_gram.hpp"
#include "gxe/gp.hpp"
#include "gxe/kernels.hpp"

namespace gxe {

/// Observations as (variety item, environment item) index pairs into the
/// factor Grams.
struct Observations {
  std::vector<Index> variety;
  std::vector<Index> environment;

  Index size() const { return static_cast<Index>(variety.size()); }
  Observations subset(const std::vector<Index>& rows) const;
};

/// Factor Grams evaluated at one set of length scales, over all items.
struct FactorValues {
  Eigen::MatrixXd kg, ke;
  /// Derivatives with respect to log(theta); empty unless requested.
  Eigen::MatrixXd dkg, dke;
};

/// The product-space kernel alpha k_G + beta k_E + gamma k_G k_E with one
/// shared (k_G, k_E) pair in the sum and product terms.
class ProductKernel {
 public:
  ProductKernel(std::shared_ptr<const FactorGram> genotype, std::shared_ptr<const FactorGram> environment,
                CombinationMode mode);

  CombinationMode mode() const { return mode_; }
  bool uses_genotype() const;
  bool uses_environment() const;
  bool theta_g_free() const { return uses_genotype() && genotype_->has_length_scale(); }
  bool theta_e_free() const { return uses_environment() && environment_->has_length_scale(); }
  const FactorGram& genotype() const { return *genotype_; }
  const FactorGram& environment() const { return *environment_; }

  /// Factor Grams at (theta_g, theta_e). Factors unused by the mode are
  /// all-ones matrices.
  FactorValues factors(const Hyperparameters& h, bool with_derivatives) const;

  /// Combined correlations between observation sets `rows` and `cols`.
  static Eigen::MatrixXd correlation(const FactorValues& f, const CombinationWeights& w,
                                     const Observations& rows, const Observations& cols);

  Eigen::MatrixXd correlation(const Hyperparameters& h, const Observations& rows, const Observations& cols) const;

 private:
  std::shared_ptr<const FactorGram> genotype_;
  std::shared_ptr<const FactorGram> environment_;
  CombinationMode mode_;
};

}  // namespace gxe
