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
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "gxe/data.hpp"
#include "gxe/environment_kernels.hpp"

namespace gxe {

enum class GenotypeKernel { gau_gblup, exp_hamming, spectrum };
enum class EnvironmentKernel { gau_eucl, exp_eucl, gak };

std::string_view to_string(GenotypeKernel kernel);
std::string_view to_string(EnvironmentKernel kernel);

/// A unit-diagonal kernel over a fixed list of items (the varieties of a
/// genotype table or the environments of a covariate table), evaluated as
/// a whole Gram matrix for a given length scale.
class FactorGram {
 public:
  virtual ~FactorGram() = default;

  virtual Index size() const = 0;
  virtual bool has_length_scale() const = 0;
  /// Gram over all items. When `d_dlog_theta` is non-null it receives the
  /// elementwise derivative with respect to log(theta).
  virtual Eigen::MatrixXd evaluate(double theta, Eigen::MatrixXd* d_dlog_theta = nullptr) const = 0;
  /// Largest pairwise distance among `items`, the length-scale upper bound.
  virtual double max_distance(std::span<const Index> items) const = 0;
};

/// exp(-D / theta) or exp(-D^2 / theta^2) over a precomputed distance matrix.
class DistanceGram final : public FactorGram {
 public:
  enum class Profile { exponential, gaussian };

  DistanceGram(Eigen::MatrixXd distances, Profile profile);

  Index size() const override { return distances_.rows(); }
  bool has_length_scale() const override { return true; }
  Eigen::MatrixXd evaluate(double theta, Eigen::MatrixXd* d_dlog_theta) const override;
  double max_distance(std::span<const Index> items) const override;
  const Eigen::MatrixXd& distances() const { return distances_; }

 private:
  Eigen::MatrixXd distances_;
  Profile profile_;
};

/// Gram matrix without a continuous parameter (the spectrum kernel at a
/// fixed k).
class FixedGram final : public FactorGram {
 public:
  explicit FixedGram(Eigen::MatrixXd gram);

  Index size() const override { return gram_.rows(); }
  bool has_length_scale() const override { return false; }
  Eigen::MatrixXd evaluate(double theta, Eigen::MatrixXd* d_dlog_theta) const override;
  double max_distance(std::span<const Index> items) const override;

 private:
  Eigen::MatrixXd gram_;
};

/// Normalized global alignment kernel over environment series.
class GakGram final : public FactorGram {
 public:
  explicit GakGram(std::vector<EnvSeries> series);

  Index size() const override { return static_cast<Index>(series_.size()); }
  bool has_length_scale() const override { return true; }
  Eigen::MatrixXd evaluate(double theta, Eigen::MatrixXd* d_dlog_theta) const override;
  double max_distance(std::span<const Index> items) const override;

 private:
  std::vector<EnvSeries> series_;
};

/// Pairwise Hamming distances between the rows of a genotype table.
Eigen::MatrixXd hamming_distance_matrix(const GenotypeTable& table);
/// Pairwise scaled Euclidean distances between dosage rows.
Eigen::MatrixXd gblup_distance_matrix(const BiallelicMatrix& encoded);
/// Pairwise scaled Euclidean distances between environments.
Eigen::MatrixXd env_distance_matrix(const EnvCovariateTable& table);

/// One genotype Gram per value of the discrete parameter. Kernels
/// without one produce a single option with k = 0.
struct GenotypeOption {
  int spectrum_k = 0;
  std::shared_ptr<const FactorGram> gram;
};

inline const std::vector<int> kDefaultSpectrumGrid = {1, 2, 3, 4, 5};

std::vector<GenotypeOption> build_genotype_options(GenotypeKernel kernel, const GenotypeTable& table,
                                                   const std::vector<int>& spectrum_grid = kDefaultSpectrumGrid);

/// Environment Gram over the rows of an already normalized table.
std::shared_ptr<const FactorGram> build_environment_gram(EnvironmentKernel kernel,
                                                         const EnvCovariateTable& normalized);

}  // namespace gxe
