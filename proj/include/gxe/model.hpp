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

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json_fwd.hpp>

#include "gxe/data.hpp"
#include "gxe/gp.hpp"
#include "gxe/hyperopt.hpp"
#include "gxe/presets.hpp"
#include "gxe/product_kernel.hpp"

namespace gxe {

/// Covariate tables and genotype Grams shared by every fit of one method on
/// one dataset. Genotype Grams do not depend on the split, so building them
/// once saves the bulk of the per-split setup.
struct FitContext {
  std::shared_ptr<const GenotypeTable> genotypes;
  std::shared_ptr<const EnvCovariateTable> env;  // raw, before normalization
  MethodSpec method;
  std::vector<GenotypeOption> genotype_options;
};

FitContext make_fit_context(const GenotypeTable& genotypes, const EnvCovariateTable& env, const MethodSpec& method);

/// One (variety, environment) pair addressed by id.
struct Target {
  std::string variety_id;
  std::string environment_id;
};

/// A fitted GP regression over variety x environment pairs. Immutable after
/// construction; prediction is safe from several threads.
class GxeModel {
 public:
  /// Fits on the dataset records listed in `train_rows`.
  static GxeModel fit(const Dataset& data, const FitContext& context, const std::vector<std::size_t>& train_rows,
                      const OptimizerConfig& config);
  static GxeModel fit(const Dataset& data, const MethodSpec& method, const OptimizerConfig& config);

  /// Rebuilds a model at fixed hyperparameters. The trend and total variance
  /// are re-profiled from the training data.
  GxeModel(FitContext context, Trait trait, std::vector<std::string> reference_envs, std::vector<Target> train,
           Eigen::VectorXd z, Hyperparameters hyper);

  const MethodSpec& method() const { return context_.method; }
  Trait trait() const { return trait_; }
  const Hyperparameters& hyperparameters() const { return hyper_; }
  double m_hat() const { return kriging_->m_hat(); }
  double nu_hat() const { return kriging_->nu_hat(); }
  double nll() const { return kriging_->likelihood().nll; }
  const std::vector<std::string>& reference_environments() const { return reference_envs_; }
  const std::vector<Target>& training_targets() const { return train_ids_; }
  const Eigen::VectorXd& training_responses() const { return z_; }
  const FitContext& context() const { return context_; }
  /// Optimizer trace and grid summary; empty for rebuilt models.
  const FitTrace& trace() const { return trace_; }
  const std::optional<GridResult>& grid() const { return grid_; }
  const std::vector<std::string>& warnings() const { return warnings_; }

  /// Predictions at row indices of the model's genotype and environment tables.
  PredictiveDistribution predict(const Observations& points) const;
  /// Throws StructuralError naming the first unknown id.
  PredictiveDistribution predict(const std::vector<Target>& targets) const;
  /// Resolves one target; nullopt with a message in `error` when unknown.
  std::optional<std::pair<Index, Index>> resolve(const Target& target, std::string* error = nullptr) const;

  nlohmann::json to_json() const;
  static GxeModel from_json(const nlohmann::json& doc);
  void save(const std::filesystem::path& path) const;
  static GxeModel load(const std::filesystem::path& path);

 private:
  GxeModel() = default;
  void build();

  FitContext context_;
  Trait trait_ = Trait::yield;
  std::vector<std::string> reference_envs_;
  std::vector<Target> train_ids_;
  Eigen::VectorXd z_;
  Hyperparameters hyper_;
  std::shared_ptr<const FactorGram> environment_gram_;
  std::shared_ptr<const FactorGram> genotype_gram_;
  Observations train_;
  std::shared_ptr<const KrigingModel> kriging_;
  FitTrace trace_;
  std::optional<GridResult> grid_;
  std::vector<std::string> warnings_;
};

}  // namespace gxe
