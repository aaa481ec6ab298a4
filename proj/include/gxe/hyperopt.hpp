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

#include <array>
#include <cstdint>
#include <iosfwd>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gxe/factor_gram.hpp"
#include "gxe/gp.hpp"
#include "gxe/product_kernel.hpp"

namespace gxe {

struct OptimizerConfig {
  double learning_rate = 0.01;
  double decay_factor = 0.8;
  int decay_every = 5;
  int max_iters = 1000;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  /// Size of each of the two disjoint gradient batches, as a fraction of n.
  double batch_fraction = 0.5;
  std::uint64_t seed = 0;
  /// Stop once the largest transformed-parameter change stays below this
  /// for `patience` consecutive iterations.
  double tolerance = 1e-5;
  int patience = 10;
  /// Full-data evaluation period for the best-iterate bookkeeping.
  int eval_every = 25;

  /// Step size of 1-based iteration `step`.
  double learning_rate_at(int step) const;
  void validate() const;
};

/// Upper bounds of the length scales; zero for scales the kernel does not use.
struct ThetaBounds {
  double theta_g_max = 0.0;
  double theta_e_max = 0.0;
};

/// Largest pairwise training distance under each active factor kernel.
/// Throws DomainError when an active factor has fewer than two distinct
/// training items.
ThetaBounds theta_max(const ProductKernel& kernel, const Observations& train);

/// Maps hyperparameters to the unconstrained optimizer space: log theta
/// (clipped above at the bound), softmax logits for the mode's free
/// weights, logit varsigma.
class ParameterMap {
 public:
  ParameterMap(CombinationMode mode, bool theta_g_free, bool theta_e_free, ThetaBounds bounds);

  Eigen::Index dimension() const { return static_cast<Eigen::Index>(names_.size()); }
  const std::vector<std::string>& names() const { return names_; }
  const ThetaBounds& bounds() const { return bounds_; }

  /// `template_h` supplies the parameters that are not optimized.
  Eigen::VectorXd to_vector(const Hyperparameters& h) const;
  Hyperparameters from_vector(const Eigen::VectorXd& x, const Hyperparameters& template_h) const;
  void project(Eigen::VectorXd& x) const;

  /// Floor applied to weights before taking logs; keeps simplex vertices
  /// reachable by a finite logit.
  static constexpr double kWeightFloor = 1e-3;

 private:
  CombinationMode mode_;
  bool theta_g_free_;
  bool theta_e_free_;
  ThetaBounds bounds_;
  std::vector<std::string> names_;
  Eigen::Index idx_theta_g_ = -1, idx_theta_e_ = -1, idx_weights_ = -1, idx_varsigma_ = -1;
  int weight_count_ = 0;
};

/// Profiled negative log-likelihood of a training set as a function of the
/// transformed hyperparameters.
class LikelihoodObjective {
 public:
  LikelihoodObjective(ProductKernel kernel, Observations train, Eigen::VectorXd z, Hyperparameters template_h);

  struct Evaluation {
    double nll = 0.0;
    double m_hat = 0.0;
    double nu_hat = 0.0;
    Eigen::VectorXd gradient;
  };

  const ParameterMap& map() const { return map_; }
  const ProductKernel& kernel() const { return kernel_; }
  const Observations& train() const { return train_; }
  const Eigen::VectorXd& responses() const { return z_; }
  const Hyperparameters& template_hyperparameters() const { return template_; }
  Eigen::Index size() const { return z_.size(); }

  /// Evaluates on the rows in `subset`, or on all rows when it is null.
  Evaluation evaluate(const Eigen::VectorXd& x, const std::vector<Index>* subset, bool with_gradient) const;
  double value(const Eigen::VectorXd& x) const { return evaluate(x, nullptr, false).nll; }
  /// Full-data analytic gradient in transformed space.
  Eigen::VectorXd gradient(const Eigen::VectorXd& x) const { return evaluate(x, nullptr, true).gradient; }
  Hyperparameters hyperparameters(const Eigen::VectorXd& x) const { return map_.from_vector(x, template_); }

 private:
  ProductKernel kernel_;
  Observations train_;
  Eigen::VectorXd z_;
  Hyperparameters template_;
  ParameterMap map_;
};

/// Mean of the gradients on two random disjoint batches of the training
/// set. With `batch_fraction` = 0.5 the batches are the two halves (sizes
/// floor(n/2) and ceil(n/2)); smaller fractions draw two disjoint batches
/// of floor(fraction * n) rows. Falls back to the full-data gradient for
/// n < 4 and appends a warning.
Eigen::VectorXd half_batch_gradient(const LikelihoodObjective& objective, const Eigen::VectorXd& x,
                                    std::mt19937_64& rng, double* nll_estimate = nullptr,
                                    std::vector<std::string>* warnings = nullptr, double batch_fraction = 0.5);

/// Random disjoint batches of 0..n-1; see half_batch_gradient for sizes.
std::array<std::vector<Index>, 2> random_halves(Index n, std::mt19937_64& rng, double batch_fraction = 0.5);

struct TraceEntry {
  int iter = 0;
  Eigen::VectorXd params;
  Hyperparameters hyper;
  double nll = 0.0;
  double grad_norm = 0.0;
};

struct FitTrace {
  std::vector<std::string> names;
  std::vector<TraceEntry> entries;
  std::vector<std::string> warnings;
};

/// `iter,theta_g,theta_e,alpha,beta,gamma,varsigma,nll,grad_norm`
void write_trace_csv(const FitTrace& trace, std::ostream& out);

inline constexpr std::array<double, 5> kThetaGridFractions = {0.05, 0.1, 0.25, 0.5, 1.0};
inline constexpr std::array<double, 3> kVarsigmaGrid = {0.3, 0.6, 0.9};

/// Everything a fit needs: genotype Grams per discrete setting, the
/// environment Gram, the mode and the training observations.
struct FitProblem {
  std::vector<GenotypeOption> genotype_options;
  std::shared_ptr<const FactorGram> environment;
  CombinationMode mode = CombinationMode::full;
  Observations train;
  Eigen::VectorXd z;
};

struct GridResult {
  Hyperparameters best;
  double nll = 0.0;
  std::size_t option = 0;
  int evaluated = 0;
  int failed = 0;
};

/// Coarse grid over theta fractions of the bound, varsigma and the simplex
/// vertices plus barycenter of the mode. Ties keep the earliest point,
/// i.e. the lower theta index.
GridResult grid_init(const FitProblem& problem);

struct FitResult {
  Hyperparameters hyper;  // nu = nu_hat on the full training data
  double m_hat = 0.0;
  double nll = 0.0;
  double init_nll = 0.0;
  FitTrace trace;
};

/// Adam in transformed space with step decay and half-batch gradients.
/// Returns the best full-data iterate among the start, every
/// `eval_every`-th step and the last step.
FitResult adam_fit(const LikelihoodObjective& objective, const Hyperparameters& init, const OptimizerConfig& config);

struct ProblemFit {
  FitResult fit;
  GridResult grid;
  std::size_t option = 0;
};

/// grid_init followed by adam_fit.
ProblemFit fit_problem(const FitProblem& problem, const OptimizerConfig& config);

/// LikelihoodObjective for one genotype option of a problem.
LikelihoodObjective make_objective(const FitProblem& problem, std::size_t option, const Hyperparameters& template_h);

}  // namespace gxe
