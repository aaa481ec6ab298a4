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
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "gxe/data.hpp"
#include "gxe/gp.hpp"
#include "gxe/hyperopt.hpp"
#include "gxe/presets.hpp"

namespace gxe {

/// Which factor is held out: whole environments or whole varieties.
enum class Scenario { new_environment, new_variety };

std::string_view to_string(Scenario scenario);
/// Accepts "new-environment"/"new_environment"/"env" and the variety analogues.
Scenario parse_scenario(std::string_view text);

struct SplitPlan {
  Scenario scenario = Scenario::new_environment;
  int n_splits = 30;
  double pool_fraction = 0.8;
  double test_fraction = 0.2;
  /// Records of each test group moved back into training.
  int leakage = 0;
  std::uint64_t seed = 0;

  void validate() const;
};

struct Split {
  std::vector<std::size_t> train;  // dataset record indices, ascending
  std::vector<std::size_t> test;
  std::vector<std::string> warnings;
};

/// Split `index` of the plan: draw a pool of pool_fraction of the records,
/// move whole groups in random order to the test side until it holds at
/// least test_fraction of the pool, keep the rest for training, then move
/// `leakage` random records of every test group back to training.
/// Deterministic in (seed, index).
Split make_split(const Dataset& data, const SplitPlan& plan, int index);
std::vector<Split> make_splits(const Dataset& data, const SplitPlan& plan);

/// Mean squared error.
double mse(const Eigen::VectorXd& predictions, const Eigen::VectorXd& observations);
/// CRPS of N(mu, sigma^2) at y; |y - mu| when sigma = 0.
double crps_gaussian(double mu, double sigma, double y);
/// Negative log density of N(mu, sigma^2) at y; sigma must be positive.
double log_score_gaussian(double mu, double sigma, double y);
double median_metric(std::vector<double> values);

/// Training means used by the averaging baselines.
class BaselinePredictor {
 public:
  BaselinePredictor(BaselineKind kind, const Dataset& data, const std::vector<std::size_t>& train);
  /// Mean of the matching training records; nullopt when there are none.
  std::optional<double> predict(std::size_t record) const;

 private:
  BaselineKind kind_;
  const Dataset* data_;
  double global_ = 0.0;
  std::vector<double> sum_;
  std::vector<int> count_;
};

std::optional<double> baseline_predict(BaselineKind kind, const Dataset& data, const std::vector<std::size_t>& train,
                                       std::size_t test_record);

struct SplitMetrics {
  int split = 0;
  bool failed = false;
  std::string error;
  std::size_t n_train = 0;
  std::size_t n_test = 0;
  std::size_t n_scored = 0;
  std::optional<double> mse, crps, logs;
  std::optional<Hyperparameters> hyper;
  double m_hat = 0.0;
  std::vector<std::string> warnings;
};

struct MethodEvaluation {
  MethodSpec method;
  SplitPlan plan;
  Trait trait = Trait::yield;
  std::vector<SplitMetrics> splits;  // in split order
  std::optional<double> median_mse, median_crps, median_logs;

  int failed() const;
  /// Splits with a score; baselines can have none when the target group is unseen.
  int scored() const;
};

struct EvaluateOptions {
  OptimizerConfig optimizer;
  int jobs = 1;
};

/// Fits and scores the method on every split of the plan. Splits run on up
/// to `jobs` threads; results are ordered by split index.
MethodEvaluation evaluate(const MethodSpec& method, const Dataset& data, const SplitPlan& plan,
                          const EvaluateOptions& options = {});

/// `method,scenario,leakage,trait,split,mse,crps,logs,status`
void write_split_csv(const std::vector<MethodEvaluation>& results, std::ostream& out);
/// `method,scenario,leakage,trait,splits,failed,mse,crps,logs` with cross-split medians.
void write_summary_csv(const std::vector<MethodEvaluation>& results, std::ostream& out);
/// `method,scenario,leakage,trait,split,metric,value`, one row per score.
void write_long_csv(const std::vector<MethodEvaluation>& results, std::ostream& out);
/// Fitted hyperparameters per split of GP methods.
void write_hyperparameter_csv(const std::vector<MethodEvaluation>& results, std::ostream& out);

/// Plain-text table: one row per method, metric columns per trait with the
/// no-leakage and leakage medians side by side.
std::string render_table(const std::vector<MethodEvaluation>& results);

}  // namespace gxe
