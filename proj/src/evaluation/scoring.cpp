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

#include "gxe/error.hpp"
#include "gxe/evaluation.hpp"

namespace gxe {

double mse(const Eigen::VectorXd& predictions, const Eigen::VectorXd& observations) {
  if (predictions.size() != observations.size()) throw DomainError("mse: length mismatch");
  if (predictions.size() == 0) throw DomainError("mse: empty input");
  return (predictions - observations).squaredNorm() / static_cast<double>(predictions.size());
}

double crps_gaussian(double mu, double sigma, double y) {
  if (!(sigma >= 0.0)) throw DomainError("crps: sigma must be nonnegative");
  if (sigma == 0.0) return std::abs(y - mu);
  const double z = (y - mu) / sigma;
  const double cdf = 0.5 * std::erfc(-z / std::numbers::sqrt2);
  const double pdf = std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
  return sigma * (z * (2.0 * cdf - 1.0) + 2.0 * pdf - std::numbers::inv_sqrtpi);
}

double log_score_gaussian(double mu, double sigma, double y) {
  if (!(sigma > 0.0)) throw DomainError("log score: sigma must be positive");
  const double r = (y - mu) / sigma;
  return 0.5 * std::log(2.0 * std::numbers::pi * sigma * sigma) + 0.5 * r * r;
}

double median_metric(std::vector<double> values) {
  if (values.empty()) throw DomainError("median of an empty set");
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
  const double upper = values[mid];
  if (values.size() % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

BaselinePredictor::BaselinePredictor(BaselineKind kind, const Dataset& data, const std::vector<std::size_t>& train)
    : kind_(kind), data_(&data) {
  if (train.empty()) throw DomainError("baseline: empty training set");
  const std::size_t groups = kind == BaselineKind::variety_avg ? data.genotypes.size() : data.env_covariates.size();
  sum_.assign(groups, 0.0);
  count_.assign(groups, 0);
  for (std::size_t r : train) {
    global_ += data.records.at(r).value;
    if (kind == BaselineKind::global_avg) continue;
    const std::size_t g = kind == BaselineKind::variety_avg ? data.variety[r] : data.environment[r];
    sum_[g] += data.records[r].value;
    ++count_[g];
  }
  global_ /= static_cast<double>(train.size());
}

std::optional<double> BaselinePredictor::predict(std::size_t record) const {
  if (kind_ == BaselineKind::global_avg) return global_;
  const std::size_t g = kind_ == BaselineKind::variety_avg ? data_->variety.at(record) : data_->environment.at(record);
  if (count_[g] == 0) return std::nullopt;
  return sum_[g] / count_[g];
}

std::optional<double> baseline_predict(BaselineKind kind, const Dataset& data, const std::vector<std::size_t>& train,
                                       std::size_t test_record) {
  return BaselinePredictor(kind, data, train).predict(test_record);
}

}  // namespace gxe
