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
#include <string>

#include "gxe/error.hpp"
#include "gxe/factor_gram.hpp"
#include "gxe/genotype_kernels.hpp"

namespace gxe {

std::string_view to_string(GenotypeKernel kernel) {
  switch (kernel) {
    case GenotypeKernel::gau_gblup: return "G:GAU-GBLUP";
    case GenotypeKernel::exp_hamming: return "G:EXP-HAM";
    case GenotypeKernel::spectrum: return "G:SPE";
  }
  return "?";
}

std::string_view to_string(EnvironmentKernel kernel) {
  switch (kernel) {
    case EnvironmentKernel::gau_eucl: return "E:GAU-EUCL";
    case EnvironmentKernel::exp_eucl: return "E:EXP-EUCL";
    case EnvironmentKernel::gak: return "E:GAK";
  }
  return "?";
}

DistanceGram::DistanceGram(Eigen::MatrixXd distances, Profile profile)
    : distances_(std::move(distances)), profile_(profile) {
  if (distances_.rows() != distances_.cols() || distances_.rows() == 0) {
    throw DomainError("DistanceGram: distance matrix must be square and nonempty");
  }
  if ((distances_.array() < 0.0).any() || !distances_.allFinite()) {
    throw DomainError("DistanceGram: distances must be finite and nonnegative");
  }
}

Eigen::MatrixXd DistanceGram::evaluate(double theta, Eigen::MatrixXd* d_dlog_theta) const {
  detail::check_length_scale(theta);
  const Eigen::ArrayXXd r = distances_.array() / theta;
  if (profile_ == Profile::exponential) {
    Eigen::MatrixXd k = (-r).exp().matrix();
    if (d_dlog_theta) *d_dlog_theta = (k.array() * r).matrix();
    return k;
  }
  const Eigen::ArrayXXd r2 = r.square();
  Eigen::MatrixXd k = (-r2).exp().matrix();
  if (d_dlog_theta) *d_dlog_theta = (2.0 * k.array() * r2).matrix();
  return k;
}

double DistanceGram::max_distance(std::span<const Index> items) const {
  double best = 0.0;
  for (std::size_t a = 0; a < items.size(); ++a) {
    for (std::size_t b = a + 1; b < items.size(); ++b) best = std::max(best, distances_(items[a], items[b]));
  }
  return best;
}

FixedGram::FixedGram(Eigen::MatrixXd gram) : gram_(std::move(gram)) {
  if (gram_.rows() != gram_.cols() || gram_.rows() == 0) throw DomainError("FixedGram: matrix must be square");
}

Eigen::MatrixXd FixedGram::evaluate(double /*theta*/, Eigen::MatrixXd* d_dlog_theta) const {
  if (d_dlog_theta) d_dlog_theta->setZero(gram_.rows(), gram_.cols());
  return gram_;
}

double FixedGram::max_distance(std::span<const Index> /*items*/) const {
  throw DomainError("kernel has no length scale");
}

GakGram::GakGram(std::vector<EnvSeries> series) : series_(std::move(series)) {
  if (series_.empty()) throw DomainError("GakGram: no series");
}

Eigen::MatrixXd GakGram::evaluate(double theta, Eigen::MatrixXd* d_dlog_theta) const {
  const Index n = size();
  Eigen::MatrixXd logk(n, n);
  Eigen::MatrixXd dlogk(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = i; j < n; ++j) {
      const auto v = gak_log_raw(series_[static_cast<std::size_t>(i)], series_[static_cast<std::size_t>(j)], theta);
      logk(i, j) = logk(j, i) = v.log_value;
      dlogk(i, j) = dlogk(j, i) = v.dlog_dtheta;
    }
  }
  const Eigen::VectorXd self = logk.diagonal();
  const Eigen::VectorXd dself = dlogk.diagonal();
  Eigen::MatrixXd k(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) k(i, j) = std::exp(logk(i, j) - 0.5 * (self(i) + self(j)));
  }
  if (d_dlog_theta) {
    d_dlog_theta->resize(n, n);
    for (Index i = 0; i < n; ++i) {
      for (Index j = 0; j < n; ++j) {
        (*d_dlog_theta)(i, j) = k(i, j) * theta * (dlogk(i, j) - 0.5 * (dself(i) + dself(j)));
      }
    }
  }
  return k;
}

double GakGram::max_distance(std::span<const Index> items) const {
  double best = 0.0;
  for (std::size_t a = 0; a < items.size(); ++a) {
    for (std::size_t b = a + 1; b < items.size(); ++b) {
      best = std::max(best, max_step_distance(series_[static_cast<std::size_t>(items[a])],
                                              series_[static_cast<std::size_t>(items[b])]));
    }
  }
  return best;
}

Eigen::MatrixXd hamming_distance_matrix(const GenotypeTable& table) {
  const auto n = static_cast<Index>(table.size());
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      d(i, j) = d(j, i) = hamming_distance(table[static_cast<std::size_t>(i)].calls,
                                           table[static_cast<std::size_t>(j)].calls, table.missing_symbol());
    }
  }
  return d;
}

Eigen::MatrixXd gblup_distance_matrix(const BiallelicMatrix& encoded) {
  const Index n = encoded.dosage.rows();
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      d(i, j) = d(j, i) = gblup_distance(encoded.dosage.row(i), encoded.dosage.row(j));
    }
  }
  return d;
}

Eigen::MatrixXd env_distance_matrix(const EnvCovariateTable& table) {
  const auto n = static_cast<Index>(table.size());
  const Eigen::MatrixXd& x = table.values();
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) d(i, j) = d(j, i) = env_euclidean_distance(x.row(i), x.row(j));
  }
  return d;
}

std::vector<GenotypeOption> build_genotype_options(GenotypeKernel kernel, const GenotypeTable& table,
                                                   const std::vector<int>& spectrum_grid) {
  if (table.size() == 0) throw DomainError("genotype table is empty");
  switch (kernel) {
    case GenotypeKernel::gau_gblup:
      return {{0, std::make_shared<DistanceGram>(gblup_distance_matrix(encode_biallelic(table)),
                                                 DistanceGram::Profile::gaussian)}};
    case GenotypeKernel::exp_hamming:
      return {{0, std::make_shared<DistanceGram>(hamming_distance_matrix(table),
                                                 DistanceGram::Profile::exponential)}};
    case GenotypeKernel::spectrum: break;
  }
  std::vector<GenotypeOption> out;
  const auto n = static_cast<Index>(table.size());
  for (int k : spectrum_grid) {
    if (k <= 0 || static_cast<std::size_t>(k) > table.marker_count()) continue;
    std::vector<SpectrumProfile> profiles;
    profiles.reserve(table.size());
    for (const auto& row : table.rows()) {
      profiles.push_back(spectrum_profile(row.calls, k, table.missing_symbol()));
      if (profiles.back().counts.empty()) {
        throw DomainError("spectrum kernel: sequence of " + row.variety_id + " has no valid " +
                          std::to_string(k) + "-mer window");
      }
    }
    Eigen::MatrixXd g(n, n);
    for (Index i = 0; i < n; ++i) {
      g(i, i) = 1.0;
      for (Index j = i + 1; j < n; ++j) {
        g(i, j) = g(j, i) = spectrum_kernel(profiles[static_cast<std::size_t>(i)], profiles[static_cast<std::size_t>(j)]);
      }
    }
    out.push_back({k, std::make_shared<FixedGram>(std::move(g))});
  }
  if (out.empty()) throw DomainError("spectrum kernel: no k in the grid fits the sequence length");
  return out;
}

std::shared_ptr<const FactorGram> build_environment_gram(EnvironmentKernel kernel,
                                                         const EnvCovariateTable& normalized) {
  if (normalized.size() == 0) throw DomainError("environment table is empty");
  switch (kernel) {
    case EnvironmentKernel::gau_eucl:
      return std::make_shared<DistanceGram>(env_distance_matrix(normalized), DistanceGram::Profile::gaussian);
    case EnvironmentKernel::exp_eucl:
      return std::make_shared<DistanceGram>(env_distance_matrix(normalized), DistanceGram::Profile::exponential);
    case EnvironmentKernel::gak: break;
  }
  std::vector<EnvSeries> series;
  series.reserve(normalized.size());
  for (std::size_t e = 0; e < normalized.size(); ++e) series.push_back(normalized.series(e));
  return std::make_shared<GakGram>(std::move(series));
}

}  // namespace gxe
