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
#include <array>
#include <cmath>
#include <fstream>
#include <random>

#include "gxe/error.hpp"
#include "gxe/product_kernel.hpp"
#include "gxe/synthetic.hpp"

namespace gxe {
namespace {

std::string numbered(char prefix, int i, int width) {
  std::string digits = std::to_string(i + 1);
  return std::string(1, prefix) + std::string(static_cast<std::size_t>(std::max(0, width - int(digits.size()))), '0') +
         digits;
}

int width_for(int n) { return static_cast<int>(std::to_string(n).size()); }

}  // namespace

void SyntheticSpec::validate() const {
  if (n_varieties < 2 || n_environments < 2) throw DomainError("synthetic: need at least two varieties and environments");
  if (sequence_length < 1 || env_variables < 1) throw DomainError("synthetic: sequence length and variable count must be positive");
  if (!(observation_fraction > 0.0 && observation_fraction <= 1.0)) {
    throw DomainError("synthetic: observation_fraction must lie in (0, 1]");
  }
  if (!(heterozygote_rate >= 0.0 && missing_rate >= 0.0 && heterozygote_rate + missing_rate < 1.0)) {
    throw DomainError("synthetic: invalid marker rates");
  }
  if (!(truth.theta_g > 0.0 && truth.theta_e > 0.0)) throw DomainError("synthetic: length scales must be positive");
  if (!(truth.varsigma >= 0.0 && truth.varsigma <= 1.0)) throw DomainError("synthetic: varsigma must lie in [0, 1]");
  if (!(truth.nu > 0.0)) throw DomainError("synthetic: nu must be positive");
  if (!truth.weights.consistent_with(mode) || !truth.weights.on_simplex(1e-9)) {
    throw DomainError("synthetic: weights inconsistent with the combination mode");
  }
  if (genotype_kernel == GenotypeKernel::spectrum && (truth.spectrum_k < 1 || truth.spectrum_k > sequence_length)) {
    throw DomainError("synthetic: spectrum k must lie in [1, sequence length]");
  }
}

Dataset generate(const SyntheticSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unit;
  constexpr std::array<char, 4> kBases = {'A', 'C', 'G', 'T'};
  constexpr std::array<char, 4> kHets = {'K', 'M', 'R', 'Y'};

  std::vector<SnpSequence> rows;
  const int vw = width_for(spec.n_varieties);
  for (int v = 0; v < spec.n_varieties; ++v) {
    std::string calls(static_cast<std::size_t>(spec.sequence_length), 'A');
    for (char& c : calls) {
      const double u = unit(rng);
      const auto pick = static_cast<std::size_t>(rng() % 4);
      if (u < spec.missing_rate) {
        c = kDefaultMissingSymbol;
      } else if (u < spec.missing_rate + spec.heterozygote_rate) {
        c = kHets[pick];
      } else {
        c = kBases[pick];
      }
    }
    rows.push_back({numbered('V', v, vw), std::move(calls)});
  }
  GenotypeTable genotypes(std::move(rows));

  const Index p = spec.env_variables;
  std::normal_distribution<double> normal;
  Eigen::MatrixXd values(spec.n_environments, kPeriodCount * p);
  for (Index r = 0; r < values.rows(); ++r) {
    for (Index c = 0; c < values.cols(); ++c) values(r, c) = normal(rng);
  }
  // z-score every column so refitting over all environments leaves the data unchanged.
  for (Index c = 0; c < values.cols(); ++c) {
    auto col = values.col(c);
    const double mean = col.mean();
    col.array() -= mean;
    const double sd = std::sqrt(col.squaredNorm() / static_cast<double>(values.rows() - 1));
    if (sd > 0.0) col /= sd;
  }
  std::vector<std::string> env_ids, variables;
  const int ew = width_for(spec.n_environments);
  for (int e = 0; e < spec.n_environments; ++e) env_ids.push_back(numbered('E', e, ew));
  for (Index j = 0; j < p; ++j) variables.push_back("x" + std::to_string(j + 1));
  EnvCovariateTable env(env_ids, variables, values);

  std::vector<std::pair<int, int>> pairs;
  for (int v = 0; v < spec.n_varieties; ++v) {
    for (int e = 0; e < spec.n_environments; ++e) pairs.emplace_back(v, e);
  }
  if (spec.observation_fraction < 1.0) {
    std::shuffle(pairs.begin(), pairs.end(), rng);
    const auto keep = std::max<std::size_t>(
        2, static_cast<std::size_t>(std::llround(spec.observation_fraction * static_cast<double>(pairs.size()))));
    pairs.resize(std::min(keep, pairs.size()));
    std::sort(pairs.begin(), pairs.end());
  }

  const std::vector<int> grid = {std::max(1, spec.truth.spectrum_k)};
  const auto options = build_genotype_options(spec.genotype_kernel, genotypes, grid);
  const auto env_gram = build_environment_gram(spec.environment_kernel, env);
  const ProductKernel kernel(options.front().gram, env_gram, spec.mode);
  Observations obs;
  for (const auto& [v, e] : pairs) {
    obs.variety.push_back(v);
    obs.environment.push_back(e);
  }
  const Eigen::MatrixXd k = kernel.correlation(spec.truth, obs, obs);
  const Eigen::VectorXd z = sample_prior(k, spec.truth.nu, spec.truth.varsigma, spec.trend, rng());

  std::vector<TrialRecord> records;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto [v, e] = pairs[i];
    TrialRecord r;
    r.variety_id = genotypes[static_cast<std::size_t>(v)].variety_id;
    r.environment_id = env_ids[static_cast<std::size_t>(e)];
    r.location = "site" + std::to_string(e % 7 + 1);
    r.year = 2000 + e / 7;
    r.trait = spec.trait;
    r.value = z(static_cast<Index>(i));
    records.push_back(std::move(r));
  }
  return make_dataset(std::move(records), std::move(genotypes), std::move(env), spec.trait);
}

void write_dataset_files(const Dataset& data, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const auto open = [&](const char* name) {
    std::ofstream out(dir / name);
    if (!out) throw Error("cannot write " + (dir / name).string());
    return out;
  };
  {
    auto out = open("trials.csv");
    write_trials(data.records, out);
  }
  {
    auto out = open("genotypes.csv");
    write_genotypes(data.genotypes, out);
  }
  {
    auto out = open("env.csv");
    write_env(data.env_covariates, out);
  }
}

}  // namespace gxe
