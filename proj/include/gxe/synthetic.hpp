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
#include <filesystem>

#include "gxe/data.hpp"
#include "gxe/factor_gram.hpp"
#include "gxe/gp.hpp"
#include "gxe/kernels.hpp"

namespace gxe {

/// Recipe for a synthetic dataset drawn from a known GP.
struct SyntheticSpec {
  int n_varieties = 20;
  int n_environments = 15;
  int sequence_length = 200;
  int env_variables = 2;
  /// Share of all variety x environment pairs that become trial records.
  double observation_fraction = 1.0;
  double heterozygote_rate = 0.05;
  double missing_rate = 0.02;
  GenotypeKernel genotype_kernel = GenotypeKernel::exp_hamming;
  EnvironmentKernel environment_kernel = EnvironmentKernel::exp_eucl;
  CombinationMode mode = CombinationMode::full;
  Hyperparameters truth;
  double trend = 0.0;
  Trait trait = Trait::yield;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Random marker strings and z-scored environment series, then responses
/// sampled from the GP prior of the true kernel. Deterministic in the seed.
Dataset generate(const SyntheticSpec& spec);

/// Writes trials.csv, genotypes.csv and env.csv into `dir`.
void write_dataset_files(const Dataset& data, const std::filesystem::path& dir);

}  // namespace gxe
