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

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gxe/factor_gram.hpp"
#include "gxe/kernels.hpp"

namespace gxe {

/// Averaging baselines: all training data, same variety, same environment.
enum class BaselineKind { global_avg, variety_avg, env_avg };

std::string_view to_string(BaselineKind kind);

/// A prediction method: either a GP with a (environment, genotype) kernel
/// pair and a combination mode, or an averaging baseline.
struct MethodSpec {
  bool is_baseline = false;
  int preset = 5;  // GP1..GP9
  EnvironmentKernel environment = EnvironmentKernel::exp_eucl;
  GenotypeKernel genotype = GenotypeKernel::exp_hamming;
  CombinationMode mode = CombinationMode::full;
  BaselineKind baseline = BaselineKind::global_avg;

  /// Canonical name, e.g. "GP5~" or "GLO_A".
  std::string name() const;
};

/// GP1..GP9 map to the environment kernel (GAU-EUCL, EXP-EUCL, GAK) in
/// blocks of three and the genotype kernel (GAU-GBLUP, EXP-HAM, SPE)
/// within each block.
MethodSpec gp_preset(int number, CombinationMode mode = CombinationMode::full);

/// Parses "GP5~", "GP5", "GP5x", "GLO_A", ... An explicit `mode`
/// overrides any suffix. Throws UsageError listing the valid names.
MethodSpec parse_method(std::string_view text, std::optional<CombinationMode> mode = std::nullopt);

/// All GP presets in every mode followed by the baselines.
std::vector<std::string> valid_method_names();

}  // namespace gxe
