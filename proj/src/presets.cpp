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

#include <sstream>

#include "gxe/error.hpp"
#include "gxe/presets.hpp"

namespace gxe {

std::string_view to_string(BaselineKind kind) {
  switch (kind) {
    case BaselineKind::global_avg: return "GLO_A";
    case BaselineKind::variety_avg: return "VAR_A";
    case BaselineKind::env_avg: return "ENV_A";
  }
  return "?";
}

std::string MethodSpec::name() const {
  if (is_baseline) return std::string(to_string(baseline));
  return "GP" + std::to_string(preset) + std::string(to_string(mode));
}

MethodSpec gp_preset(int number, CombinationMode mode) {
  if (number < 1 || number > 9) throw UsageError("GP preset number must be 1..9");
  constexpr EnvironmentKernel env[] = {EnvironmentKernel::gau_eucl, EnvironmentKernel::exp_eucl,
                                       EnvironmentKernel::gak};
  constexpr GenotypeKernel geno[] = {GenotypeKernel::gau_gblup, GenotypeKernel::exp_hamming,
                                     GenotypeKernel::spectrum};
  MethodSpec spec;
  spec.preset = number;
  spec.environment = env[(number - 1) / 3];
  spec.genotype = geno[(number - 1) % 3];
  spec.mode = mode;
  return spec;
}

std::vector<std::string> valid_method_names() {
  std::vector<std::string> out;
  for (int i = 1; i <= 9; ++i) {
    for (const char* suffix : {"G", "E", "+", "x", "~"}) out.push_back("GP" + std::to_string(i) + suffix);
  }
  for (auto kind : {BaselineKind::global_avg, BaselineKind::variety_avg, BaselineKind::env_avg}) {
    out.emplace_back(to_string(kind));
  }
  return out;
}

MethodSpec parse_method(std::string_view text, std::optional<CombinationMode> mode) {
  auto fail = [&]() -> UsageError {
    std::ostringstream msg;
    msg << "unknown method '" << text << "'; valid methods: GP1..GP9 with optional mode suffix "
        << "(G, E, +, x, ~), e.g.";
    for (int i = 1; i <= 9; ++i) msg << " GP" << i << "~";
    msg << ", GLO_A, VAR_A, ENV_A";
    return UsageError(msg.str());
  };
  for (auto kind : {BaselineKind::global_avg, BaselineKind::variety_avg, BaselineKind::env_avg}) {
    if (text == to_string(kind)) {
      MethodSpec spec;
      spec.is_baseline = true;
      spec.baseline = kind;
      return spec;
    }
  }
  if (text.size() < 3 || text.substr(0, 2) != "GP" || text[2] < '1' || text[2] > '9') throw fail();
  const int number = text[2] - '0';
  CombinationMode parsed = CombinationMode::full;
  const auto suffix = text.substr(3);
  if (!suffix.empty()) {
    try {
      parsed = parse_mode(suffix);
    } catch (const UsageError&) {
      throw fail();
    }
  }
  return gp_preset(number, mode.value_or(parsed));
}

}  // namespace gxe
