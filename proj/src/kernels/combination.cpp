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

#include "gxe/kernels.hpp"

namespace gxe {

std::string_view to_string(CombinationMode mode) {
  switch (mode) {
    case CombinationMode::g_only: return "G";
    case CombinationMode::e_only: return "E";
    case CombinationMode::additive: return "+";
    case CombinationMode::product: return "x";
    case CombinationMode::full: return "~";
  }
  return "?";
}

CombinationMode parse_mode(std::string_view token) {
  if (token == "G" || token == "g_only") return CombinationMode::g_only;
  if (token == "E" || token == "e_only") return CombinationMode::e_only;
  if (token == "+" || token == "additive") return CombinationMode::additive;
  if (token == "x" || token == "X" || token == "*" || token == "\xC3\x97" || token == "product") {
    return CombinationMode::product;
  }
  if (token == "~" || token == "full") return CombinationMode::full;
  throw UsageError("unknown combination mode '" + std::string(token) + "' (expected G, E, +, x or ~)");
}

ActiveWeights active_weights(CombinationMode mode) {
  switch (mode) {
    case CombinationMode::g_only: return {true, false, false};
    case CombinationMode::e_only: return {false, true, false};
    case CombinationMode::additive: return {true, true, false};
    case CombinationMode::product: return {false, false, true};
    case CombinationMode::full: return {true, true, true};
  }
  return {false, false, false};
}

CombinationWeights CombinationWeights::barycenter(CombinationMode mode) {
  const auto active = active_weights(mode);
  const double share = 1.0 / active.count();
  return {active.alpha ? share : 0.0, active.beta ? share : 0.0, active.gamma ? share : 0.0};
}

bool CombinationWeights::on_simplex(double tol) const {
  return alpha >= 0.0 && beta >= 0.0 && gamma >= 0.0 && std::abs(alpha + beta + gamma - 1.0) <= tol;
}

bool CombinationWeights::consistent_with(CombinationMode mode) const {
  const auto active = active_weights(mode);
  return (active.alpha || alpha == 0.0) && (active.beta || beta == 0.0) && (active.gamma || gamma == 0.0);
}

}  // namespace gxe
