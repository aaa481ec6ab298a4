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

#include <map>
#include <string>
#include <string_view>

#include <Eigen/Dense>

#include "gxe/data.hpp"
#include "gxe/kernels.hpp"

namespace gxe {

/// Fraction of differing positions. A position where either call is the
/// missing symbol counts as a match; heterozygote codes are ordinary
/// symbols.
double hamming_distance(std::string_view a, std::string_view b, char missing = kDefaultMissingSymbol);

/// exp(-d_H / theta_g)
double exp_hamming_kernel(std::string_view a, std::string_view b, double theta_g,
                          char missing = kDefaultMissingSymbol);

/// Euclidean distance between dosage rows divided by sqrt(marker count).
template <typename DerivedA, typename DerivedB>
double gblup_distance(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  if (a.size() != b.size() || a.size() == 0) throw DomainError("gblup: dosage rows differ in length");
  return (a - b).norm() / std::sqrt(static_cast<double>(a.size()));
}

/// Gaussian kernel on the scaled dosage distance.
template <typename DerivedA, typename DerivedB>
double gblup_kernel(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b,
                    double theta_g) {
  return gau_kernel(gblup_distance(a, b), theta_g);
}

/// Counts of contiguous length-k substrings; windows that touch the
/// missing symbol are skipped.
struct SpectrumProfile {
  int k = 1;
  std::map<std::string, int> counts;

  double squared_norm() const;
};

SpectrumProfile spectrum_profile(std::string_view seq, int k, char missing = kDefaultMissingSymbol);

/// Raw inner product of two profiles with the same k.
double spectrum_inner(const SpectrumProfile& a, const SpectrumProfile& b);

/// Cosine-normalized k-spectrum kernel.
double spectrum_kernel(const SpectrumProfile& a, const SpectrumProfile& b);
double spectrum_kernel(std::string_view a, std::string_view b, int k, char missing = kDefaultMissingSymbol);

}  // namespace gxe
