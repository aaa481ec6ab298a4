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

#include <cmath>

#include "gxe/error.hpp"
#include "gxe/genotype_kernels.hpp"
#include "gxe/kernels.hpp"

namespace gxe {

double hamming_distance(std::string_view a, std::string_view b, char missing) {
  if (a.size() != b.size()) throw DomainError("hamming_distance: sequences differ in length");
  if (a.empty()) throw DomainError("hamming_distance: empty sequences");
  std::size_t differing = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == missing || b[i] == missing) continue;
    if (a[i] != b[i]) ++differing;
  }
  return static_cast<double>(differing) / static_cast<double>(a.size());
}

double exp_hamming_kernel(std::string_view a, std::string_view b, double theta_g, char missing) {
  return exp_kernel(hamming_distance(a, b, missing), theta_g);
}

double SpectrumProfile::squared_norm() const {
  double s = 0.0;
  for (const auto& [kmer, c] : counts) s += static_cast<double>(c) * c;
  return s;
}

SpectrumProfile spectrum_profile(std::string_view seq, int k, char missing) {
  if (k <= 0) throw DomainError("spectrum_profile: k must be positive");
  const auto width = static_cast<std::size_t>(k);
  if (width > seq.size()) {
    throw DomainError("spectrum_profile: k = " + std::to_string(k) + " exceeds sequence length " +
                      std::to_string(seq.size()));
  }
  SpectrumProfile out;
  out.k = k;
  // Length of the missing-free run ending at the current position.
  std::size_t clean = 0;
  for (std::size_t i = 0; i < seq.size(); ++i) {
    clean = seq[i] == missing ? 0 : clean + 1;
    if (clean >= width) ++out.counts[std::string(seq.substr(i + 1 - width, width))];
  }
  return out;
}

double spectrum_inner(const SpectrumProfile& a, const SpectrumProfile& b) {
  if (a.k != b.k) throw DomainError("spectrum_inner: profiles use different k");
  // Merge walk over the two sorted maps.
  double s = 0.0;
  auto ia = a.counts.begin();
  auto ib = b.counts.begin();
  while (ia != a.counts.end() && ib != b.counts.end()) {
    if (ia->first < ib->first) {
      ++ia;
    } else if (ib->first < ia->first) {
      ++ib;
    } else {
      s += static_cast<double>(ia->second) * ib->second;
      ++ia;
      ++ib;
    }
  }
  return s;
}

double spectrum_kernel(const SpectrumProfile& a, const SpectrumProfile& b) {
  const double na = a.squared_norm();
  const double nb = b.squared_norm();
  if (na == 0.0) throw DomainError("spectrum_kernel: first sequence has no valid window");
  if (nb == 0.0) throw DomainError("spectrum_kernel: second sequence has no valid window");
  return spectrum_inner(a, b) / std::sqrt(na * nb);
}

double spectrum_kernel(std::string_view a, std::string_view b, int k, char missing) {
  return spectrum_kernel(spectrum_profile(a, k, missing), spectrum_profile(b, k, missing));
}

}  // namespace gxe
