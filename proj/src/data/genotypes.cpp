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
#include <fstream>
#include <ostream>
#include <sstream>
#include <utility>

#include "gxe/csv.hpp"
#include "gxe/data.hpp"
#include "gxe/error.hpp"

namespace gxe {
namespace {

constexpr std::array<char, 4> kBases = {'A', 'C', 'G', 'T'};

// Allele pair of an IUPAC call, as indices into kBases.
std::pair<int, int> allele_pair(char call) {
  switch (call) {
    case 'A': return {0, 0};
    case 'C': return {1, 1};
    case 'G': return {2, 2};
    case 'T': return {3, 3};
    case 'K': return {2, 3};
    case 'M': return {0, 1};
    case 'R': return {0, 2};
    case 'Y': return {1, 3};
    default: return {-1, -1};
  }
}

}  // namespace

bool is_snp_symbol(char c) { return allele_pair(c).first >= 0; }

GenotypeTable::GenotypeTable(std::vector<SnpSequence> rows, char missing,
                             std::vector<std::string> marker_names)
    : rows_(std::move(rows)), marker_names_(std::move(marker_names)), missing_(missing) {
  if (is_snp_symbol(missing_)) {
    throw DomainError(std::string("missing symbol '") + missing_ + "' collides with a SNP call");
  }
  if (!rows_.empty()) marker_count_ = rows_.front().calls.size();
  for (std::size_t r = 0; r < rows_.size(); ++r) {
    const auto& row = rows_[r];
    if (row.calls.size() != marker_count_) {
      throw StructuralError("length mismatch at " + row.variety_id + ": expected " +
                            std::to_string(marker_count_) + " markers, got " +
                            std::to_string(row.calls.size()));
    }
    for (std::size_t j = 0; j < row.calls.size(); ++j) {
      const char c = row.calls[j];
      if (c != missing_ && !is_snp_symbol(c)) {
        throw ParseError("unknown symbol " + std::string(1, c) + " at position " +
                         std::to_string(j + 1) + " in " + row.variety_id);
      }
    }
    if (!index_.emplace(row.variety_id, r).second) {
      throw StructuralError("duplicate variety " + row.variety_id);
    }
  }
  if (!marker_names_.empty() && marker_names_.size() != marker_count_) {
    throw StructuralError("marker name count does not match sequence length");
  }
}

std::optional<std::size_t> GenotypeTable::find(std::string_view variety_id) const {
  auto it = index_.find(std::string(variety_id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::string GenotypeTable::marker_name(std::size_t j) const {
  if (j < marker_names_.size()) return marker_names_[j];
  return "marker " + std::to_string(j + 1);
}

GenotypeTable parse_genotypes(std::istream& in, std::string_view source, char missing) {
  const csv::Table table = csv::read(in, source);
  if (table.header.empty() || table.header[0] != "variety_id") {
    throw ParseError(std::string(source) + ": first column must be variety_id");
  }
  std::vector<SnpSequence> rows;
  rows.reserve(table.rows.size());
  if (table.header.size() == 2 && table.header[1] == "sequence") {
    for (const auto& row : table.rows) rows.push_back({row.fields[0], row.fields[1]});
    return GenotypeTable(std::move(rows), missing);
  }
  // Wide layout: one single-symbol column per marker; empty cells are missing.
  std::vector<std::string> markers(table.header.begin() + 1, table.header.end());
  for (const auto& row : table.rows) {
    SnpSequence seq{row.fields[0], {}};
    seq.calls.reserve(markers.size());
    for (std::size_t j = 1; j < row.fields.size(); ++j) {
      const auto& cell = row.fields[j];
      if (cell.empty()) {
        seq.calls.push_back(missing);
      } else if (cell.size() == 1) {
        seq.calls.push_back(cell[0]);
      } else {
        throw ParseError(std::string(source) + ":" + std::to_string(row.line) +
                         ": unknown symbol " + cell + " at position " + std::to_string(j));
      }
    }
    rows.push_back(std::move(seq));
  }
  return GenotypeTable(std::move(rows), missing, std::move(markers));
}

GenotypeTable load_genotypes(const std::filesystem::path& path, char missing) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  return parse_genotypes(in, path.string(), missing);
}

void write_genotypes(const GenotypeTable& table, std::ostream& out) {
  out << "variety_id,sequence\n";
  for (const auto& row : table.rows()) out << row.variety_id << ',' << row.calls << '\n';
}

BiallelicMatrix encode_biallelic(const GenotypeTable& table) {
  if (table.size() == 0) throw DomainError("encode_biallelic: empty genotype table");
  const auto n = static_cast<Index>(table.size());
  const auto m = static_cast<Index>(table.marker_count());
  BiallelicMatrix out;
  out.dosage.resize(n, m);
  out.major_allele.resize(static_cast<std::size_t>(m));
  out.variety_ids.reserve(table.size());
  for (const auto& row : table.rows()) out.variety_ids.push_back(row.variety_id);

  for (Index j = 0; j < m; ++j) {
    std::array<int, 4> counts{};
    for (Index i = 0; i < n; ++i) {
      const auto [a, b] = allele_pair(table[static_cast<std::size_t>(i)].calls[j]);
      if (a < 0) continue;
      ++counts[a];
      ++counts[b];
    }
    // max_element returns the first maximum, i.e. the lexicographically
    // smallest base among ties.
    const auto major = static_cast<int>(std::max_element(counts.begin(), counts.end()) - counts.begin());
    if (counts[major] == 0) {
      throw StructuralError("all calls missing at " + table.marker_name(static_cast<std::size_t>(j)));
    }
    out.major_allele[static_cast<std::size_t>(j)] = kBases[major];

    double sum = 0.0;
    int observed = 0;
    for (Index i = 0; i < n; ++i) {
      const auto [a, b] = allele_pair(table[static_cast<std::size_t>(i)].calls[j]);
      if (a < 0) {
        out.dosage(i, j) = -1.0;
        continue;
      }
      const double copies = (a == major ? 1.0 : 0.0) + (b == major ? 1.0 : 0.0);
      out.dosage(i, j) = copies;
      sum += copies;
      ++observed;
    }
    const double mean = sum / observed;
    for (Index i = 0; i < n; ++i) {
      if (out.dosage(i, j) < 0.0) out.dosage(i, j) = mean;
    }
  }
  return out;
}

}  // namespace gxe
