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

#include <array>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

namespace gxe {

using Index = Eigen::Index;

inline constexpr char kDefaultMissingSymbol = '-';

enum class Trait { yield, protein };

Trait parse_trait(std::string_view name);
std::string_view to_string(Trait trait);

/// True for the IUPAC calls used in the marker data: A, C, G, T and the
/// heterozygote codes K, M, R, Y.
bool is_snp_symbol(char c);

struct SnpSequence {
  std::string variety_id;
  std::string calls;
};

/// Marker strings for a set of varieties. All sequences share one length
/// and contain only SNP symbols or the table's missing symbol.
class GenotypeTable {
 public:
  GenotypeTable() = default;
  explicit GenotypeTable(std::vector<SnpSequence> rows, char missing = kDefaultMissingSymbol,
                         std::vector<std::string> marker_names = {});

  std::size_t size() const { return rows_.size(); }
  std::size_t marker_count() const { return marker_count_; }
  char missing_symbol() const { return missing_; }
  const SnpSequence& operator[](std::size_t i) const { return rows_[i]; }
  const std::vector<SnpSequence>& rows() const { return rows_; }
  std::optional<std::size_t> find(std::string_view variety_id) const;
  /// Column name from a wide-format file, or "marker <j+1>".
  std::string marker_name(std::size_t j) const;

 private:
  std::vector<SnpSequence> rows_;
  std::vector<std::string> marker_names_;
  std::unordered_map<std::string, std::size_t> index_;
  std::size_t marker_count_ = 0;
  char missing_ = kDefaultMissingSymbol;
};

/// Reads `variety_id,sequence` or wide `variety_id,<marker>,...` CSV.
GenotypeTable load_genotypes(const std::filesystem::path& path,
                             char missing = kDefaultMissingSymbol);
GenotypeTable parse_genotypes(std::istream& in, std::string_view source,
                              char missing = kDefaultMissingSymbol);
void write_genotypes(const GenotypeTable& table, std::ostream& out);

/// Major-allele dosage encoding: one row per variety, one column per
/// marker, entries in [0, 2].
struct BiallelicMatrix {
  std::vector<std::string> variety_ids;
  Eigen::MatrixXd dosage;
  std::vector<char> major_allele;
};

BiallelicMatrix encode_biallelic(const GenotypeTable& table);

/// Growing-season periods in storage order.
inline constexpr std::array<std::string_view, 6> kPeriods = {"winter", "march", "april",
                                                             "may",    "june",  "july"};
inline constexpr Index kPeriodCount = static_cast<Index>(kPeriods.size());

std::optional<Index> period_index(std::string_view name);

/// Meteorological covariates: one row per environment, columns laid out
/// period-major (column = period * p + variable).
class EnvCovariateTable {
 public:
  EnvCovariateTable() = default;
  EnvCovariateTable(std::vector<std::string> environment_ids, std::vector<std::string> variables,
                    Eigen::MatrixXd values);

  std::size_t size() const { return ids_.size(); }
  Index variable_count() const { return static_cast<Index>(variables_.size()); }
  const std::vector<std::string>& ids() const { return ids_; }
  const std::vector<std::string>& variables() const { return variables_; }
  const Eigen::MatrixXd& values() const { return values_; }
  std::optional<std::size_t> find(std::string_view environment_id) const;

  /// 6 x p matrix of one environment, rows are periods.
  Eigen::MatrixXd series(std::size_t env) const;

 private:
  std::vector<std::string> ids_;
  std::vector<std::string> variables_;
  Eigen::MatrixXd values_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Reads long-format `environment_id,period,variable,value` CSV.
EnvCovariateTable load_env(const std::filesystem::path& path);
EnvCovariateTable parse_env(std::istream& in, std::string_view source);
void write_env(const EnvCovariateTable& table, std::ostream& out);

/// Column-wise z-scores using mean and sample standard deviation (n-1)
/// over `reference_ids` only; the same affine map is applied to every
/// environment. Columns without spread over the reference set are centered
/// and left unscaled, and a message is appended to `warnings`.
EnvCovariateTable normalize_env(const EnvCovariateTable& table,
                                const std::vector<std::string>& reference_ids,
                                std::vector<std::string>* warnings = nullptr);

struct TrialRecord {
  std::string variety_id;
  std::string environment_id;
  std::string location;
  int year = 0;
  Trait trait = Trait::yield;
  double value = 0.0;
};

std::vector<TrialRecord> load_trials(const std::filesystem::path& path);
std::vector<TrialRecord> parse_trials(std::istream& in, std::string_view source);
void write_trials(const std::vector<TrialRecord>& records, std::ostream& out);

struct AssemblyReport {
  std::size_t other_trait = 0;
  std::size_t unknown_variety = 0;
  std::size_t unknown_environment = 0;

  std::size_t dropped() const { return unknown_variety + unknown_environment; }
};

/// Records of one trait joined with both covariate tables. `variety` and
/// `environment` hold per-record row indices into the tables.
struct Dataset {
  std::vector<TrialRecord> records;
  GenotypeTable genotypes;
  EnvCovariateTable env_covariates;
  Trait trait = Trait::yield;
  std::vector<std::size_t> variety;
  std::vector<std::size_t> environment;

  std::size_t size() const { return records.size(); }
  Eigen::VectorXd responses() const;
};

Dataset make_dataset(std::vector<TrialRecord> records, GenotypeTable genotypes,
                     EnvCovariateTable env, Trait trait, AssemblyReport* report = nullptr);

Dataset assemble_dataset(const std::filesystem::path& trials,
                         const std::filesystem::path& genotypes, const std::filesystem::path& env,
                         Trait trait, AssemblyReport* report = nullptr,
                         char missing = kDefaultMissingSymbol);

}  // namespace gxe
