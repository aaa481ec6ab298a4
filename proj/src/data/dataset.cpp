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
#include <fstream>
#include <ostream>

#include "gxe/csv.hpp"
#include "gxe/data.hpp"
#include "gxe/error.hpp"

namespace gxe {

Trait parse_trait(std::string_view name) {
  if (name == "yield") return Trait::yield;
  if (name == "protein") return Trait::protein;
  throw ParseError("unknown trait '" + std::string(name) + "' (expected yield or protein)");
}

std::string_view to_string(Trait trait) { return trait == Trait::yield ? "yield" : "protein"; }

std::vector<TrialRecord> parse_trials(std::istream& in, std::string_view source) {
  const csv::Table table = csv::read(in, source);
  const auto c_var = table.column("variety_id", source);
  const auto c_env = table.column("environment_id", source);
  const auto c_loc = table.column("location", source);
  const auto c_year = table.column("year", source);
  const auto c_trait = table.column("trait", source);
  const auto c_value = table.column("value", source);
  std::vector<TrialRecord> out;
  out.reserve(table.rows.size());
  for (const auto& row : table.rows) {
    const auto where = std::string(source) + ":" + std::to_string(row.line);
    TrialRecord rec;
    rec.variety_id = row.fields[c_var];
    rec.environment_id = row.fields[c_env];
    rec.location = row.fields[c_loc];
    rec.year = row.fields[c_year].empty() ? 0 : static_cast<int>(csv::parse_int(row.fields[c_year], where + " year"));
    rec.trait = parse_trait(row.fields[c_trait]);
    rec.value = csv::parse_double(row.fields[c_value], where + " value");
    if (!std::isfinite(rec.value)) throw ParseError(where + ": non-finite trait value");
    out.push_back(std::move(rec));
  }
  return out;
}

std::vector<TrialRecord> load_trials(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  return parse_trials(in, path.string());
}

void write_trials(const std::vector<TrialRecord>& records, std::ostream& out) {
  out << "variety_id,environment_id,location,year,trait,value\n";
  for (const auto& r : records) {
    out << r.variety_id << ',' << r.environment_id << ',' << r.location << ',' << r.year << ','
        << to_string(r.trait) << ',' << csv::format_double(r.value) << '\n';
  }
}

Eigen::VectorXd Dataset::responses() const {
  Eigen::VectorXd z(static_cast<Index>(records.size()));
  for (std::size_t i = 0; i < records.size(); ++i) z(static_cast<Index>(i)) = records[i].value;
  return z;
}

Dataset make_dataset(std::vector<TrialRecord> records, GenotypeTable genotypes, EnvCovariateTable env,
                     Trait trait, AssemblyReport* report) {
  AssemblyReport local;
  Dataset ds;
  ds.trait = trait;
  for (auto& rec : records) {
    if (rec.trait != trait) {
      ++local.other_trait;
      continue;
    }
    const auto v = genotypes.find(rec.variety_id);
    if (!v) {
      ++local.unknown_variety;
      continue;
    }
    const auto e = env.find(rec.environment_id);
    if (!e) {
      ++local.unknown_environment;
      continue;
    }
    ds.variety.push_back(*v);
    ds.environment.push_back(*e);
    ds.records.push_back(std::move(rec));
  }
  if (report) *report = local;
  if (ds.records.empty()) {
    throw StructuralError("empty join: no " + std::string(to_string(trait)) +
                          " record matches both genotype and environment tables");
  }
  if (ds.records.size() < 2) throw StructuralError("dataset needs at least 2 records");
  ds.genotypes = std::move(genotypes);
  ds.env_covariates = std::move(env);
  return ds;
}

Dataset assemble_dataset(const std::filesystem::path& trials, const std::filesystem::path& genotypes,
                         const std::filesystem::path& env, Trait trait, AssemblyReport* report,
                         char missing) {
  return make_dataset(load_trials(trials), load_genotypes(genotypes, missing), load_env(env), trait,
                      report);
}

}  // namespace gxe
