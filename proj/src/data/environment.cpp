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
#include <map>
#include <ostream>
#include <sstream>

#include "gxe/csv.hpp"
#include "gxe/data.hpp"
#include "gxe/error.hpp"

namespace gxe {

std::optional<Index> period_index(std::string_view name) {
  for (Index t = 0; t < kPeriodCount; ++t) {
    if (kPeriods[static_cast<std::size_t>(t)] == name) return t;
  }
  return std::nullopt;
}

EnvCovariateTable::EnvCovariateTable(std::vector<std::string> environment_ids,
                                     std::vector<std::string> variables, Eigen::MatrixXd values)
    : ids_(std::move(environment_ids)), variables_(std::move(variables)), values_(std::move(values)) {
  if (variables_.empty()) throw StructuralError("environment table has no variables");
  if (values_.rows() != static_cast<Index>(ids_.size()) ||
      values_.cols() != kPeriodCount * static_cast<Index>(variables_.size())) {
    throw StructuralError("environment table shape does not match ids x (6 periods x variables)");
  }
  if (!values_.allFinite()) throw StructuralError("environment table contains non-finite values");
  for (std::size_t e = 0; e < ids_.size(); ++e) {
    if (!index_.emplace(ids_[e], e).second) {
      throw StructuralError("duplicate environment " + ids_[e]);
    }
  }
}

std::optional<std::size_t> EnvCovariateTable::find(std::string_view environment_id) const {
  auto it = index_.find(std::string(environment_id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

Eigen::MatrixXd EnvCovariateTable::series(std::size_t env) const {
  const Index p = variable_count();
  Eigen::MatrixXd out(kPeriodCount, p);
  for (Index t = 0; t < kPeriodCount; ++t) {
    out.row(t) = values_.block(static_cast<Index>(env), t * p, 1, p);
  }
  return out;
}

EnvCovariateTable parse_env(std::istream& in, std::string_view source) {
  const csv::Table table = csv::read(in, source);
  const auto c_env = table.column("environment_id", source);
  const auto c_period = table.column("period", source);
  const auto c_var = table.column("variable", source);
  const auto c_value = table.column("value", source);

  std::vector<std::string> env_ids;
  std::map<std::string, std::size_t> env_pos;
  std::vector<std::string> variables;
  std::map<std::string, std::size_t> var_pos;
  for (const auto& row : table.rows) {
    if (env_pos.emplace(row.fields[c_env], env_ids.size()).second) env_ids.push_back(row.fields[c_env]);
    if (var_pos.emplace(row.fields[c_var], variables.size()).second) variables.push_back(row.fields[c_var]);
  }
  const Index p = static_cast<Index>(variables.size());
  Eigen::MatrixXd values = Eigen::MatrixXd::Constant(static_cast<Index>(env_ids.size()),
                                                     kPeriodCount * p, std::nan(""));
  for (const auto& row : table.rows) {
    const auto period = period_index(row.fields[c_period]);
    if (!period) {
      throw ParseError(std::string(source) + ":" + std::to_string(row.line) + ": unknown period '" +
                       row.fields[c_period] + "'");
    }
    const auto e = static_cast<Index>(env_pos.at(row.fields[c_env]));
    const auto col = *period * p + static_cast<Index>(var_pos.at(row.fields[c_var]));
    if (!std::isnan(values(e, col))) {
      throw StructuralError(std::string(source) + ":" + std::to_string(row.line) + ": duplicate entry for " +
                            row.fields[c_env] + "/" + row.fields[c_period] + "/" + row.fields[c_var]);
    }
    const double v = csv::parse_double(row.fields[c_value], "value");
    if (!std::isfinite(v)) {
      throw ParseError(std::string(source) + ":" + std::to_string(row.line) + ": non-finite value");
    }
    values(e, col) = v;
  }
  for (Index e = 0; e < values.rows(); ++e) {
    for (Index col = 0; col < values.cols(); ++col) {
      if (std::isnan(values(e, col))) {
        throw StructuralError(std::string(source) + ": environment " + env_ids[static_cast<std::size_t>(e)] +
                              " lacks " + variables[static_cast<std::size_t>(col % p)] + " in period " +
                              std::string(kPeriods[static_cast<std::size_t>(col / p)]));
      }
    }
  }
  return EnvCovariateTable(std::move(env_ids), std::move(variables), std::move(values));
}

EnvCovariateTable load_env(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  return parse_env(in, path.string());
}

void write_env(const EnvCovariateTable& table, std::ostream& out) {
  out << "environment_id,period,variable,value\n";
  const Index p = table.variable_count();
  for (std::size_t e = 0; e < table.size(); ++e) {
    for (Index t = 0; t < kPeriodCount; ++t) {
      for (Index v = 0; v < p; ++v) {
        out << table.ids()[e] << ',' << kPeriods[static_cast<std::size_t>(t)] << ','
            << table.variables()[static_cast<std::size_t>(v)] << ','
            << csv::format_double(table.values()(static_cast<Index>(e), t * p + v)) << '\n';
      }
    }
  }
}

EnvCovariateTable normalize_env(const EnvCovariateTable& table,
                                const std::vector<std::string>& reference_ids,
                                std::vector<std::string>* warnings) {
  if (reference_ids.empty()) throw DomainError("normalize_env: empty reference set");
  std::vector<Index> rows;
  rows.reserve(reference_ids.size());
  for (const auto& id : reference_ids) {
    const auto e = table.find(id);
    if (!e) throw StructuralError("normalize_env: unknown reference environment " + id);
    rows.push_back(static_cast<Index>(*e));
  }
  const Eigen::MatrixXd ref = table.values()(rows, Eigen::all);
  const Eigen::RowVectorXd mean = ref.colwise().mean();
  Eigen::RowVectorXd scale = Eigen::RowVectorXd::Ones(ref.cols());
  const Index p = table.variable_count();
  for (Index c = 0; c < ref.cols(); ++c) {
    double sd = 0.0;
    if (ref.rows() > 1) {
      sd = std::sqrt((ref.col(c).array() - mean(c)).square().sum() / static_cast<double>(ref.rows() - 1));
    }
    // Spread below rounding level of the column magnitude counts as constant.
    const double level = std::max(1.0, std::abs(mean(c)));
    if (sd > 1e-12 * level) {
      scale(c) = sd;
    } else if (warnings) {
      warnings->push_back("zero variance for " + table.variables()[static_cast<std::size_t>(c % p)] + " in period " +
                          std::string(kPeriods[static_cast<std::size_t>(c / p)]) + "; centered only");
    }
  }
  Eigen::MatrixXd z = (table.values().rowwise() - mean).array().rowwise() / scale.array();
  return EnvCovariateTable(table.ids(), table.variables(), std::move(z));
}

}  // namespace gxe
