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
#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "gxe/csv.hpp"
#include "gxe/error.hpp"
#include "gxe/model.hpp"

namespace gxe {
namespace {

constexpr int kFormatVersion = 1;

std::vector<std::string> training_environments(const Dataset& data, const std::vector<std::size_t>& rows) {
  std::set<std::string> ids;
  for (std::size_t r : rows) ids.insert(data.records.at(r).environment_id);
  return {ids.begin(), ids.end()};
}

nlohmann::json hyper_to_json(const Hyperparameters& h) {
  return {{"theta_g", h.theta_g}, {"theta_e", h.theta_e},       {"alpha", h.weights.alpha},
          {"beta", h.weights.beta}, {"gamma", h.weights.gamma}, {"varsigma", h.varsigma},
          {"nu", h.nu},             {"spectrum_k", h.spectrum_k}};
}

Hyperparameters hyper_from_json(const nlohmann::json& j) {
  Hyperparameters h;
  h.theta_g = j.at("theta_g").get<double>();
  h.theta_e = j.at("theta_e").get<double>();
  h.weights = {j.at("alpha").get<double>(), j.at("beta").get<double>(), j.at("gamma").get<double>()};
  h.varsigma = j.at("varsigma").get<double>();
  h.nu = j.at("nu").get<double>();
  h.spectrum_k = j.at("spectrum_k").get<int>();
  return h;
}

}  // namespace

FitContext make_fit_context(const GenotypeTable& genotypes, const EnvCovariateTable& env, const MethodSpec& method) {
  if (method.is_baseline) throw UsageError("baseline " + method.name() + " has no GP model");
  FitContext c;
  c.genotypes = std::make_shared<const GenotypeTable>(genotypes);
  c.env = std::make_shared<const EnvCovariateTable>(env);
  c.method = method;
  c.genotype_options = build_genotype_options(method.genotype, genotypes);
  return c;
}

GxeModel GxeModel::fit(const Dataset& data, const FitContext& context, const std::vector<std::size_t>& train_rows,
                       const OptimizerConfig& config) {
  if (train_rows.size() < 2) throw DomainError("fit: need at least two training records");
  GxeModel m;
  m.context_ = context;
  m.trait_ = data.trait;
  m.reference_envs_ = training_environments(data, train_rows);
  const EnvCovariateTable normalized = normalize_env(*context.env, m.reference_envs_, &m.warnings_);
  m.environment_gram_ = build_environment_gram(context.method.environment, normalized);

  FitProblem problem;
  problem.genotype_options = context.genotype_options;
  problem.environment = m.environment_gram_;
  problem.mode = context.method.mode;
  m.z_.resize(static_cast<Index>(train_rows.size()));
  for (std::size_t i = 0; i < train_rows.size(); ++i) {
    const TrialRecord& rec = data.records.at(train_rows[i]);
    m.train_ids_.push_back({rec.variety_id, rec.environment_id});
    m.z_(static_cast<Index>(i)) = rec.value;
  }
  for (const Target& t : m.train_ids_) {
    const auto idx = m.resolve(t);
    if (!idx) throw StructuralError("fit: training record " + t.variety_id + "/" + t.environment_id +
                                    " has no covariates");
    problem.train.variety.push_back(idx->first);
    problem.train.environment.push_back(idx->second);
  }
  problem.z = m.z_;

  ProblemFit result = fit_problem(problem, config);
  m.hyper_ = result.fit.hyper;
  m.trace_ = std::move(result.fit.trace);
  m.grid_ = result.grid;
  m.genotype_gram_ = problem.genotype_options.at(result.option).gram;
  m.warnings_.insert(m.warnings_.end(), m.trace_.warnings.begin(), m.trace_.warnings.end());
  m.build();
  return m;
}

GxeModel GxeModel::fit(const Dataset& data, const MethodSpec& method, const OptimizerConfig& config) {
  std::vector<std::size_t> rows(data.size());
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
  return fit(data, make_fit_context(data.genotypes, data.env_covariates, method), rows, config);
}

GxeModel::GxeModel(FitContext context, Trait trait, std::vector<std::string> reference_envs,
                   std::vector<Target> train, Eigen::VectorXd z, Hyperparameters hyper)
    : context_(std::move(context)),
      trait_(trait),
      reference_envs_(std::move(reference_envs)),
      train_ids_(std::move(train)),
      z_(std::move(z)),
      hyper_(hyper) {
  if (static_cast<Index>(train_ids_.size()) != z_.size()) throw DomainError("model: ids and responses differ in length");
  build();
}

void GxeModel::build() {
  if (!environment_gram_) {
    const EnvCovariateTable normalized = normalize_env(*context_.env, reference_envs_, &warnings_);
    environment_gram_ = build_environment_gram(context_.method.environment, normalized);
  }
  if (!genotype_gram_) {
    for (const auto& opt : context_.genotype_options) {
      if (opt.spectrum_k == hyper_.spectrum_k) genotype_gram_ = opt.gram;
    }
    if (!genotype_gram_) {
      const std::vector<int> grid = {hyper_.spectrum_k};
      auto options = context_.method.genotype == GenotypeKernel::spectrum
                         ? build_genotype_options(context_.method.genotype, *context_.genotypes, grid)
                         : build_genotype_options(context_.method.genotype, *context_.genotypes);
      genotype_gram_ = options.front().gram;
    }
  }
  train_ = {};
  for (const Target& t : train_ids_) {
    std::string error;
    const auto idx = resolve(t, &error);
    if (!idx) throw StructuralError("model: training point " + error);
    train_.variety.push_back(idx->first);
    train_.environment.push_back(idx->second);
  }
  const ProductKernel kernel(genotype_gram_, environment_gram_, context_.method.mode);
  const Eigen::MatrixXd k = kernel.correlation(hyper_, train_, train_);
  kriging_ = std::make_shared<const KrigingModel>(k, hyper_.varsigma, z_);
  hyper_.nu = kriging_->nu_hat();
}

std::optional<std::pair<Index, Index>> GxeModel::resolve(const Target& target, std::string* error) const {
  const auto v = context_.genotypes->find(target.variety_id);
  if (!v) {
    if (error) *error = "unknown variety " + target.variety_id;
    return std::nullopt;
  }
  const auto e = context_.env->find(target.environment_id);
  if (!e) {
    if (error) *error = "unknown environment " + target.environment_id;
    return std::nullopt;
  }
  return std::pair{static_cast<Index>(*v), static_cast<Index>(*e)};
}

PredictiveDistribution GxeModel::predict(const Observations& points) const {
  const ProductKernel kernel(genotype_gram_, environment_gram_, context_.method.mode);
  return kriging_->predict(kernel.correlation(hyper_, points, train_));
}

PredictiveDistribution GxeModel::predict(const std::vector<Target>& targets) const {
  Observations points;
  for (const Target& t : targets) {
    std::string error;
    const auto idx = resolve(t, &error);
    if (!idx) throw StructuralError(error);
    points.variety.push_back(idx->first);
    points.environment.push_back(idx->second);
  }
  return predict(points);
}

nlohmann::json GxeModel::to_json() const {
  nlohmann::json doc;
  doc["format"] = "gxe-model";
  doc["version"] = kFormatVersion;
  doc["method"] = context_.method.name();
  doc["mode"] = std::string(to_string(context_.method.mode));
  doc["trait"] = std::string(to_string(trait_));
  doc["hyperparameters"] = hyper_to_json(hyper_);
  doc["m_hat"] = m_hat();
  doc["nu_hat"] = nu_hat();
  doc["nll"] = nll();
  doc["reference_environments"] = reference_envs_;
  auto& train = doc["training"];
  train = nlohmann::json::array();
  for (std::size_t i = 0; i < train_ids_.size(); ++i) {
    train.push_back({train_ids_[i].variety_id, train_ids_[i].environment_id, z_(static_cast<Index>(i))});
  }
  const GenotypeTable& g = *context_.genotypes;
  doc["genotypes"]["missing"] = std::string(1, g.missing_symbol());
  auto& seqs = doc["genotypes"]["rows"];
  seqs = nlohmann::json::array();
  for (const auto& row : g.rows()) seqs.push_back({row.variety_id, row.calls});
  const EnvCovariateTable& env = *context_.env;
  doc["environment"]["ids"] = env.ids();
  doc["environment"]["variables"] = env.variables();
  auto& values = doc["environment"]["values"];
  values = nlohmann::json::array();
  for (Index r = 0; r < env.values().rows(); ++r) {
    std::vector<double> row(env.values().row(r).begin(), env.values().row(r).end());
    values.push_back(row);
  }
  return doc;
}

GxeModel GxeModel::from_json(const nlohmann::json& doc) {
  try {
    if (doc.at("format") != "gxe-model") throw ParseError("model: not a gxe model document");
    if (doc.at("version").get<int>() != kFormatVersion) throw ParseError("model: unsupported format version");
    const MethodSpec method = parse_method(doc.at("method").get<std::string>());
    const Trait trait = parse_trait(doc.at("trait").get<std::string>());
    const Hyperparameters hyper = hyper_from_json(doc.at("hyperparameters"));

    std::vector<SnpSequence> rows;
    for (const auto& r : doc.at("genotypes").at("rows")) rows.push_back({r.at(0).get<std::string>(), r.at(1).get<std::string>()});
    const std::string missing = doc.at("genotypes").at("missing").get<std::string>();
    if (missing.size() != 1) throw ParseError("model: missing symbol must be one character");
    GenotypeTable genotypes(std::move(rows), missing[0]);

    const auto& e = doc.at("environment");
    auto ids = e.at("ids").get<std::vector<std::string>>();
    auto variables = e.at("variables").get<std::vector<std::string>>();
    const auto& values_json = e.at("values");
    Eigen::MatrixXd values(static_cast<Index>(values_json.size()), kPeriodCount * static_cast<Index>(variables.size()));
    for (Index r = 0; r < values.rows(); ++r) {
      const auto row = values_json.at(static_cast<std::size_t>(r)).get<std::vector<double>>();
      if (static_cast<Index>(row.size()) != values.cols()) throw ParseError("model: ragged environment row");
      for (Index c = 0; c < values.cols(); ++c) values(r, c) = row[static_cast<std::size_t>(c)];
    }
    EnvCovariateTable env(std::move(ids), std::move(variables), std::move(values));

    std::vector<Target> train;
    std::vector<double> z;
    for (const auto& t : doc.at("training")) {
      train.push_back({t.at(0).get<std::string>(), t.at(1).get<std::string>()});
      z.push_back(t.at(2).get<double>());
    }
    FitContext context;
    context.genotypes = std::make_shared<const GenotypeTable>(std::move(genotypes));
    context.env = std::make_shared<const EnvCovariateTable>(std::move(env));
    context.method = method;
    return GxeModel(std::move(context), trait, doc.at("reference_environments").get<std::vector<std::string>>(),
                    std::move(train), Eigen::Map<const Eigen::VectorXd>(z.data(), static_cast<Index>(z.size())),
                    hyper);
  } catch (const nlohmann::json::exception& ex) {
    throw ParseError(std::string("model: malformed document: ") + ex.what());
  }
}

void GxeModel::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << to_json().dump(1) << '\n';
}

GxeModel GxeModel::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& ex) {
    throw ParseError(path.string() + ": " + ex.what());
  }
  return from_json(doc);
}

}  // namespace gxe
