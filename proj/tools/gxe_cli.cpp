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
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "gxe/csv.hpp"
#include "gxe/error.hpp"
#include "gxe/evaluation.hpp"
#include "gxe/model.hpp"
#include "gxe/presets.hpp"
#include "gxe/synthetic.hpp"

namespace fs = std::filesystem;
using namespace gxe;

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct DataPaths {
  std::string trials, genotypes, env;
  std::string missing = std::string(1, kDefaultMissingSymbol);
};

struct OptimizerFlags {
  std::optional<int> max_iters;
  std::optional<double> learning_rate;
  std::optional<double> batch_fraction;

  OptimizerConfig config(std::uint64_t seed) const {
    OptimizerConfig c;
    c.seed = seed;
    if (max_iters) c.max_iters = *max_iters;
    if (learning_rate) c.learning_rate = *learning_rate;
    if (batch_fraction) c.batch_fraction = *batch_fraction;
    c.validate();
    return c;
  }
};

void add_data_flags(CLI::App* cmd, DataPaths& paths, bool required) {
  cmd->add_option("--trials", paths.trials, "Trial records CSV")->required(required)->check(CLI::ExistingFile);
  cmd->add_option("--genotypes", paths.genotypes, "Genotype CSV")->required(required)->check(CLI::ExistingFile);
  cmd->add_option("--env", paths.env, "Environment covariates CSV")->required(required)->check(CLI::ExistingFile);
  cmd->add_option("--missing-symbol", paths.missing, "Missing-call symbol in genotype strings");
}

void add_optimizer_flags(CLI::App* cmd, OptimizerFlags& flags) {
  cmd->add_option("--max-iters", flags.max_iters, "Adam iteration limit");
  cmd->add_option("--learning-rate", flags.learning_rate, "Initial Adam step size");
  cmd->add_option("--batch-fraction", flags.batch_fraction, "Gradient batch size as a fraction of n");
}

char missing_symbol(const DataPaths& paths) {
  if (paths.missing.size() != 1) throw UsageError("--missing-symbol takes exactly one character");
  return paths.missing[0];
}

Dataset load_dataset(const DataPaths& paths, Trait trait) {
  AssemblyReport report;
  Dataset data = assemble_dataset(paths.trials, paths.genotypes, paths.env, trait, &report, missing_symbol(paths));
  if (report.dropped() > 0) {
    std::cerr << "note: dropped " << report.unknown_variety << " record(s) with unknown variety and "
              << report.unknown_environment << " with unknown environment\n";
  }
  return data;
}

std::optional<CombinationMode> mode_flag(const std::string& text) {
  if (text.empty()) return std::nullopt;
  try {
    return parse_mode(text);
  } catch (const Error& ex) {
    throw UsageError(ex.what());
  }
}

Trait trait_flag(const std::string& text) {
  try {
    return parse_trait(text);
  } catch (const Error& ex) {
    throw UsageError(ex.what());
  }
}

std::ofstream open_output(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

void print_hyperparameters(const GxeModel& model, std::ostream& out) {
  const Hyperparameters& h = model.hyperparameters();
  out << "method   " << model.method().name() << "\n"
      << std::setprecision(6) << "theta_G  " << h.theta_g << "\n"
      << "theta_E  " << h.theta_e << "\n"
      << "alpha    " << h.weights.alpha << "\n"
      << "beta     " << h.weights.beta << "\n"
      << "gamma    " << h.weights.gamma << "\n"
      << "varsigma " << h.varsigma << "\n"
      << "nu       " << h.nu << "\n"
      << "m_hat    " << model.m_hat() << "\n";
  if (h.spectrum_k > 0) out << "k        " << h.spectrum_k << "\n";
  out << "nll      " << model.nll() << "\n";
}

int run_fit(const DataPaths& paths, const std::string& method_text, const std::string& mode_text,
            const std::string& trait_text, std::uint64_t seed, const OptimizerFlags& opt, const std::string& out_path,
            const std::string& trace_path) {
  const MethodSpec method = parse_method(method_text, mode_flag(mode_text));
  if (method.is_baseline) throw UsageError("fit needs a GP method; " + method.name() + " is a baseline");
  const OptimizerConfig config = opt.config(seed);
  const Dataset data = load_dataset(paths, trait_flag(trait_text));
  const GxeModel model = GxeModel::fit(data, method, config);
  for (const auto& w : model.warnings()) std::cerr << "warning: " << w << "\n";

  const fs::path model_file = out_path;
  model.save(model_file);
  fs::path trace_file = trace_path;
  if (trace_file.empty()) trace_file = fs::path(model_file).replace_extension(".trace.csv");
  {
    auto out = open_output(trace_file);
    write_trace_csv(model.trace(), out);
  }
  print_hyperparameters(model, std::cout);
  std::cout << "model    " << model_file.string() << "\ntrace    " << trace_file.string() << "\n";
  return 0;
}

int run_cv(const DataPaths& paths, const std::vector<std::string>& methods, const std::string& mode_text,
           const std::string& trait_text, SplitPlan plan, const std::string& scenario_text, int jobs,
           const OptimizerFlags& opt, const std::string& out_dir) {
  try {
    plan.scenario = parse_scenario(scenario_text);
    plan.validate();
  } catch (const DomainError& ex) {
    throw UsageError(ex.what());
  }
  std::vector<MethodSpec> specs;
  for (const auto& m : methods) specs.push_back(parse_method(m, mode_flag(mode_text)));
  EvaluateOptions options;
  options.optimizer = opt.config(plan.seed);
  options.jobs = jobs;
  const Dataset data = load_dataset(paths, trait_flag(trait_text));

  std::vector<MethodEvaluation> results;
  bool any_total_failure = false;
  for (const auto& spec : specs) {
    results.push_back(evaluate(spec, data, plan, options));
    const auto& r = results.back();
    for (const auto& s : r.splits) {
      if (s.failed) std::cerr << r.method.name() << " split " << s.split << " failed: " << s.error << "\n";
    }
    if (r.failed() == static_cast<int>(r.splits.size())) any_total_failure = true;
  }

  const fs::path dir = out_dir;
  fs::create_directories(dir);
  {
    auto out = open_output(dir / "splits.csv");
    write_split_csv(results, out);
  }
  {
    auto out = open_output(dir / "summary.csv");
    write_summary_csv(results, out);
  }
  {
    auto out = open_output(dir / "long.csv");
    write_long_csv(results, out);
  }
  {
    auto out = open_output(dir / "hyperparameters.csv");
    write_hyperparameter_csv(results, out);
  }
  std::cout << render_table(results);
  if (any_total_failure) {
    std::cerr << "error: every split failed for at least one method\n";
    return kExitRuntime;
  }
  return 0;
}

std::vector<Target> read_targets(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();
  if (text.find_first_not_of(" \t\r\n") == std::string::npos) return {};
  std::istringstream stream(text);
  const csv::Table table = csv::read(stream, path.string());
  const std::size_t v = table.column("variety_id", path.string());
  const std::size_t e = table.column("environment_id", path.string());
  std::vector<Target> out;
  for (const auto& row : table.rows) out.push_back({row.fields[v], row.fields[e]});
  return out;
}

int run_predict(const std::string& model_path, const std::string& targets_path, const DataPaths& paths,
                const std::string& out_path) {
  GxeModel model = GxeModel::load(model_path);
  if (!paths.genotypes.empty() || !paths.env.empty()) {
    FitContext context = model.context();
    if (!paths.genotypes.empty()) {
      context.genotypes = std::make_shared<const GenotypeTable>(load_genotypes(paths.genotypes, missing_symbol(paths)));
    }
    if (!paths.env.empty()) context.env = std::make_shared<const EnvCovariateTable>(load_env(paths.env));
    context.genotype_options.clear();
    model = GxeModel(std::move(context), model.trait(), model.reference_environments(), model.training_targets(),
                     model.training_responses(), model.hyperparameters());
  }
  const std::vector<Target> targets = read_targets(targets_path);

  Observations points;
  std::vector<std::string> errors(targets.size());
  std::vector<std::size_t> resolved;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    const auto idx = model.resolve(targets[i], &errors[i]);
    if (!idx) continue;
    resolved.push_back(i);
    points.variety.push_back(idx->first);
    points.environment.push_back(idx->second);
  }
  PredictiveDistribution pred;
  if (!resolved.empty()) pred = model.predict(points);

  std::ofstream file;
  if (!out_path.empty()) file = open_output(out_path);
  std::ostream& out = out_path.empty() ? std::cout : file;
  out << "variety_id,environment_id,mean,sd_latent,sd_observation,error\n";
  std::size_t next = 0;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    out << targets[i].variety_id << ',' << targets[i].environment_id << ',';
    if (next < resolved.size() && resolved[next] == i) {
      const auto r = static_cast<Index>(next++);
      out << csv::format_double(pred.mean(r)) << ',' << csv::format_double(pred.sd_latent(r)) << ','
          << csv::format_double(pred.sd_observation(r)) << ",\n";
    } else {
      out << ",,," << errors[i] << '\n';
    }
  }
  if (!targets.empty() && resolved.empty()) {
    std::cerr << "error: no target could be resolved\n";
    return kExitRuntime;
  }
  return 0;
}

int run_simulate(SyntheticSpec spec, const std::string& method_text, const std::string& trait_text,
                 const std::string& out_dir) {
  try {
    const MethodSpec method = parse_method(method_text);
    if (method.is_baseline) throw UsageError("simulate needs a GP method");
    spec.genotype_kernel = method.genotype;
    spec.environment_kernel = method.environment;
    spec.mode = method.mode;
    spec.trait = trait_flag(trait_text);
    spec.validate();
  } catch (const DomainError& ex) {
    throw UsageError(ex.what());
  }
  const Dataset data = generate(spec);
  write_dataset_files(data, out_dir);
  std::cout << "wrote " << data.size() << " trial records, " << data.genotypes.size() << " genotypes and "
            << data.env_covariates.size() << " environments to " << out_dir << "\n";
  return 0;
}

// Flags given on the command line win over the config file: config entries
// are inserted right after the subcommand only for flags not already present.
std::vector<std::string> merge_config(const std::vector<std::string>& args) {
  std::optional<std::string> config_path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) config_path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) config_path = args[i].substr(9);
  }
  if (!config_path) return args;
  std::ifstream in(*config_path);
  if (!in) throw UsageError("cannot open config file " + *config_path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& ex) {
    throw UsageError("config file " + *config_path + ": " + ex.what());
  }
  if (!doc.is_object()) throw UsageError("config file must hold a JSON object");

  const auto given = [&](const std::string& flag) {
    return std::any_of(args.begin(), args.end(),
                       [&](const std::string& a) { return a == flag || a.rfind(flag + "=", 0) == 0; });
  };
  std::vector<std::string> extra;
  for (const auto& [key, value] : doc.items()) {
    std::string flag = key.rfind("--", 0) == 0 ? key : "--" + key;
    std::replace(flag.begin(), flag.end(), '_', '-');
    if (flag == "--config" || given(flag)) continue;
    const auto scalar = [&](const nlohmann::json& v) -> std::string {
      if (v.is_string()) return v.get<std::string>();
      if (v.is_number_integer()) return std::to_string(v.get<long long>());
      if (v.is_number()) return csv::format_double(v.get<double>());
      throw UsageError("config key " + key + " has an unsupported value");
    };
    if (value.is_boolean()) {
      if (value.get<bool>()) extra.push_back(flag);
    } else if (value.is_array()) {
      for (const auto& v : value) {
        extra.push_back(flag);
        extra.push_back(scalar(v));
      }
    } else {
      extra.push_back(flag);
      extra.push_back(scalar(value));
    }
  }
  // args[0] is the program, args[1] the subcommand.
  std::vector<std::string> out(args.begin(), args.begin() + std::min<std::ptrdiff_t>(2, std::ssize(args)));
  out.insert(out.end(), extra.begin(), extra.end());
  if (args.size() > 2) out.insert(out.end(), args.begin() + 2, args.end());
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Genotype-by-environment trait prediction with Gaussian processes", "gxe"};
  app.require_subcommand(1);
  std::string config_path;

  DataPaths paths;
  std::string method = "GP5~";
  std::string mode;
  std::string trait = "yield";
  std::uint64_t seed = 0;
  OptimizerFlags opt;

  auto* fit = app.add_subcommand("fit", "Fit a GP model on all records of one trait");
  std::string model_out = "model.json";
  std::string trace_out;
  add_data_flags(fit, paths, true);
  add_optimizer_flags(fit, opt);
  fit->add_option("--method", method, "Method preset, e.g. GP5~");
  fit->add_option("--mode", mode, "Combination mode override {G,E,+,x,~}");
  fit->add_option("--trait", trait, "yield or protein");
  fit->add_option("--seed", seed, "Optimizer seed");
  fit->add_option("--out", model_out, "Model file");
  fit->add_option("--trace", trace_out, "Optimizer trace CSV (default: next to the model)");
  fit->add_option("--config", config_path, "JSON file with default flag values");

  auto* cv = app.add_subcommand("cv", "Cross-validate methods with group splits");
  std::vector<std::string> methods;
  std::string scenario = "new-environment";
  SplitPlan plan;
  int jobs = 1;
  std::string cv_out = "cv";
  add_data_flags(cv, paths, true);
  add_optimizer_flags(cv, opt);
  cv->add_option("--method", methods, "Method presets (repeat or comma-separate)")->delimiter(',');
  cv->add_option("--mode", mode, "Combination mode override for GP methods");
  cv->add_option("--trait", trait, "yield or protein");
  cv->add_option("--scenario", scenario, "new-environment or new-variety");
  cv->add_option("--leakage", plan.leakage, "Records per test group moved to training")->check(CLI::NonNegativeNumber);
  cv->add_option("--splits", plan.n_splits, "Number of splits")->check(CLI::PositiveNumber);
  cv->add_option("--pool-fraction", plan.pool_fraction, "Share of records drawn per split");
  cv->add_option("--test-fraction", plan.test_fraction, "Minimum test share of the pool");
  cv->add_option("--seed", plan.seed, "Master seed");
  cv->add_option("--jobs", jobs, "Parallel splits")->check(CLI::PositiveNumber);
  cv->add_option("--out", cv_out, "Output directory");
  cv->add_option("--config", config_path, "JSON file with default flag values");

  auto* predict = app.add_subcommand("predict", "Predict with a fitted model");
  std::string model_in;
  std::string targets;
  std::string predict_out;
  DataPaths predict_paths;
  predict->add_option("--model", model_in, "Model file")->required()->check(CLI::ExistingFile);
  predict->add_option("--targets", targets, "CSV with variety_id,environment_id")->required()->check(CLI::ExistingFile);
  predict->add_option("--genotypes", predict_paths.genotypes, "Replacement genotype table")->check(CLI::ExistingFile);
  predict->add_option("--env", predict_paths.env, "Replacement environment table")->check(CLI::ExistingFile);
  predict->add_option("--missing-symbol", predict_paths.missing, "Missing-call symbol");
  predict->add_option("--out", predict_out, "Predictions CSV (default: stdout)");
  predict->add_option("--config", config_path, "JSON file with default flag values");

  auto* simulate = app.add_subcommand("simulate", "Write a synthetic dataset drawn from a known GP");
  SyntheticSpec spec;
  spec.truth.theta_g = 0.5;
  spec.truth.theta_e = 0.5;
  spec.truth.weights = {0.3, 0.4, 0.3};
  spec.truth.varsigma = 0.8;
  spec.truth.nu = 1.0;
  spec.truth.spectrum_k = 3;
  std::string sim_method = "GP5~";
  std::string sim_out = "synthetic";
  simulate->add_option("--varieties", spec.n_varieties, "Number of varieties");
  simulate->add_option("--environments", spec.n_environments, "Number of environments");
  simulate->add_option("--length", spec.sequence_length, "Markers per variety");
  simulate->add_option("--variables", spec.env_variables, "Meteorological variables per period");
  simulate->add_option("--fraction", spec.observation_fraction, "Share of variety x environment pairs observed");
  simulate->add_option("--method", sim_method, "Preset whose kernels generate the data");
  simulate->add_option("--theta-g", spec.truth.theta_g, "Genotype length scale");
  simulate->add_option("--theta-e", spec.truth.theta_e, "Environment length scale");
  simulate->add_option("--alpha", spec.truth.weights.alpha, "Genotype weight");
  simulate->add_option("--beta", spec.truth.weights.beta, "Environment weight");
  simulate->add_option("--gamma", spec.truth.weights.gamma, "Interaction weight");
  simulate->add_option("--varsigma", spec.truth.varsigma, "Kernel share of the variance");
  simulate->add_option("--nu", spec.truth.nu, "Total variance");
  simulate->add_option("--k", spec.truth.spectrum_k, "Spectrum k for SPE presets");
  simulate->add_option("--trend", spec.trend, "Constant mean");
  simulate->add_option("--trait", trait, "Trait label of the records");
  simulate->add_option("--seed", spec.seed, "Random seed");
  simulate->add_option("--out", sim_out, "Output directory");
  simulate->add_option("--config", config_path, "JSON file with default flag values");

  try {
    std::vector<std::string> args(argv, argv + argc);
    args = merge_config(args);
    std::vector<std::string> reversed(args.rbegin(), args.rend() - 1);
    app.parse(std::move(reversed));
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (*fit) return run_fit(paths, method, mode, trait, seed, opt, model_out, trace_out);
    if (*cv) {
      if (methods.empty()) methods.push_back(method);
      return run_cv(paths, methods, mode, trait, plan, scenario, jobs, opt, cv_out);
    }
    if (*predict) return run_predict(model_in, targets, predict_paths, predict_out);
    if (*simulate) return run_simulate(spec, sim_method, trait, sim_out);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return 0;
}
