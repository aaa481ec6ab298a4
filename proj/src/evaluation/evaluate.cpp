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
#include <atomic>
#include <iomanip>
#include <map>
#include <mutex>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>
#include <tuple>

#include "gxe/csv.hpp"
#include "gxe/error.hpp"
#include "gxe/evaluation.hpp"
#include "gxe/model.hpp"

namespace gxe {
namespace {

std::uint64_t split_seed(const SplitPlan& plan, const OptimizerConfig& config, int split) {
  std::seed_seq seq{static_cast<std::uint32_t>(plan.seed), static_cast<std::uint32_t>(plan.seed >> 32),
                    static_cast<std::uint32_t>(split), static_cast<std::uint32_t>(config.seed),
                    static_cast<std::uint32_t>(config.seed >> 32), 0x6f707431u};
  std::mt19937_64 rng(seq);
  return rng();
}

void score_baseline(const MethodSpec& method, const Dataset& data, const Split& split, SplitMetrics& m) {
  const BaselinePredictor predictor(method.baseline, data, split.train);
  std::vector<double> sq, crps;
  for (std::size_t r : split.test) {
    const auto p = predictor.predict(r);
    if (!p) continue;
    const double err = data.records[r].value - *p;
    sq.push_back(err * err);
    crps.push_back(std::abs(err));
  }
  m.n_scored = sq.size();
  if (sq.empty()) return;
  double total = 0.0;
  for (double v : sq) total += v;
  m.mse = total / static_cast<double>(sq.size());
  m.crps = median_metric(crps);
}

void score_gp(const Dataset& data, const FitContext& context, const Split& split, const OptimizerConfig& config,
              SplitMetrics& m) {
  const GxeModel model = GxeModel::fit(data, context, split.train, config);
  m.hyper = model.hyperparameters();
  m.m_hat = model.m_hat();
  m.warnings.insert(m.warnings.end(), model.warnings().begin(), model.warnings().end());
  Observations points;
  Eigen::VectorXd y(static_cast<Index>(split.test.size()));
  for (std::size_t i = 0; i < split.test.size(); ++i) {
    const std::size_t r = split.test[i];
    points.variety.push_back(static_cast<Index>(data.variety[r]));
    points.environment.push_back(static_cast<Index>(data.environment[r]));
    y(static_cast<Index>(i)) = data.records[r].value;
  }
  const PredictiveDistribution pred = model.predict(points);
  if (pred.clamped > 0) {
    m.warnings.push_back(std::to_string(pred.clamped) + " predictive variance(s) clamped at zero");
  }
  std::vector<double> crps, logs;
  for (Index i = 0; i < y.size(); ++i) {
    crps.push_back(crps_gaussian(pred.mean(i), pred.sd_observation(i), y(i)));
    logs.push_back(log_score_gaussian(pred.mean(i), pred.sd_observation(i), y(i)));
  }
  m.n_scored = static_cast<std::size_t>(y.size());
  m.mse = mse(pred.mean, y);
  m.crps = median_metric(crps);
  m.logs = median_metric(logs);
}

std::optional<double> median_over(const std::vector<SplitMetrics>& splits, std::optional<double> SplitMetrics::*field) {
  std::vector<double> v;
  for (const auto& s : splits) {
    if (!s.failed && (s.*field)) v.push_back(*(s.*field));
  }
  if (v.empty()) return std::nullopt;
  return median_metric(std::move(v));
}

std::string opt(const std::optional<double>& v) { return v ? csv::format_double(*v) : std::string(); }

std::string status(const SplitMetrics& s) {
  if (s.failed) return "failed";
  return s.mse ? "ok" : "absent";
}

}  // namespace

int MethodEvaluation::failed() const {
  return static_cast<int>(std::count_if(splits.begin(), splits.end(), [](const auto& s) { return s.failed; }));
}

int MethodEvaluation::scored() const {
  return static_cast<int>(
      std::count_if(splits.begin(), splits.end(), [](const auto& s) { return !s.failed && s.mse.has_value(); }));
}

MethodEvaluation evaluate(const MethodSpec& method, const Dataset& data, const SplitPlan& plan,
                          const EvaluateOptions& options) {
  plan.validate();
  options.optimizer.validate();
  MethodEvaluation out;
  out.method = method;
  out.plan = plan;
  out.trait = data.trait;
  out.splits.resize(static_cast<std::size_t>(plan.n_splits));

  std::optional<FitContext> context;
  if (!method.is_baseline) context = make_fit_context(data.genotypes, data.env_covariates, method);

  std::atomic<int> next{0};
  auto worker = [&] {
    for (int s = next++; s < plan.n_splits; s = next++) {
      SplitMetrics& m = out.splits[static_cast<std::size_t>(s)];
      m.split = s;
      try {
        const Split split = make_split(data, plan, s);
        m.warnings = split.warnings;
        m.n_train = split.train.size();
        m.n_test = split.test.size();
        if (split.test.empty()) throw DomainError("empty test set");
        if (method.is_baseline) {
          score_baseline(method, data, split, m);
        } else {
          OptimizerConfig config = options.optimizer;
          config.seed = split_seed(plan, options.optimizer, s);
          score_gp(data, *context, split, config, m);
        }
      } catch (const Error& ex) {
        m.failed = true;
        m.error = ex.what();
        m.mse.reset();
        m.crps.reset();
        m.logs.reset();
      }
    }
  };
  const int jobs = std::clamp(options.jobs, 1, plan.n_splits);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  out.median_mse = median_over(out.splits, &SplitMetrics::mse);
  out.median_crps = median_over(out.splits, &SplitMetrics::crps);
  out.median_logs = median_over(out.splits, &SplitMetrics::logs);
  return out;
}

void write_split_csv(const std::vector<MethodEvaluation>& results, std::ostream& out) {
  out << "method,scenario,leakage,trait,split,mse,crps,logs,status\n";
  for (const auto& r : results) {
    for (const auto& s : r.splits) {
      out << r.method.name() << ',' << to_string(r.plan.scenario) << ',' << r.plan.leakage << ','
          << to_string(r.trait) << ',' << s.split << ',' << opt(s.mse) << ',' << opt(s.crps) << ',' << opt(s.logs)
          << ',' << status(s) << '\n';
    }
  }
}

void write_summary_csv(const std::vector<MethodEvaluation>& results, std::ostream& out) {
  out << "method,scenario,leakage,trait,splits,failed,mse,crps,logs\n";
  for (const auto& r : results) {
    out << r.method.name() << ',' << to_string(r.plan.scenario) << ',' << r.plan.leakage << ','
        << to_string(r.trait) << ',' << r.splits.size() << ',' << r.failed() << ',' << opt(r.median_mse) << ','
        << opt(r.median_crps) << ',' << opt(r.median_logs) << '\n';
  }
}

void write_long_csv(const std::vector<MethodEvaluation>& results, std::ostream& out) {
  out << "method,scenario,leakage,trait,split,metric,value\n";
  for (const auto& r : results) {
    for (const auto& s : r.splits) {
      const std::pair<const char*, const std::optional<double>*> metrics[] = {
          {"mse", &s.mse}, {"crps", &s.crps}, {"logs", &s.logs}};
      for (const auto& [name, value] : metrics) {
        if (s.failed || !*value) continue;
        out << r.method.name() << ',' << to_string(r.plan.scenario) << ',' << r.plan.leakage << ','
            << to_string(r.trait) << ',' << s.split << ',' << name << ',' << csv::format_double(**value) << '\n';
      }
    }
  }
}

void write_hyperparameter_csv(const std::vector<MethodEvaluation>& results, std::ostream& out) {
  out << "method,scenario,leakage,trait,split,theta_g,theta_e,alpha,beta,gamma,varsigma,nu,m_hat,spectrum_k\n";
  for (const auto& r : results) {
    for (const auto& s : r.splits) {
      if (!s.hyper) continue;
      const Hyperparameters& h = *s.hyper;
      out << r.method.name() << ',' << to_string(r.plan.scenario) << ',' << r.plan.leakage << ','
          << to_string(r.trait) << ',' << s.split << ',' << csv::format_double(h.theta_g) << ','
          << csv::format_double(h.theta_e) << ',' << csv::format_double(h.weights.alpha) << ','
          << csv::format_double(h.weights.beta) << ',' << csv::format_double(h.weights.gamma) << ','
          << csv::format_double(h.varsigma) << ',' << csv::format_double(h.nu) << ','
          << csv::format_double(s.m_hat) << ',' << h.spectrum_k << '\n';
    }
  }
}

std::string render_table(const std::vector<MethodEvaluation>& results) {
  // cell[method][trait][leaky] -> evaluation
  std::vector<std::string> methods;
  std::vector<Trait> traits;
  std::map<std::tuple<std::string, Trait, bool>, const MethodEvaluation*> cell;
  for (const auto& r : results) {
    const std::string name = r.method.name();
    if (std::find(methods.begin(), methods.end(), name) == methods.end()) methods.push_back(name);
    if (std::find(traits.begin(), traits.end(), r.trait) == traits.end()) traits.push_back(r.trait);
    cell[{name, r.trait, r.plan.leakage > 0}] = &r;
  }
  const auto fmt = [](const std::optional<double>& v) {
    if (!v) return std::string("--");
    std::ostringstream s;
    s << std::fixed << std::setprecision(2) << *v;
    return s.str();
  };
  std::ostringstream out;
  out << std::left << std::setw(10) << "method";
  for (Trait t : traits) {
    for (const char* metric : {"MSE", "CRPS", "logS"}) {
      out << " | " << std::setw(17) << (std::string(to_string(t)) + " " + metric);
    }
  }
  out << '\n';
  for (const auto& name : methods) {
    out << std::left << std::setw(10) << name;
    for (Trait t : traits) {
      const auto* plain = cell.count({name, t, false}) ? cell[{name, t, false}] : nullptr;
      const auto* leaky = cell.count({name, t, true}) ? cell[{name, t, true}] : nullptr;
      for (auto field : {&MethodEvaluation::median_mse, &MethodEvaluation::median_crps, &MethodEvaluation::median_logs}) {
        const std::string a = plain ? fmt(plain->*field) : "";
        const std::string b = leaky ? fmt(leaky->*field) : "";
        out << " | " << std::setw(17) << (a + " | " + b);
      }
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace gxe
