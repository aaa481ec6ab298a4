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
#include <limits>
#include <ostream>

#include "gxe/csv.hpp"
#include "gxe/error.hpp"
#include "gxe/hyperopt.hpp"

namespace gxe {

double OptimizerConfig::learning_rate_at(int step) const {
  return learning_rate * std::pow(decay_factor, (step - 1) / decay_every);
}

void OptimizerConfig::validate() const {
  if (!(learning_rate > 0.0) || !(decay_factor > 0.0) || decay_every <= 0 || max_iters < 0) {
    throw DomainError("optimizer: rates and schedule must be positive");
  }
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0) || !(epsilon > 0.0)) {
    throw DomainError("optimizer: invalid Adam moments");
  }
  if (!(batch_fraction > 0.0 && batch_fraction <= 0.5)) throw DomainError("optimizer: batch_fraction must lie in (0, 0.5]");
  if (patience <= 0 || eval_every <= 0) throw DomainError("optimizer: patience and eval_every must be positive");
}

void write_trace_csv(const FitTrace& trace, std::ostream& out) {
  out << "iter,theta_g,theta_e,alpha,beta,gamma,varsigma,nll,grad_norm\n";
  for (const auto& e : trace.entries) {
    const auto& h = e.hyper;
    out << e.iter << ',' << csv::format_double(h.theta_g) << ',' << csv::format_double(h.theta_e) << ','
        << csv::format_double(h.weights.alpha) << ',' << csv::format_double(h.weights.beta) << ','
        << csv::format_double(h.weights.gamma) << ',' << csv::format_double(h.varsigma) << ','
        << csv::format_double(e.nll) << ',' << csv::format_double(e.grad_norm) << '\n';
  }
}

LikelihoodObjective make_objective(const FitProblem& problem, std::size_t option, const Hyperparameters& template_h) {
  const auto& opt = problem.genotype_options.at(option);
  Hyperparameters h = template_h;
  h.spectrum_k = opt.spectrum_k;
  return LikelihoodObjective(ProductKernel(opt.gram, problem.environment, problem.mode), problem.train, problem.z, h);
}

GridResult grid_init(const FitProblem& problem) {
  if (problem.genotype_options.empty() || !problem.environment) throw DomainError("grid_init: incomplete problem");
  if (problem.train.size() != problem.z.size() || problem.z.size() < 2) {
    throw DomainError("grid_init: need at least two training observations");
  }
  const auto active = active_weights(problem.mode);
  std::vector<CombinationWeights> weight_grid;
  if (active.alpha) weight_grid.push_back({1.0, 0.0, 0.0});
  if (active.beta) weight_grid.push_back({0.0, 1.0, 0.0});
  if (active.gamma) weight_grid.push_back({0.0, 0.0, 1.0});
  if (active.count() > 1) weight_grid.push_back(CombinationWeights::barycenter(problem.mode));

  GridResult out;
  out.nll = std::numeric_limits<double>::infinity();
  bool found = false;
  const bool genotype_used = problem.mode != CombinationMode::e_only;
  const std::size_t options = genotype_used ? problem.genotype_options.size() : 1;
  for (std::size_t o = 0; o < options; ++o) {
    const auto& opt = problem.genotype_options[o];
    const ProductKernel kernel(opt.gram, problem.environment, problem.mode);
    const ThetaBounds bounds = theta_max(kernel, problem.train);
    std::vector<double> theta_g = {1.0};
    std::vector<double> theta_e = {1.0};
    if (kernel.theta_g_free()) {
      theta_g.clear();
      for (double f : kThetaGridFractions) theta_g.push_back(f * bounds.theta_g_max);
    }
    if (kernel.theta_e_free()) {
      theta_e.clear();
      for (double f : kThetaGridFractions) theta_e.push_back(f * bounds.theta_e_max);
    }
    for (double tg : theta_g) {
      for (double te : theta_e) {
        Hyperparameters h;
        h.theta_g = tg;
        h.theta_e = te;
        h.spectrum_k = opt.spectrum_k;
        const FactorValues f = kernel.factors(h, false);
        const Eigen::MatrixXd kg = f.kg(problem.train.variety, problem.train.variety);
        const Eigen::MatrixXd ke = f.ke(problem.train.environment, problem.train.environment);
        for (const auto& w : weight_grid) {
          const Eigen::MatrixXd k = combine_linear(w.alpha, w.beta, w.gamma, kg, ke);
          for (double vs : kVarsigmaGrid) {
            ++out.evaluated;
            try {
              const KrigingModel model(k, vs, problem.z);
              if (model.likelihood().nll < out.nll) {
                out.nll = model.likelihood().nll;
                out.option = o;
                out.best = h;
                out.best.weights = w;
                out.best.varsigma = vs;
                out.best.nu = model.nu_hat();
                found = true;
              }
            } catch (const NumericalError&) {
              ++out.failed;
            }
          }
        }
      }
    }
  }
  if (!found) throw NumericalError("grid_init: every grid point failed to factorize");
  return out;
}

FitResult adam_fit(const LikelihoodObjective& objective, const Hyperparameters& init, const OptimizerConfig& config) {
  config.validate();
  const ParameterMap& map = objective.map();
  FitResult out;
  out.trace.names = map.names();

  Eigen::VectorXd x = map.to_vector(init);
  Eigen::VectorXd best_x = x;
  double best_nll = objective.value(x);
  out.init_nll = best_nll;

  auto consider = [&](const Eigen::VectorXd& candidate) {
    try {
      const double v = objective.value(candidate);
      if (v < best_nll) {
        best_nll = v;
        best_x = candidate;
      }
    } catch (const NumericalError&) {
    }
  };

  std::mt19937_64 rng(config.seed);
  const Eigen::Index d = map.dimension();
  Eigen::VectorXd m = Eigen::VectorXd::Zero(d);
  Eigen::VectorXd v = Eigen::VectorXd::Zero(d);
  Eigen::VectorXd x_prev = x;
  int calm = 0;
  bool warned = false;

  for (int t = 1; t <= config.max_iters; ++t) {
    Eigen::VectorXd g;
    double nll_estimate = 0.0;
    // A non-finite gradient backs the previous step off by half, up to five times.
    for (int attempt = 0;; ++attempt) {
      bool ok = true;
      try {
        std::vector<std::string>* warn_sink = warned ? nullptr : &out.trace.warnings;
        g = half_batch_gradient(objective, x, rng, &nll_estimate, warn_sink, config.batch_fraction);
        warned = true;
        ok = g.allFinite() && std::isfinite(nll_estimate);
      } catch (const NumericalError&) {
        ok = false;
      }
      if (ok) break;
      if (attempt == 5) {
        out.trace.warnings.push_back("non-finite gradient at iteration " + std::to_string(t) + "; aborting");
        out.hyper = objective.hyperparameters(best_x);
        throw NumericalError("adam_fit: non-finite gradient after 5 step halvings at iteration " +
                             std::to_string(t));
      }
      x = x_prev + 0.5 * (x - x_prev);
    }

    const double lr = config.learning_rate_at(t);
    m = config.beta1 * m + (1.0 - config.beta1) * g;
    v = config.beta2 * v + (1.0 - config.beta2) * g.cwiseAbs2();
    const double c1 = 1.0 - std::pow(config.beta1, t);
    const double c2 = 1.0 - std::pow(config.beta2, t);
    x_prev = x;
    x -= (lr * (m / c1).array() / ((v / c2).array().sqrt() + config.epsilon)).matrix();
    map.project(x);

    out.trace.entries.push_back({t, x, objective.hyperparameters(x), nll_estimate, g.norm()});

    const double change = (x - x_prev).cwiseAbs().maxCoeff();
    calm = change < config.tolerance ? calm + 1 : 0;
    const bool last = t == config.max_iters || calm >= config.patience;
    if (t % config.eval_every == 0 || last) consider(x);
    if (last) break;
  }

  const Hyperparameters h = objective.hyperparameters(best_x);
  const auto final_eval = objective.evaluate(best_x, nullptr, false);
  out.hyper = h;
  out.hyper.nu = final_eval.nu_hat;
  out.m_hat = final_eval.m_hat;
  out.nll = final_eval.nll;
  return out;
}

ProblemFit fit_problem(const FitProblem& problem, const OptimizerConfig& config) {
  ProblemFit out;
  out.grid = grid_init(problem);
  out.option = out.grid.option;
  const LikelihoodObjective objective = make_objective(problem, out.option, out.grid.best);
  out.fit = adam_fit(objective, out.grid.best, config);
  return out;
}

}  // namespace gxe
