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

// End-to-end acceptance checks. Prints one PASS/FAIL/SKIP line per
// criterion and exits nonzero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "gxe/data.hpp"
#include "gxe/environment_kernels.hpp"
#include "gxe/evaluation.hpp"
#include "gxe/genotype_kernels.hpp"
#include "gxe/gp.hpp"
#include "gxe/hyperopt.hpp"
#include "gxe/kernels.hpp"
#include "gxe/model.hpp"
#include "gxe/oracles.hpp"
#include "gxe/presets.hpp"
#include "gxe/product_kernel.hpp"
#include "gxe/synthetic.hpp"
#include "test_util.hpp"

using namespace gxe;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
  bool skipped = false;
};

std::string fmt(const char* format, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, format, a, b, c);
  return buf;
}

// Checks with a runtime budget fail when they exceed it.
Outcome timed(double budget_seconds, const std::function<Outcome()>& body, double& seconds) {
  const auto start = std::chrono::steady_clock::now();
  Outcome out;
  try {
    out = body();
  } catch (const std::exception& e) {
    out = {false, std::string("exception: ") + e.what()};
  }
  seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (budget_seconds > 0 && seconds > budget_seconds) {
    out.pass = false;
    out.detail += fmt("; over the %.0f s budget", budget_seconds);
  }
  return out;
}

CombinationWeights random_weights(CombinationMode mode, std::mt19937_64& rng) {
  const ActiveWeights a = active_weights(mode);
  std::gamma_distribution<double> draw(1.0, 1.0);
  double w[3] = {a.alpha ? draw(rng) : 0.0, a.beta ? draw(rng) : 0.0, a.gamma ? draw(rng) : 0.0};
  const double total = w[0] + w[1] + w[2];
  return {w[0] / total, w[1] / total, w[2] / total};
}

Eigen::VectorXd central_difference(const LikelihoodObjective& obj, const Eigen::VectorXd& x, double h) {
  Eigen::VectorXd g(x.size());
  for (Index i = 0; i < x.size(); ++i) {
    Eigen::VectorXd up = x, down = x;
    up(i) += h;
    down(i) -= h;
    g(i) = (obj.value(up) - obj.value(down)) / (2 * h);
  }
  return g;
}

int argmax(const CombinationWeights& w) {
  const double v[3] = {w.alpha, w.beta, w.gamma};
  return static_cast<int>(std::max_element(v, v + 3) - v);
}

Outcome kernel_oracles() {
  std::mt19937_64 rng(101);
  std::uniform_int_distribution<int> steps(2, 4);
  std::uniform_real_distribution<double> theta(0.3, 3.0);
  double worst_gak = 0.0;
  for (int t = 0; t < 100; ++t) {
    const Index p = t % 2 == 0 ? 1 : 3;
    const EnvSeries a = fixtures::random_series(rng, steps(rng), p);
    const EnvSeries b = fixtures::random_series(rng, steps(rng), p);
    const double th = theta(rng);
    const double fast = gak_kernel(a, b, th), slow = oracle::gak(a, b, th);
    worst_gak = std::max(worst_gak, std::abs(fast - slow) / std::abs(slow));
  }
  std::uniform_int_distribution<int> length(6, 30), order(1, 3);
  double worst_spectrum = 0.0;
  for (int t = 0; t < 100; ++t) {
    const std::string a = fixtures::random_snps(rng, static_cast<std::size_t>(length(rng)), 0.05);
    const std::string b = fixtures::random_snps(rng, static_cast<std::size_t>(length(rng)), 0.05);
    const int k = order(rng);
    worst_spectrum = std::max(worst_spectrum, std::abs(spectrum_kernel(a, b, k) - oracle::spectrum(a, b, k)));
  }
  return {worst_gak <= 1e-10 && worst_spectrum <= 1e-12,
          fmt("GAK max rel err %.2e, spectrum max abs err %.2e", worst_gak, worst_spectrum)};
}

Outcome psd_suite() {
  constexpr CombinationMode modes[] = {CombinationMode::g_only, CombinationMode::e_only, CombinationMode::additive,
                                       CombinationMode::product, CombinationMode::full};
  constexpr GenotypeKernel genos[] = {GenotypeKernel::gau_gblup, GenotypeKernel::exp_hamming,
                                      GenotypeKernel::spectrum};
  constexpr EnvironmentKernel envs[] = {EnvironmentKernel::gau_eucl, EnvironmentKernel::exp_eucl,
                                        EnvironmentKernel::gak};
  const int n = 15;
  double worst = 0.0;
  int checked = 0, failed = 0;
  for (int seed = 0; seed < 20; ++seed) {
    std::mt19937_64 rng(200 + static_cast<std::uint64_t>(seed));
    std::uniform_real_distribution<double> theta(0.05, 2.0);
    std::vector<SnpSequence> rows;
    std::vector<std::string> ids;
    for (int i = 0; i < n; ++i) {
      rows.push_back({"v" + std::to_string(i), fixtures::random_snps(rng, 60, 0.03)});
      ids.push_back("e" + std::to_string(i));
    }
    const GenotypeTable table(rows);
    const EnvCovariateTable raw(ids, {"x", "y"}, fixtures::random_series(rng, n, 6 * 2));
    const EnvCovariateTable env = normalize_env(raw, ids);
    Observations obs;
    std::uniform_int_distribution<Index> pick(0, n - 1);
    for (int i = 0; i < n; ++i) {
      obs.variety.push_back(pick(rng));
      obs.environment.push_back(pick(rng));
    }
    auto record = [&](const Eigen::MatrixXd& k) {
      const PsdReport r = assert_psd(k, 1e-8);
      worst = std::min(worst, r.min_eigenvalue);
      ++checked;
      failed += !r.psd;
    };
    for (GenotypeKernel g : genos) {
      const auto option = build_genotype_options(g, table, {1 + seed % 3}).front();
      const double tg = theta(rng);
      record(option.gram->evaluate(tg));
      for (EnvironmentKernel e : envs) {
        const auto env_gram = build_environment_gram(e, env);
        const double te = theta(rng);
        if (g == genos[0]) record(env_gram->evaluate(te));
        for (CombinationMode mode : modes) {
          const ProductKernel kernel(option.gram, env_gram, mode);
          Hyperparameters h;
          h.theta_g = tg;
          h.theta_e = te;
          h.weights = random_weights(mode, rng);
          record(kernel.correlation(h, obs, obs));
        }
      }
    }
  }
  return {failed == 0, fmt("%.0f Gram matrices, %.0f failures, smallest eigenvalue %.2e", checked, failed, worst)};
}

Outcome gp_correctness() {
  std::mt19937_64 rng(301);
  std::normal_distribution<double> normal;
  std::uniform_int_distribution<int> size(2, 20);
  std::uniform_real_distribution<double> share(0.3, 0.98), scale(0.2, 5.0);
  double worst_mean = 0.0, worst_var = 0.0;
  for (int t = 0; t < 50; ++t) {
    const Index n = size(rng);
    const Eigen::MatrixXd all = fixtures::random_correlation(rng, n + 1, 4);
    const Eigen::MatrixXd k = all.topLeftCorner(n, n);
    Eigen::VectorXd z(n);
    for (auto& v : z) v = 3.0 + normal(rng);
    const double vs = share(rng), nu = scale(rng);
    const KrigingModel m(k, vs, z);
    const auto p = m.predict(all.row(n).head(n), nu);
    Eigen::MatrixXd joint = nu * vs * all;
    joint.diagonal().head(n).array() += nu * (1 - vs + kJitter);
    std::vector<Index> observed(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) observed[static_cast<std::size_t>(i)] = i;
    const auto o = oracle::posterior(joint, observed, n, z);
    worst_mean = std::max(worst_mean, std::abs(p.mean(0) - o.mean) / std::max(1.0, std::abs(o.mean)));
    worst_var = std::max(worst_var, std::abs(p.sd_latent(0) * p.sd_latent(0) - o.variance) / o.variance);
  }
  // Interpolation on product-kernel Grams over distinct (variety, environment) pairs.
  double worst_interp = 0.0;
  for (int t = 0; t < 20; ++t) {
    std::vector<SnpSequence> rows;
    std::vector<std::string> ids;
    for (int i = 0; i < 6; ++i) {
      rows.push_back({"v" + std::to_string(i), fixtures::random_snps(rng, 80, 0.02)});
      ids.push_back("e" + std::to_string(i));
    }
    const EnvCovariateTable raw(ids, {"x"}, fixtures::random_series(rng, 6, 6));
    const ProductKernel kernel(build_genotype_options(GenotypeKernel::exp_hamming, GenotypeTable(rows)).front().gram,
                               build_environment_gram(EnvironmentKernel::exp_eucl, normalize_env(raw, ids)),
                               CombinationMode::full);
    std::vector<int> cells(36);
    for (int i = 0; i < 36; ++i) cells[static_cast<std::size_t>(i)] = i;
    std::shuffle(cells.begin(), cells.end(), rng);
    Observations obs;
    for (int i = 0; i < size(rng); ++i) {
      obs.variety.push_back(cells[static_cast<std::size_t>(i)] / 6);
      obs.environment.push_back(cells[static_cast<std::size_t>(i)] % 6);
    }
    Hyperparameters h;
    h.theta_g = share(rng);
    h.theta_e = share(rng);
    h.weights = random_weights(CombinationMode::full, rng);
    const Eigen::MatrixXd k = kernel.correlation(h, obs, obs);
    Eigen::VectorXd z(obs.size());
    for (auto& v : z) v = 3.0 + normal(rng);
    const KrigingModel m(k, 1.0, z);
    const auto p = m.predict(k);
    worst_interp = std::max(worst_interp, (p.mean - z).cwiseAbs().maxCoeff() / z.cwiseAbs().maxCoeff());
  }
  return {worst_mean <= 1e-4 && worst_var <= 1e-4 && worst_interp <= 1e-6,
          fmt("mean rel err %.2e, variance rel err %.2e, interpolation rel err %.2e", worst_mean, worst_var, worst_interp)};
}

Outcome scoring() {
  std::mt19937_64 rng(401);
  std::normal_distribution<double> normal(0.0, 4.0);
  std::uniform_real_distribution<double> spread(0.05, 8.0);
  double worst = 0.0;
  for (int t = 0; t < 50; ++t) {
    const double mu = normal(rng), sigma = spread(rng), y = normal(rng);
    worst = std::max(worst, std::abs(crps_gaussian(mu, sigma, y) - oracle::crps(mu, sigma, y)));
  }
  bool exact = true;
  for (int t = 0; t < 50; ++t) {
    const double mu = normal(rng), y = normal(rng);
    exact = exact && crps_gaussian(mu, 0.0, y) == std::abs(y - mu);
  }
  const double logs = log_score_gaussian(0.0, 1.0, 0.0);
  const bool logs_ok = std::abs(logs - 0.9189385332046727) < 1e-14;
  return {worst <= 1e-6 && exact && logs_ok,
          fmt("CRPS max abs err %.2e, zero-spread exact %.0f, logS(0;0,1) = %.16f", worst, exact, logs)};
}

Outcome gradient_check() {
  SyntheticSpec spec;
  spec.n_varieties = 5;
  spec.n_environments = 8;
  spec.sequence_length = 50;
  spec.truth.weights = {0.3, 0.4, 0.3};
  spec.seed = 501;
  const Dataset d = generate(spec);
  const FitProblem problem = fixtures::problem_for(d, parse_method("GP5~"));
  Hyperparameters tmpl;
  tmpl.weights = CombinationWeights::barycenter(CombinationMode::full);
  const LikelihoodObjective obj = make_objective(problem, 0, tmpl);
  std::mt19937_64 rng(502);
  std::normal_distribution<double> normal(0.0, 0.7);
  double worst = 0.0;
  for (int t = 0; t < 10; ++t) {
    Eigen::VectorXd x = obj.map().to_vector(tmpl);
    for (auto& v : x) v += normal(rng);
    obj.map().project(x);
    // keep away from the upper theta clip, where the map has a kink
    for (Index i = 0; i < x.size(); ++i) {
      if (obj.map().names()[static_cast<std::size_t>(i)].rfind("log_theta", 0) == 0) x(i) -= 0.3;
    }
    const Eigen::VectorXd g = obj.gradient(x);
    const Eigen::VectorXd fd = central_difference(obj, x, 1e-6);
    worst = std::max(worst, (g - fd).norm() / fd.norm());
  }
  return {worst <= 1e-3, fmt("40 observations, %.0f parameters, max rel err %.2e", static_cast<double>(obj.map().dimension()), worst)};
}

Outcome lmm_correspondence() {
  std::mt19937_64 rng(601);
  std::uniform_real_distribution<double> unit(0.05, 0.95), scale(0.1, 20.0);
  double worst = 0.0;
  for (int t = 0; t < 20; ++t) {
    const Eigen::MatrixXd kg = fixtures::random_correlation(rng, 12);
    const Eigen::MatrixXd ke = fixtures::random_correlation(rng, 12);
    const CombinationWeights w = random_weights(CombinationMode::full, rng);
    const double vs = unit(rng), nu = scale(rng);
    const Eigen::MatrixXd gp = observation_covariance(nu, vs, combine(CombinationMode::full, w, kg, ke));
    const Eigen::MatrixXd lmm = lmm_covariance(w.alpha * vs * nu, w.beta * vs * nu, w.gamma * vs * nu,
                                               (1 - vs) * nu, kg, ke);
    worst = std::max(worst, (gp - lmm).cwiseAbs().maxCoeff());
  }
  return {worst <= 1e-12, fmt("max abs diff %.2e", worst)};
}

Outcome recovery() {
  int hits = 0;
  for (int s = 0; s < 20; ++s) {
    SyntheticSpec spec;
    spec.n_varieties = 4;
    spec.n_environments = 30;
    spec.env_variables = 1;
    spec.environment_kernel = EnvironmentKernel::gau_eucl;
    spec.truth.theta_g = 0.3;
    spec.truth.theta_e = 1.0;
    spec.truth.weights = {0.1, 0.8, 0.1};
    spec.truth.varsigma = 0.95;
    spec.seed = static_cast<std::uint64_t>(1 + s);
    const Dataset d = generate(spec);
    OptimizerConfig config;
    config.seed = static_cast<std::uint64_t>(s);
    const Hyperparameters h = GxeModel::fit(d, parse_method("GP2~"), config).hyperparameters();
    const bool ok = std::abs(h.theta_e - spec.truth.theta_e) <= 0.5 * spec.truth.theta_e &&
                    std::abs(h.varsigma - spec.truth.varsigma) <= 0.15 &&
                    argmax(h.weights) == argmax(spec.truth.weights);
    hits += ok;
  }
  return {hits >= 16, fmt("%.0f of 20 seeds recovered (n = 120)", hits)};
}

Outcome leakage_effect() {
  SyntheticSpec spec;
  spec.n_varieties = 10;
  spec.n_environments = 20;
  spec.truth.weights = {0.15, 0.7, 0.15};
  spec.truth.varsigma = 0.8;
  spec.seed = 801;
  const Dataset d = generate(spec);
  SplitPlan plan;
  plan.n_splits = 10;
  plan.seed = 802;
  EvaluateOptions options;
  options.jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  const MethodSpec method = parse_method("GP5~");
  const auto without = evaluate(method, d, plan, options);
  plan.leakage = 1;
  const auto with = evaluate(method, d, plan, options);
  if (!without.median_mse || !with.median_mse) return {false, "no scored splits"};
  return {*with.median_mse < *without.median_mse,
          fmt("median MSE %.4f with one leaked record vs %.4f without", *with.median_mse, *without.median_mse)};
}

Outcome genotype_weakness() {
  int hits = 0;
  for (int s = 0; s < 20; ++s) {
    SyntheticSpec spec;
    spec.n_varieties = 8;
    spec.n_environments = 15;
    spec.truth.weights = {0.0, 0.7, 0.3};
    spec.truth.varsigma = 0.8;
    spec.seed = static_cast<std::uint64_t>(900 + s);
    const Dataset d = generate(spec);
    const FitProblem problem = fixtures::problem_for(d, parse_method("GP5~"));
    OptimizerConfig config;
    config.seed = static_cast<std::uint64_t>(s);
    const ProblemFit fit = fit_problem(problem, config);
    const ProductKernel kernel(problem.genotype_options[fit.option].gram, problem.environment, problem.mode);
    const double bound = theta_max(kernel, problem.train).theta_g_max;
    const Hyperparameters& h = fit.fit.hyper;
    hits += h.theta_g >= bound * (1 - 1e-9) || h.weights.alpha < 0.1;
  }
  return {hits >= 14, fmt("%.0f of 20 seeds with theta_G at its bound or alpha < 0.1", hits)};
}

Outcome dataset_experiment() {
  const char* dir = std::getenv("GXE_DATASET_DIR");
  if (dir == nullptr) return {false, "GXE_DATASET_DIR not set", true};
  const std::filesystem::path root(dir);
  for (const char* name : {"trials.csv", "genotypes.csv", "env.csv"}) {
    if (!std::filesystem::exists(root / name)) return {false, std::string(name) + " missing in GXE_DATASET_DIR", true};
  }
  const Dataset d = assemble_dataset(root / "trials.csv", root / "genotypes.csv", root / "env.csv", Trait::yield);
  SplitPlan plan;
  EvaluateOptions options;
  options.jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  const auto r = evaluate(parse_method("GP5~"), d, plan, options);
  if (!r.median_mse) return {false, "no scored splits"};
  return {*r.median_mse >= 90 && *r.median_mse <= 160, fmt("median MSE %.2f", *r.median_mse)};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double budget;
    Outcome (*run)();
  };
  const Criterion criteria[] = {
      {1, "kernel-oracle equivalence", 10, kernel_oracles},
      {2, "PSD suite", 30, psd_suite},
      {3, "GP posterior correctness", 20, gp_correctness},
      {4, "CRPS and log-score correctness", 0, scoring},
      {5, "gradient check", 0, gradient_check},
      {6, "mixed-model correspondence", 0, lmm_correspondence},
      {7, "synthetic hyperparameter recovery", 300, recovery},
      {8, "leakage effect", 0, leakage_effect},
      {9, "genotype-kernel weakness", 0, genotype_weakness},
      {10, "GP5~ new-environment yield on the field dataset", 0, dataset_experiment},
  };
  int failures = 0;
  for (const Criterion& c : criteria) {
    double seconds = 0.0;
    const Outcome out = timed(c.budget, c.run, seconds);
    const char* status = out.skipped ? "SKIP" : out.pass ? "PASS" : "FAIL";
    failures += !out.skipped && !out.pass;
    std::printf("[%s] %2d %s: %s (%.2f s)\n", status, c.id, c.name, out.detail.c_str(), seconds);
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
