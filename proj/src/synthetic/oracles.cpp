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
#include <string>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "gxe/error.hpp"
#include "gxe/oracles.hpp"

namespace gxe::oracle {
namespace {

using Index = Eigen::Index;

double paths_from(const EnvSeries& a, const EnvSeries& b, double theta_e, Index i, Index j) {
  const double local = std::exp(-(a.row(i) - b.row(j)).squaredNorm() / (2.0 * theta_e * theta_e));
  if (i == a.rows() - 1 && j == b.rows() - 1) return local;
  double rest = 0.0;
  if (i + 1 < a.rows()) rest += paths_from(a, b, theta_e, i + 1, j);
  if (j + 1 < b.rows()) rest += paths_from(a, b, theta_e, i, j + 1);
  if (i + 1 < a.rows() && j + 1 < b.rows()) rest += paths_from(a, b, theta_e, i + 1, j + 1);
  return local * rest;
}

int symbol_code(char c) {
  static constexpr std::string_view kAlphabet = "ACGTKMRY";
  const auto pos = kAlphabet.find(c);
  if (pos == std::string_view::npos) throw DomainError(std::string("oracle: symbol outside the alphabet: ") + c);
  return static_cast<int>(pos);
}

Eigen::VectorXd kmer_counts(std::string_view s, int k, char missing) {
  const Index dim = static_cast<Index>(std::pow(8, k));
  Eigen::VectorXd counts = Eigen::VectorXd::Zero(dim);
  for (std::size_t start = 0; start + static_cast<std::size_t>(k) <= s.size(); ++start) {
    Index code = 0;
    bool skip = false;
    for (int t = 0; t < k; ++t) {
      const char c = s[start + static_cast<std::size_t>(t)];
      if (c == missing) {
        skip = true;
        break;
      }
      code = code * 8 + symbol_code(c);
    }
    if (!skip) counts(code) += 1.0;
  }
  return counts;
}

}  // namespace

double gak_raw(const EnvSeries& a, const EnvSeries& b, double theta_e) {
  if (a.rows() < 1 || b.rows() < 1 || a.rows() > 4 || b.rows() > 4) {
    throw DomainError("oracle gak: series lengths must lie in [1, 4]");
  }
  if (a.cols() != b.cols()) throw DomainError("oracle gak: dimension mismatch");
  return paths_from(a, b, theta_e, 0, 0);
}

double gak(const EnvSeries& a, const EnvSeries& b, double theta_e) {
  return gak_raw(a, b, theta_e) / std::sqrt(gak_raw(a, a, theta_e) * gak_raw(b, b, theta_e));
}

double spectrum(std::string_view a, std::string_view b, int k, char missing) {
  if (k < 1 || k > 4) throw DomainError("oracle spectrum: k must lie in [1, 4]");
  const Eigen::VectorXd ca = kmer_counts(a, k, missing);
  const Eigen::VectorXd cb = kmer_counts(b, k, missing);
  return ca.dot(cb) / (ca.norm() * cb.norm());
}

double crps(double mu, double sigma, double y) {
  if (!(sigma > 0.0)) throw DomainError("oracle crps: sigma must be positive");
  const boost::math::normal_distribution<double> law(mu, sigma);
  const double lo = std::min(mu - 12.0 * sigma, y);
  const double hi = std::max(mu + 12.0 * sigma, y);
  using Rule = boost::math::quadrature::gauss_kronrod<double, 61>;
  double err_left = 0.0;
  double err_right = 0.0;
  const double left = Rule::integrate([&](double u) { return std::pow(boost::math::cdf(law, u), 2); }, lo, y, 15,
                                      1e-12, &err_left);
  const double right = Rule::integrate([&](double u) { return std::pow(boost::math::cdf(complement(law, u)), 2); },
                                       y, hi, 15, 1e-12, &err_right);
  if (err_left + err_right > 1e-8) throw NumericalError("oracle crps: quadrature did not converge");
  return left + right;
}

Conditional posterior(const Eigen::MatrixXd& joint, const std::vector<Index>& observed, Index target,
                      const Eigen::VectorXd& z, double trend_variance) {
  if (observed.size() > 50) throw DomainError("oracle posterior: at most 50 observations");
  if (static_cast<Index>(observed.size()) != z.size()) throw DomainError("oracle posterior: z length mismatch");
  const Index n = z.size();
  Eigen::MatrixXd cov = joint;
  cov.array() += trend_variance;
  Eigen::MatrixXd obs(n, n);
  Eigen::VectorXd cross(n);
  for (Index i = 0; i < n; ++i) {
    cross(i) = cov(target, observed[static_cast<std::size_t>(i)]);
    for (Index j = 0; j < n; ++j) obs(i, j) = cov(observed[static_cast<std::size_t>(i)], observed[static_cast<std::size_t>(j)]);
  }
  const Eigen::FullPivLU<Eigen::MatrixXd> lu(obs);
  if (!lu.isInvertible()) throw NumericalError("oracle posterior: singular covariance");
  const Eigen::VectorXd w = lu.solve(cross);
  return {w.dot(z), cov(target, target) - w.dot(cross)};
}

}  // namespace gxe::oracle
