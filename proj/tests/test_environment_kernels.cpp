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
#include <random>

#include <gtest/gtest.h>

#include "gxe/environment_kernels.hpp"
#include "gxe/error.hpp"
#include "gxe/factor_gram.hpp"
#include "gxe/oracles.hpp"
#include "test_util.hpp"

using namespace gxe;

namespace {

// Direct-space version of the alignment recursion, for comparison with the
// log-space implementation on inputs that do not underflow.
double gak_direct(const EnvSeries& a, const EnvSeries& b, double theta) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(a.rows() + 1, b.rows() + 1);
  m(0, 0) = 1.0;
  for (Index i = 1; i <= a.rows(); ++i) {
    for (Index j = 1; j <= b.rows(); ++j) {
      const double kappa = std::exp(-(a.row(i - 1) - b.row(j - 1)).squaredNorm() / (2 * theta * theta));
      m(i, j) = kappa * (m(i - 1, j) + m(i, j - 1) + m(i - 1, j - 1));
    }
  }
  return m(a.rows(), b.rows());
}

}  // namespace

TEST(EnvDistance, Examples) {
  const EnvSeries zero = EnvSeries::Zero(6, 1);
  const EnvSeries ones = EnvSeries::Ones(6, 1);
  EXPECT_DOUBLE_EQ(env_euclidean_distance(zero, zero), 0.0);
  EXPECT_NEAR(env_euclidean_distance(zero, ones), 1.0, 1e-15);
  EnvSeries a = EnvSeries::Zero(6, 2), b = a;
  b(3, 1) = 2.0;
  EXPECT_NEAR(env_euclidean_distance(a, b), 0.5773502691896258, 1e-15);
  EXPECT_THROW(env_euclidean_distance(a, zero), DomainError);
}

TEST(EnvKernels, Examples) {
  const EnvSeries a = EnvSeries::Zero(6, 1);
  EXPECT_DOUBLE_EQ(exp_eucl_kernel(a, a, 0.4), 1.0);
  const EnvSeries b = EnvSeries::Constant(6, 1, 0.7);
  EXPECT_NEAR(exp_eucl_kernel(a, b, 0.7), std::exp(-1.0), 1e-15);
  const EnvSeries c = EnvSeries::Constant(6, 1, 0.5);
  EXPECT_NEAR(gau_eucl_kernel(a, c, 1.0), std::exp(-0.25), 1e-15);
}

TEST(Gak, SingleStepIsLocalKernel) {
  EnvSeries u(1, 2), v(1, 2);
  u << 0.3, -1.0;
  v << 1.1, 0.4;
  const double theta = 0.9;
  EXPECT_NEAR(gak_kernel(u, v, theta), std::exp(-(u - v).squaredNorm() / (2 * theta * theta)), 1e-15);
}

TEST(Gak, SelfSimilarityAndSymmetry) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 20; ++t) {
    const EnvSeries a = fixtures::random_series(rng, 6, 3);
    const EnvSeries b = fixtures::random_series(rng, 6, 3);
    EXPECT_NEAR(gak_kernel(a, a, 0.7), 1.0, 1e-14);
    EXPECT_EQ(gak_kernel(a, b, 0.7), gak_kernel(b, a, 0.7));
  }
}

TEST(Gak, MatchesPathEnumeration) {
  std::mt19937_64 rng(6);
  for (int t = 0; t < 40; ++t) {
    const EnvSeries a = fixtures::random_series(rng, 2 + t % 3, 2);
    const EnvSeries b = fixtures::random_series(rng, 2 + (t / 3) % 3, 2);
    const double theta = 0.5 + 0.1 * t;
    EXPECT_NEAR(gak_kernel(a, b, theta), oracle::gak(a, b, theta), 1e-12 * oracle::gak(a, b, theta) + 1e-300);
  }
}

TEST(Gak, LogSpaceMatchesDirectSpace) {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 30; ++t) {
    const EnvSeries a = fixtures::random_series(rng, 6, 2);
    const EnvSeries b = fixtures::random_series(rng, 6, 2);
    const double direct = gak_direct(a, b, 1.5);
    EXPECT_NEAR(std::exp(gak_log_raw(a, b, 1.5).log_value), direct, 1e-10 * direct);
  }
}

TEST(Gak, LogSpaceSurvivesTinyLengthScales) {
  std::mt19937_64 rng(8);
  const EnvSeries a = fixtures::random_series(rng, 6, 4) * 10.0;
  const EnvSeries b = fixtures::random_series(rng, 6, 4) * 10.0;
  const double v = gak_kernel(a, b, 0.01);
  EXPECT_TRUE(std::isfinite(v));
  EXPECT_GE(v, 0.0);
  EXPECT_LE(v, 1.0);
}

TEST(Gak, ThetaDerivative) {
  std::mt19937_64 rng(9);
  const EnvSeries a = fixtures::random_series(rng, 6, 2);
  const EnvSeries b = fixtures::random_series(rng, 6, 2);
  const double theta = 0.8, h = 1e-6;
  const double fd = (gak_log_raw(a, b, theta + h).log_value - gak_log_raw(a, b, theta - h).log_value) / (2 * h);
  EXPECT_NEAR(gak_log_raw(a, b, theta).dlog_dtheta, fd, 1e-6 * std::abs(fd));
}

class EnvGramTest : public ::testing::TestWithParam<EnvironmentKernel> {};

TEST_P(EnvGramTest, PsdUnitDiagonalAndDerivative) {
  std::mt19937_64 rng(10);
  std::vector<std::string> ids;
  for (int i = 0; i < 10; ++i) ids.push_back("e" + std::to_string(i));
  const EnvCovariateTable raw(ids, {"a", "b"}, fixtures::random_series(rng, 10, 12));
  const auto table = normalize_env(raw, ids);
  const auto gram = build_environment_gram(GetParam(), table);
  for (double theta : {0.05, 0.25, 1.0, 4.0}) {
    const Eigen::MatrixXd k = gram->evaluate(theta, nullptr);
    EXPECT_TRUE(assert_psd(k, 1e-8).psd) << theta;
    EXPECT_LT((k.diagonal().array() - 1.0).abs().maxCoeff(), 1e-12);
  }
  const double theta = 0.9, h = 1e-6;
  Eigen::MatrixXd d;
  gram->evaluate(theta, &d);
  const Eigen::MatrixXd fd =
      (gram->evaluate(theta * std::exp(h), nullptr) - gram->evaluate(theta * std::exp(-h), nullptr)) / (2 * h);
  EXPECT_LT((d - fd).cwiseAbs().maxCoeff(), 1e-7);
}

TEST_P(EnvGramTest, InvariantToRawShiftAfterNormalization) {
  std::mt19937_64 rng(11);
  std::vector<std::string> ids;
  for (int i = 0; i < 7; ++i) ids.push_back("e" + std::to_string(i));
  const Eigen::MatrixXd values = fixtures::random_series(rng, 7, 6);
  Eigen::MatrixXd shifted = values;
  shifted.col(2).array() += 40.0;
  const auto a = build_environment_gram(GetParam(), normalize_env(EnvCovariateTable(ids, {"t"}, values), ids));
  const auto b = build_environment_gram(GetParam(), normalize_env(EnvCovariateTable(ids, {"t"}, shifted), ids));
  EXPECT_LT((a->evaluate(0.5, nullptr) - b->evaluate(0.5, nullptr)).cwiseAbs().maxCoeff(), 1e-12);
}

INSTANTIATE_TEST_SUITE_P(AllKernels, EnvGramTest,
                         ::testing::Values(EnvironmentKernel::gau_eucl, EnvironmentKernel::exp_eucl,
                                           EnvironmentKernel::gak));
