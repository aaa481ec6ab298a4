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
#include <map>
#include <random>

#include "gxe/error.hpp"
#include "gxe/evaluation.hpp"

namespace gxe {

std::string_view to_string(Scenario scenario) {
  return scenario == Scenario::new_environment ? "new-environment" : "new-variety";
}

Scenario parse_scenario(std::string_view text) {
  if (text == "new-environment" || text == "new_environment" || text == "env") return Scenario::new_environment;
  if (text == "new-variety" || text == "new_variety" || text == "variety") return Scenario::new_variety;
  throw UsageError("unknown scenario '" + std::string(text) + "' (expected new-environment or new-variety)");
}

void SplitPlan::validate() const {
  if (n_splits < 1) throw DomainError("split plan: need at least one split");
  if (!(pool_fraction > 0.0 && pool_fraction <= 1.0)) throw DomainError("split plan: pool_fraction must lie in (0, 1]");
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) throw DomainError("split plan: test_fraction must lie in (0, 1)");
  if (leakage < 0) throw DomainError("split plan: leakage must be nonnegative");
}

Split make_split(const Dataset& data, const SplitPlan& plan, int index) {
  plan.validate();
  const bool by_env = plan.scenario == Scenario::new_environment;
  const auto group_of = [&](std::size_t r) { return by_env ? data.environment[r] : data.variety[r]; };
  {
    std::vector<std::size_t> all(data.size());
    for (std::size_t r = 0; r < data.size(); ++r) all[r] = group_of(r);
    std::sort(all.begin(), all.end());
    if (std::unique(all.begin(), all.end()) - all.begin() < 2) {
      throw DomainError(std::string("split plan: need at least two groups for scenario ") +
                        std::string(to_string(plan.scenario)));
    }
  }

  std::seed_seq seq{static_cast<std::uint32_t>(plan.seed), static_cast<std::uint32_t>(plan.seed >> 32),
                    static_cast<std::uint32_t>(index)};
  std::mt19937_64 rng(seq);

  std::vector<std::size_t> pool(data.size());
  for (std::size_t r = 0; r < pool.size(); ++r) pool[r] = r;
  std::shuffle(pool.begin(), pool.end(), rng);
  const auto pool_size = std::max<std::size_t>(
      2, static_cast<std::size_t>(std::llround(plan.pool_fraction * static_cast<double>(data.size()))));
  pool.resize(std::min(pool_size, data.size()));
  std::sort(pool.begin(), pool.end());

  // Groups present in the pool, in table order, then shuffled.
  std::map<std::size_t, std::vector<std::size_t>> members;
  for (std::size_t r : pool) members[group_of(r)].push_back(r);
  std::vector<std::size_t> order;
  for (const auto& [g, rows] : members) order.push_back(g);
  std::shuffle(order.begin(), order.end(), rng);

  Split out;
  const double target = plan.test_fraction * static_cast<double>(pool.size());
  std::vector<std::size_t> test_groups;
  std::size_t test_size = 0;
  for (std::size_t g : order) {
    if (static_cast<double>(test_size) >= target - 1e-9) break;
    if (test_groups.size() + 1 == order.size()) {
      out.warnings.push_back("split " + std::to_string(index) + ": stopped early to keep one training group");
      break;
    }
    test_groups.push_back(g);
    test_size += members[g].size();
  }

  std::vector<bool> is_test(data.size(), false);
  for (std::size_t g : test_groups) {
    std::vector<std::size_t> rows = members[g];
    std::shuffle(rows.begin(), rows.end(), rng);
    const std::size_t leak = std::min<std::size_t>(static_cast<std::size_t>(plan.leakage), rows.size());
    if (plan.leakage > 0 && leak == rows.size()) {
      out.warnings.push_back("split " + std::to_string(index) + ": test group with " + std::to_string(rows.size()) +
                             " record(s) moved entirely to training by leakage");
    }
    for (std::size_t i = leak; i < rows.size(); ++i) is_test[rows[i]] = true;
  }
  for (std::size_t r : pool) (is_test[r] ? out.test : out.train).push_back(r);
  return out;
}

std::vector<Split> make_splits(const Dataset& data, const SplitPlan& plan) {
  plan.validate();
  std::vector<Split> out;
  out.reserve(static_cast<std::size_t>(plan.n_splits));
  for (int s = 0; s < plan.n_splits; ++s) out.push_back(make_split(data, plan, s));
  return out;
}

}  // namespace gxe
