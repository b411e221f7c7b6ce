// Copyright 2026 The ubatch Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include <random>

#include "test_util.hpp"
#include "ubatch/exhaustive.hpp"
#include "ubatch/wd_optimizer.hpp"

using namespace ubatch;
using test::cost;
using test::make_model;
using test::micro;

namespace {

Configuration point(Rat64 time, std::int64_t ws, std::int64_t batch = 1,
                    std::int32_t algo = 0) {
  return Configuration({micro(algo, batch, time, ws)});
}

ConfigurationSet set_of(std::string name, std::vector<Configuration> members) {
  ConfigurationSet s;
  s.kernel = unit_kernel(1, OpType::kForward, std::move(name));
  s.members = std::move(members);
  return s;
}

}  // namespace

TEST_CASE("desirable set keeps exactly the undominated members") {
  std::vector<Configuration> configs = {
      point(Rat64(10), 100), point(Rat64(12), 50), point(Rat64(15), 40),
      point(Rat64(11), 120)};
  auto front = desirable_set(configs);
  REQUIRE(front.size() == 3);
  CHECK(front[0] == point(Rat64(10), 100));  // (11,120) dominated by (10,100)
  CHECK(front[1] == point(Rat64(12), 50));
  CHECK(front[2] == point(Rat64(15), 40));

  CHECK(desirable_set({}).empty());

  auto collapsed = desirable_set({point(Rat64(5), 5), point(Rat64(5), 5)});
  CHECK(collapsed.size() == 1);
}

TEST_CASE("desirable set equals the pairwise dominance oracle") {
  std::mt19937_64 rng(301);
  std::vector<Configuration> configs;
  for (int i = 0; i < 200; ++i) {
    configs.push_back(point(Rat64(pick(rng, 0, 40)), pick(rng, 0, 40)));
  }
  auto front = desirable_set(configs);

  // quadratic filter: keep c unless some other strictly-or-weakly better
  // element beats it in one coordinate (duplicates keep one representative)
  std::vector<std::pair<Rat64, std::int64_t>> kept;
  for (const auto& c : configs) {
    bool dominated = false;
    for (const auto& other : configs) {
      if (other.time() <= c.time() && other.workspace() <= c.workspace() &&
          (other.time() < c.time() || other.workspace() < c.workspace())) {
        dominated = true;
        break;
      }
    }
    if (!dominated) kept.emplace_back(c.time(), c.workspace());
  }
  std::sort(kept.begin(), kept.end());
  kept.erase(std::unique(kept.begin(), kept.end()), kept.end());

  REQUIRE(front.size() == kept.size());
  for (std::size_t i = 0; i < front.size(); ++i) {
    CHECK(front[i].time() == kept[i].first);
    CHECK(front[i].workspace() == kept[i].second);
  }
}

TEST_CASE("desirable set is idempotent") {
  std::mt19937_64 rng(313);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Configuration> configs;
    int n = static_cast<int>(pick(rng, 0, 30));
    for (int i = 0; i < n; ++i) {
      configs.push_back(point(Rat64(pick(rng, 0, 20)), pick(rng, 0, 20)));
    }
    auto once = desirable_set(configs);
    CHECK(desirable_set(once) == once);
  }
}

TEST_CASE("equal-time fronts collapse to the least workspace") {
  // one linear algorithm, 10 B/sample: every split of 4 costs 4 us, so only
  // the all-singles plan (workspace 10) survives
  CostProvider provider(make_model({cost("1", "0", 10)}));
  auto front = config_set(provider, unit_kernel(4), 4, 40, BatchSizePolicy::kAll);
  REQUIRE(front.members.size() == 1);
  CHECK(front.members[0].time() == Rat64(4));
  CHECK(front.members[0].workspace() == 10);
  CHECK(front.members[0].size() == 4);
}

TEST_CASE("mixed plans appear on the front when they trade time for space") {
  // CHEAP: 3 us/sample, free. FAST: 1 us/sample, 10 B/sample, min batch 2.
  CostProvider provider(
      make_model({cost("3", "0", 0), cost("1", "0", 10, 0, 2, 1)}));
  auto front = config_set(provider, unit_kernel(3), 3, 1000, BatchSizePolicy::kAll);
  REQUIRE(front.members.size() == 3);
  CHECK(front.members[0] == Configuration({micro(1, 3, Rat64(3), 30)}));
  CHECK(front.members[1] ==
        Configuration({micro(1, 2, Rat64(2), 20), micro(0, 1, Rat64(3), 0)}));
  CHECK(front.members[2] == Configuration({micro(0, 3, Rat64(9), 0)}));
}

TEST_CASE("undivided policy restricts the front to single invocations") {
  CostProvider provider(
      make_model({cost("3", "0", 0), cost("1", "0", 10, 0, 2, 1)}));
  auto front =
      config_set(provider, unit_kernel(6), 6, 1000, BatchSizePolicy::kUndivided);
  for (const auto& member : front.members) CHECK(member.size() == 1);
}

TEST_CASE("config_set matches pruning the exhaustive enumeration") {
  std::mt19937_64 rng(331);
  const BatchSizePolicy policies[] = {BatchSizePolicy::kAll,
                                      BatchSizePolicy::kPowerOfTwo,
                                      BatchSizePolicy::kUndivided};
  for (int trial = 0; trial < 30; ++trial) {
    CostProvider provider(random_model(rng, static_cast<int>(pick(rng, 1, 3))));
    std::int64_t batch = pick(rng, 1, 8);
    std::int64_t budget = random_budget(rng, batch);
    BatchSizePolicy policy = policies[pick(rng, 0, 2)];
    KernelDescriptor k = unit_kernel(batch);

    auto front = config_set(provider, k, batch, budget, policy);
    auto oracle = desirable_set(
        exhaustive::all_configurations(provider, k, batch, budget, policy));

    REQUIRE(front.members.size() == oracle.size());
    for (std::size_t i = 0; i < oracle.size(); ++i) {
      CHECK(front.members[i].time() == oracle[i].time());
      CHECK(front.members[i].workspace() == oracle[i].workspace());
    }
  }
}

TEST_CASE("the front contains the per-kernel optimum") {
  std::mt19937_64 rng(349);
  for (int trial = 0; trial < 30; ++trial) {
    CostProvider provider(random_model(rng, 3));
    std::int64_t batch = pick(rng, 1, 10);
    std::int64_t budget = random_budget(rng, batch);
    KernelDescriptor k = unit_kernel(batch);
    auto front = config_set(provider, k, batch, budget, BatchSizePolicy::kAll);
    std::optional<WrResult> wr;
    try {
      wr = wr_optimize(provider, k, batch, budget, BatchSizePolicy::kAll);
    } catch (const infeasible_error&) {
    }
    if (!wr.has_value()) {
      CHECK(front.members.empty());
      continue;
    }
    REQUIRE_FALSE(front.members.empty());
    CHECK(front.members.front().time() == wr->total_time);
    CHECK(front.members.front().workspace() <= wr->config.workspace());
  }
}

TEST_CASE("front size cap is enforced") {
  CostProvider provider(
      make_model({cost("3", "0", 0), cost("1", "0", 10, 0, 2, 1)}));
  CHECK_THROWS_AS(
      config_set(provider, unit_kernel(3), 3, 1000, BatchSizePolicy::kAll, 1),
      std::runtime_error);
}

TEST_CASE("two-kernel selection example") {
  ChoiceProblem problem;
  problem.budget = 72;
  problem.choices.push_back(set_of(
      "k1", {point(Rat64(4), 64, 1, 1), point(Rat64(10), 8, 1, 0)}));
  problem.choices.push_back(set_of(
      "k2", {point(Rat64(8), 64, 1, 1), point(Rat64(10), 8, 1, 0)}));

  ChoiceSolution solution = ilp_solve(problem);
  CHECK(solution.total_time == Rat64(14));
  CHECK(solution.total_workspace == 72);
  CHECK(solution.selection[0].workspace() == 64);
  CHECK(solution.selection[1].workspace() == 8);

  problem.budget = 15;  // minimum achievable is 8 + 8 = 16
  try {
    ilp_solve(problem);
    FAIL("expected infeasible_error");
  } catch (const infeasible_error& e) {
    CHECK(e.min_total_workspace() == 16);
  }

  problem.budget = std::numeric_limits<std::int64_t>::max();
  ChoiceSolution unconstrained = ilp_solve(problem);
  CHECK(unconstrained.total_time == Rat64(12));  // both take their fastest
}

TEST_CASE("single kernel takes its fastest member within budget") {
  ChoiceProblem problem;
  problem.budget = 50;
  problem.choices.push_back(set_of(
      "k", {point(Rat64(4), 64, 1, 1), point(Rat64(7), 40, 1, 2),
            point(Rat64(10), 8, 1, 0)}));
  CHECK(ilp_solve(problem).total_time == Rat64(7));
}

TEST_CASE("solver equals brute force on random choice problems") {
  std::mt19937_64 rng(401);
  for (int trial = 0; trial < 30; ++trial) {
    ChoiceProblem problem;
    std::size_t kernel_count = pick(rng, 1, 4);
    for (std::size_t g = 0; g < kernel_count; ++g) {
      std::vector<Configuration> members;
      std::size_t count = pick(rng, 1, 10);
      for (std::size_t m = 0; m < count; ++m) {
        members.push_back(point(Rat64(pick(rng, 0, 60), 2), pick(rng, 0, 50)));
      }
      problem.choices.push_back(set_of("k" + std::to_string(g), members));
    }
    problem.budget = pick(rng, 0, 120);

    std::vector<std::vector<Configuration>> sets;
    for (const auto& choice : problem.choices) sets.push_back(choice.members);
    auto brute = exhaustive::choice_minimum(sets, problem.budget);

    std::optional<Rat64> solved;
    try {
      ChoiceSolution solution = ilp_solve(problem);
      solved = solution.total_time;
      CHECK(solution.selection.size() == kernel_count);
      CHECK(solution.total_workspace <= problem.budget);
    } catch (const infeasible_error&) {
    }
    CHECK(solved == brute);
  }
}

TEST_CASE("one kernel under wd equals wr at the same budget") {
  std::mt19937_64 rng(431);
  for (int trial = 0; trial < 30; ++trial) {
    CostProvider provider(random_model(rng, 3));
    std::int64_t batch = pick(rng, 1, 10);
    std::int64_t budget = random_budget(rng, batch);
    KernelDescriptor k = unit_kernel(batch);
    std::optional<Rat64> wd;
    try {
      wd = wd_optimize(provider, {k}, budget, BatchSizePolicy::kAll).total_time;
    } catch (const infeasible_error&) {
    }
    std::optional<Rat64> wr;
    try {
      wr = wr_optimize(provider, k, batch, budget, BatchSizePolicy::kAll).total_time;
    } catch (const infeasible_error&) {
    }
    CHECK(wd == wr);
  }
}

TEST_CASE("replicated kernels share one front but choose independently") {
  // CHEAP: 3 us/sample free; FAST: 1 us/sample, 10 B/sample, min batch 2.
  CostProvider provider(
      make_model({cost("3", "0", 0), cost("1", "0", 10, 0, 2, 1)}));
  KernelDescriptor a = unit_kernel(2, OpType::kForward, "twin_a");
  KernelDescriptor b = unit_kernel(2, OpType::kForward, "twin_b");
  REQUIRE(a.canonical_hash() == b.canonical_hash());

  // budget 20 fits exactly one FAST plan (20 B); the other twin runs CHEAP
  WdResult result = wd_optimize(provider, {a, b}, 20, BatchSizePolicy::kAll);
  CHECK(result.unique_kernel_count == 1);
  CHECK(result.total_time == Rat64(2 + 6));
  CHECK(result.selection[0] != result.selection[1]);
}

TEST_CASE("wd equals the unpruned cross-product enumeration") {
  std::mt19937_64 rng(457);
  for (int trial = 0; trial < 15; ++trial) {
    CostProvider provider(random_model(rng, static_cast<int>(pick(rng, 1, 3))));
    std::size_t kernel_count = pick(rng, 1, 3);
    std::vector<KernelDescriptor> kernels;
    std::int64_t batch_sum = 0;
    for (std::size_t i = 0; i < kernel_count; ++i) {
      std::int64_t batch = pick(rng, 1, 6);
      kernels.push_back(unit_kernel(batch, static_cast<OpType>(i % 3),
                                    "k" + std::to_string(i)));
      batch_sum += batch;
    }
    std::int64_t budget = pick(rng, 0, 10 * batch_sum);

    std::optional<Rat64> wd;
    try {
      wd = wd_optimize(provider, kernels, budget, BatchSizePolicy::kAll).total_time;
    } catch (const infeasible_error&) {
    }

    std::vector<std::vector<Configuration>> sets;
    bool enumerable = true;
    for (const auto& k : kernels) {
      sets.push_back(exhaustive::all_configurations(provider, k, k.batch, budget,
                                                    BatchSizePolicy::kAll));
      if (sets.back().empty()) enumerable = false;
    }
    std::optional<Rat64> brute;
    if (enumerable) brute = exhaustive::choice_minimum(sets, budget);
    CHECK(wd == brute);
  }
}

TEST_CASE("wd with the summed wr budget never loses to wr") {
  std::mt19937_64 rng(479);
  for (int trial = 0; trial < 30; ++trial) {
    // algorithm 0 kept workspace-free so per-kernel wr is always feasible
    std::vector<AlgorithmCost> costs{cost("4", "0", 0)};
    int extra = static_cast<int>(pick(rng, 1, 2));
    CostModel probe = random_model(rng, extra);
    for (const auto& spec : probe.algorithms()) costs.push_back(spec.cost);
    CostProvider provider(make_model(costs));

    std::size_t kernel_count = pick(rng, 2, 4);
    std::vector<KernelDescriptor> kernels;
    for (std::size_t i = 0; i < kernel_count; ++i) {
      kernels.push_back(unit_kernel(pick(rng, 1, 8), static_cast<OpType>(i % 3),
                                    "k" + std::to_string(i)));
    }
    std::int64_t per_kernel_limit = pick(rng, 0, 40);

    Rat64 wr_total;
    for (const auto& k : kernels) {
      wr_total += wr_optimize(provider, k, k.batch, per_kernel_limit,
                              BatchSizePolicy::kAll)
                      .total_time;
    }
    Rat64 wd_total =
        wd_optimize(provider, kernels,
                    per_kernel_limit * static_cast<std::int64_t>(kernel_count),
                    BatchSizePolicy::kAll)
            .total_time;
    CHECK(wd_total <= wr_total);
  }
}

TEST_CASE("wd budget monotonicity") {
  std::mt19937_64 rng(499);
  for (int trial = 0; trial < 40; ++trial) {
    CostProvider provider(random_model(rng, 2));
    std::vector<KernelDescriptor> kernels = {
        unit_kernel(pick(rng, 1, 6), OpType::kForward, "a"),
        unit_kernel(pick(rng, 1, 6), OpType::kBackwardData, "b")};
    std::int64_t b1 = pick(rng, 0, 60);
    std::int64_t b2 = b1 + pick(rng, 0, 60);
    auto solve = [&](std::int64_t budget) -> std::optional<Rat64> {
      try {
        return wd_optimize(provider, kernels, budget, BatchSizePolicy::kAll)
            .total_time;
      } catch (const infeasible_error&) {
        return std::nullopt;
      }
    };
    auto tight = solve(b1);
    auto roomy = solve(b2);
    if (tight.has_value()) {
      REQUIRE(roomy.has_value());
      CHECK(*roomy <= *tight);
    }
  }
}

TEST_CASE("zero budget is legal when workspace-free plans exist") {
  CostProvider provider(make_model({cost("2", "0", 0), cost("1", "0", 10)}));
  std::vector<KernelDescriptor> kernels = {unit_kernel(4, OpType::kForward, "a"),
                                           unit_kernel(4, OpType::kBackwardData, "b")};
  WdResult result = wd_optimize(provider, kernels, 0, BatchSizePolicy::kAll);
  CHECK(result.total_workspace == 0);
  CHECK(result.total_time == Rat64(16));
}

TEST_CASE("solutions satisfy the selection constraints exactly") {
  std::mt19937_64 rng(521);
  for (int trial = 0; trial < 20; ++trial) {
    CostProvider provider(random_model(rng, 3));
    std::vector<KernelDescriptor> kernels;
    std::size_t kernel_count = pick(rng, 1, 3);
    for (std::size_t i = 0; i < kernel_count; ++i) {
      kernels.push_back(unit_kernel(pick(rng, 1, 6), OpType::kForward,
                                    "k" + std::to_string(i)));
    }
    std::int64_t budget = pick(rng, 0, 100);
    try {
      WdResult result =
          wd_optimize(provider, kernels, budget, BatchSizePolicy::kAll);
      REQUIRE(result.selection.size() == kernels.size());
      Rat64 time_sum;
      std::int64_t ws_sum = 0;
      for (std::size_t i = 0; i < kernels.size(); ++i) {
        CHECK(result.selection[i].covered_batch() == kernels[i].batch);
        time_sum += result.selection[i].time();
        ws_sum += result.selection[i].workspace();
      }
      CHECK(time_sum == result.total_time);
      CHECK(ws_sum == result.total_workspace);
      CHECK(ws_sum <= budget);
    } catch (const infeasible_error&) {
    }
  }
}
