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

#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <utility>
#include <vector>

#include "ubatch/cost_provider.hpp"
#include "ubatch/domain.hpp"
#include "ubatch/parallel.hpp"
#include "ubatch/pareto.hpp"
#include "ubatch/wr_optimizer.hpp"

namespace ubatch {

inline constexpr std::size_t kDefaultFrontCap = 4096;

// Desirable subset of a configuration set: the (time, workspace) Pareto
// front. A dropped member is matched or beaten in both coordinates by some
// kept member, so it can never appear in an optimal selection; exact
// duplicates collapse to the canonically least representative.
inline std::vector<Configuration> desirable_set(std::vector<Configuration> configs) {
  struct Annotated {
    Rat64 time;
    std::int64_t ws;
    Configuration config;
  };
  std::vector<Annotated> annotated;
  annotated.reserve(configs.size());
  for (auto& c : configs) {
    Rat64 t = c.time();
    std::int64_t w = c.workspace();
    annotated.push_back(Annotated{t, w, std::move(c)});
  }
  annotated = pareto_front(
      std::move(annotated), [](const Annotated& a) { return a.time; },
      [](const Annotated& a) { return a.ws; },
      [](const Annotated& a, const Annotated& b) {
        return canonical_config_less(a.config, b.config);
      });
  std::vector<Configuration> front;
  front.reserve(annotated.size());
  for (auto& a : annotated) front.push_back(std::move(a.config));
  return front;
}

// Per-kernel desirable configuration set: every member covers the kernel's
// full mini-batch, fits the workspace budget, and is undominated. Sorted by
// time ascending (workspace descending).
struct ConfigurationSet {
  KernelDescriptor kernel;
  std::vector<Configuration> members;
};

// Builds the front of all policy-admissible configurations covering
// `mini_batch` via the pruned set recurrence
//
//   C(0) = {empty}
//   C(b) = front of { {m} + c : s admissible, m in micro front of size s,
//                                c in C(b - s) }
//
// Pruning at every level is lossless for the whole-network selection below:
// a configuration assembled from a dominated prefix is itself dominated.
// The fastest member of C(B) always matches the per-kernel WR optimum.
inline ConfigurationSet config_set(const CostProvider& provider,
                                   const KernelDescriptor& kernel,
                                   std::int64_t mini_batch,
                                   std::int64_t workspace_budget,
                                   BatchSizePolicy policy,
                                   std::size_t front_cap = kDefaultFrontCap) {
  if (mini_batch < 1) throw std::invalid_argument("mini_batch must be >= 1");
  if (workspace_budget < 0) {
    throw std::invalid_argument("workspace_budget must be >= 0");
  }
  struct Annotated {
    Rat64 time;
    std::int64_t ws;
    Configuration config;
  };
  const std::vector<std::int64_t> sizes =
      enumerate_micro_batches(policy, mini_batch);
  std::vector<std::vector<MicroConfiguration>> micro_fronts(
      static_cast<std::size_t>(mini_batch) + 1);
  for (std::int64_t s : sizes) {
    micro_fronts[static_cast<std::size_t>(s)] =
        provider.micro_config_set(kernel, s, workspace_budget);
  }

  std::vector<std::vector<Annotated>> fronts(
      static_cast<std::size_t>(mini_batch) + 1);
  for (std::int64_t b = 1; b <= mini_batch; ++b) {
    std::vector<Annotated> candidates;
    for (std::int64_t s : sizes) {
      if (s > b) break;
      for (const MicroConfiguration& m : micro_fronts[static_cast<std::size_t>(s)]) {
        if (s == b) {
          candidates.push_back(
              Annotated{m.time, m.workspace, Configuration::single(m)});
          continue;
        }
        for (const Annotated& rest : fronts[static_cast<std::size_t>(b - s)]) {
          candidates.push_back(
              Annotated{m.time + rest.time, std::max(m.workspace, rest.ws),
                        concat(Configuration::single(m), rest.config)});
        }
      }
    }
    // Same multiset reachable through many split orders; collapse before
    // pruning.
    std::sort(candidates.begin(), candidates.end(),
              [](const Annotated& a, const Annotated& b) {
                return canonical_config_less(a.config, b.config);
              });
    candidates.erase(std::unique(candidates.begin(), candidates.end(),
                                 [](const Annotated& a, const Annotated& b) {
                                   return a.config == b.config;
                                 }),
                     candidates.end());
    fronts[static_cast<std::size_t>(b)] = pareto_front(
        std::move(candidates), [](const Annotated& a) { return a.time; },
        [](const Annotated& a) { return a.ws; },
        [](const Annotated& a, const Annotated& b) {
          return canonical_config_less(a.config, b.config);
        });
    if (fronts[static_cast<std::size_t>(b)].size() > front_cap) {
      std::ostringstream os;
      os << "configuration front for kernel '" << kernel.layer_name
         << "' exceeds cap (" << fronts[static_cast<std::size_t>(b)].size()
         << " > " << front_cap << ") at batch " << b;
      throw std::runtime_error(os.str());
    }
  }

  ConfigurationSet result;
  result.kernel = kernel;
  result.members.reserve(fronts[static_cast<std::size_t>(mini_batch)].size());
  for (auto& a : fronts[static_cast<std::size_t>(mini_batch)]) {
    result.members.push_back(std::move(a.config));
  }
  return result;
}

// Whole-network selection problem: pick exactly one configuration per kernel
// so the summed workspace fits the budget and the summed time is minimal.
struct ChoiceProblem {
  std::vector<ConfigurationSet> choices;
  std::int64_t budget = 0;
};

struct ChoiceSolution {
  std::vector<Configuration> selection;  // one per kernel, problem order
  Rat64 total_time;
  std::int64_t total_workspace = 0;

  // Enforces the selection shape: exactly one member per kernel, exact
  // totals, and the budget constraint.
  void validate(const ChoiceProblem& problem) const {
    if (selection.size() != problem.choices.size()) {
      throw std::logic_error("solution must select one configuration per kernel");
    }
    Rat64 time_sum;
    std::int64_t ws_sum = 0;
    for (std::size_t i = 0; i < selection.size(); ++i) {
      const auto& members = problem.choices[i].members;
      if (std::find(members.begin(), members.end(), selection[i]) == members.end()) {
        throw std::logic_error("selected configuration is not in its choice set");
      }
      time_sum += selection[i].time();
      ws_sum += selection[i].workspace();
    }
    if (time_sum != total_time || ws_sum != total_workspace) {
      throw std::logic_error("solution totals do not match selection");
    }
    if (total_workspace > problem.budget) {
      throw std::logic_error("solution exceeds the workspace budget");
    }
  }
};

namespace detail {

inline std::int64_t saturating_add(std::int64_t a, std::int64_t b) {
  __int128 s = __int128(a) + b;
  if (s > std::numeric_limits<std::int64_t>::max()) {
    return std::numeric_limits<std::int64_t>::max();
  }
  return static_cast<std::int64_t>(s);
}

// Exact branch and bound for the multiple-choice knapsack. Within a group
// items go fastest first. Groups are explored widest time spread first, and
// groups with identical item sets stay adjacent: along such a run only
// non-decreasing item choices are enumerated, since any selection can be
// permuted into that canonical form without changing its totals. The
// incumbent starts at the greedy integral rounding of the linear relaxation.
// Nodes are pruned by (a) the reserved minimum workspace of the remaining
// groups, (b) the summed per-group minimum times, and (c) the
// linear-relaxation bound evaluated greedily over the convex hulls of the
// remaining groups' (workspace, time) fronts. The LP machinery runs on
// integer times scaled to a common denominator; if no safe scaling exists
// the solver falls back to bounds (a)+(b), which is slower but still exact.
class ChoiceSolver {
 public:
  explicit ChoiceSolver(const ChoiceProblem& problem) : problem_(problem) {
    budget_ = std::min(problem.budget,
                       std::numeric_limits<std::int64_t>::max() / 2);
    if (problem.budget < 0) {
      throw std::invalid_argument("budget must be >= 0");
    }
    if (problem.choices.empty()) {
      throw std::invalid_argument("choice problem has no kernels");
    }
    build_groups();
    order_groups();
    build_suffixes();
    try_scale();
  }

  ChoiceSolution solve() {
    if (suffix_min_ws_[0] > budget_) {
      std::ostringstream os;
      os << "infeasible: minimal total workspace " << suffix_min_ws_[0]
         << " bytes exceeds budget " << problem_.budget << " bytes";
      throw infeasible_error(os.str(), suffix_min_ws_[0]);
    }
    if (scaled_) seed_greedy();
    current_.assign(groups_.size(), 0);
    dfs(0, 0, Rat64(0), 0);

    std::vector<std::optional<Configuration>> picked(groups_.size());
    Rat64 total_time;
    std::int64_t total_ws = 0;
    for (std::size_t g = 0; g < groups_.size(); ++g) {
      const Item& item = groups_[g].items[best_choice_[g]];
      picked[original_[g]] =
          problem_.choices[original_[g]].members[static_cast<std::size_t>(item.member)];
      total_time += item.time;
      total_ws += item.ws;
    }
    ChoiceSolution solution;
    solution.selection.reserve(groups_.size());
    for (auto& config : picked) solution.selection.push_back(std::move(*config));
    solution.total_time = total_time;
    solution.total_workspace = total_ws;
    solution.validate(problem_);
    return solution;
  }

 private:
  struct Item {
    Rat64 time;
    std::int64_t ws = 0;
    std::int64_t scaled = 0;
    std::int32_t member = 0;
  };
  struct Group {
    std::vector<Item> items;  // time ascending, workspace descending
    std::vector<std::size_t> hull_items;  // hull position -> item index
    std::int64_t min_ws = 0;
    Rat64 min_ws_time;
    Rat64 min_time;
    std::int64_t min_ws_time_scaled = 0;
    std::int64_t min_time_scaled = 0;
  };
  struct HullInc {
    std::size_t group = 0;
    std::size_t pos = 0;  // hull position this increment advances from
    std::int64_t dws = 0;
    std::int64_t dt = 0;  // scaled time saved
  };

  void build_groups() {
    groups_.reserve(problem_.choices.size());
    for (std::size_t g = 0; g < problem_.choices.size(); ++g) {
      const auto& members = problem_.choices[g].members;
      if (members.empty()) {
        throw std::invalid_argument("kernel '" +
                                    problem_.choices[g].kernel.layer_name +
                                    "' has an empty choice set");
      }
      std::vector<Item> items;
      items.reserve(members.size());
      for (std::size_t m = 0; m < members.size(); ++m) {
        std::int64_t ws = members[m].workspace();
        if (ws > budget_) continue;  // can never satisfy the budget alone
        items.push_back(Item{members[m].time(), ws, 0,
                             static_cast<std::int32_t>(m)});
      }
      items = pareto_front(
          std::move(items), [](const Item& i) { return i.time; },
          [](const Item& i) { return i.ws; },
          [](const Item& a, const Item& b) { return a.member < b.member; });
      if (items.empty()) {
        std::ostringstream os;
        os << "infeasible: kernel '" << problem_.choices[g].kernel.layer_name
           << "' has no configuration within the budget";
        throw infeasible_error(os.str());
      }
      Group group;
      group.min_ws = items.back().ws;
      group.min_ws_time = items.back().time;
      group.min_time = items.front().time;
      group.items = std::move(items);
      groups_.push_back(std::move(group));
    }
  }

  static bool items_less(const std::vector<Item>& a, const std::vector<Item>& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (a[i].time != b[i].time) return a[i].time < b[i].time;
      if (a[i].ws != b[i].ws) return a[i].ws < b[i].ws;
      if (a[i].member != b[i].member) return a[i].member < b[i].member;
    }
    return false;
  }

  static bool items_equal(const std::vector<Item>& a, const std::vector<Item>& b) {
    return !items_less(a, b) && !items_less(b, a);
  }

  void order_groups() {
    std::vector<std::size_t> order(groups_.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      Rat64 spread_a = groups_[a].items.back().time - groups_[a].items.front().time;
      Rat64 spread_b = groups_[b].items.back().time - groups_[b].items.front().time;
      if (spread_a != spread_b) return spread_a > spread_b;
      if (!items_equal(groups_[a].items, groups_[b].items)) {
        return items_less(groups_[a].items, groups_[b].items);
      }
      return a < b;
    });
    std::vector<Group> ordered;
    ordered.reserve(groups_.size());
    original_.reserve(groups_.size());
    same_as_prev_.assign(groups_.size(), false);
    for (std::size_t g = 0; g < order.size(); ++g) {
      ordered.push_back(std::move(groups_[order[g]]));
      original_.push_back(order[g]);
      if (g > 0) {
        same_as_prev_[g] = items_equal(ordered[g].items, ordered[g - 1].items);
      }
    }
    groups_ = std::move(ordered);
  }

  void build_suffixes() {
    std::size_t n = groups_.size();
    suffix_min_ws_.assign(n + 1, 0);
    suffix_min_time_.assign(n + 1, Rat64(0));
    for (std::size_t g = n; g-- > 0;) {
      suffix_min_ws_[g] = saturating_add(suffix_min_ws_[g + 1], groups_[g].min_ws);
      suffix_min_time_[g] = suffix_min_time_[g + 1] + groups_[g].min_time;
    }
  }

  void try_scale() {
    // Common denominator for integer time arithmetic in the LP machinery.
    std::int64_t den = 1;
    constexpr std::int64_t kDenCap = 1'000'000'000'000'000LL;
    for (const auto& group : groups_) {
      for (const auto& item : group.items) {
        std::int64_t g = std::gcd(den, item.time.den());
        __int128 l = __int128(den / g) * item.time.den();
        if (l > kDenCap) return;  // fall back to the weak bound
        den = static_cast<std::int64_t>(l);
      }
    }
    const std::int64_t num_cap = std::numeric_limits<std::int64_t>::max() /
                                 (4 * static_cast<std::int64_t>(groups_.size() + 2));
    for (auto& group : groups_) {
      for (auto& item : group.items) {
        __int128 scaled = __int128(item.time.num()) * (den / item.time.den());
        if (scaled < 0 || scaled > num_cap) return;
        item.scaled = static_cast<std::int64_t>(scaled);
      }
      group.min_ws_time_scaled = group.items.back().scaled;
      group.min_time_scaled = group.items.front().scaled;
    }
    std::size_t n = groups_.size();
    suffix_base_scaled_.assign(n + 1, 0);
    suffix_min_time_scaled_.assign(n + 1, 0);
    for (std::size_t g = n; g-- > 0;) {
      suffix_base_scaled_[g] =
          suffix_base_scaled_[g + 1] + groups_[g].min_ws_time_scaled;
      suffix_min_time_scaled_[g] =
          suffix_min_time_scaled_[g + 1] + groups_[g].min_time_scaled;
    }
    build_hull_increments();
    scaled_ = true;
  }

  void build_hull_increments() {
    // Per group: lower convex hull of (ws, time) with ws ascending and time
    // strictly descending, then the hull edges as "spend dws bytes to save
    // dt time" increments with non-increasing dt/dws along the hull.
    for (std::size_t g = 0; g < groups_.size(); ++g) {
      const auto& items = groups_[g].items;
      struct Point {
        std::int64_t ws;
        std::int64_t t;
        std::size_t item;
      };
      std::vector<Point> hull;
      for (std::size_t i = items.size(); i-- > 0;) {
        Point p{items[i].ws, items[i].scaled, i};
        while (hull.size() >= 2) {
          const Point& a = hull[hull.size() - 2];
          const Point& b = hull[hull.size() - 1];
          __int128 cross = __int128(b.ws - a.ws) * (p.t - a.t) -
                           __int128(b.t - a.t) * (p.ws - a.ws);
          if (cross <= 0) {
            hull.pop_back();
          } else {
            break;
          }
        }
        hull.push_back(p);
      }
      groups_[g].hull_items.clear();
      for (const Point& p : hull) groups_[g].hull_items.push_back(p.item);
      for (std::size_t i = 0; i + 1 < hull.size(); ++i) {
        increments_.push_back(HullInc{g, i, hull[i + 1].ws - hull[i].ws,
                                      hull[i].t - hull[i + 1].t});
      }
    }
    std::sort(increments_.begin(), increments_.end(),
              [](const HullInc& a, const HullInc& b) {
                __int128 lhs = __int128(a.dt) * b.dws;
                __int128 rhs = __int128(b.dt) * a.dws;
                if (lhs != rhs) return lhs > rhs;
                if (a.group != b.group) return a.group < b.group;
                return a.pos < b.pos;
              });
  }

  // Feasible warm start: all groups at their cheapest-workspace hull point,
  // then whole hull increments applied best ratio first while they fit.
  void seed_greedy() {
    std::vector<std::size_t> pos(groups_.size(), 0);
    std::int64_t capacity = budget_ - suffix_min_ws_[0];
    for (const HullInc& inc : increments_) {
      if (inc.pos != pos[inc.group]) continue;  // an earlier edge was skipped
      if (inc.dws > capacity) continue;
      capacity -= inc.dws;
      ++pos[inc.group];
    }
    best_choice_.assign(groups_.size(), 0);
    Rat64 total;
    std::int64_t scaled = 0;
    for (std::size_t g = 0; g < groups_.size(); ++g) {
      const std::size_t item_index = groups_[g].hull_items[pos[g]];
      best_choice_[g] = item_index;
      total += groups_[g].items[item_index].time;
      scaled += groups_[g].items[item_index].scaled;
    }
    best_time_ = total;
    best_time_scaled_ = scaled;
    have_best_ = true;
  }

  // Lower bound on the best completion from depth g: every remaining group
  // parked on its cheapest-workspace item, then the leftover budget spent on
  // hull increments by best time-saved-per-byte, the last one fractionally.
  // Overestimating the fractional saving keeps the bound valid.
  std::int64_t lp_bound(std::size_t g, std::int64_t used_ws,
                        std::int64_t time_scaled) const {
    std::int64_t capacity = budget_ - used_ws - suffix_min_ws_[g];
    std::int64_t bound = time_scaled + suffix_base_scaled_[g];
    __int128 saved = 0;
    for (const HullInc& inc : increments_) {
      if (inc.group < g) continue;
      if (capacity <= 0) break;
      if (inc.dws <= capacity) {
        saved += inc.dt;
        capacity -= inc.dws;
      } else {
        saved += (__int128(inc.dt) * capacity + inc.dws - 1) / inc.dws;
        break;
      }
    }
    __int128 result = __int128(bound) - saved;
    if (result < 0) return 0;
    return static_cast<std::int64_t>(result);
  }

  void dfs(std::size_t g, std::int64_t used_ws, Rat64 time, std::int64_t time_scaled) {
    if (g == groups_.size()) {
      if (!have_best_ || time < best_time_) {
        have_best_ = true;
        best_time_ = time;
        best_time_scaled_ = time_scaled;
        best_choice_ = current_;
      }
      return;
    }
    if (have_best_) {
      if (scaled_) {
        if (time_scaled + suffix_min_time_scaled_[g] >= best_time_scaled_) return;
        if (lp_bound(g, used_ws, time_scaled) >= best_time_scaled_) return;
      } else if (time + suffix_min_time_[g] >= best_time_) {
        return;
      }
    }
    const Group& group = groups_[g];
    const std::size_t begin =
        (g > 0 && same_as_prev_[g]) ? current_[g - 1] : 0;
    for (std::size_t i = begin; i < group.items.size(); ++i) {
      const Item& item = group.items[i];
      Rat64 next_time = time + item.time;
      if (have_best_ && next_time + suffix_min_time_[g + 1] >= best_time_) {
        break;  // items ascend in time
      }
      std::int64_t next_ws = used_ws + item.ws;
      if (saturating_add(next_ws, suffix_min_ws_[g + 1]) > budget_) {
        continue;  // later items need less workspace
      }
      current_[g] = i;
      dfs(g + 1, next_ws, next_time, time_scaled + item.scaled);
    }
  }

  const ChoiceProblem& problem_;
  std::int64_t budget_ = 0;
  std::vector<Group> groups_;
  std::vector<std::size_t> original_;  // exploration position -> problem index
  std::vector<bool> same_as_prev_;
  std::vector<std::int64_t> suffix_min_ws_;
  std::vector<Rat64> suffix_min_time_;
  std::vector<std::int64_t> suffix_base_scaled_;
  std::vector<std::int64_t> suffix_min_time_scaled_;
  std::vector<HullInc> increments_;
  bool scaled_ = false;

  std::vector<std::size_t> current_;
  std::vector<std::size_t> best_choice_;
  Rat64 best_time_;
  std::int64_t best_time_scaled_ = 0;
  bool have_best_ = false;
};

}  // namespace detail

// Exact optimum of the 0-1 selection problem: minimize the summed time with
// the summed workspace within the budget and exactly one configuration per
// kernel. Deterministic. Throws infeasible_error, reporting the minimal
// achievable total workspace, when even the cheapest selection exceeds the
// budget.
inline ChoiceSolution ilp_solve(const ChoiceProblem& problem) {
  detail::ChoiceSolver solver(problem);
  return solver.solve();
}

struct WdResult {
  std::vector<KernelDescriptor> kernels;
  std::vector<Configuration> selection;  // parallel to kernels
  Rat64 total_time;
  std::int64_t total_workspace = 0;
  std::size_t variable_count = 0;      // total ILP choice variables
  std::size_t max_front_size = 0;
  std::size_t unique_kernel_count = 0;
};

// Whole-network optimization under one shared workspace budget: per-kernel
// desirable sets feed the exact selection solver. Kernels with equal
// canonical hashes share one front but are selected independently, so
// replicated layers are benchmarked once. Front construction for distinct
// kernels runs on up to `jobs` threads; results do not depend on `jobs`.
inline WdResult wd_optimize(const CostProvider& provider,
                            const std::vector<KernelDescriptor>& kernels,
                            std::int64_t workspace_budget,
                            BatchSizePolicy policy, unsigned jobs = 1,
                            std::size_t front_cap = kDefaultFrontCap) {
  if (kernels.empty()) throw std::invalid_argument("no kernels to optimize");
  if (workspace_budget < 0) {
    throw std::invalid_argument("workspace_budget must be >= 0");
  }

  std::vector<std::uint64_t> hashes;
  hashes.reserve(kernels.size());
  std::map<std::uint64_t, std::size_t> unique_index;
  std::vector<const KernelDescriptor*> unique_kernels;
  for (const auto& kernel : kernels) {
    std::uint64_t hash = kernel.canonical_hash();
    hashes.push_back(hash);
    if (unique_index.emplace(hash, unique_kernels.size()).second) {
      unique_kernels.push_back(&kernel);
    }
  }

  std::vector<ConfigurationSet> unique_sets(unique_kernels.size());
  parallel_for(unique_kernels.size(), jobs, [&](std::size_t i) {
    unique_sets[i] = config_set(provider, *unique_kernels[i],
                                unique_kernels[i]->batch, workspace_budget,
                                policy, front_cap);
  });
  for (std::size_t i = 0; i < unique_sets.size(); ++i) {
    if (unique_sets[i].members.empty()) {
      std::ostringstream os;
      os << "no feasible configuration for kernel '"
         << unique_kernels[i]->layer_name << "' ("
         << to_string(unique_kernels[i]->op_type) << ") within total budget "
         << workspace_budget << " bytes";
      throw infeasible_error(os.str());
    }
  }

  ChoiceProblem problem;
  problem.budget = workspace_budget;
  problem.choices.reserve(kernels.size());
  for (std::size_t i = 0; i < kernels.size(); ++i) {
    const ConfigurationSet& shared = unique_sets[unique_index.at(hashes[i])];
    problem.choices.push_back(ConfigurationSet{kernels[i], shared.members});
  }

  ChoiceSolution solution = ilp_solve(problem);

  WdResult result;
  result.kernels = kernels;
  result.selection = std::move(solution.selection);
  result.total_time = solution.total_time;
  result.total_workspace = solution.total_workspace;
  result.unique_kernel_count = unique_kernels.size();
  for (const auto& choice : problem.choices) {
    result.variable_count += choice.members.size();
    result.max_front_size = std::max(result.max_front_size, choice.members.size());
  }
  return result;
}

}  // namespace ubatch
