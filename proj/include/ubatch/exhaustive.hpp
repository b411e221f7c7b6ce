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
#include <functional>
#include <optional>
#include <vector>

#include "ubatch/cost_provider.hpp"
#include "ubatch/domain.hpp"

namespace ubatch::exhaustive {

// Enumeration-based reference optimizers for small instances. They share no
// code with the DP/ILP implementations on purpose: they are the independent
// side of every equivalence check, both in the test suites and behind the
// CLI's oracle command. Exponential; keep batch sizes small.

// Visits every partition of `total` into admissible parts (non-increasing,
// so each multiset of parts appears exactly once).
inline void for_each_partition(
    std::int64_t total, const std::vector<std::int64_t>& sizes_ascending,
    const std::function<void(const std::vector<std::int64_t>&)>& visit) {
  std::vector<std::int64_t> parts;
  std::function<void(std::int64_t, std::int64_t)> recurse =
      [&](std::int64_t remaining, std::int64_t max_part) {
        if (remaining == 0) {
          visit(parts);
          return;
        }
        for (auto it = sizes_ascending.rbegin(); it != sizes_ascending.rend(); ++it) {
          const std::int64_t s = *it;
          if (s > max_part || s > remaining) continue;
          parts.push_back(s);
          recurse(remaining - s, s);
          parts.pop_back();
        }
      };
  recurse(total, total);
}

struct WrOptimum {
  Rat64 time;
  Configuration config;
};

// Minimal total time over every partition of the mini-batch into admissible
// parts, each part taking its fastest algorithm that fits the limit.
inline std::optional<WrOptimum> wr_minimum(const CostProvider& provider,
                                           const KernelDescriptor& kernel,
                                           std::int64_t mini_batch,
                                           std::int64_t workspace_limit,
                                           BatchSizePolicy policy) {
  const auto sizes = enumerate_micro_batches(policy, mini_batch);

  // Cheapest feasible option per part size, resolved once.
  std::vector<std::optional<MicroConfiguration>> best_part(
      static_cast<std::size_t>(mini_batch) + 1);
  for (std::int64_t s : sizes) {
    std::optional<MicroConfiguration> best;
    for (AlgorithmId id : provider.algorithm_ids()) {
      CostRecord r = provider.query(kernel, id, s);
      if (!r.feasible || r.workspace > workspace_limit) continue;
      if (!best || r.time < best->time) {
        best = MicroConfiguration{id, s, r.time, r.workspace};
      }
    }
    best_part[static_cast<std::size_t>(s)] = best;
  }

  std::optional<WrOptimum> optimum;
  for_each_partition(mini_batch, sizes, [&](const std::vector<std::int64_t>& parts) {
    Rat64 total;
    std::vector<MicroConfiguration> micros;
    for (std::int64_t p : parts) {
      const auto& best = best_part[static_cast<std::size_t>(p)];
      if (!best) return;  // partition uses an infeasible part
      total += best->time;
      micros.push_back(*best);
    }
    if (!optimum || total < optimum->time) {
      optimum = WrOptimum{total, Configuration(micros)};
    }
  });
  return optimum;
}

// Every admissible configuration covering the mini-batch whose workspace
// fits the limit: all partitions crossed with all per-part algorithm
// assignments, deduplicated, not pruned.
inline std::vector<Configuration> all_configurations(
    const CostProvider& provider, const KernelDescriptor& kernel,
    std::int64_t mini_batch, std::int64_t workspace_limit,
    BatchSizePolicy policy) {
  const auto sizes = enumerate_micro_batches(policy, mini_batch);

  std::vector<std::vector<MicroConfiguration>> options(
      static_cast<std::size_t>(mini_batch) + 1);
  for (std::int64_t s : sizes) {
    for (AlgorithmId id : provider.algorithm_ids()) {
      CostRecord r = provider.query(kernel, id, s);
      if (!r.feasible || r.workspace > workspace_limit) continue;
      options[static_cast<std::size_t>(s)].push_back(
          MicroConfiguration{id, s, r.time, r.workspace});
    }
  }

  std::vector<Configuration> out;
  std::vector<MicroConfiguration> chosen;
  for_each_partition(mini_batch, sizes, [&](const std::vector<std::int64_t>& parts) {
    for (std::int64_t p : parts) {
      if (options[static_cast<std::size_t>(p)].empty()) return;
    }
    std::function<void(std::size_t)> assign = [&](std::size_t i) {
      if (i == parts.size()) {
        out.push_back(Configuration(chosen));
        return;
      }
      for (const auto& option : options[static_cast<std::size_t>(parts[i])]) {
        chosen.push_back(option);
        assign(i + 1);
        chosen.pop_back();
      }
    };
    assign(0);
  });

  std::sort(out.begin(), out.end(), canonical_config_less);
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// Minimal summed time picking one (time, workspace) pair per kernel with the
// summed workspace within the budget; nullopt when no selection fits.
inline std::optional<Rat64> choice_minimum(
    const std::vector<std::vector<Configuration>>& sets, std::int64_t budget) {
  struct Pair {
    Rat64 time;
    std::int64_t ws;
  };
  // Only distinct (time, workspace) pairs matter for the optimal value.
  std::vector<std::vector<Pair>> pairs;
  pairs.reserve(sets.size());
  for (const auto& set : sets) {
    std::vector<Pair> p;
    for (const auto& config : set) {
      std::int64_t ws = config.workspace();
      if (ws <= budget) p.push_back(Pair{config.time(), ws});
    }
    if (p.empty()) return std::nullopt;
    std::sort(p.begin(), p.end(), [](const Pair& a, const Pair& b) {
      if (a.time != b.time) return a.time < b.time;
      return a.ws < b.ws;
    });
    p.erase(std::unique(p.begin(), p.end(),
                        [](const Pair& a, const Pair& b) {
                          return a.time == b.time && a.ws == b.ws;
                        }),
            p.end());
    pairs.push_back(std::move(p));
  }

  std::vector<std::int64_t> suffix_min_ws(pairs.size() + 1, 0);
  std::vector<Rat64> suffix_min_time(pairs.size() + 1, Rat64(0));
  for (std::size_t i = pairs.size(); i-- > 0;) {
    std::int64_t min_ws = pairs[i][0].ws;
    Rat64 min_time = pairs[i][0].time;
    for (const auto& p : pairs[i]) {
      min_ws = std::min(min_ws, p.ws);
      min_time = std::min(min_time, p.time);
    }
    suffix_min_ws[i] = suffix_min_ws[i + 1] + min_ws;
    suffix_min_time[i] = suffix_min_time[i + 1] + min_time;
  }

  std::optional<Rat64> best;
  std::function<void(std::size_t, std::int64_t, Rat64)> recurse =
      [&](std::size_t i, std::int64_t used, Rat64 time) {
        if (used + suffix_min_ws[i] > budget) return;
        if (best && time + suffix_min_time[i] >= *best) return;
        if (i == pairs.size()) {
          best = time;
          return;
        }
        for (const auto& p : pairs[i]) {
          recurse(i + 1, used + p.ws, time + p.time);
        }
      };
  recurse(0, 0, Rat64(0));
  return best;
}

}  // namespace ubatch::exhaustive
