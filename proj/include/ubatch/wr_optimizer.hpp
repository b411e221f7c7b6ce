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

#include <cstdint>
#include <optional>
#include <sstream>
#include <vector>

#include "ubatch/cost_provider.hpp"
#include "ubatch/domain.hpp"

namespace ubatch {

// One row of the per-kernel DP table: the best total time for covering b
// samples, the configuration realizing it, and the last micro-batch size
// chosen (the split provenance). Row 0 is the empty base case: time 0, no
// configuration.
struct WrTableEntry {
  bool feasible = false;
  Rat64 time;
  std::int64_t chosen_split = 0;
  std::optional<Configuration> config;
};

struct WrResult {
  Configuration config;
  Rat64 total_time;
};

// Builds the table T(0..B) for the recurrence
//
//   T(0) = 0,  T(b) = min over admissible sizes s <= b of  Tmu(s) + T(b - s)
//
// where Tmu(s) is the fastest single-invocation time at micro-batch s within
// the workspace limit (absent = infinite). The policy decides which sizes
// have Tmu evaluated; every composition of B decomposes into single splits,
// so restricting the split to admissible sizes loses nothing. Time ties
// prefer fewer micro-batches, then the canonically smaller configuration.
inline std::vector<WrTableEntry> wr_dp_table(const CostProvider& provider,
                                             const KernelDescriptor& kernel,
                                             std::int64_t mini_batch,
                                             std::int64_t workspace_limit,
                                             BatchSizePolicy policy) {
  if (mini_batch < 1) throw std::invalid_argument("mini_batch must be >= 1");
  if (workspace_limit < 0) {
    throw std::invalid_argument("workspace_limit must be >= 0");
  }
  const std::vector<std::int64_t> sizes =
      enumerate_micro_batches(policy, mini_batch);

  std::vector<std::optional<MicroConfiguration>> micro(
      static_cast<std::size_t>(mini_batch) + 1);
  for (std::int64_t s : sizes) {
    micro[static_cast<std::size_t>(s)] =
        provider.fastest_micro_config(kernel, s, workspace_limit);
  }

  std::vector<WrTableEntry> table(static_cast<std::size_t>(mini_batch) + 1);
  table[0].feasible = true;

  for (std::int64_t b = 1; b <= mini_batch; ++b) {
    WrTableEntry& entry = table[static_cast<std::size_t>(b)];
    for (std::int64_t s : sizes) {
      if (s > b) break;  // sizes ascend
      const auto& part = micro[static_cast<std::size_t>(s)];
      if (!part) continue;
      const WrTableEntry& rest = table[static_cast<std::size_t>(b - s)];
      if (!rest.feasible) continue;
      Rat64 candidate_time = part->time + rest.time;
      if (entry.feasible && candidate_time > entry.time) continue;
      Configuration candidate =
          rest.config ? concat(Configuration::single(*part), *rest.config)
                      : Configuration::single(*part);
      if (!entry.feasible || candidate_time < entry.time ||
          canonical_config_less(candidate, *entry.config)) {
        entry.feasible = true;
        entry.time = candidate_time;
        entry.chosen_split = s;
        entry.config = std::move(candidate);
      }
    }
  }
  return table;
}

// Optimal configuration for one kernel under a per-kernel workspace limit.
// Throws infeasible_error when no admissible composition fits the limit.
inline WrResult wr_optimize(const CostProvider& provider,
                            const KernelDescriptor& kernel,
                            std::int64_t mini_batch,
                            std::int64_t workspace_limit,
                            BatchSizePolicy policy) {
  std::vector<WrTableEntry> table =
      wr_dp_table(provider, kernel, mini_batch, workspace_limit, policy);
  const WrTableEntry& best = table[static_cast<std::size_t>(mini_batch)];
  if (!best.feasible) {
    std::ostringstream os;
    os << "no feasible configuration for kernel '" << kernel.layer_name << "' ("
       << to_string(kernel.op_type) << ", batch " << mini_batch
       << ") within workspace limit " << workspace_limit << " bytes";
    throw infeasible_error(os.str());
  }
  return WrResult{*best.config, best.time};
}

}  // namespace ubatch
