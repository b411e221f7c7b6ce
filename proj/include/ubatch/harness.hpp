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

#include <chrono>
#include <cstdint>
#include <string>
#include <vector>

#include "ubatch/cost_provider.hpp"
#include "ubatch/domain.hpp"
#include "ubatch/parallel.hpp"
#include "ubatch/report.hpp"
#include "ubatch/wd_optimizer.hpp"
#include "ubatch/wr_optimizer.hpp"

namespace ubatch {

struct RunOptions {
  OptMode mode = OptMode::kWr;
  BatchSizePolicy policy = BatchSizePolicy::kAll;
  std::int64_t workspace_limit = 0;  // per-kernel in wr mode, total in wd mode
  unsigned jobs = 1;
  std::size_t front_cap = kDefaultFrontCap;
};

// Optimizes all kernels and assembles the report. The undivided baseline is
// always recomputed in-process: per kernel at the same limit in wr mode, at
// an equal per-kernel share of the total in wd mode. Per-kernel work runs on
// up to `jobs` threads; the report does not depend on the thread count.
inline OptimizationReport run_optimization(
    const CostProvider& provider, const std::string& network_name,
    const std::vector<KernelDescriptor>& kernels, const RunOptions& options) {
  if (kernels.empty()) throw std::invalid_argument("no kernels to optimize");
  const auto started = std::chrono::steady_clock::now();

  OptimizationReport report;
  report.mode = options.mode;
  report.policy = options.policy;
  report.network = network_name;
  report.batch = kernels.front().batch;
  report.workspace_limit = options.workspace_limit;
  for (AlgorithmId id : provider.algorithm_ids()) {
    report.algorithms.emplace_back(id, provider.algorithm_name(id));
  }

  std::vector<Configuration> chosen;
  std::int64_t baseline_limit = options.workspace_limit;

  if (options.mode == OptMode::kWr) {
    std::vector<std::optional<Configuration>> results(kernels.size());
    parallel_for(kernels.size(), options.jobs, [&](std::size_t i) {
      results[i] = wr_optimize(provider, kernels[i], kernels[i].batch,
                               options.workspace_limit, options.policy)
                       .config;
    });
    chosen.reserve(kernels.size());
    for (auto& result : results) chosen.push_back(std::move(*result));
  } else {
    WdResult wd = wd_optimize(provider, kernels, options.workspace_limit,
                              options.policy, options.jobs, options.front_cap);
    chosen = std::move(wd.selection);
    report.variable_count = wd.variable_count;
    report.max_front_size = wd.max_front_size;
    report.unique_kernel_count = wd.unique_kernel_count;
    baseline_limit =
        options.workspace_limit / static_cast<std::int64_t>(kernels.size());
  }

  bool all_baselines = true;
  Rat64 baseline_sum;
  for (std::size_t i = 0; i < kernels.size(); ++i) {
    KernelOutcome outcome{kernels[i], chosen[i], chosen[i].time(),
                          chosen[i].workspace(), std::nullopt};
    if (auto undivided = provider.fastest_micro_config(
            kernels[i], kernels[i].batch, baseline_limit)) {
      outcome.baseline_time = undivided->time;
      baseline_sum += undivided->time;
    } else {
      all_baselines = false;
    }
    report.total_time += outcome.time;
    report.total_workspace += outcome.workspace;
    report.kernels.push_back(std::move(outcome));
  }
  if (all_baselines) report.baseline_total = baseline_sum;

  report.optimizer_millis =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                started)
          .count();
  report.validate();
  return report;
}

}  // namespace ubatch
