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
#include <random>
#include <string>
#include <vector>

#include "ubatch/cost_model.hpp"
#include "ubatch/domain.hpp"

namespace ubatch {

// Deterministic small-instance generators shared by the oracle command and
// the test suites. Values come straight off the engine instead of through
// std distributions so a seed reproduces the same instance everywhere.

inline std::int64_t pick(std::mt19937_64& rng, std::int64_t lo, std::int64_t hi) {
  return lo + static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
}

// Kernel whose shape factors are 1, so model parameters are the costs.
inline KernelDescriptor unit_kernel(std::int64_t batch,
                                    OpType op = OpType::kForward,
                                    std::string name = "unit") {
  KernelDescriptor k;
  k.op_type = op;
  k.batch = batch;
  k.layer_name = std::move(name);
  return k;
}

// Random model with `algorithm_count` algorithms. Per-sample times use small
// quarter-step rationals; some algorithms get a minimum batch or a charging
// quantum so quantization paths are exercised.
inline CostModel random_model(std::mt19937_64& rng, int algorithm_count) {
  std::vector<AlgorithmSpec> algos;
  for (int i = 0; i < algorithm_count; ++i) {
    AlgorithmCost cost;
    cost.time_per_sample = Rat64(pick(rng, 1, 12), 4);
    cost.time_setup = Rat64(pick(rng, 0, 3));
    cost.ws_per_sample = pick(rng, 0, 10);
    cost.ws_fixed = pick(rng, 0, 2) == 0 ? pick(rng, 0, 8) : 0;
    cost.min_batch = pick(rng, 0, 3) == 0 ? pick(rng, 2, 3) : 1;
    cost.quantum = pick(rng, 0, 3) == 0 ? pick(rng, 2, 4) : 1;
    algos.push_back(AlgorithmSpec{AlgorithmId{i},
                                  "alg" + std::to_string(i), cost});
  }
  return CostModel(std::move(algos));
}

// Workspace limit in the interesting range for unit kernels: around the
// per-sample workspace of a handful of samples.
inline std::int64_t random_budget(std::mt19937_64& rng, std::int64_t batch) {
  return pick(rng, 0, 12 * batch);
}

}  // namespace ubatch
