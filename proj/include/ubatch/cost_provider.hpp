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
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ubatch/cost_database.hpp"
#include "ubatch/cost_model.hpp"
#include "ubatch/domain.hpp"
#include "ubatch/pareto.hpp"

namespace ubatch {

// Which micro-batch sizes get cost-evaluated.
enum class BatchSizePolicy {
  kAll,         // every size 1..B
  kPowerOfTwo,  // powers of two up to B, plus B itself if B is not one
  kUndivided,   // only B
};

inline std::string_view to_string(BatchSizePolicy policy) {
  switch (policy) {
    case BatchSizePolicy::kAll:
      return "all";
    case BatchSizePolicy::kPowerOfTwo:
      return "powerOfTwo";
    case BatchSizePolicy::kUndivided:
      return "undivided";
  }
  return "?";
}

inline std::optional<BatchSizePolicy> parse_policy(std::string_view text) {
  if (text == "all") return BatchSizePolicy::kAll;
  if (text == "powerOfTwo") return BatchSizePolicy::kPowerOfTwo;
  if (text == "undivided") return BatchSizePolicy::kUndivided;
  return std::nullopt;
}

// Admissible micro-batch sizes for a mini-batch of B, ascending, no
// duplicates. powerOfTwo additionally includes B itself when B is not a
// power of two, so every policy can compose sizes that sum to B.
inline std::vector<std::int64_t> enumerate_micro_batches(BatchSizePolicy policy,
                                                         std::int64_t mini_batch) {
  if (mini_batch < 1) {
    throw std::invalid_argument("mini_batch must be >= 1");
  }
  std::vector<std::int64_t> sizes;
  switch (policy) {
    case BatchSizePolicy::kAll:
      sizes.reserve(static_cast<std::size_t>(mini_batch));
      for (std::int64_t b = 1; b <= mini_batch; ++b) sizes.push_back(b);
      break;
    case BatchSizePolicy::kPowerOfTwo:
      for (std::int64_t b = 1; b <= mini_batch && b > 0; b *= 2) {
        sizes.push_back(b);
      }
      if (sizes.back() != mini_batch) sizes.push_back(mini_batch);
      break;
    case BatchSizePolicy::kUndivided:
      sizes.push_back(mini_batch);
      break;
  }
  return sizes;
}

// Produces (time, workspace) costs for (kernel, algorithm, micro-batch)
// triples. Two modes:
//  - model-backed: costs come from an analytic CostModel; an optional
//    CostDatabase acts as a write-through cache.
//  - database-only: costs come solely from a measurement database in the
//    cache file format; records absent from it are treated as infeasible.
// Queries are pure and safe to issue concurrently.
class CostProvider {
 public:
  explicit CostProvider(CostModel model, CostDatabase* cache = nullptr)
      : model_(std::move(model)), cache_(cache) {
    for (const auto& spec : model_->algorithms()) {
      ids_.push_back(spec.id);
      names_.emplace_back(spec.name);
    }
    if (ids_.empty()) {
      throw std::invalid_argument("cost model has no algorithms");
    }
  }

  static CostProvider from_database(CostDatabase& measurements) {
    return CostProvider(&measurements);
  }

  const std::vector<AlgorithmId>& algorithm_ids() const { return ids_; }

  std::string algorithm_name(AlgorithmId id) const {
    for (std::size_t i = 0; i < ids_.size(); ++i) {
      if (ids_[i] == id) return names_[i];
    }
    return "alg" + std::to_string(id.value);
  }

  CostRecord query(const KernelDescriptor& k, AlgorithmId algorithm,
                   std::int64_t micro_batch) const {
    CostKey key{k.canonical_hash(), k.op_type, algorithm, micro_batch};
    if (cache_ != nullptr) {
      if (auto hit = cache_->get(key)) return *hit;
    }
    if (!model_) return CostRecord::infeasible_record(key);
    CostRecord record = query_cost(*model_, k, algorithm, micro_batch);
    if (cache_ != nullptr) cache_->put(record);
    return record;
  }

  // Fastest feasible (algorithm, b) pair within the workspace limit; ties go
  // to the smaller workspace, then the smaller algorithm id. Empty when no
  // algorithm fits, which callers treat as infinite time.
  std::optional<MicroConfiguration> fastest_micro_config(
      const KernelDescriptor& k, std::int64_t micro_batch,
      std::int64_t workspace_limit) const {
    std::optional<MicroConfiguration> best;
    for (AlgorithmId id : ids_) {
      CostRecord r = query(k, id, micro_batch);
      if (!r.feasible || r.workspace > workspace_limit) continue;
      MicroConfiguration candidate{id, micro_batch, r.time, r.workspace};
      if (!best || candidate.time < best->time ||
          (candidate.time == best->time &&
           (candidate.workspace < best->workspace ||
            (candidate.workspace == best->workspace &&
             candidate.algorithm < best->algorithm)))) {
        best = candidate;
      }
    }
    return best;
  }

  // All feasible micro-configurations of size `micro_batch` fitting the
  // limit, reduced to the (time, workspace) front. When non-empty, the
  // front's fastest member is exactly fastest_micro_config's pick.
  std::vector<MicroConfiguration> micro_config_set(
      const KernelDescriptor& k, std::int64_t micro_batch,
      std::int64_t workspace_limit) const {
    std::vector<MicroConfiguration> candidates;
    for (AlgorithmId id : ids_) {
      CostRecord r = query(k, id, micro_batch);
      if (!r.feasible || r.workspace > workspace_limit) continue;
      candidates.push_back(MicroConfiguration{id, micro_batch, r.time, r.workspace});
    }
    return pareto_front(
        std::move(candidates),
        [](const MicroConfiguration& m) { return m.time; },
        [](const MicroConfiguration& m) { return m.workspace; },
        [](const MicroConfiguration& a, const MicroConfiguration& b) {
          return a.algorithm < b.algorithm;
        });
  }

 private:
  explicit CostProvider(CostDatabase* measurements) : cache_(measurements) {
    std::set<std::int32_t> seen;
    for (const auto& record : measurements->records()) {
      seen.insert(record.key.algorithm.value);
    }
    if (seen.empty()) {
      throw std::invalid_argument("measurement database has no records");
    }
    for (std::int32_t v : seen) {
      ids_.push_back(AlgorithmId{v});
      names_.push_back("alg" + std::to_string(v));
    }
  }

  std::optional<CostModel> model_;
  CostDatabase* cache_ = nullptr;  // non-owning
  std::vector<AlgorithmId> ids_;
  std::vector<std::string> names_;
};

}  // namespace ubatch
