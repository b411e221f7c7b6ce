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
#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ubatch/rational.hpp"

namespace ubatch {

// Raised by file parsers (networks, cost models, cost databases). The full
// "<source>:<line>[:<column>]: message" text is in what().
class parse_error : public std::runtime_error {
 public:
  parse_error(const std::string& message, std::size_t line, std::size_t column = 0)
      : std::runtime_error(message), line_(line), column_(column) {}
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

// Raised when no plan fits a workspace limit. For whole-network problems
// min_total_workspace() reports the smallest achievable total, so callers can
// tell the user how far off the budget is.
class infeasible_error : public std::runtime_error {
 public:
  explicit infeasible_error(const std::string& message,
                            std::int64_t min_total_workspace = -1)
      : std::runtime_error(message),
        min_total_workspace_(min_total_workspace) {}
  std::int64_t min_total_workspace() const { return min_total_workspace_; }

 private:
  std::int64_t min_total_workspace_;
};

// The three convolution kernel operation types of a training step.
enum class OpType : std::uint8_t {
  kForward = 0,
  kBackwardData = 1,
  kBackwardFilter = 2,
};

inline std::string_view to_string(OpType op) {
  switch (op) {
    case OpType::kForward:
      return "Forward";
    case OpType::kBackwardData:
      return "BackwardData";
    case OpType::kBackwardFilter:
      return "BackwardFilter";
  }
  return "?";
}

inline std::optional<OpType> parse_op_type(std::string_view text) {
  if (text == "Forward") return OpType::kForward;
  if (text == "BackwardData") return OpType::kBackwardData;
  if (text == "BackwardFilter") return OpType::kBackwardFilter;
  return std::nullopt;
}

// One convolution kernel instance: an operation type plus the layer shape it
// runs on. This is the unit the per-kernel optimizer works on and the member
// of the kernel set the whole-network optimizer selects for.
struct KernelDescriptor {
  OpType op_type = OpType::kForward;
  std::int64_t batch = 1;         // N, samples per training iteration
  std::int64_t in_channels = 1;   // C
  std::int64_t height = 1;        // H, input pixels
  std::int64_t width = 1;         // W
  std::int64_t out_channels = 1;  // K
  std::int64_t kernel_h = 1;      // filter height, pixels
  std::int64_t kernel_w = 1;      // filter width
  std::int64_t pad_h = 0;
  std::int64_t pad_w = 0;
  std::int64_t stride_h = 1;
  std::int64_t stride_w = 1;
  std::string layer_name;

  void validate() const;
  std::int64_t out_height() const {
    return (height + 2 * pad_h - kernel_h) / stride_h + 1;
  }
  std::int64_t out_width() const {
    return (width + 2 * pad_w - kernel_w) / stride_w + 1;
  }

  // Stable 64-bit FNV-1a over the little-endian 8-byte encodings of
  // (op_type, batch, in_channels, height, width, out_channels, kernel_h,
  // kernel_w, pad_h, pad_w, stride_h, stride_w), in that order. layer_name is
  // deliberately excluded so replicated layers of the same shape share cost
  // records. The hash is part of the cost-database file format; changing it
  // invalidates existing cache files.
  std::uint64_t canonical_hash() const;

  friend bool operator==(const KernelDescriptor&, const KernelDescriptor&) = default;
};

// Field equality ignoring layer_name; consistent with canonical_hash().
inline bool same_shape(const KernelDescriptor& a, const KernelDescriptor& b) {
  return a.op_type == b.op_type && a.batch == b.batch &&
         a.in_channels == b.in_channels && a.height == b.height &&
         a.width == b.width && a.out_channels == b.out_channels &&
         a.kernel_h == b.kernel_h && a.kernel_w == b.kernel_w &&
         a.pad_h == b.pad_h && a.pad_w == b.pad_w &&
         a.stride_h == b.stride_h && a.stride_w == b.stride_w;
}

inline void KernelDescriptor::validate() const {
  auto positive = [](std::int64_t v, const char* name) {
    if (v < 1) {
      throw std::invalid_argument(std::string("kernel field ") + name +
                                  " must be >= 1");
    }
  };
  positive(batch, "batch");
  positive(in_channels, "in_channels");
  positive(height, "height");
  positive(width, "width");
  positive(out_channels, "out_channels");
  positive(kernel_h, "kernel_h");
  positive(kernel_w, "kernel_w");
  positive(stride_h, "stride_h");
  positive(stride_w, "stride_w");
  if (pad_h < 0 || pad_w < 0) {
    throw std::invalid_argument("kernel padding must be >= 0");
  }
  if (out_height() < 1 || out_width() < 1) {
    throw std::invalid_argument("kernel '" + layer_name +
                                "' has empty output for the given "
                                "shape/pad/stride");
  }
}

inline std::uint64_t KernelDescriptor::canonical_hash() const {
  std::uint64_t h = 14695981039346656037ULL;
  auto mix = [&h](std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      h ^= (v >> (8 * i)) & 0xffULL;
      h *= 1099511628211ULL;
    }
  };
  mix(static_cast<std::uint64_t>(op_type));
  mix(static_cast<std::uint64_t>(batch));
  mix(static_cast<std::uint64_t>(in_channels));
  mix(static_cast<std::uint64_t>(height));
  mix(static_cast<std::uint64_t>(width));
  mix(static_cast<std::uint64_t>(out_channels));
  mix(static_cast<std::uint64_t>(kernel_h));
  mix(static_cast<std::uint64_t>(kernel_w));
  mix(static_cast<std::uint64_t>(pad_h));
  mix(static_cast<std::uint64_t>(pad_w));
  mix(static_cast<std::uint64_t>(stride_h));
  mix(static_cast<std::uint64_t>(stride_w));
  return h;
}

// Identifies one convolution algorithm within a catalog; names live in the
// catalog, costs come from a model or a measurement database.
struct AlgorithmId {
  std::int32_t value = 0;
  friend auto operator<=>(const AlgorithmId&, const AlgorithmId&) = default;
};

// An (algorithm, micro-batch size) pair with its cost: one kernel invocation
// covering `micro_batch` consecutive samples.
struct MicroConfiguration {
  AlgorithmId algorithm;
  std::int64_t micro_batch = 1;  // samples
  Rat64 time;                    // microseconds
  std::int64_t workspace = 0;    // bytes

  void validate() const {
    if (micro_batch < 1) {
      throw std::invalid_argument("micro_batch must be >= 1");
    }
    if (time.is_negative() || workspace < 0) {
      throw std::invalid_argument("micro-configuration cost must be >= 0");
    }
  }

  friend bool operator==(const MicroConfiguration&, const MicroConfiguration&) = default;
};

// Canonical element order inside a configuration: micro-batch descending,
// then algorithm id ascending. Extended over cost fields to stay total.
inline bool canonical_micro_less(const MicroConfiguration& a,
                                 const MicroConfiguration& b) {
  if (a.micro_batch != b.micro_batch) return a.micro_batch > b.micro_batch;
  if (a.algorithm != b.algorithm) return a.algorithm < b.algorithm;
  if (a.time != b.time) return a.time < b.time;
  return a.workspace < b.workspace;
}

// An ordered list of micro-configurations whose micro-batch sizes sum to the
// batch they cover. The micro-batches of one configuration run sequentially
// and reuse a single workspace slot, so the configuration's time is the sum
// over members and its workspace is the maximum over members.
//
// Cost is order-invariant, so configurations are kept in a canonical order
// (micro-batch descending, algorithm id ascending): two configurations with
// the same multiset of members compare equal.
class Configuration {
 public:
  explicit Configuration(std::vector<MicroConfiguration> micros)
      : micros_(std::move(micros)) {
    if (micros_.empty()) {
      throw std::invalid_argument("configuration must not be empty");
    }
    covered_batch_ = 0;
    for (const auto& m : micros_) {
      m.validate();
      covered_batch_ += m.micro_batch;
    }
    std::sort(micros_.begin(), micros_.end(), canonical_micro_less);
  }

  static Configuration single(MicroConfiguration micro) {
    return Configuration(std::vector<MicroConfiguration>{std::move(micro)});
  }

  const std::vector<MicroConfiguration>& micros() const { return micros_; }
  std::size_t size() const { return micros_.size(); }
  std::int64_t covered_batch() const { return covered_batch_; }

  Rat64 time() const {
    Rat64 sum;
    for (const auto& m : micros_) sum += m.time;
    return sum;
  }

  std::int64_t workspace() const {
    std::int64_t max_ws = 0;
    for (const auto& m : micros_) max_ws = std::max(max_ws, m.workspace);
    return max_ws;
  }

  friend bool operator==(const Configuration&, const Configuration&) = default;

 private:
  std::vector<MicroConfiguration> micros_;
  std::int64_t covered_batch_ = 0;
};

inline Configuration concat(const Configuration& a, const Configuration& b) {
  std::vector<MicroConfiguration> merged = a.micros();
  merged.insert(merged.end(), b.micros().begin(), b.micros().end());
  return Configuration(std::move(merged));
}

// Deterministic total order used for tie-breaking and duplicate collapse:
// fewer micro-batches first, then element-wise canonical order.
inline bool canonical_config_less(const Configuration& a, const Configuration& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto& x = a.micros()[i];
    const auto& y = b.micros()[i];
    if (x != y) return canonical_micro_less(x, y);
  }
  return false;
}

// Lookup key of one cost measurement: which kernel shape, which algorithm,
// which micro-batch size.
struct CostKey {
  std::uint64_t kernel_hash = 0;
  OpType op_type = OpType::kForward;
  AlgorithmId algorithm;
  std::int64_t micro_batch = 1;

  friend auto operator<=>(const CostKey&, const CostKey&) = default;
};

// One (kernel, algorithm, micro-batch) -> (time, workspace) result, the unit
// stored in the cost database. Infeasible records carry zeroed costs.
struct CostRecord {
  CostKey key;
  Rat64 time;                  // microseconds
  std::int64_t workspace = 0;  // bytes
  bool feasible = false;

  static CostRecord feasible_record(CostKey key, Rat64 time, std::int64_t workspace) {
    if (time.is_negative() || workspace < 0) {
      throw std::invalid_argument("cost record values must be >= 0");
    }
    return CostRecord{key, time, workspace, true};
  }

  static CostRecord infeasible_record(CostKey key) {
    return CostRecord{key, Rat64(0), 0, false};
  }

  friend bool operator==(const CostRecord&, const CostRecord&) = default;
};

}  // namespace ubatch
