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
#include <filesystem>
#include <fstream>
#include <istream>
#include <limits>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "ubatch/domain.hpp"
#include "ubatch/rational.hpp"

namespace ubatch {

// Analytic per-algorithm cost parameters. For a kernel k and micro-batch b:
//
//   time(b)      = time_setup + time_per_sample * charged(b) * time_scale(k)
//   workspace(b) = ws_fixed + ws_per_sample * b * ws_scale(k)
//   charged(b)   = ceil(b / quantum) * quantum
//
// where time_scale/ws_scale are the deterministic shape factors below.
// A micro-batch below min_batch is infeasible for the algorithm. The quantum
// models tile-quantized kernels that pay for a full tile regardless of how
// much of it is used.
struct AlgorithmCost {
  Rat64 time_per_sample;           // µs per sample per time_scale unit; > 0
  Rat64 time_setup;                // µs per kernel invocation
  std::int64_t ws_per_sample = 0;  // bytes per sample per ws_scale unit
  std::int64_t ws_fixed = 0;       // bytes
  std::int64_t min_batch = 1;      // smallest supported micro-batch
  std::int64_t quantum = 1;        // time charging granularity, samples

  void validate() const {
    if (!(time_per_sample > Rat64(0))) {
      throw std::invalid_argument("time_per_sample must be > 0");
    }
    if (time_setup.is_negative()) {
      throw std::invalid_argument("time_setup must be >= 0");
    }
    if (ws_per_sample < 0 || ws_fixed < 0) {
      throw std::invalid_argument("workspace parameters must be >= 0");
    }
    if (min_batch < 1) throw std::invalid_argument("min_batch must be >= 1");
    if (quantum < 1) throw std::invalid_argument("quantum must be >= 1");
  }
};

struct AlgorithmSpec {
  AlgorithmId id;
  std::string name;
  AlgorithmCost cost;
};

// Catalog of algorithms with analytic costs; entries are sorted by id and
// ids are unique.
class CostModel {
 public:
  CostModel() = default;
  explicit CostModel(std::vector<AlgorithmSpec> algorithms)
      : algorithms_(std::move(algorithms)) {
    std::sort(algorithms_.begin(), algorithms_.end(),
              [](const AlgorithmSpec& a, const AlgorithmSpec& b) {
                return a.id < b.id;
              });
    for (std::size_t i = 0; i < algorithms_.size(); ++i) {
      algorithms_[i].cost.validate();
      if (i > 0 && algorithms_[i].id == algorithms_[i - 1].id) {
        throw std::invalid_argument("duplicate algorithm id " +
                                    std::to_string(algorithms_[i].id.value));
      }
    }
  }

  const std::vector<AlgorithmSpec>& algorithms() const { return algorithms_; }

  const AlgorithmSpec* find(AlgorithmId id) const {
    for (const auto& a : algorithms_) {
      if (a.id == id) return &a;
    }
    return nullptr;
  }

 private:
  std::vector<AlgorithmSpec> algorithms_;
};

namespace detail {
inline std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  __int128 p = __int128(a) * b;
  if (p > std::numeric_limits<std::int64_t>::max() ||
      p < std::numeric_limits<std::int64_t>::min()) {
    throw std::overflow_error("cost computation overflow");
  }
  return static_cast<std::int64_t>(p);
}
}  // namespace detail

// Shape factor for time: proportional to the multiply-accumulate count of
// one sample, C * K * kernel_h * kernel_w * out_height * out_width.
inline std::int64_t time_scale(const KernelDescriptor& k) {
  std::int64_t s = detail::checked_mul(k.in_channels, k.out_channels);
  s = detail::checked_mul(s, k.kernel_h);
  s = detail::checked_mul(s, k.kernel_w);
  s = detail::checked_mul(s, k.out_height());
  return detail::checked_mul(s, k.out_width());
}

// Shape factor for workspace: the input volume of one sample, C * H * W.
inline std::int64_t ws_scale(const KernelDescriptor& k) {
  return detail::checked_mul(detail::checked_mul(k.in_channels, k.height),
                             k.width);
}

// Evaluates the analytic model for one (kernel, algorithm, micro-batch)
// triple. Pure: identical inputs produce identical records.
inline CostRecord query_cost(const CostModel& model, const KernelDescriptor& k,
                             AlgorithmId algorithm, std::int64_t micro_batch) {
  const AlgorithmSpec* spec = model.find(algorithm);
  if (spec == nullptr) {
    throw std::invalid_argument("unknown algorithm id " +
                                std::to_string(algorithm.value));
  }
  k.validate();
  if (micro_batch < 1) {
    throw std::invalid_argument("micro_batch must be >= 1");
  }
  CostKey key{k.canonical_hash(), k.op_type, algorithm, micro_batch};
  const AlgorithmCost& c = spec->cost;
  if (micro_batch < c.min_batch) return CostRecord::infeasible_record(key);
  std::int64_t charged =
      (micro_batch + c.quantum - 1) / c.quantum * c.quantum;
  Rat64 time = c.time_setup +
               c.time_per_sample * Rat64(detail::checked_mul(charged, time_scale(k)));
  std::int64_t ws =
      c.ws_fixed +
      detail::checked_mul(c.ws_per_sample,
                          detail::checked_mul(micro_batch, ws_scale(k)));
  return CostRecord::feasible_record(key, time, ws);
}

// The bundled synthetic archetypes, mirroring data/default.model:
//  - IMPLICIT_GEMM: slowest per sample, needs no workspace, any batch size.
//  - WINOGRAD: faster, moderate per-sample workspace, only defined from a
//    minimum micro-batch, charges time in tiles of 4.
//  - FFT: fastest per sample, workspace grows steeply with the micro-batch,
//    charges time in tiles of 32.
inline CostModel builtin_model() {
  std::vector<AlgorithmSpec> algos;
  algos.push_back({AlgorithmId{0},
                   "IMPLICIT_GEMM",
                   {Rat64::parse("0.00000005"), Rat64(1), 0, 0, 1, 1}});
  algos.push_back({AlgorithmId{1},
                   "WINOGRAD",
                   {Rat64::parse("0.000000032"), Rat64(1), 8, 16384, 16, 4}});
  algos.push_back({AlgorithmId{2},
                   "FFT",
                   {Rat64::parse("0.000000022"), Rat64(2), 18, 65536, 1, 32}});
  return CostModel(std::move(algos));
}

// Parses the key-value model format: one "[algorithm NAME]" section per
// algorithm followed by "key = value" lines for id and the six cost
// parameters. '#' starts a comment, blank lines are ignored.
inline CostModel parse_model(std::istream& in, std::string_view source_name) {
  std::vector<AlgorithmSpec> algos;
  bool in_section = false;
  AlgorithmSpec current;
  bool have_id = false;
  bool have_tps = false;
  std::size_t line_no = 0;

  auto fail = [&](const std::string& message) {
    std::ostringstream os;
    os << source_name << ":" << line_no << ": " << message;
    throw parse_error(os.str(), line_no);
  };
  auto finish_section = [&]() {
    if (!in_section) return;
    if (!have_id) fail("algorithm section is missing 'id'");
    if (!have_tps) fail("algorithm section is missing 'time_per_sample'");
    algos.push_back(current);
  };

  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) {
      line.erase(hash);
    }
    auto begin = line.find_first_not_of(" \t\r");
    if (begin == std::string::npos) continue;
    auto end = line.find_last_not_of(" \t\r");
    std::string text = line.substr(begin, end - begin + 1);

    if (text.front() == '[') {
      if (text.back() != ']') fail("unterminated section header");
      std::istringstream header(text.substr(1, text.size() - 2));
      std::string kind, name, extra;
      header >> kind >> name;
      if (kind != "algorithm" || name.empty() || (header >> extra)) {
        fail("expected '[algorithm NAME]'");
      }
      finish_section();
      current = AlgorithmSpec{};
      current.name = name;
      in_section = true;
      have_id = have_tps = false;
      continue;
    }
    if (!in_section) fail("expected '[algorithm NAME]' before parameters");
    auto eq = text.find('=');
    if (eq == std::string::npos) fail("expected 'key = value'");
    auto trim = [](std::string s) {
      auto b = s.find_first_not_of(" \t");
      auto e = s.find_last_not_of(" \t");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    std::string key = trim(text.substr(0, eq));
    std::string value = trim(text.substr(eq + 1));
    if (key.empty() || value.empty()) fail("expected 'key = value'");

    try {
      if (key == "id") {
        current.id.value = static_cast<std::int32_t>(std::stol(value));
        have_id = true;
      } else if (key == "time_per_sample") {
        current.cost.time_per_sample = Rat64::parse(value);
        have_tps = true;
      } else if (key == "time_setup") {
        current.cost.time_setup = Rat64::parse(value);
      } else if (key == "ws_per_sample") {
        current.cost.ws_per_sample = std::stoll(value);
      } else if (key == "ws_fixed") {
        current.cost.ws_fixed = std::stoll(value);
      } else if (key == "min_batch") {
        current.cost.min_batch = std::stoll(value);
      } else if (key == "quantum") {
        current.cost.quantum = std::stoll(value);
      } else {
        fail("unknown model parameter '" + key + "'");
      }
    } catch (const parse_error&) {
      throw;
    } catch (const std::exception& e) {
      fail("invalid value for '" + key + "': " + e.what());
    }
  }
  finish_section();
  if (algos.empty()) {
    throw parse_error(std::string(source_name) + ": no algorithm sections", line_no);
  }
  try {
    return CostModel(std::move(algos));
  } catch (const std::exception& e) {
    throw parse_error(std::string(source_name) + ": " + e.what(), line_no);
  }
}

inline CostModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open cost model file: " + path.string());
  }
  return parse_model(in, path.filename().string());
}

}  // namespace ubatch
