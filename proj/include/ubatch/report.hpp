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
#include <cstdio>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "ubatch/cost_provider.hpp"
#include "ubatch/domain.hpp"

namespace ubatch {

enum class OptMode { kWr, kWd };

inline std::string_view to_string(OptMode mode) {
  return mode == OptMode::kWr ? "wr" : "wd";
}

struct KernelOutcome {
  KernelDescriptor kernel;
  Configuration chosen;
  Rat64 time;
  std::int64_t workspace = 0;
  std::optional<Rat64> baseline_time;  // undivided pick; empty when none fits
};

// Everything one optimization run produced. The workspace limit is
// per-kernel in wr mode and the shared total in wd mode; the baseline column
// is always the undivided selection computed in the same run.
struct OptimizationReport {
  OptMode mode = OptMode::kWr;
  BatchSizePolicy policy = BatchSizePolicy::kAll;
  std::string network;
  std::int64_t batch = 0;
  std::int64_t workspace_limit = 0;
  std::vector<std::pair<AlgorithmId, std::string>> algorithms;  // id ascending
  std::vector<KernelOutcome> kernels;
  Rat64 total_time;
  std::int64_t total_workspace = 0;
  std::optional<Rat64> baseline_total;
  std::size_t variable_count = 0;       // wd: total ILP choice variables
  std::size_t max_front_size = 0;       // wd: largest per-kernel front
  std::size_t unique_kernel_count = 0;  // wd: kernels after hash dedup
  double optimizer_millis = 0.0;        // not part of the machine report

  std::optional<double> speedup() const {
    if (!baseline_total || total_time.is_zero()) return std::nullopt;
    return (*baseline_total / total_time).to_double();
  }

  void validate() const {
    Rat64 time_sum;
    std::int64_t ws_sum = 0;
    Rat64 baseline_sum;
    bool all_baselines = true;
    for (const auto& outcome : kernels) {
      if (outcome.time != outcome.chosen.time() ||
          outcome.workspace != outcome.chosen.workspace()) {
        throw std::logic_error("report row disagrees with its configuration");
      }
      time_sum += outcome.time;
      ws_sum += outcome.workspace;
      if (outcome.baseline_time) {
        baseline_sum += *outcome.baseline_time;
      } else {
        all_baselines = false;
      }
    }
    if (time_sum != total_time || ws_sum != total_workspace) {
      throw std::logic_error("report totals do not match the rows");
    }
    if (baseline_total != (all_baselines && !kernels.empty()
                               ? std::optional<Rat64>(baseline_sum)
                               : std::nullopt)) {
      throw std::logic_error("baseline total does not match the rows");
    }
    if (mode == OptMode::kWd && total_workspace > workspace_limit) {
      throw std::logic_error("wd workspace division exceeds the budget");
    }
  }
};

namespace detail {

inline std::string format_fixed(double value, int digits) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.*f", digits, value);
  return buffer;
}

inline std::string hash_hex(std::uint64_t hash) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%016llx",
                static_cast<unsigned long long>(hash));
  return buffer;
}

// "FFT@32x8+WINOGRAD@16" style summary of a canonical configuration.
inline std::string plan_summary(const Configuration& config,
                                const OptimizationReport& report) {
  auto name_of = [&](AlgorithmId id) -> std::string {
    for (const auto& [algo, name] : report.algorithms) {
      if (algo == id) return name;
    }
    return "alg" + std::to_string(id.value);
  };
  std::string out;
  const auto& micros = config.micros();
  for (std::size_t i = 0; i < micros.size();) {
    std::size_t j = i;
    while (j < micros.size() && micros[j].algorithm == micros[i].algorithm &&
           micros[j].micro_batch == micros[i].micro_batch) {
      ++j;
    }
    if (!out.empty()) out += '+';
    out += name_of(micros[i].algorithm) + "@" +
           std::to_string(micros[i].micro_batch);
    if (j - i > 1) out += "x" + std::to_string(j - i);
    i = j;
  }
  return out;
}

}  // namespace detail

// Line-oriented "key value" document with a fixed field order; two runs with
// identical inputs emit identical bytes. Times are exact decimals (or
// "num/den" rationals); the optimizer wall time is deliberately excluded.
inline void write_machine_report(std::ostream& out,
                                 const OptimizationReport& report) {
  report.validate();
  out << "ubatch-report 1\n";
  out << "mode " << to_string(report.mode) << '\n';
  out << "policy " << to_string(report.policy) << '\n';
  out << "network " << report.network << '\n';
  out << "batch-size " << report.batch << '\n';
  out << "workspace-limit " << report.workspace_limit << '\n';
  out << "workspace-limit-scope "
      << (report.mode == OptMode::kWr ? "per-kernel" : "total") << '\n';
  out << "algorithm-count " << report.algorithms.size() << '\n';
  for (const auto& [id, name] : report.algorithms) {
    out << "algorithm " << id.value << ' ' << name << '\n';
  }
  out << "kernel-count " << report.kernels.size() << '\n';
  for (std::size_t i = 0; i < report.kernels.size(); ++i) {
    const KernelOutcome& outcome = report.kernels[i];
    out << "kernel " << i << " layer " << outcome.kernel.layer_name << '\n';
    out << "kernel " << i << " op " << to_string(outcome.kernel.op_type) << '\n';
    out << "kernel " << i << " hash "
        << detail::hash_hex(outcome.kernel.canonical_hash()) << '\n';
    out << "kernel " << i << " micro-count " << outcome.chosen.size() << '\n';
    const auto& micros = outcome.chosen.micros();
    for (std::size_t j = 0; j < micros.size(); ++j) {
      out << "kernel " << i << " micro " << j << " algorithm "
          << micros[j].algorithm.value << " batch " << micros[j].micro_batch
          << " time-us " << micros[j].time.to_string() << " workspace-bytes "
          << micros[j].workspace << '\n';
    }
    out << "kernel " << i << " time-us " << outcome.time.to_string() << '\n';
    out << "kernel " << i << " workspace-bytes " << outcome.workspace << '\n';
    out << "kernel " << i << " baseline-time-us "
        << (outcome.baseline_time ? outcome.baseline_time->to_string() : "n/a")
        << '\n';
  }
  out << "total-time-us " << report.total_time.to_string() << '\n';
  out << "total-workspace-bytes " << report.total_workspace << '\n';
  out << "baseline-time-us "
      << (report.baseline_total ? report.baseline_total->to_string() : "n/a")
      << '\n';
  auto speedup = report.speedup();
  out << "speedup " << (speedup ? detail::format_fixed(*speedup, 6) : "n/a")
      << '\n';
  out << "variable-count " << report.variable_count << '\n';
  out << "max-front-size " << report.max_front_size << '\n';
  out << "unique-kernel-count " << report.unique_kernel_count << '\n';
  out << "note times are cost-model sums, not measured wall clock\n";
  out << "end\n";
}

inline void write_text_report(std::ostream& out,
                              const OptimizationReport& report) {
  report.validate();
  out << "network " << report.network << ", batch " << report.batch << ", "
      << report.kernels.size() << " kernels\n";
  out << "mode " << to_string(report.mode) << ", policy "
      << to_string(report.policy) << ", workspace limit "
      << report.workspace_limit << " B ("
      << (report.mode == OptMode::kWr ? "per kernel" : "total") << ")\n\n";

  out << std::left << std::setw(14) << "layer" << std::setw(16) << "op"
      << std::right << std::setw(14) << "time(us)" << std::setw(14)
      << "ws(bytes)" << std::setw(14) << "baseline(us)" << std::setw(9)
      << "speedup" << "  plan\n";
  for (const auto& outcome : report.kernels) {
    out << std::left << std::setw(14) << outcome.kernel.layer_name
        << std::setw(16) << to_string(outcome.kernel.op_type) << std::right
        << std::setw(14) << detail::format_fixed(outcome.time.to_double(), 2)
        << std::setw(14) << outcome.workspace;
    if (outcome.baseline_time) {
      double ratio = outcome.time.is_zero()
                         ? 0.0
                         : (*outcome.baseline_time / outcome.time).to_double();
      out << std::setw(14)
          << detail::format_fixed(outcome.baseline_time->to_double(), 2)
          << std::setw(9) << detail::format_fixed(ratio, 2);
    } else {
      out << std::setw(14) << "n/a" << std::setw(9) << "n/a";
    }
    out << "  " << detail::plan_summary(outcome.chosen, report) << '\n';
  }

  out << "\ntotal time " << detail::format_fixed(report.total_time.to_double(), 2)
      << " us";
  if (report.baseline_total) {
    out << ", undivided baseline "
        << detail::format_fixed(report.baseline_total->to_double(), 2) << " us";
  }
  if (auto speedup = report.speedup()) {
    out << ", speedup " << detail::format_fixed(*speedup, 3) << "x";
  }
  out << "\n";
  if (report.mode == OptMode::kWd) {
    out << "workspace division: " << report.total_workspace << " of "
        << report.workspace_limit << " B assigned across "
        << report.kernels.size() << " kernels (" << report.unique_kernel_count
        << " unique), " << report.variable_count
        << " choice variables, largest front " << report.max_front_size << "\n";
  } else {
    out << "total workspace " << report.total_workspace
        << " B across per-kernel slots\n";
  }
  out << "optimizer time " << detail::format_fixed(report.optimizer_millis, 2)
      << " ms\n";
  out << "note: times are cost-model sums, not measured wall clock.\n";
}

}  // namespace ubatch
