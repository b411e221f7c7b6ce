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

// Command line front end: `optimize` plans a network's convolutions under a
// workspace budget, `oracle` cross-checks the optimizers against exhaustive
// enumeration on small random instances, `convcheck` verifies micro-batched
// execution against undivided execution on the reference convolutions.
//
// Exit codes: 0 success, 2 usage or input error, 3 infeasible, 4 oracle or
// semantics mismatch. Every option can also be set through an UBATCH_*
// environment variable (see --help).

#include <cstdint>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ubatch/cost_database.hpp"
#include "ubatch/cost_model.hpp"
#include "ubatch/cost_provider.hpp"
#include "ubatch/domain.hpp"
#include "ubatch/exhaustive.hpp"
#include "ubatch/harness.hpp"
#include "ubatch/network.hpp"
#include "ubatch/random_instances.hpp"
#include "ubatch/reference_conv.hpp"
#include "ubatch/report.hpp"
#include "ubatch/tiers.hpp"
#include "ubatch/wd_optimizer.hpp"
#include "ubatch/wr_optimizer.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitMismatch = 4;

struct OptimizeArgs {
  std::string network_path;
  std::int64_t batch_size = 0;  // 0: use the network file's value
  std::string mode = "wr";
  std::string policy = "all";
  std::string workspace_limit = "moderate";
  std::string cost_model_path;
  std::string cost_db_path;
  std::string report = "text";
  unsigned jobs = 1;
  std::uint64_t seed = 0;
};

struct OracleArgs {
  std::string kind;
  std::int64_t trials = 0;  // 0: kind-specific default
  std::uint64_t seed = 1;
  std::int64_t batch_size = 8;
  std::int64_t kernels = 3;
  std::int64_t algorithms = 3;
};

struct ConvCheckArgs {
  std::string op = "all";
  std::int64_t batch = 6;
  std::int64_t trials = 3;
  std::uint64_t seed = 1;
};

// Accepts raw bytes or a tier name; tiers are per-kernel values, so wd mode
// multiplies them by the kernel count to form the shared total.
std::int64_t resolve_workspace_limit(const std::string& text, bool wd_mode,
                                     std::size_t kernel_count) {
  if (auto tier = ubatch::parse_tier(text)) {
    std::int64_t per_kernel = ubatch::tier_bytes(*tier);
    return wd_mode ? per_kernel * static_cast<std::int64_t>(kernel_count)
                   : per_kernel;
  }
  try {
    std::size_t used = 0;
    std::int64_t bytes = std::stoll(text, &used);
    if (used != text.size() || bytes < 0) throw std::invalid_argument(text);
    return bytes;
  } catch (const std::exception&) {
    throw std::invalid_argument(
        "--workspace-limit must be non-negative bytes or one of "
        "small/moderate/large");
  }
}

// --cost-model accepts either the key-value model format or a measurement
// file in the cost-database CSV format (recognized by its header); in the
// latter case costs come solely from the measurements and records absent
// from the file count as infeasible.
bool is_measurement_file(const std::string& path) {
  std::ifstream in(path);
  std::string first_line;
  if (!in || !std::getline(in, first_line)) return false;
  if (!first_line.empty() && first_line.back() == '\r') first_line.pop_back();
  return first_line == ubatch::kCostCsvHeader;
}

int run_optimize(const OptimizeArgs& args) {
  ubatch::NetworkDescription net = ubatch::load_network(args.network_path);
  std::optional<std::int64_t> batch_override;
  if (args.batch_size > 0) batch_override = args.batch_size;
  std::vector<ubatch::KernelDescriptor> kernels =
      ubatch::expand_kernels(net, batch_override);

  std::optional<ubatch::CostDatabase> measurements;
  std::optional<ubatch::CostDatabase> db;
  std::optional<ubatch::CostProvider> provider;
  if (!args.cost_model_path.empty() && is_measurement_file(args.cost_model_path)) {
    measurements = ubatch::CostDatabase::load(args.cost_model_path);
    provider = ubatch::CostProvider::from_database(*measurements);
  } else {
    ubatch::CostModel model = args.cost_model_path.empty()
                                  ? ubatch::builtin_model()
                                  : ubatch::load_model(args.cost_model_path);
    if (!args.cost_db_path.empty()) {
      db = ubatch::CostDatabase::open(args.cost_db_path);
    }
    provider.emplace(std::move(model), db ? &*db : nullptr);
  }

  ubatch::RunOptions options;
  options.mode = args.mode == "wd" ? ubatch::OptMode::kWd : ubatch::OptMode::kWr;
  options.policy = *ubatch::parse_policy(args.policy);
  options.workspace_limit = resolve_workspace_limit(
      args.workspace_limit, options.mode == ubatch::OptMode::kWd, kernels.size());
  options.jobs = args.jobs;

  ubatch::OptimizationReport report =
      ubatch::run_optimization(*provider, net.name, kernels, options);
  if (args.report == "machine") {
    ubatch::write_machine_report(std::cout, report);
  } else {
    ubatch::write_text_report(std::cout, report);
  }
  if (db) db->flush();
  return kExitOk;
}

int run_oracle(const OracleArgs& args) {
  const bool wr = args.kind == "wr";
  const std::int64_t max_batch = wr ? 16 : 8;
  if (args.batch_size < 1 || args.batch_size > max_batch ||
      args.kernels < 1 || args.kernels > 4 || args.algorithms < 1 ||
      args.algorithms > 3) {
    std::cerr << "oracle: exhaustive enumeration is limited to batch sizes <= "
              << max_batch << " (" << args.kind
              << "), kernels <= 4 and algorithms <= 3\n";
    return kExitUsage;
  }
  const std::int64_t trials = args.trials > 0 ? args.trials : (wr ? 100 : 30);
  const ubatch::BatchSizePolicy policies[] = {
      ubatch::BatchSizePolicy::kAll, ubatch::BatchSizePolicy::kPowerOfTwo,
      ubatch::BatchSizePolicy::kUndivided};

  std::int64_t equal = 0;
  for (std::int64_t trial = 0; trial < trials; ++trial) {
    std::mt19937_64 rng(args.seed * 1000003ULL + static_cast<std::uint64_t>(trial));
    int algo_count = static_cast<int>(ubatch::pick(rng, 1, args.algorithms));
    ubatch::CostProvider provider(ubatch::random_model(rng, algo_count));
    ubatch::BatchSizePolicy policy =
        policies[static_cast<std::size_t>(ubatch::pick(rng, 0, 2))];

    std::optional<ubatch::Rat64> optimizer;
    std::optional<ubatch::Rat64> oracle;
    std::string what;
    if (wr) {
      std::int64_t batch = ubatch::pick(rng, 1, args.batch_size);
      std::int64_t limit = ubatch::random_budget(rng, batch);
      ubatch::KernelDescriptor kernel = ubatch::unit_kernel(batch);
      what = "wr batch=" + std::to_string(batch) +
             " limit=" + std::to_string(limit) + " policy=" +
             std::string(ubatch::to_string(policy));
      try {
        optimizer = ubatch::wr_optimize(provider, kernel, batch, limit, policy)
                        .total_time;
      } catch (const ubatch::infeasible_error&) {
      }
      if (auto best = ubatch::exhaustive::wr_minimum(provider, kernel, batch,
                                                     limit, policy)) {
        oracle = best->time;
      }
    } else {
      std::int64_t kernel_count = ubatch::pick(rng, 1, args.kernels);
      std::vector<ubatch::KernelDescriptor> kernels;
      std::int64_t batch_sum = 0;
      for (std::int64_t i = 0; i < kernel_count; ++i) {
        std::int64_t batch = ubatch::pick(rng, 1, args.batch_size);
        ubatch::OpType op = static_cast<ubatch::OpType>(i % 3);
        kernels.push_back(
            ubatch::unit_kernel(batch, op, "k" + std::to_string(i)));
        batch_sum += batch;
      }
      std::int64_t budget = ubatch::pick(rng, 0, 12 * batch_sum);
      what = "wd kernels=" + std::to_string(kernel_count) +
             " budget=" + std::to_string(budget) + " policy=" +
             std::string(ubatch::to_string(policy));
      try {
        optimizer =
            ubatch::wd_optimize(provider, kernels, budget, policy).total_time;
      } catch (const ubatch::infeasible_error&) {
      }
      std::vector<std::vector<ubatch::Configuration>> sets;
      bool enumerable = true;
      for (const auto& kernel : kernels) {
        sets.push_back(ubatch::exhaustive::all_configurations(
            provider, kernel, kernel.batch, budget, policy));
        if (sets.back().empty()) enumerable = false;
      }
      if (enumerable) {
        oracle = ubatch::exhaustive::choice_minimum(sets, budget);
      }
    }

    if (optimizer != oracle) {
      std::cerr << "oracle mismatch at seed " << args.seed << " trial " << trial
                << " (" << what << "): optimizer "
                << (optimizer ? optimizer->to_string() : "infeasible")
                << " vs enumeration "
                << (oracle ? oracle->to_string() : "infeasible") << "\n";
      return kExitMismatch;
    }
    ++equal;
  }
  std::cout << "oracle " << args.kind << ": " << equal << "/" << trials
            << " equal\n";
  return kExitOk;
}

ubatch::Tensor4 random_int_tensor(std::mt19937_64& rng, std::int64_t n,
                                  std::int64_t c, std::int64_t h, std::int64_t w) {
  ubatch::Tensor4 t = ubatch::Tensor4::zeros(n, c, h, w);
  for (double& v : t.data) {
    v = static_cast<double>(ubatch::pick(rng, -3, 3));
  }
  return t;
}

int run_convcheck(const ConvCheckArgs& args) {
  if (args.batch < 1 || args.batch > 8) {
    std::cerr << "convcheck: batch must be in 1..8 (exhaustive composition "
                 "enumeration)\n";
    return kExitUsage;
  }
  std::vector<ubatch::OpType> ops;
  if (args.op == "all") {
    ops = {ubatch::OpType::kForward, ubatch::OpType::kBackwardData,
           ubatch::OpType::kBackwardFilter};
  } else if (args.op == "forward") {
    ops = {ubatch::OpType::kForward};
  } else if (args.op == "backward-data") {
    ops = {ubatch::OpType::kBackwardData};
  } else if (args.op == "backward-filter") {
    ops = {ubatch::OpType::kBackwardFilter};
  } else {
    std::cerr << "convcheck: --op must be forward, backward-data, "
                 "backward-filter or all\n";
    return kExitUsage;
  }

  std::vector<std::int64_t> sizes;
  for (std::int64_t s = 1; s <= args.batch; ++s) sizes.push_back(s);

  std::int64_t checks = 0;
  for (std::int64_t trial = 0; trial < args.trials; ++trial) {
    std::mt19937_64 rng(args.seed * 7919ULL + static_cast<std::uint64_t>(trial));
    ubatch::KernelDescriptor kernel;
    kernel.batch = args.batch;
    kernel.in_channels = ubatch::pick(rng, 1, 2);
    kernel.height = ubatch::pick(rng, 3, 5);
    kernel.width = ubatch::pick(rng, 3, 5);
    kernel.out_channels = ubatch::pick(rng, 1, 2);
    kernel.kernel_h = ubatch::pick(rng, 1, 3);
    kernel.kernel_w = ubatch::pick(rng, 1, 3);
    kernel.pad_h = kernel.pad_w = ubatch::pick(rng, 0, 1);
    kernel.stride_h = kernel.stride_w = ubatch::pick(rng, 1, 2);
    kernel.layer_name = "convcheck";

    for (ubatch::OpType op : ops) {
      kernel.op_type = op;
      ubatch::Tensor4 x = random_int_tensor(rng, kernel.batch, kernel.in_channels,
                                            kernel.height, kernel.width);
      ubatch::Tensor4 f =
          random_int_tensor(rng, kernel.out_channels, kernel.in_channels,
                            kernel.kernel_h, kernel.kernel_w);
      ubatch::Tensor4 y = ubatch::conv_forward(x, f, kernel.pad_h, kernel.pad_w,
                                               kernel.stride_h, kernel.stride_w);
      ubatch::Tensor4 dy = random_int_tensor(rng, kernel.batch, kernel.out_channels,
                                             y.h, y.w);
      const ubatch::Tensor4& a = op == ubatch::OpType::kBackwardData ? dy : x;
      const ubatch::Tensor4& b = op == ubatch::OpType::kBackwardFilter ? dy : f;

      auto plan_of = [](const std::vector<std::int64_t>& parts) {
        std::vector<ubatch::MicroConfiguration> micros;
        for (std::int64_t p : parts) {
          micros.push_back(
              ubatch::MicroConfiguration{ubatch::AlgorithmId{0}, p, {}, 0});
        }
        return ubatch::Configuration(micros);
      };
      ubatch::Tensor4 undivided = ubatch::execute_plan(
          kernel, plan_of({kernel.batch}), a, b);

      bool ok = true;
      ubatch::exhaustive::for_each_partition(
          kernel.batch, sizes, [&](const std::vector<std::int64_t>& parts) {
            if (!ok) return;
            ubatch::Tensor4 split = ubatch::execute_plan(kernel, plan_of(parts), a, b);
            if (!(split == undivided)) ok = false;
            ++checks;
          });
      if (!ok) {
        std::cerr << "convcheck mismatch: " << ubatch::to_string(op)
                  << " at trial " << trial << "\n";
        return kExitMismatch;
      }
    }
  }
  std::cout << "convcheck: " << checks
            << " micro-batched executions match undivided execution exactly\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "micro-batch planner for convolution workloads under workspace limits"};
  app.require_subcommand(1);

  OptimizeArgs opt;
  CLI::App* optimize =
      app.add_subcommand("optimize", "optimize a network and print a report");
  optimize->add_option("--network", opt.network_path, "network description file")
      ->required()
      ->envname("UBATCH_NETWORK");
  optimize->add_option("--batch-size", opt.batch_size,
                       "override the network's mini-batch size")
      ->envname("UBATCH_BATCH_SIZE");
  optimize->add_option("--mode", opt.mode, "wr: per-kernel limit, wd: shared total")
      ->check(CLI::IsMember({"wr", "wd"}))
      ->envname("UBATCH_MODE");
  optimize
      ->add_option("--batch-policy", opt.policy,
                   "micro-batch sizes to evaluate")
      ->check(CLI::IsMember({"all", "powerOfTwo", "undivided"}))
      ->envname("UBATCH_BATCH_POLICY");
  optimize
      ->add_option("--workspace-limit", opt.workspace_limit,
                   "bytes, or small/moderate/large (per kernel; wd multiplies "
                   "by the kernel count)")
      ->envname("UBATCH_WORKSPACE_LIMIT");
  optimize
      ->add_option("--cost-model", opt.cost_model_path,
                   "cost model file, or a measurement file in the cost-db CSV "
                   "format (default: bundled archetypes)")
      ->envname("UBATCH_COST_MODEL");
  optimize
      ->add_option("--cost-db", opt.cost_db_path,
                   "cost database file used as a cache; created if missing")
      ->envname("UBATCH_COST_DB");
  optimize->add_option("--report", opt.report, "report flavor")
      ->check(CLI::IsMember({"text", "machine"}))
      ->envname("UBATCH_REPORT");
  optimize->add_option("--jobs", opt.jobs, "worker threads for per-kernel work")
      ->check(CLI::PositiveNumber)
      ->envname("UBATCH_JOBS");
  optimize->add_option("--seed", opt.seed, "accepted for interface symmetry")
      ->envname("UBATCH_SEED");

  OracleArgs ora;
  CLI::App* oracle = app.add_subcommand(
      "oracle", "compare an optimizer against exhaustive enumeration");
  oracle->add_option("--kind", ora.kind, "which optimizer to check")
      ->required()
      ->check(CLI::IsMember({"wr", "wd"}))
      ->envname("UBATCH_ORACLE_KIND");
  oracle->add_option("--trials", ora.trials, "random instances (default 100 wr / 30 wd)")
      ->envname("UBATCH_TRIALS");
  oracle->add_option("--seed", ora.seed, "base random seed")->envname("UBATCH_SEED");
  oracle->add_option("--batch-size", ora.batch_size,
                     "max mini-batch per instance (<=16 wr, <=8 wd)")
      ->envname("UBATCH_BATCH_SIZE");
  oracle->add_option("--kernels", ora.kernels, "max kernels per wd instance (<=4)")
      ->envname("UBATCH_KERNELS");
  oracle->add_option("--algorithms", ora.algorithms, "max algorithms (<=3)")
      ->envname("UBATCH_ALGORITHMS");

  ConvCheckArgs conv;
  CLI::App* convcheck = app.add_subcommand(
      "convcheck",
      "verify micro-batched reference convolution against undivided runs");
  convcheck->add_option("--op", conv.op,
                        "forward, backward-data, backward-filter or all")
      ->envname("UBATCH_OP");
  convcheck->add_option("--batch", conv.batch, "mini-batch size (<=8)")
      ->envname("UBATCH_BATCH_SIZE");
  convcheck->add_option("--trials", conv.trials, "random tensor sets per op")
      ->envname("UBATCH_TRIALS");
  convcheck->add_option("--seed", conv.seed, "base random seed")
      ->envname("UBATCH_SEED");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (optimize->parsed()) return run_optimize(opt);
    if (oracle->parsed()) return run_oracle(ora);
    if (convcheck->parsed()) return run_convcheck(conv);
  } catch (const ubatch::infeasible_error& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    if (e.min_total_workspace() >= 0) {
      std::cerr << "smallest achievable total workspace: "
                << e.min_total_workspace() << " bytes\n";
    }
    return kExitInfeasible;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
