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

#include <doctest.h>

#include <random>

#include "test_util.hpp"
#include "ubatch/domain.hpp"

using namespace ubatch;
using test::micro;

TEST_CASE("configuration time is the sum over micro-batches") {
  Configuration two({micro(0, 32, Rat64(5), 0), micro(0, 32, Rat64(5), 0)});
  CHECK(two.time() == Rat64(10));

  Configuration one({micro(0, 64, Rat64(12), 8)});
  CHECK(one.time() == Rat64(12));

  Configuration three({micro(0, 60, Rat64(7), 4), micro(0, 60, Rat64(7), 4),
                       micro(0, 60, Rat64(7), 4)});
  CHECK(three.time() == Rat64(21));
  CHECK(three.covered_batch() == 180);
}

TEST_CASE("configuration workspace is the shared-slot maximum") {
  CHECK(Configuration({micro(0, 32, Rat64(1), 100), micro(1, 32, Rat64(1), 40)})
            .workspace() == 100);
  CHECK(Configuration({micro(0, 64, Rat64(1), 0)}).workspace() == 0);
  CHECK(Configuration({micro(0, 32, Rat64(1), 7), micro(0, 32, Rat64(1), 7)})
            .workspace() == 7);
}

TEST_CASE("concat merges and canonicalizes") {
  Configuration ab({micro(0, 4, Rat64(1), 1), micro(1, 3, Rat64(1), 1)});
  Configuration cd({micro(0, 5, Rat64(1), 1), micro(2, 3, Rat64(1), 1)});
  Configuration joined = concat(ab, cd);
  CHECK(joined.size() == 4);
  CHECK(joined.covered_batch() == 15);
  CHECK(concat(ab, cd) == concat(cd, ab));

  // canonical order: micro-batch descending, then algorithm id ascending
  CHECK(joined.micros()[0].micro_batch == 5);
  CHECK(joined.micros()[1].micro_batch == 4);
  CHECK(joined.micros()[2].algorithm.value == 1);
  CHECK(joined.micros()[3].algorithm.value == 2);

  CHECK_THROWS_AS(Configuration({}), std::invalid_argument);
  CHECK_THROWS_AS(Configuration({micro(0, 0, Rat64(1), 0)}), std::invalid_argument);
}

TEST_CASE("concat cost identities hold on random configurations") {
  std::mt19937_64 rng(21);
  auto random_config = [&rng]() {
    std::vector<MicroConfiguration> micros;
    std::size_t n = 1 + rng() % 4;
    for (std::size_t i = 0; i < n; ++i) {
      micros.push_back(micro(static_cast<std::int32_t>(rng() % 3),
                             1 + static_cast<std::int64_t>(rng() % 16),
                             Rat64(static_cast<std::int64_t>(rng() % 50), 2),
                             static_cast<std::int64_t>(rng() % 100)));
    }
    return Configuration(micros);
  };
  for (int i = 0; i < 200; ++i) {
    Configuration a = random_config();
    Configuration b = random_config();
    Configuration joined = concat(a, b);
    CHECK(joined.time() == a.time() + b.time());
    CHECK(joined.workspace() == std::max(a.workspace(), b.workspace()));
    CHECK(joined.covered_batch() == a.covered_batch() + b.covered_batch());
  }
}

TEST_CASE("canonical hash ignores the layer name and nothing else") {
  KernelDescriptor k;
  k.op_type = OpType::kBackwardData;
  k.batch = 256;
  k.in_channels = 64;
  k.height = 27;
  k.width = 27;
  k.out_channels = 192;
  k.kernel_h = 5;
  k.kernel_w = 5;
  k.pad_h = k.pad_w = 2;
  k.layer_name = "conv2";

  KernelDescriptor same = k;
  same.layer_name = "conv2_replica";
  CHECK(k.canonical_hash() == same.canonical_hash());
  CHECK(same_shape(k, same));
  CHECK_FALSE(k == same);  // full equality still sees the name

  // every shape field participates in the hash
  auto mutated = [&k](auto&& mutate) {
    KernelDescriptor m = k;
    mutate(m);
    return m;
  };
  CHECK(mutated([](auto& m) { m.op_type = OpType::kForward; }).canonical_hash() !=
        k.canonical_hash());
  CHECK(mutated([](auto& m) { ++m.batch; }).canonical_hash() != k.canonical_hash());
  CHECK(mutated([](auto& m) { ++m.in_channels; }).canonical_hash() != k.canonical_hash());
  CHECK(mutated([](auto& m) { ++m.height; }).canonical_hash() != k.canonical_hash());
  CHECK(mutated([](auto& m) { ++m.width; }).canonical_hash() != k.canonical_hash());
  CHECK(mutated([](auto& m) { ++m.out_channels; }).canonical_hash() != k.canonical_hash());
  CHECK(mutated([](auto& m) { ++m.kernel_h; }).canonical_hash() != k.canonical_hash());
  CHECK(mutated([](auto& m) { ++m.kernel_w; }).canonical_hash() != k.canonical_hash());
  CHECK(mutated([](auto& m) { ++m.pad_h; }).canonical_hash() != k.canonical_hash());
  CHECK(mutated([](auto& m) { ++m.pad_w; }).canonical_hash() != k.canonical_hash());
  CHECK(mutated([](auto& m) { ++m.stride_h; }).canonical_hash() != k.canonical_hash());
  CHECK(mutated([](auto& m) { ++m.stride_w; }).canonical_hash() != k.canonical_hash());
}

TEST_CASE("hash equality agrees with shape equality on random descriptors") {
  std::mt19937_64 rng(5);
  auto random_kernel = [&rng]() {
    KernelDescriptor k;
    k.op_type = static_cast<OpType>(rng() % 3);
    k.batch = 1 + rng() % 4;
    k.in_channels = 1 + rng() % 3;
    k.height = k.width = 3 + rng() % 3;
    k.out_channels = 1 + rng() % 3;
    k.kernel_h = k.kernel_w = 1 + rng() % 3;
    k.pad_h = k.pad_w = rng() % 2;
    k.layer_name = "k" + std::to_string(rng() % 4);
    return k;
  };
  for (int i = 0; i < 500; ++i) {
    KernelDescriptor a = random_kernel();
    KernelDescriptor b = random_kernel();
    CHECK(same_shape(a, b) == (a.canonical_hash() == b.canonical_hash()));
  }
}

TEST_CASE("kernel validation catches bad shapes") {
  KernelDescriptor k;
  k.layer_name = "bad";
  k.height = 3;
  k.width = 3;
  k.kernel_h = 5;  // larger than padded input
  CHECK_THROWS_AS(k.validate(), std::invalid_argument);
  k.kernel_h = 1;
  k.pad_h = -1;
  CHECK_THROWS_AS(k.validate(), std::invalid_argument);
  k.pad_h = 0;
  k.batch = 0;
  CHECK_THROWS_AS(k.validate(), std::invalid_argument);
}

TEST_CASE("op type names round-trip") {
  for (OpType op : {OpType::kForward, OpType::kBackwardData, OpType::kBackwardFilter}) {
    CHECK(parse_op_type(to_string(op)) == op);
  }
  CHECK_FALSE(parse_op_type("Sideways").has_value());
}
