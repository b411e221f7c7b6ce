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

#include <cmath>
#include <random>

#include "test_util.hpp"
#include "ubatch/reference_conv.hpp"

using namespace ubatch;
using test::micro;
using test::random_int_tensor;

namespace {

// Independent forward implementation: materializes a zero-padded copy of the
// input and gathers with plain index arithmetic, iterating the loops in a
// different order than conv_forward.
Tensor4 conv_forward_oracle(const Tensor4& x, const Tensor4& f, std::int64_t pad_h,
                            std::int64_t pad_w, std::int64_t stride_h,
                            std::int64_t stride_w) {
  Tensor4 padded = Tensor4::zeros(x.n, x.c, x.h + 2 * pad_h, x.w + 2 * pad_w);
  for (std::int64_t n = 0; n < x.n; ++n)
    for (std::int64_t c = 0; c < x.c; ++c)
      for (std::int64_t h = 0; h < x.h; ++h)
        for (std::int64_t w = 0; w < x.w; ++w)
          padded.at(n, c, h + pad_h, w + pad_w) = x.at(n, c, h, w);

  const std::int64_t out_h = (x.h + 2 * pad_h - f.h) / stride_h + 1;
  const std::int64_t out_w = (x.w + 2 * pad_w - f.w) / stride_w + 1;
  Tensor4 y = Tensor4::zeros(x.n, f.n, out_h, out_w);
  for (std::int64_t c = 0; c < x.c; ++c)
    for (std::int64_t v = 0; v < f.h; ++v)
      for (std::int64_t u = 0; u < f.w; ++u)
        for (std::int64_t k = 0; k < f.n; ++k) {
          const double weight = f.at(k, c, v, u);
          for (std::int64_t n = 0; n < x.n; ++n)
            for (std::int64_t ho = 0; ho < out_h; ++ho)
              for (std::int64_t wo = 0; wo < out_w; ++wo)
                y.at(n, k, ho, wo) +=
                    weight * padded.at(n, c, ho * stride_h + v, wo * stride_w + u);
        }
  return y;
}

double inner(const Tensor4& a, const Tensor4& b) {
  double sum = 0;
  for (std::size_t i = 0; i < a.data.size(); ++i) sum += a.data[i] * b.data[i];
  return sum;
}

Configuration plan_of(const std::vector<std::int64_t>& parts) {
  std::vector<MicroConfiguration> micros;
  for (std::int64_t p : parts) micros.push_back(micro(0, p, Rat64(0), 0));
  return Configuration(micros);
}

}  // namespace

TEST_CASE("a 1x1 filter scales the input") {
  std::mt19937_64 rng(3);
  Tensor4 x = random_int_tensor(rng, 1, 1, 4, 5);
  Tensor4 f = Tensor4::zeros(1, 1, 1, 1);
  f.data[0] = 2.0;
  Tensor4 y = conv_forward(x, f, 0, 0, 1, 1);
  REQUIRE(y.count() == x.count());
  for (std::size_t i = 0; i < x.data.size(); ++i) CHECK(y.data[i] == 2.0 * x.data[i]);

  // 1x1 backward-data is the same scaling
  Tensor4 dx = conv_backward_data(y, f, 0, 0, 1, 1, x.h, x.w);
  for (std::size_t i = 0; i < x.data.size(); ++i) CHECK(dx.data[i] == 4.0 * x.data[i]);
}

TEST_CASE("all-ones 3x3 on all-ones 3x3 sums nine ones") {
  Tensor4 x = Tensor4::zeros(1, 1, 3, 3);
  Tensor4 f = Tensor4::zeros(1, 1, 3, 3);
  for (double& v : x.data) v = 1.0;
  for (double& v : f.data) v = 1.0;
  Tensor4 y = conv_forward(x, f, 0, 0, 1, 1);
  REQUIRE(y.count() == 1);
  CHECK(y.data[0] == 9.0);
}

TEST_CASE("forward matches an independently written oracle on random shapes") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    std::int64_t n = pick(rng, 1, 2);
    std::int64_t c = pick(rng, 1, 3);
    std::int64_t h = pick(rng, 3, 6);
    std::int64_t w = pick(rng, 3, 6);
    std::int64_t k = pick(rng, 1, 3);
    std::int64_t kh = pick(rng, 1, 3);
    std::int64_t kw = pick(rng, 1, 3);
    std::int64_t pad = pick(rng, 0, 1);
    std::int64_t stride = pick(rng, 1, 2);
    Tensor4 x = random_int_tensor(rng, n, c, h, w);
    Tensor4 f = random_int_tensor(rng, k, c, kh, kw);
    CHECK(conv_forward(x, f, pad, pad, stride, stride) ==
          conv_forward_oracle(x, f, pad, pad, stride, stride));
  }
}

TEST_CASE("backward-data is the exact adjoint of forward") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 50; ++trial) {
    std::int64_t n = pick(rng, 1, 2);
    std::int64_t c = pick(rng, 1, 2);
    std::int64_t h = pick(rng, 3, 6);
    std::int64_t w = pick(rng, 3, 6);
    std::int64_t k = pick(rng, 1, 2);
    std::int64_t kh = pick(rng, 1, 3);
    std::int64_t kw = pick(rng, 1, 3);
    std::int64_t pad = pick(rng, 0, 1);
    std::int64_t stride = pick(rng, 1, 2);
    Tensor4 x = random_int_tensor(rng, n, c, h, w);
    Tensor4 f = random_int_tensor(rng, k, c, kh, kw);
    Tensor4 y = conv_forward(x, f, pad, pad, stride, stride);
    Tensor4 dy = random_int_tensor(rng, n, k, y.h, y.w);
    Tensor4 dx = conv_backward_data(dy, f, pad, pad, stride, stride, h, w);
    CHECK(inner(y, dy) == inner(x, dx));  // exact on integer data
  }

  Tensor4 f = Tensor4::zeros(1, 1, 2, 2);
  Tensor4 zero_dy = Tensor4::zeros(1, 1, 3, 3);
  Tensor4 dx = conv_backward_data(zero_dy, f, 0, 0, 1, 1, 4, 4);
  for (double v : dx.data) CHECK(v == 0.0);
}

TEST_CASE("single-sample 1x1 filter gradient is a dot product") {
  std::mt19937_64 rng(17);
  Tensor4 x = random_int_tensor(rng, 1, 1, 4, 4);
  Tensor4 dy = random_int_tensor(rng, 1, 1, 4, 4);
  Tensor4 dw = conv_backward_filter(x, dy, 0, 0, 1, 1, 1, 1);
  REQUIRE(dw.count() == 1);
  CHECK(dw.data[0] == inner(x, dy));
}

TEST_CASE("filter-gradient accumulation over sample groups is additive") {
  std::mt19937_64 rng(19);
  Tensor4 x = random_int_tensor(rng, 2, 2, 5, 5);
  Tensor4 f = random_int_tensor(rng, 2, 2, 3, 3);
  Tensor4 y = conv_forward(x, f, 1, 1, 1, 1);
  Tensor4 dy = random_int_tensor(rng, 2, 2, y.h, y.w);

  Tensor4 whole = conv_backward_filter(x, dy, 1, 1, 1, 1, 3, 3);

  Tensor4 acc = Tensor4::zeros(2, 2, 3, 3);
  for (std::int64_t s = 0; s < 2; ++s) {
    Tensor4 xs = Tensor4::zeros(1, 2, 5, 5);
    Tensor4 dys = Tensor4::zeros(1, 2, y.h, y.w);
    std::copy(x.data.begin() + s * 50, x.data.begin() + (s + 1) * 50, xs.data.begin());
    std::copy(dy.data.begin() + s * 2 * y.h * y.w,
              dy.data.begin() + (s + 1) * 2 * y.h * y.w, dys.data.begin());
    conv_backward_filter_acc(xs, dys, 1, 1, 1, 1, acc);
  }
  CHECK(acc == whole);
}

TEST_CASE("filter gradient matches central finite differences") {
  // L(W) = sum(Y^2)/2 is quadratic in W, so the central difference is exact
  // up to floating-point rounding.
  std::mt19937_64 rng(23);
  Tensor4 x = random_int_tensor(rng, 1, 2, 4, 4, -2, 2);
  Tensor4 f = random_int_tensor(rng, 2, 2, 3, 3, -2, 2);
  const std::int64_t pad = 1, stride = 1;
  Tensor4 y = conv_forward(x, f, pad, pad, stride, stride);
  Tensor4 analytic = conv_backward_filter(x, y, pad, pad, stride, stride, 3, 3);

  auto loss = [&](const Tensor4& filter) {
    Tensor4 out = conv_forward(x, filter, pad, pad, stride, stride);
    double sum = 0;
    for (double v : out.data) sum += v * v;
    return sum / 2.0;
  };
  const double step = 1e-4;
  for (std::size_t i = 0; i < f.data.size(); ++i) {
    Tensor4 up = f;
    Tensor4 down = f;
    up.data[i] += step;
    down.data[i] -= step;
    double numeric = (loss(up) - loss(down)) / (2 * step);
    double expected = analytic.data[i];
    double denom = std::max(1.0, std::abs(expected));
    CHECK(std::abs(numeric - expected) / denom < 1e-5);
  }
}

TEST_CASE("plan execution equals undivided execution for the named splits") {
  std::mt19937_64 rng(29);
  KernelDescriptor k;
  k.batch = 4;
  k.in_channels = 2;
  k.height = k.width = 5;
  k.out_channels = 3;
  k.kernel_h = k.kernel_w = 3;
  k.pad_h = k.pad_w = 1;
  k.layer_name = "t";

  Tensor4 x = random_int_tensor(rng, 4, 2, 5, 5);
  Tensor4 f = random_int_tensor(rng, 3, 2, 3, 3);
  Tensor4 y = conv_forward(x, f, 1, 1, 1, 1);
  Tensor4 dy = random_int_tensor(rng, 4, 3, y.h, y.w);

  k.op_type = OpType::kForward;
  CHECK(execute_plan(k, plan_of({2, 2}), x, f) ==
        execute_plan(k, plan_of({4}), x, f));

  k.op_type = OpType::kBackwardFilter;
  CHECK(execute_plan(k, plan_of({1, 3}), x, dy) ==
        execute_plan(k, plan_of({4}), x, dy));

  KernelDescriptor k6 = k;
  k6.batch = 6;
  k6.op_type = OpType::kBackwardData;
  Tensor4 dy6 = random_int_tensor(rng, 6, 3, y.h, y.w);
  Tensor4 undivided = execute_plan(k6, plan_of({6}), dy6, f);
  CHECK(execute_plan(k6, plan_of({4, 2}), dy6, f) == undivided);
  CHECK(execute_plan(k6, plan_of({3, 3}), dy6, f) == undivided);
}

TEST_CASE("every partition of the batch preserves semantics exactly") {
  std::mt19937_64 rng(31);
  for (std::int64_t batch = 1; batch <= 6; ++batch) {
    KernelDescriptor k;
    k.batch = batch;
    k.in_channels = 2;
    k.height = k.width = 4;
    k.out_channels = 2;
    k.kernel_h = k.kernel_w = 3;
    k.pad_h = k.pad_w = 1;
    k.stride_h = k.stride_w = pick(rng, 1, 2);
    k.layer_name = "p";

    Tensor4 x = random_int_tensor(rng, batch, 2, 4, 4);
    Tensor4 f = random_int_tensor(rng, 2, 2, 3, 3);
    Tensor4 y = conv_forward(x, f, 1, 1, k.stride_h, k.stride_w);
    Tensor4 dy = random_int_tensor(rng, batch, 2, y.h, y.w);

    for (OpType op : {OpType::kForward, OpType::kBackwardData, OpType::kBackwardFilter}) {
      k.op_type = op;
      const Tensor4& a = op == OpType::kBackwardData ? dy : x;
      const Tensor4& b = op == OpType::kBackwardFilter ? dy : f;
      Tensor4 undivided = execute_plan(k, plan_of({batch}), a, b);
      for (const auto& parts : test::partitions_of(batch)) {
        CHECK(execute_plan(k, plan_of(parts), a, b) == undivided);
      }
    }
  }
}

TEST_CASE("shape mismatches are rejected with descriptive errors") {
  Tensor4 x = Tensor4::zeros(2, 3, 5, 5);
  Tensor4 f = Tensor4::zeros(4, 2, 3, 3);  // channel mismatch
  CHECK_THROWS_AS(conv_forward(x, f, 0, 0, 1, 1), std::invalid_argument);

  KernelDescriptor k;
  k.batch = 4;
  k.in_channels = 3;
  k.height = k.width = 5;
  k.out_channels = 4;
  k.kernel_h = k.kernel_w = 3;
  k.layer_name = "m";
  Tensor4 good_f = Tensor4::zeros(4, 3, 3, 3);
  Tensor4 good_x = Tensor4::zeros(4, 3, 5, 5);
  CHECK_THROWS_AS(execute_plan(k, plan_of({2, 2}), x, good_f),
                  std::invalid_argument);  // batch 2 tensor vs batch 4 kernel
  CHECK_THROWS_AS(execute_plan(k, plan_of({3}), good_x, good_f),
                  std::invalid_argument);  // plan covers 3 of 4 samples
}
