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

#include "ubatch/rational.hpp"

using ubatch::Rat64;

TEST_CASE("parsing decimals and fractions") {
  CHECK(Rat64::parse("27.6") == Rat64(138, 5));
  CHECK(Rat64::parse("0.00000005") == Rat64(1, 20000000));
  CHECK(Rat64::parse("-4.25") == Rat64(-17, 4));
  CHECK(Rat64::parse("3/4") == Rat64(3, 4));
  CHECK(Rat64::parse("42") == Rat64(42));
  CHECK(Rat64::parse("0.5") + Rat64::parse("0.5") == Rat64(1));
  CHECK_THROWS_AS(Rat64::parse(""), std::invalid_argument);
  CHECK_THROWS_AS(Rat64::parse("1.2.3"), std::invalid_argument);
  CHECK_THROWS_AS(Rat64::parse("abc"), std::invalid_argument);
  CHECK_THROWS_AS(Rat64::parse("1/0"), std::domain_error);
}

TEST_CASE("rendering is exact and round-trips") {
  CHECK(Rat64(138, 5).to_string() == "27.6");
  CHECK(Rat64(3, 8).to_string() == "0.375");
  CHECK(Rat64(-17, 4).to_string() == "-4.25");
  CHECK(Rat64(7).to_string() == "7");
  CHECK(Rat64(1, 3).to_string() == "1/3");
  std::mt19937_64 rng(11);
  for (int i = 0; i < 500; ++i) {
    Rat64 v(static_cast<std::int64_t>(rng() % 2000000) - 1000000,
            static_cast<std::int64_t>(rng() % 999) + 1);
    CHECK(Rat64::parse(v.to_string()) == v);
  }
}

TEST_CASE("arithmetic stays normalized and exact") {
  CHECK(Rat64(1, 3) + Rat64(1, 6) == Rat64(1, 2));
  CHECK(Rat64(2, 3) * Rat64(9, 4) == Rat64(3, 2));
  CHECK(Rat64(1) / Rat64(3) == Rat64(1, 3));
  CHECK(Rat64(5, 10) == Rat64(1, 2));
  CHECK(Rat64(1, 2) < Rat64(2, 3));
  CHECK(Rat64(-1, 2) < Rat64(0));
  CHECK_THROWS_AS(Rat64(1) / Rat64(0), std::domain_error);
  CHECK_THROWS_AS(Rat64(1, 0), std::domain_error);

  std::int64_t big = std::numeric_limits<std::int64_t>::max() / 2;
  CHECK_THROWS_AS(Rat64(big) * Rat64(big), std::overflow_error);
}

TEST_CASE("algebra properties on random values") {
  std::mt19937_64 rng(7);
  auto sample = [&rng]() {
    return Rat64(static_cast<std::int64_t>(rng() % 4001) - 2000,
                 static_cast<std::int64_t>(rng() % 40) + 1);
  };
  for (int i = 0; i < 300; ++i) {
    Rat64 a = sample();
    Rat64 b = sample();
    CHECK(a + b == b + a);
    CHECK(a * b == b * a);
    CHECK(a + b - b == a);
    CHECK(((a < b) ? 1 : 0) + ((a == b) ? 1 : 0) + ((b < a) ? 1 : 0) == 1);
    if (!b.is_zero()) CHECK(a / b * b == a);
  }
}
