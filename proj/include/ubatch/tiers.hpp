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
#include <optional>
#include <string_view>

namespace ubatch {

// Named per-kernel workspace budgets, calibrated against the bundled cost
// model: at `small` micro-batching barely helps, at `moderate` it unlocks the
// fast algorithms through splitting, at `large` everything fits undivided.
// Raw byte limits remain accepted everywhere a tier is.
enum class BudgetTier { kSmall, kModerate, kLarge };

inline constexpr std::int64_t tier_bytes(BudgetTier tier) {
  switch (tier) {
    case BudgetTier::kSmall:
      return 4LL << 20;  // 4 MiB
    case BudgetTier::kModerate:
      return 96LL << 20;  // 96 MiB
    case BudgetTier::kLarge:
      return 768LL << 20;  // 768 MiB
  }
  return 0;
}

inline std::optional<BudgetTier> parse_tier(std::string_view text) {
  if (text == "small") return BudgetTier::kSmall;
  if (text == "moderate") return BudgetTier::kModerate;
  if (text == "large") return BudgetTier::kLarge;
  return std::nullopt;
}

}  // namespace ubatch
