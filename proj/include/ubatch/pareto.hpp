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
#include <vector>

namespace ubatch {

// Keeps the undominated elements of `items` in the (time, workspace) plane.
// An element is dropped when some other element is no worse in both
// coordinates and strictly better in one, or is an exact duplicate; among
// exact (time, workspace) duplicates the one that sorts first under
// `tie_less` survives. The result is sorted by time ascending, which for a
// strict front means workspace strictly descending.
template <typename T, typename TimeOf, typename WsOf, typename TieLess>
std::vector<T> pareto_front(std::vector<T> items, TimeOf time_of, WsOf ws_of,
                            TieLess tie_less) {
  std::sort(items.begin(), items.end(), [&](const T& a, const T& b) {
    if (time_of(a) != time_of(b)) return time_of(a) < time_of(b);
    if (ws_of(a) != ws_of(b)) return ws_of(a) < ws_of(b);
    return tie_less(a, b);
  });
  std::vector<T> front;
  for (auto& item : items) {
    if (front.empty() || ws_of(item) < ws_of(front.back())) {
      front.push_back(std::move(item));
    }
  }
  return front;
}

}  // namespace ubatch
