// Copyright 2026 The mlcache Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <vector>

namespace mlcache {

// Decentralized coded caching with K caches, N files and per-cache memory M
// (in files): min{N/M, K} * (1 - M/N), with min{N/0, K} = K, clamped to [0, K].
double basic_rate(double memory, double caches, double files);

// Rate of one level with U users per cache, each reading d consecutive caches:
// U * min{N/M, K} * (1 - dM/N), zero once M >= N/d.
double single_level_rate(double memory, double caches, double files, double users_per_cache,
                         double degree);

// Centralized placement rate for one single-access subsystem, memory-shared
// between the integer points t = KM/N where it is (K - t)/(1 + t).
// Analytic only; the simulator implements the decentralized scheme.
double centralized_basic_rate(double memory, double caches, double files);
double centralized_single_level_rate(double memory, double caches, double files,
                                     double users_per_cache, double degree);

struct WindowUser {
  int window_start = 0;  // first cache of the window, 0-based
  int slot = 0;          // user index among the users attached to that window

  friend bool operator==(const WindowUser&, const WindowUser&) = default;
};

// Cyclic coloring of K caches with d colors and the split of the K*U users of
// one level into d*U groups whose windows are pairwise disjoint.
struct ColoringPlan {
  int caches = 0;
  int colors = 1;
  int users_per_cache = 0;
  std::vector<int> cache_color;
  std::vector<std::vector<WindowUser>> groups;

  // The cache of color `color` inside the user's window.
  int cache_of_color(const WindowUser& user, int color) const;
  std::size_t group_size() const { return groups.empty() ? 0 : groups.front().size(); }
};

// Throws ModelError(kUnsupportedGeometry) when degree does not divide caches.
ColoringPlan coloring_plan(int caches, int users_per_cache, int degree);

}  // namespace mlcache
