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

#include "mlcache/single_level.hpp"

#include <algorithm>
#include <cmath>

#include "mlcache/errors.hpp"

namespace mlcache {

double basic_rate(double memory, double caches, double files) {
  if (memory >= files) return 0.0;
  const double reach = memory > 0.0 ? std::min(files / memory, caches) : caches;
  return std::clamp(reach * (1.0 - memory / files), 0.0, caches);
}

double single_level_rate(double memory, double caches, double files, double users_per_cache,
                         double degree) {
  const double left = 1.0 - degree * memory / files;
  if (left <= 0.0) return 0.0;
  const double reach = memory > 0.0 ? std::min(files / memory, caches) : caches;
  return users_per_cache * reach * left;
}

double centralized_basic_rate(double memory, double caches, double files) {
  if (memory >= files) return 0.0;
  const double t = std::max(0.0, caches * memory / files);
  const double lo = std::floor(t);
  const double hi = lo + 1.0;
  auto at = [&](double k) { return (caches - k) / (1.0 + k); };
  const double interp = at(lo) + (t - lo) * (at(hi) - at(lo));
  // With fewer files than caches, unicasting the uncached part of every file is cheaper.
  return std::max(0.0, std::min(interp, files - memory));
}

double centralized_single_level_rate(double memory, double caches, double files,
                                     double users_per_cache, double degree) {
  // d*U groups times d colors, each a K/d-user subsystem over subfiles of size F/d.
  return degree * users_per_cache * centralized_basic_rate(degree * memory, caches / degree, files);
}

int ColoringPlan::cache_of_color(const WindowUser& user, int color) const {
  const int offset = ((color - user.window_start) % colors + colors) % colors;
  return (user.window_start + offset) % caches;
}

ColoringPlan coloring_plan(int caches, int users_per_cache, int degree) {
  if (caches < 1 || users_per_cache < 1 || degree < 1 || degree > caches) {
    throw ModelError(ModelErrorKind::kInvalidParameters, "coloring needs K >= d >= 1 and U >= 1");
  }
  if (caches % degree != 0) {
    throw ModelError(ModelErrorKind::kUnsupportedGeometry,
                     "degree " + std::to_string(degree) + " does not divide cache count " +
                         std::to_string(caches));
  }
  ColoringPlan plan;
  plan.caches = caches;
  plan.colors = degree;
  plan.users_per_cache = users_per_cache;
  plan.cache_color.resize(static_cast<std::size_t>(caches));
  for (int k = 0; k < caches; ++k) plan.cache_color[static_cast<std::size_t>(k)] = k % degree;
  // Group (r, u): windows starting at r, r+d, r+2d, ... are disjoint and tile the ring.
  for (int r = 0; r < degree; ++r) {
    for (int u = 0; u < users_per_cache; ++u) {
      std::vector<WindowUser> group;
      for (int w = r; w < caches; w += degree) group.push_back({w, u});
      plan.groups.push_back(std::move(group));
    }
  }
  return plan;
}

}  // namespace mlcache
