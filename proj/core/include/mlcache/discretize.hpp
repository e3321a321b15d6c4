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
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "mlcache/model.hpp"

namespace mlcache {

// Normalized Zipf weights 1/r^exponent, r = 1..n.
std::vector<double> zipf_weights(std::size_t n, double exponent);

struct LevelSplit {
  static constexpr std::size_t kDropped = std::numeric_limits<std::size_t>::max();

  std::vector<std::int64_t> cuts;  // first file index of segments 2..L
  SystemSpec spec = SystemSpec::multi_user(1, {LevelSpec{}});
  double objective = 0.0;  // memory-sharing rate of `spec` at the evaluation memory
  std::vector<std::int64_t> segment_files;
  std::vector<double> segment_mass;
  std::vector<std::int64_t> segment_users;
  // Canonical level of each segment in `spec`, kDropped for segments without
  // files or users.
  std::vector<std::size_t> segment_level;
};

// Spec induced by fixed cuts: N_i = segment size, U_i = users_i / K where
// users_i = round(total_users * mass_i) for the less popular segments and the
// most popular segment takes the remainder. Degrees default to 1.
LevelSplit induced_split(std::span<const double> weights, const std::vector<std::int64_t>& cuts, int caches,
                         double memory, std::int64_t total_users);

// Exhaustive search over cut positions on a quantile lattice.
LevelSplit split_levels(std::span<const double> weights, std::size_t levels, int caches, double memory,
                        std::int64_t total_users, bool allow_empty, std::size_t lattice = 200);

struct AccessPlan {
  std::vector<int> degrees;  // canonical level order
  double rate = 0.0;
  SystemSpec spec = SystemSpec::multi_user(1, {LevelSpec{}});
};

bool degrees_feasible(const SystemSpec& spec, const std::vector<int>& degrees, int d_max, double d_avg);

// Exhaustive search over degree tuples with d_i <= min(d_max, K) and the
// user-weighted average degree at most d_avg; ties keep the
// lexicographically smallest tuple.
AccessPlan optimize_access(const SystemSpec& spec, double memory, int d_max, double d_avg);

}  // namespace mlcache
