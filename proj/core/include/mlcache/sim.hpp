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

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "mlcache/bitvector.hpp"
#include "mlcache/model.hpp"
#include "mlcache/partition.hpp"

namespace mlcache {

// Deterministic pseudo-random content of one file (all colors), F bits.
BitVector file_content(std::uint64_t seed, std::size_t level, std::int64_t file, std::int64_t file_bits);

struct LevelPlacement {
  int degree = 1;
  std::int64_t files = 0;
  std::int64_t subfile_bits = 0;      // F / d
  std::int64_t stored_per_cache = 0;  // bits of this level in each cache
  // Per cache: mask over (file, position) of the cache's color class,
  // bit index file * subfile_bits + position.
  std::vector<BitVector> masks;
};

struct Placement {
  int caches = 0;
  std::uint64_t seed = 0;
  std::int64_t file_bits = 0;
  double memory = 0.0;
  std::int64_t memory_budget_bits = 0;
  std::vector<LevelPlacement> levels;
  std::vector<std::int64_t> stored_bits;  // per cache, all levels

  int color_of(std::size_t level, int cache) const { return cache % levels[level].degree; }
  bool stores(std::size_t level, int cache, std::int64_t file, std::int64_t position) const;
};

// Requires d_i | K and d_i | F for every level.
Placement place(const SystemSpec& spec, const Allocation& allocation, std::int64_t file_bits, std::uint64_t seed);

struct UserRequest {
  std::size_t level = 0;
  int window_start = 0;
  int slot = 0;
  std::int64_t file = 0;
};

struct RequestVector {
  std::vector<UserRequest> users;
  std::vector<bool> repeated;  // per level: distinct demands were impossible
};

// All-distinct demands per level in (window, slot) order; repeats cyclically
// and flags the level when N_i < K U_i. Needs integral users_per_cache.
RequestVector worst_case_requests(const SystemSpec& spec);

struct Transmission {
  std::size_t level = 0;
  int color = 0;
  std::size_t group = 0;
  std::vector<std::size_t> members;  // indices into the request vector
  std::int64_t length = 0;           // payload bits
};

struct DeliveryResult {
  std::vector<Transmission> transmissions;
  std::int64_t total_bits = 0;
  std::vector<bool> decoded_ok;
  double empirical_rate = 0.0;
};

// Subset-XOR delivery per (level, color, group), followed by a bit-exact decode
// replay from each user's caches and the transcript. Throws DecodeError on any
// failed reconstruction.
DeliveryResult deliver(const SystemSpec& spec, const Placement& placement, const RequestVector& requests);

struct SimReport {
  double analytic_rate = 0.0;
  double empirical_mean = 0.0;
  double empirical_max = 0.0;
  std::int64_t decode_failures = 0;
  int trials = 0;
  std::uint64_t seed = 0;
  std::vector<double> per_trial;
};

SimReport simulate(const SystemSpec& spec, double memory, std::int64_t file_bits, std::uint64_t seed, int trials);

struct StochasticOptions {
  // Index of the first file of the second level; computed by a two-level split when absent.
  std::optional<std::int64_t> cut;
  std::size_t lattice = 200;
};

// Users attach to a uniformly random cache and request files drawn from the
// weights. The analytic rate is the symmetric-profile rate of the induced
// two-level spec.
SimReport simulate_stochastic(std::span<const double> weights, int caches, std::int64_t users, double memory,
                              std::int64_t file_bits, std::uint64_t seed, int trials,
                              const StochasticOptions& options = {});

// Two caches, two level-1 files shared by users 1 and 2 (one cache each), and
// n2 level-2 files requested by user 3 who reads both caches.
enum class Corner { kM0, kMhalf, kM1, kM2, kMfull };

std::string_view to_string(Corner corner);
double corner_memory(Corner corner, std::int64_t n2);
double corner_rate(Corner corner);

struct SmallExampleScheme {
  Corner corner = Corner::kM1;
  std::int64_t n2 = 4;
  std::int64_t file_bits = 0;
  std::array<BitVector, 2> level1;
  std::vector<BitVector> level2;
  std::array<BitVector, 2> caches;
};

using SmallDemand = std::array<std::int64_t, 3>;  // (level-1 file, level-1 file, level-2 file)

SmallExampleScheme small_example_scheme(Corner corner, std::int64_t n2, std::int64_t file_bits,
                                        std::uint64_t seed = 1);
std::vector<BitVector> small_example_broadcast(const SmallExampleScheme& scheme, const SmallDemand& demand);
// Uses only the cache contents and the broadcast.
std::array<BitVector, 3> small_example_decode(Corner corner, std::int64_t n2, std::int64_t file_bits,
                                              const std::array<BitVector, 2>& caches, const SmallDemand& demand,
                                              const std::vector<BitVector>& broadcast);

struct SmallExampleCheck {
  Corner corner = Corner::kM1;
  double memory = 0.0;
  double rate = 0.0;
  std::int64_t cache_bits = 0;
  std::int64_t min_broadcast_bits = 0;
  std::int64_t max_broadcast_bits = 0;
  int demands = 0;
  int decoded = 0;
};

SmallExampleCheck verify_small_example(Corner corner, std::int64_t n2, std::int64_t file_bits,
                                       std::uint64_t seed = 1);

}  // namespace mlcache
