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
#include <span>
#include <string>
#include <vector>

#include "mlcache/model.hpp"

namespace mlcache {

// Sorted canonical level indices.
using LevelSet = std::vector<std::size_t>;

// Levels that get no memory (H), a partial share (I) or everything (J).
struct Partition {
  LevelSet H, I, J;
  friend bool operator==(const Partition&, const Partition&) = default;
};

struct RefinedPartition {
  LevelSet H, I0, Iprime, I1, J;
  std::vector<std::string> warnings;
};

struct AggregateStats {
  double S = 0.0;  // sum sqrt(N_i U_i)
  double T = 0.0;  // sum N_i / d_i
  double V = 0.0;  // sum N_i / K
};

AggregateStats aggregate(const SystemSpec& spec, const LevelSet& levels);

// (M - T_J + V_I) / S_I; NaN when I is empty.
double effective_memory(const SystemSpec& spec, double memory, const Partition& partition);

// Lower threshold (1/K) sqrt(N/U) where a level starts receiving memory and
// upper threshold (1/d + 1/K) sqrt(N/U) where it becomes fully stored.
double lower_threshold(const SystemSpec& spec, std::size_t level);
double upper_threshold(const SystemSpec& spec, std::size_t level);

enum class ThresholdKind { kLower, kUpper };

struct Threshold {
  double value = 0.0;
  ThresholdKind kind = ThresholdKind::kLower;
  std::size_t level = 0;
};

struct IntervalRow {
  std::size_t t = 0;  // 1-based
  Threshold threshold;
  double lower = 0.0;  // Y_t
  Partition partition;  // valid on [Y_t, Y_{t+1})
};

class IntervalTable {
 public:
  IntervalTable() = default;
  IntervalTable(std::vector<IntervalRow> rows, double full_storage)
      : rows_(std::move(rows)), full_storage_(full_storage) {}

  std::span<const IntervalRow> rows() const noexcept { return rows_; }
  double full_storage() const noexcept { return full_storage_; }
  std::size_t interval_index(double memory) const;
  const Partition& partition_at(double memory) const { return rows_[interval_index(memory)].partition; }

 private:
  std::vector<IntervalRow> rows_;
  double full_storage_ = 0.0;
};

IntervalTable interval_table(const SystemSpec& spec);
Partition partition_at(const IntervalTable& table, double memory);

struct LevelCheck {
  std::size_t level = 0;
  char role = 'H';
  bool ok = false;
  double slack = 0.0;  // distance to the violated side, negative when violated
};

struct FeasibilityReport {
  bool feasible = false;
  double effective_memory = 0.0;
  std::vector<LevelCheck> levels;
  std::string reason;
};

// Direct evaluation of the threshold inequalities defining an M-feasible partition.
FeasibilityReport check_m_feasible(const SystemSpec& spec, double memory, const Partition& partition);

struct Allocation {
  double memory = 0.0;
  std::vector<double> per_level;  // alpha_i * M, canonical order
  Partition partition;
  RefinedPartition refined;
  double effective_memory = 0.0;  // NaN when I is empty
};

Allocation allocate(const SystemSpec& spec, double memory);
Allocation allocate(const SystemSpec& spec, const IntervalTable& table, double memory);

RefinedPartition refine(const SystemSpec& spec, double memory);
RefinedPartition refine(const SystemSpec& spec, double memory, const Partition& partition);

std::string format_level_set(const SystemSpec& spec, const LevelSet& levels);

}  // namespace mlcache
