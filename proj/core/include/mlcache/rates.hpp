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

#include <optional>
#include <span>
#include <vector>

#include "mlcache/model.hpp"
#include "mlcache/partition.hpp"

namespace mlcache {

// Single-user split: H' levels too sparse to cache (M < N/K), the rest are
// clustered into one coded-caching instance. G/H/I/J is the finer split used
// in the order-optimality analysis.
struct SUPartition {
  LevelSet Hprime, Iprime;
  LevelSet G, H, I, J;
  double NJ = 0.0;
};

// Terms of the single-user refined bound: 5|G|, sum K_h, sum N_i/M, and the
// J term (clustered J, or 6 sum (1 - M/N_j)^+ for the prior-knowledge rate).
struct SUTerms {
  double g = 0.0, h = 0.0, i = 0.0, j = 0.0;
  double total() const noexcept { return g + h + i + j; }
};

struct RateBreakdown {
  double memory = 0.0;
  double total = 0.0;
  std::vector<double> per_level;  // canonical order

  // Multi-user only.
  std::optional<double> approx;
  std::vector<double> upper_bounds;
  std::optional<Allocation> allocation;

  // Single-user only.
  std::optional<SUPartition> su_partition;
  std::optional<double> refined_upper_bound;
  // Clustering that unicasts G and H and runs one coded instance over I and J.
  std::optional<double> regrouped_rate;
  std::optional<double> prior_knowledge_rate;
};

RateBreakdown multiuser_rate(const SystemSpec& spec, double memory);
RateBreakdown multiuser_rate(const SystemSpec& spec, const IntervalTable& table, double memory);
// Total only, no breakdown; same arithmetic as multiuser_rate.
double multiuser_rate_total(const SystemSpec& spec, const IntervalTable& table, double memory);

enum class SubsystemScheme { kDecentralized, kCentralized };

// Memory-sharing rate for an explicit per-level memory split (absolute memory
// per level). Each level runs its own single-level scheme.
double memory_sharing_rate(const SystemSpec& spec, std::span<const double> per_level_memory,
                           SubsystemScheme scheme = SubsystemScheme::kDecentralized);

SUPartition su_partition(const SystemSpec& spec, double memory);
SUTerms su_refined_terms(const SystemSpec& spec, double memory);
SUTerms su_prior_terms(const SystemSpec& spec, double memory);
RateBreakdown singleuser_rate(const SystemSpec& spec, double memory);

// Dispatches on the setup.
double achievable_rate(const SystemSpec& spec, double memory);

// Least-frequently-used baseline: whole files in popularity order, at most one
// fractionally stored boundary file. With coded = true, full levels are stored
// in popularity order and the leftover memory runs coded caching on the next level.
double lfu_rate(const SystemSpec& spec, double memory, bool coded);

// Every file gets the same memory M / sum N_i. Multi-user only.
double uniform_sharing_rate(const SystemSpec& spec, double memory);

struct CurveRow {
  double memory = 0.0;
  std::optional<double> memory_sharing, lfu, coded_lfu, uniform, single_user, prior;
};

std::vector<CurveRow> rate_curve(const SystemSpec& spec, std::span<const double> grid);

}  // namespace mlcache
