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

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "mlcache/model.hpp"
#include "mlcache/partition.hpp"

namespace mlcache {

enum class BoundOrigin {
  kNone,
  kCase0,
  kCase1a,
  kCase1b,
  kCase2,
  kGridSearch,
  kCutSet,
  kUserSupplied,
  kSingleUser,
};

std::string_view to_string(BoundOrigin origin);

// Sliding-window lower bound parameters: t window shifts, b broadcasts, and
// s_i caches per level. lambda_i is 1 when s_i t = d_i and 1/2 otherwise.
struct BoundParams {
  int t = 1;
  std::int64_t b = 1;
  std::vector<int> s;
  std::vector<double> lambda;
  BoundOrigin origin = BoundOrigin::kUserSupplied;
};

// Fills lambda from the rule; does not validate.
BoundParams make_bound_params(const SystemSpec& spec, int t, std::int64_t b, std::vector<int> s,
                              BoundOrigin origin);
bool bound_params_valid(const SystemSpec& spec, const BoundParams& params) noexcept;
// Throws ModelError(kInvalidParameters) naming the first failing constraint.
void check_bound_params(const SystemSpec& spec, const BoundParams& params);

// max{0, sum_i lambda_i min{(s_i t - d_i + 1) U_i, N_i / (s_i b)} - (t/b) M}.
double multiuser_lower_bound(const SystemSpec& spec, double memory, const BoundParams& params);

// For fixed (t, b), the s_i maximizing level i's own term; nullopt when the
// admissible range {ceil(d_i/t) .. floor(floor(K/2)/t)} is empty.
std::optional<int> best_window_count(const SystemSpec& spec, std::size_t level, int t, std::int64_t b);

std::vector<BoundParams> candidate_params(const SystemSpec& spec, double memory);
std::vector<BoundParams> candidate_params(const SystemSpec& spec, const IntervalTable& table, double memory);

// Joint bound over `caches` consecutive caches and b broadcasts:
// sum_i min{(caches - d_i + 1)^+ U_i, N_i / b} - caches * M / b.
struct CutSetParams {
  int caches = 1;
  std::int64_t b = 1;
};

double cut_set_lower_bound(const SystemSpec& spec, double memory, const CutSetParams& params);
std::vector<CutSetParams> cut_set_candidates(const SystemSpec& spec);

struct SUBoundParams {
  std::int64_t b = 1;
  std::vector<std::int64_t> s;  // per canonical level, 0 for levels grouped into J
  std::vector<bool> in_J;
  std::int64_t s_J = 0;
  std::int64_t n_J = 0;
};

SUBoundParams default_su_bound_params(const SystemSpec& spec, double memory);
void check_su_bound_params(const SystemSpec& spec, const SUBoundParams& params);
double singleuser_lower_bound(const SystemSpec& spec, double memory,
                              const std::optional<SUBoundParams>& params = std::nullopt);

struct LowerBound {
  double value = 0.0;
  BoundOrigin origin = BoundOrigin::kNone;
  std::variant<std::monostate, BoundParams, CutSetParams, SUBoundParams> params;
};

LowerBound best_multiuser_lower_bound(const SystemSpec& spec, double memory);
LowerBound best_multiuser_lower_bound(const SystemSpec& spec, const IntervalTable& table, double memory);
// Dispatches on the setup.
LowerBound best_lower_bound(const SystemSpec& spec, double memory);

struct GapRow {
  double memory = 0.0;
  double achievable = 0.0;
  double lower = 0.0;
  double ratio = 1.0;  // +inf when lower = 0 < achievable; 1 when both vanish
  BoundOrigin origin = BoundOrigin::kNone;
};

double gap_ratio(double achievable, double lower);
std::vector<GapRow> gap(const SystemSpec& spec, std::span<const double> grid);

// Exact optimum of the two-level, two-cache, three-user example; n2 >= 4.
double small_example_optimum(double memory, std::int64_t n2);

}  // namespace mlcache
