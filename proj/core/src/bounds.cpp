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

#include "mlcache/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "mlcache/errors.hpp"
#include "mlcache/rates.hpp"

namespace mlcache {
namespace {

constexpr double kMaxB = 4.0e18;
constexpr int kMaxGridShift = 20;
constexpr int kMaxGridT = 8;
constexpr double kGamma1 = 2.965;
constexpr double kGamma2 = 0.482;

std::int64_t to_count(double v) {
  if (!(v >= 1.0)) return 0;
  return static_cast<std::int64_t>(std::min(v, kMaxB));
}

int to_int(double v) {
  if (!(v >= 0.0)) return 0;
  return static_cast<int>(std::min(v, 1.0e9));
}

double level_term(const LevelSpec& l, int s, int t, std::int64_t b) {
  const double windows = static_cast<double>(s) * t - l.degree + 1;
  return std::min(windows * l.users_per_cache,
                  static_cast<double>(l.files) / (static_cast<double>(s) * static_cast<double>(b)));
}

double lambda_for(const LevelSpec& l, int s, int t) { return s * t == l.degree ? 1.0 : 0.5; }

// Unclamped value; params assumed valid.
double window_bound_value(const SystemSpec& spec, double memory, const BoundParams& p) {
  const auto levels = spec.levels();
  double v = 0.0;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    v += lambda_for(levels[i], p.s[i], p.t) * level_term(levels[i], p.s[i], p.t, p.b);
  }
  return v - static_cast<double>(p.t) / static_cast<double>(p.b) * memory;
}

void add_b(std::vector<std::int64_t>& out, double v) {
  if (!(v > 0.0)) return;
  out.push_back(std::max<std::int64_t>(1, to_count(std::floor(v))));
  out.push_back(std::max<std::int64_t>(1, to_count(std::ceil(v))));
}

void sort_unique(std::vector<std::int64_t>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

}  // namespace

std::string_view to_string(BoundOrigin origin) {
  switch (origin) {
    case BoundOrigin::kNone: return "none";
    case BoundOrigin::kCase0: return "case0";
    case BoundOrigin::kCase1a: return "case1a";
    case BoundOrigin::kCase1b: return "case1b";
    case BoundOrigin::kCase2: return "case2";
    case BoundOrigin::kGridSearch: return "grid";
    case BoundOrigin::kCutSet: return "cutset";
    case BoundOrigin::kUserSupplied: return "user";
    case BoundOrigin::kSingleUser: return "single-user";
  }
  return "unknown";
}

BoundParams make_bound_params(const SystemSpec& spec, int t, std::int64_t b, std::vector<int> s,
                              BoundOrigin origin) {
  const auto levels = spec.levels();
  BoundParams p;
  p.t = t;
  p.b = b;
  p.origin = origin;
  p.lambda.resize(s.size());
  for (std::size_t i = 0; i < s.size() && i < levels.size(); ++i) p.lambda[i] = lambda_for(levels[i], s[i], t);
  p.s = std::move(s);
  return p;
}

void check_bound_params(const SystemSpec& spec, const BoundParams& p) {
  const auto levels = spec.levels();
  const int K = spec.caches();
  auto fail = [](const std::string& what) { throw ModelError(ModelErrorKind::kInvalidParameters, what); };
  if (p.t < 1 || p.t > K) fail("t must lie in 1..K");
  if (p.b < 1) fail("b must be >= 1");
  if (p.s.size() != levels.size()) fail("one s_i per level is required");
  if (p.lambda.size() != levels.size()) fail("one lambda_i per level is required");
  for (std::size_t i = 0; i < levels.size(); ++i) {
    const std::string who = "level " + std::to_string(spec.label(i));
    if (p.s[i] < 1) fail(who + ": s_i must be positive");
    const long long st = static_cast<long long>(p.s[i]) * p.t;
    if (st < levels[i].degree) fail(who + ": s_i*t below d_i");
    if (st > K / 2) fail(who + ": s_i*t exceeds floor(K/2)");
    if (p.lambda[i] != lambda_for(levels[i], p.s[i], p.t)) fail(who + ": lambda_i does not match s_i*t");
  }
}

bool bound_params_valid(const SystemSpec& spec, const BoundParams& p) noexcept {
  try {
    check_bound_params(spec, p);
    return true;
  } catch (...) {
    return false;
  }
}

double multiuser_lower_bound(const SystemSpec& spec, double memory, const BoundParams& params) {
  check_bound_params(spec, params);
  return std::max(0.0, window_bound_value(spec, memory, params));
}

std::optional<int> best_window_count(const SystemSpec& spec, std::size_t level, int t, std::int64_t b) {
  const auto& l = spec.levels()[level];
  const int lo = (l.degree + t - 1) / t;
  const int hi = (spec.caches() / 2) / t;
  if (lo > hi) return std::nullopt;
  // Past s*t = d the term is a min of an increasing and a decreasing function of s,
  // so the optimum sits at the range ends or next to their crossing point.
  const double U = l.users_per_cache;
  const double c = static_cast<double>(l.files) / static_cast<double>(b);
  const double lin = (1.0 - l.degree) * U;
  const double cross = (-lin + std::sqrt(lin * lin + 4.0 * t * U * c)) / (2.0 * t * U);
  std::vector<double> picks = {static_cast<double>(lo), static_cast<double>(lo) + 1, std::floor(cross),
                               std::ceil(cross), static_cast<double>(hi)};
  int best = lo;
  double best_v = -1.0;
  std::sort(picks.begin(), picks.end());
  for (double d : picks) {
    const int s = static_cast<int>(std::clamp(d, static_cast<double>(lo), static_cast<double>(hi)));
    const double v = lambda_for(l, s, t) * level_term(l, s, t, b);
    if (v > best_v || (v == best_v && s < best)) {
      best_v = v;
      best = s;
    }
  }
  return best;
}

std::vector<BoundParams> candidate_params(const SystemSpec& spec, const IntervalTable& table, double memory) {
  const auto levels = spec.levels();
  const std::size_t L = levels.size();
  const int K = spec.caches();
  const double D = spec.max_degree();
  const double beta = spec.beta();
  std::vector<BoundParams> out;
  auto push = [&](int t, double b, std::vector<int> s, BoundOrigin origin) {
    const auto bi = to_count(b);
    if (bi < 1) return;
    auto p = make_bound_params(spec, t, bi, std::move(s), origin);
    if (bound_params_valid(spec, p)) out.push_back(std::move(p));
  };
  auto nu = [&](std::size_t i) { return static_cast<double>(levels[i].files) / levels[i].users_per_cache; };
  auto degrees = [&] {
    std::vector<int> s(L);
    for (std::size_t i = 0; i < L; ++i) s[i] = levels[i].degree;
    return s;
  };

  if (K < D / beta) {
    // Case 0: the level whose cumulative full-storage interval contains M.
    double before = 0.0;
    for (std::size_t i = 0; i < L; ++i) {
      const double upto = before + static_cast<double>(levels[i].files) / levels[i].degree;
      if (before <= memory && memory <= upto) {
        push(1, std::ceil(nu(i) / levels[i].degree), degrees(), BoundOrigin::kCase0);
        break;
      }
      before = upto;
    }
  } else {
    const auto& part = table.partition_at(memory);
    if (!part.I.empty()) {
      const double mt = effective_memory(spec, memory, part);
      const auto refined = refine(spec, memory, part);
      std::vector<int> s(L, 0);
      if (refined.I1.empty() && !part.J.empty()) {
        for (auto h : part.H) s[h] = K / 8;
        for (auto i : part.I) s[i] = to_int(std::floor(std::sqrt(nu(i)) / (8.0 * mt)));
        for (auto j : part.J) s[j] = levels[j].degree;
        push(1, std::floor((D / beta) * mt * mt), s, BoundOrigin::kCase1a);
      } else if (refined.I1.empty()) {
        const double r1 = std::sqrt(nu(0));
        const int t = to_int(std::floor(r1 / (32.0 * mt)));
        for (auto h : part.H) s[h] = to_int(std::floor(2.0 * K * mt / r1));
        for (auto i : part.I) s[i] = to_int(std::floor(2.0 * std::sqrt(nu(i) / nu(0))));
        if (t >= 1) push(t, std::floor(8.0 * mt * r1), s, BoundOrigin::kCase1b);
      } else if (refined.I1.size() == 1) {
        const auto i1 = refined.I1.front();
        const double d1 = levels[i1].degree;
        for (auto h : part.H) s[h] = to_int(std::floor(2.0 * beta * K));
        for (auto i : part.I) {
          s[i] = to_int(std::floor(kGamma1 * beta * std::sqrt(nu(i)) / mt +
                                   kGamma2 * d1 * std::sqrt(nu(i) / nu(i1))));
        }
        s[i1] = levels[i1].degree;
        for (auto j : part.J) s[j] = levels[j].degree;
        push(1, std::ceil(nu(i1) / d1), s, BoundOrigin::kCase2);
      }
    }
  }

  push(1, 1.0, degrees(), BoundOrigin::kGridSearch);

  for (int t = 1; t <= std::min(K, kMaxGridT); ++t) {
    std::vector<std::int64_t> bs;
    for (int k = 0; k <= kMaxGridShift; ++k) bs.push_back(std::int64_t{1} << k);
    // Points where a level's term switches between its two branches.
    for (std::size_t i = 0; i < L; ++i) {
      const int lo = (levels[i].degree + t - 1) / t;
      const int hi = (K / 2) / t;
      for (int s = lo; s <= hi; ++s) {
        const double windows = static_cast<double>(s) * t - levels[i].degree + 1;
        add_b(bs, static_cast<double>(levels[i].files) / (s * windows * levels[i].users_per_cache));
      }
    }
    sort_unique(bs);
    bool feasible = true;
    for (auto b : bs) {
      std::vector<int> s(L);
      for (std::size_t i = 0; i < L && feasible; ++i) {
        const auto best = best_window_count(spec, i, t, b);
        if (!best) feasible = false;
        else s[i] = *best;
      }
      if (!feasible) break;
      out.push_back(make_bound_params(spec, t, b, std::move(s), BoundOrigin::kGridSearch));
    }
  }
  return out;
}

std::vector<BoundParams> candidate_params(const SystemSpec& spec, double memory) {
  return candidate_params(spec, interval_table(spec), memory);
}

double cut_set_lower_bound(const SystemSpec& spec, double memory, const CutSetParams& p) {
  if (p.caches < 1 || p.caches > spec.caches() || p.b < 1) {
    throw ModelError(ModelErrorKind::kInvalidParameters, "cut-set needs 1 <= caches <= K and b >= 1");
  }
  const double b = static_cast<double>(p.b);
  double v = 0.0;
  for (const auto& l : spec.levels()) {
    const double windows = std::max(0, p.caches - l.degree + 1);
    v += std::min(windows * l.users_per_cache, static_cast<double>(l.files) / b);
  }
  return std::max(0.0, v - p.caches * memory / b);
}

std::vector<CutSetParams> cut_set_candidates(const SystemSpec& spec) {
  const auto levels = spec.levels();
  std::vector<CutSetParams> out;
  for (int s = 1; s <= spec.caches(); ++s) {
    std::vector<std::int64_t> bs;
    for (int k = 0; k <= kMaxGridShift; ++k) bs.push_back(std::int64_t{1} << k);
    for (const auto& l : levels) {
      const int windows = s - l.degree + 1;
      if (windows > 0) add_b(bs, static_cast<double>(l.files) / (windows * l.users_per_cache));
    }
    sort_unique(bs);
    for (auto b : bs) out.push_back({s, b});
  }
  return out;
}

LowerBound best_multiuser_lower_bound(const SystemSpec& spec, const IntervalTable& table, double memory) {
  LowerBound best;
  for (auto& p : candidate_params(spec, table, memory)) {
    const double v = std::max(0.0, window_bound_value(spec, memory, p));
    if (v > best.value) {
      best.value = v;
      best.origin = p.origin;
      best.params = std::move(p);
    }
  }
  for (const auto& c : cut_set_candidates(spec)) {
    const double v = cut_set_lower_bound(spec, memory, c);
    if (v > best.value) {
      best.value = v;
      best.origin = BoundOrigin::kCutSet;
      best.params = c;
    }
  }
  return best;
}

LowerBound best_multiuser_lower_bound(const SystemSpec& spec, double memory) {
  return best_multiuser_lower_bound(spec, interval_table(spec), memory);
}

SUBoundParams default_su_bound_params(const SystemSpec& spec, double memory) {
  const auto levels = spec.su_levels();
  const std::size_t L = levels.size();
  SUBoundParams p;
  p.s.assign(L, 0);
  p.in_J.assign(L, false);
  if (memory < 1.0 / 6.0) {
    p.b = 1;
    for (std::size_t i = 0; i < L; ++i) p.s[i] = levels[i].users_total;
    return p;
  }
  const auto part = su_partition(spec, memory);
  p.b = static_cast<std::int64_t>(std::ceil(6.0 * memory));
  for (auto g : part.G) p.s[g] = 1;
  for (auto h : part.H) p.s[h] = (levels[h].users_total + 5) / 6;
  for (auto i : part.I) {
    const double want = std::ceil(static_cast<double>(levels[i].files) / (6.0 * memory));
    p.s[i] = std::min(levels[i].users_total, static_cast<std::int64_t>(want));
  }
  for (auto j : part.J) p.in_J[j] = true;
  const double NJ = part.NJ;
  if (NJ > 0.0) {
    if (memory < NJ / 6.0) {
      p.s_J = static_cast<std::int64_t>(std::ceil(NJ / (6.0 * memory)));
    } else if (memory < NJ) {
      p.s_J = 1;
    }
  }
  p.n_J = std::min(static_cast<std::int64_t>(NJ), p.s_J * p.b);
  return p;
}

void check_su_bound_params(const SystemSpec& spec, const SUBoundParams& p) {
  const auto levels = spec.su_levels();
  auto fail = [](const std::string& what) { throw ModelError(ModelErrorKind::kInvalidParameters, what); };
  if (p.b < 1) fail("b must be >= 1");
  if (p.s.size() != levels.size() || p.in_J.size() != levels.size()) fail("one s_i per level is required");
  std::int64_t used = p.s_J;
  std::int64_t NJ = 0;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (p.s[i] < 0) fail("s_i must be nonnegative");
    if (p.in_J[i]) {
      NJ += levels[i].files;
      if (p.s[i] != 0) fail("levels in J take no individual caches");
    }
    if (p.s[i] > levels[i].users_total) fail("level " + std::to_string(spec.label(i)) + ": s_i exceeds K_i");
    used += p.s[i];
  }
  if (p.s_J < 0 || p.n_J < 0) fail("s_J and n_J must be nonnegative");
  if (p.n_J > std::min(NJ, p.s_J * p.b)) fail("n_J exceeds min{N_J, s_J b}");
  if (used > spec.caches()) fail("more caches than K are counted");
}

double singleuser_lower_bound(const SystemSpec& spec, double memory, const std::optional<SUBoundParams>& params) {
  const auto p = params ? *params : default_su_bound_params(spec, memory);
  check_su_bound_params(spec, p);
  const auto levels = spec.su_levels();
  const double b = static_cast<double>(p.b);
  double v = 0.0;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (p.in_J[i] || p.s[i] == 0) continue;
    const double s = static_cast<double>(p.s[i]);
    v += s * (std::min(1.0, static_cast<double>(levels[i].files) / (s * b)) - memory / b);
  }
  if (p.s_J > 0) v += (static_cast<double>(p.n_J) - static_cast<double>(p.s_J) * memory) / b;
  return std::max(0.0, v);
}

LowerBound best_lower_bound(const SystemSpec& spec, double memory) {
  if (spec.is_multi_user()) return best_multiuser_lower_bound(spec, memory);
  LowerBound out;
  auto p = default_su_bound_params(spec, memory);
  out.value = singleuser_lower_bound(spec, memory, p);
  out.origin = out.value > 0.0 ? BoundOrigin::kSingleUser : BoundOrigin::kNone;
  out.params = std::move(p);
  return out;
}

double gap_ratio(double achievable, double lower) {
  if (lower > 0.0) return achievable / lower;
  return achievable > 0.0 ? std::numeric_limits<double>::infinity() : 1.0;
}

std::vector<GapRow> gap(const SystemSpec& spec, std::span<const double> grid) {
  std::vector<GapRow> rows;
  rows.reserve(grid.size());
  std::optional<IntervalTable> table;
  if (spec.is_multi_user()) table = interval_table(spec);
  for (double m : grid) {
    GapRow row;
    row.memory = m;
    if (table) {
      row.achievable = multiuser_rate_total(spec, *table, m);
      const auto lb = best_multiuser_lower_bound(spec, *table, m);
      row.lower = lb.value;
      row.origin = lb.origin;
    } else {
      row.achievable = singleuser_rate(spec, m).total;
      const auto lb = best_lower_bound(spec, m);
      row.lower = lb.value;
      row.origin = lb.origin;
    }
    row.ratio = gap_ratio(row.achievable, row.lower);
    rows.push_back(row);
  }
  return rows;
}

double small_example_optimum(double memory, std::int64_t n2) {
  if (n2 < 4) throw ModelError(ModelErrorKind::kOutOfModel, "the small example needs at least 4 level-2 files");
  const double half = static_cast<double>(n2) / 2.0;
  const double r = std::max({3.0 - 2.0 * memory, 2.5 - memory, 2.0 - memory / 2.0, 1.0 - (memory - 2.0) / half});
  return std::max(0.0, r);
}

}  // namespace mlcache
