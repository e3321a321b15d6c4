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

#include "mlcache/partition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mlcache/errors.hpp"

namespace mlcache {
namespace {

constexpr double kRelTol = 1e-12;

double ratio_root(const LevelSpec& l) { return std::sqrt(static_cast<double>(l.files) / l.users_per_cache); }

}  // namespace

AggregateStats aggregate(const SystemSpec& spec, const LevelSet& levels) {
  const auto all = spec.levels();
  const double K = spec.caches();
  AggregateStats s;
  for (auto i : levels) {
    const auto& l = all[i];
    const double n = static_cast<double>(l.files);
    s.S += std::sqrt(n * l.users_per_cache);
    s.T += n / l.degree;
    s.V += n / K;
  }
  return s;
}

double effective_memory(const SystemSpec& spec, double memory, const Partition& p) {
  if (p.I.empty()) return std::numeric_limits<double>::quiet_NaN();
  const auto i = aggregate(spec, p.I);
  const auto j = aggregate(spec, p.J);
  return (memory - j.T + i.V) / i.S;
}

double lower_threshold(const SystemSpec& spec, std::size_t level) {
  return ratio_root(spec.levels()[level]) / spec.caches();
}

double upper_threshold(const SystemSpec& spec, std::size_t level) {
  const auto& l = spec.levels()[level];
  return (1.0 / l.degree + 1.0 / spec.caches()) * ratio_root(l);
}

std::size_t IntervalTable::interval_index(double memory) const {
  auto it = std::upper_bound(rows_.begin(), rows_.end(), memory,
                             [](double m, const IntervalRow& row) { return m < row.lower; });
  if (it == rows_.begin()) return 0;
  return static_cast<std::size_t>(std::distance(rows_.begin(), it)) - 1;
}

IntervalTable interval_table(const SystemSpec& spec) {
  const std::size_t L = spec.levels().size();
  std::vector<Threshold> xs;
  xs.reserve(2 * L);
  for (std::size_t i = 0; i < L; ++i) {
    xs.push_back({lower_threshold(spec, i), ThresholdKind::kLower, i});
    xs.push_back({upper_threshold(spec, i), ThresholdKind::kUpper, i});
  }
  std::sort(xs.begin(), xs.end(), [](const Threshold& a, const Threshold& b) {
    if (a.value != b.value) return a.value < b.value;
    if (a.kind != b.kind) return a.kind == ThresholdKind::kLower;
    return a.level < b.level;
  });

  enum Role { kH, kI, kJ };
  std::vector<Role> role(L, kH);
  std::vector<IntervalRow> rows;
  rows.reserve(2 * L);
  double prev = 0.0;
  for (std::size_t t = 0; t < xs.size(); ++t) {
    role[xs[t].level] = xs[t].kind == ThresholdKind::kLower ? kI : kJ;
    Partition p;
    for (std::size_t i = 0; i < L; ++i) {
      (role[i] == kH ? p.H : role[i] == kI ? p.I : p.J).push_back(i);
    }
    const auto si = aggregate(spec, p.I);
    const auto sj = aggregate(spec, p.J);
    double y = xs[t].value * si.S + sj.T - si.V;
    if (t == 0) y = 0.0;        // m_i * sqrt(N_i U_i) = N_i / K exactly
    if (p.I.empty()) y = sj.T;  // no partial level: boundary sits at the stored total
    y = std::max(y, prev);      // guard the sort order against rounding
    prev = y;
    rows.push_back({t + 1, xs[t], y, std::move(p)});
  }
  return IntervalTable(std::move(rows), spec.full_storage());
}

Partition partition_at(const IntervalTable& table, double memory) { return table.partition_at(memory); }

FeasibilityReport check_m_feasible(const SystemSpec& spec, double memory, const Partition& p) {
  FeasibilityReport report;
  const std::size_t L = spec.levels().size();
  std::vector<int> seen(L, 0);
  for (const auto* set : {&p.H, &p.I, &p.J}) {
    for (auto i : *set) {
      if (i >= L) {
        report.reason = "level index out of range";
        return report;
      }
      ++seen[i];
    }
  }
  if (std::any_of(seen.begin(), seen.end(), [](int c) { return c != 1; })) {
    report.reason = "sets do not partition the levels";
    return report;
  }

  if (p.I.empty()) {
    const double total = spec.full_storage();
    report.effective_memory = std::numeric_limits<double>::infinity();
    if (memory < total * (1.0 - kRelTol)) {
      report.reason = "I is empty below full storage";
      return report;
    }
    report.feasible = p.H.empty();
    if (!report.feasible) report.reason = "H nonempty at full storage";
    for (auto j : p.J) report.levels.push_back({j, 'J', true, memory - total});
    for (auto h : p.H) report.levels.push_back({h, 'H', false, -memory});
    return report;
  }

  const auto si = aggregate(spec, p.I);
  const auto sj = aggregate(spec, p.J);
  const double mt = (memory - sj.T + si.V) / si.S;
  report.effective_memory = mt;
  // Rounding in mt scales with the magnitudes that enter it.
  const double scale = (std::abs(memory) + sj.T + si.V) / si.S;

  report.feasible = true;
  auto record = [&](std::size_t level, char role, double slack, double ref) {
    const double tol = kRelTol * std::max({scale, std::abs(ref), std::abs(mt)});
    const bool ok = slack >= -tol;
    report.levels.push_back({level, role, ok, slack});
    if (!ok) {
      report.feasible = false;
      if (report.reason.empty()) report.reason = std::string("level violates its ") + role + " condition";
    }
  };
  for (auto h : p.H) {
    const double m = lower_threshold(spec, h);
    record(h, 'H', m - mt, m);
  }
  for (auto i : p.I) {
    const double m = lower_threshold(spec, i);
    const double M = upper_threshold(spec, i);
    record(i, 'I', std::min(mt - m, M - mt), M);
  }
  for (auto j : p.J) {
    const double M = upper_threshold(spec, j);
    record(j, 'J', mt - M, M);
  }
  std::sort(report.levels.begin(), report.levels.end(),
            [](const LevelCheck& a, const LevelCheck& b) { return a.level < b.level; });
  return report;
}

RefinedPartition refine(const SystemSpec& spec, double memory, const Partition& p) {
  RefinedPartition r;
  r.H = p.H;
  r.J = p.J;
  if (p.I.empty()) return r;
  const double mt = effective_memory(spec, memory, p);
  const double K = spec.caches();
  const double beta = spec.beta();
  const auto levels = spec.levels();
  for (auto i : p.I) {
    const double root = ratio_root(levels[i]);
    const bool small = mt < (2.0 / K) * root;
    const bool large = mt > (beta / levels[i].degree + 1.0 / K) * root;
    if (small) r.I0.push_back(i);
    if (large) r.I1.push_back(i);
    if (!small && !large) r.Iprime.push_back(i);
  }
  if (r.I1.size() > 1) {
    r.warnings.push_back("I1 has " + std::to_string(r.I1.size()) +
                         " levels; the separation condition does not hold");
  }
  return r;
}

RefinedPartition refine(const SystemSpec& spec, double memory) {
  const auto table = interval_table(spec);
  return refine(spec, memory, table.partition_at(memory));
}

Allocation allocate(const SystemSpec& spec, const IntervalTable& table, double memory) {
  const auto levels = spec.levels();
  Allocation a;
  a.memory = memory;
  a.per_level.assign(levels.size(), 0.0);
  a.partition = table.partition_at(memory);
  a.effective_memory = effective_memory(spec, memory, a.partition);
  a.refined = refine(spec, memory, a.partition);
  if (memory <= 0.0) {
    a.per_level.assign(levels.size(), 0.0);
    return a;
  }
  auto cap = [&](std::size_t i) { return static_cast<double>(levels[i].files) / levels[i].degree; };
  if (a.partition.I.empty() || memory >= table.full_storage()) {
    for (std::size_t i = 0; i < levels.size(); ++i) {
      const bool stored = std::find(a.partition.J.begin(), a.partition.J.end(), i) != a.partition.J.end();
      a.per_level[i] = stored || memory >= table.full_storage() ? cap(i) : 0.0;
    }
    return a;
  }
  const double K = spec.caches();
  for (auto i : a.partition.I) {
    const double n = static_cast<double>(levels[i].files);
    const double share = std::sqrt(n * levels[i].users_per_cache) * a.effective_memory - n / K;
    a.per_level[i] = std::clamp(share, 0.0, cap(i));
  }
  for (auto j : a.partition.J) a.per_level[j] = cap(j);
  return a;
}

Allocation allocate(const SystemSpec& spec, double memory) {
  return allocate(spec, interval_table(spec), memory);
}

std::string format_level_set(const SystemSpec& spec, const LevelSet& levels) {
  std::vector<std::size_t> labels;
  for (auto i : levels) labels.push_back(spec.label(i));
  std::sort(labels.begin(), labels.end());
  std::string out;
  for (auto l : labels) {
    if (!out.empty()) out += '-';
    out += std::to_string(l);
  }
  return out;
}

}  // namespace mlcache
