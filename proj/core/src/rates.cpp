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

#include "mlcache/rates.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mlcache/errors.hpp"
#include "mlcache/single_level.hpp"

namespace mlcache {
namespace {

double level_rate(const SystemSpec& spec, std::size_t i, double memory) {
  const auto& l = spec.levels()[i];
  return single_level_rate(memory, spec.caches(), static_cast<double>(l.files), l.users_per_cache, l.degree);
}

bool contains(const LevelSet& set, std::size_t i) {
  return std::find(set.begin(), set.end(), i) != set.end();
}

}  // namespace

double multiuser_rate_total(const SystemSpec& spec, const IntervalTable& table, double memory) {
  const auto a = allocate(spec, table, memory);
  double total = 0.0;
  for (std::size_t i = 0; i < a.per_level.size(); ++i) total += level_rate(spec, i, a.per_level[i]);
  return total;
}

RateBreakdown multiuser_rate(const SystemSpec& spec, const IntervalTable& table, double memory) {
  const auto levels = spec.levels();
  const double K = spec.caches();
  RateBreakdown out;
  out.memory = memory;
  auto a = allocate(spec, table, memory);
  out.per_level.resize(levels.size());
  for (std::size_t i = 0; i < levels.size(); ++i) {
    out.per_level[i] = level_rate(spec, i, a.per_level[i]);
    out.total += out.per_level[i];
  }

  const auto& p = a.partition;
  const auto& r = a.refined;
  const auto sI = aggregate(spec, p.I);
  const auto sJ = aggregate(spec, p.J);
  const double beta = spec.beta();
  out.upper_bounds.assign(levels.size(), 0.0);
  double approx = 0.0;
  for (auto h : p.H) {
    out.upper_bounds[h] = K * levels[h].users_per_cache;
    approx += K * levels[h].users_per_cache;
  }
  if (!p.I.empty()) {
    const double denom = memory - sJ.T + sI.V;
    const double s_rest = aggregate(spec, r.I0).S + aggregate(spec, r.Iprime).S;
    for (auto i : p.I) {
      const auto& l = levels[i];
      const double n = static_cast<double>(l.files);
      const double root = std::sqrt(n * l.users_per_cache);
      if (contains(r.I1, i)) {
        const double du = l.degree * l.users_per_cache / beta;
        out.upper_bounds[i] = du * (1.0 - (memory - sJ.T) / (n / l.degree)) + du * s_rest / root;
      } else {
        out.upper_bounds[i] = 2.0 * sI.S * root / denom;
      }
      approx -= l.degree * l.users_per_cache;
    }
    approx += sI.S * sI.S / (memory - sJ.T);
  }
  // The closed form blows up as M approaches T_J; report it within the trivial range.
  double cap = 0.0;
  for (const auto& l : levels) cap += K * l.users_per_cache;
  out.approx = std::isfinite(approx) ? std::clamp(approx, 0.0, cap) : cap;
  out.allocation = std::move(a);
  return out;
}

RateBreakdown multiuser_rate(const SystemSpec& spec, double memory) {
  return multiuser_rate(spec, interval_table(spec), memory);
}

double memory_sharing_rate(const SystemSpec& spec, std::span<const double> per_level_memory,
                           SubsystemScheme scheme) {
  const auto levels = spec.levels();
  if (per_level_memory.size() != levels.size()) {
    throw ModelError(ModelErrorKind::kInvalidParameters, "one memory value per level is required");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    const auto& l = levels[i];
    const double n = static_cast<double>(l.files);
    total += scheme == SubsystemScheme::kDecentralized
                 ? single_level_rate(per_level_memory[i], spec.caches(), n, l.users_per_cache, l.degree)
                 : centralized_single_level_rate(per_level_memory[i], spec.caches(), n,
                                                 l.users_per_cache, l.degree);
  }
  return total;
}

SUPartition su_partition(const SystemSpec& spec, double memory) {
  const auto levels = spec.su_levels();
  SUPartition p;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    const double n = static_cast<double>(levels[i].files);
    const double k = static_cast<double>(levels[i].users_total);
    if (memory < n / k) {
      p.Hprime.push_back(i);
      if (k >= 6) {
        p.H.push_back(i);
      } else if (memory <= n / 6.0) {
        p.G.push_back(i);
      }
    } else {
      p.Iprime.push_back(i);
    }
    if (memory >= n / k && memory <= n / 6.0) p.I.push_back(i);
    if (memory > n / 6.0) {
      p.J.push_back(i);
      p.NJ += n;
    }
  }
  return p;
}

SUTerms su_refined_terms(const SystemSpec& spec, double memory) {
  const auto levels = spec.su_levels();
  const auto p = su_partition(spec, memory);
  SUTerms t;
  t.g = 5.0 * static_cast<double>(p.G.size());
  for (auto h : p.H) t.h += static_cast<double>(levels[h].users_total);
  for (auto i : p.I) t.i += static_cast<double>(levels[i].files) / memory;
  if (p.NJ > 0.0) {
    if (memory < p.NJ / 6.0) {
      t.j = p.NJ / memory;
    } else if (memory < p.NJ) {
      t.j = 6.0 * (1.0 - memory / p.NJ);
    }
  }
  return t;
}

SUTerms su_prior_terms(const SystemSpec& spec, double memory) {
  const auto levels = spec.su_levels();
  const auto p = su_partition(spec, memory);
  auto t = su_refined_terms(spec, memory);
  t.j = 0.0;
  for (auto j : p.J) t.j += 6.0 * std::max(0.0, 1.0 - memory / static_cast<double>(levels[j].files));
  return t;
}

RateBreakdown singleuser_rate(const SystemSpec& spec, double memory) {
  const auto levels = spec.su_levels();
  RateBreakdown out;
  out.memory = memory;
  auto p = su_partition(spec, memory);
  out.per_level.assign(levels.size(), 0.0);
  for (auto h : p.Hprime) out.per_level[h] = static_cast<double>(levels[h].users_total);
  double clustered = 0.0;
  for (auto i : p.Iprime) clustered += static_cast<double>(levels[i].files);
  if (!p.Iprime.empty() && memory > 0.0) {
    const double cluster_rate = std::max(clustered / memory - 1.0, 0.0);
    // The clustered instance is shared; attribute it in proportion to file counts.
    for (auto i : p.Iprime) {
      out.per_level[i] = cluster_rate * static_cast<double>(levels[i].files) / clustered;
    }
  }
  out.total = std::accumulate(out.per_level.begin(), out.per_level.end(), 0.0);
  out.refined_upper_bound = su_refined_terms(spec, memory).total();

  double regrouped = 0.0;
  double pooled = 0.0;
  for (auto g : p.G) regrouped += static_cast<double>(levels[g].users_total);
  for (auto h : p.H) regrouped += static_cast<double>(levels[h].users_total);
  for (auto i : p.I) pooled += static_cast<double>(levels[i].files);
  pooled += p.NJ;
  if (pooled > 0.0) regrouped += memory > 0.0 ? std::max(pooled / memory - 1.0, 0.0) : 0.0;
  out.regrouped_rate = regrouped;

  double prior = 0.0;
  for (const auto& l : levels) {
    const double n = static_cast<double>(l.files);
    const double reach = memory > 0.0 ? std::min(static_cast<double>(l.users_total), n / memory)
                                      : static_cast<double>(l.users_total);
    prior += reach * std::max(0.0, 1.0 - memory / n);
  }
  out.prior_knowledge_rate = prior;
  out.su_partition = std::move(p);
  return out;
}

double achievable_rate(const SystemSpec& spec, double memory) {
  return spec.is_multi_user() ? multiuser_rate(spec, memory).total : singleuser_rate(spec, memory).total;
}

double lfu_rate(const SystemSpec& spec, double memory, bool coded) {
  const double K = spec.caches();
  const std::size_t L = spec.level_count();
  double left = std::max(0.0, memory);
  double rate = 0.0;
  for (std::size_t i = 0; i < L; ++i) {
    const double n = static_cast<double>(spec.files(i));
    if (spec.is_multi_user()) {
      const auto& l = spec.levels()[i];
      const double users = K * l.users_per_cache;
      if (coded) {
        const double full = n / l.degree;
        const double give = std::min(left, full);
        left -= give;
        rate += single_level_rate(give, K, n, l.users_per_cache, l.degree);
        continue;
      }
      // The same most popular files sit in every cache, so access degree is irrelevant.
      const double stored = std::min(left, n);
      left -= stored;
      const double whole = std::floor(stored);
      const double frac = stored - whole;
      const double unstored = n - whole;
      if (unstored <= 0.0) continue;
      if (frac > 0.0) {
        // Fully unstored files first; the partially stored one costs (1 - frac).
        const double missing = unstored - 1.0;
        rate += users <= missing ? users : missing + (1.0 - frac);
      } else {
        rate += std::min(users, unstored);
      }
    } else {
      const double users = static_cast<double>(spec.su_levels()[i].users_total);
      const double stored = std::min(left, n);
      left -= stored;
      if (coded) {
        rate += basic_rate(stored, users, n);
        continue;
      }
      const double whole = std::floor(stored);
      const double frac = stored - whole;
      const double unstored = n - whole;
      if (unstored <= 0.0) continue;
      if (frac > 0.0) {
        const double missing = unstored - 1.0;
        rate += users <= missing ? users : missing + (1.0 - frac);
      } else {
        rate += std::min(users, unstored);
      }
    }
  }
  return rate;
}

double uniform_sharing_rate(const SystemSpec& spec, double memory) {
  const auto levels = spec.levels();
  const double per_file = memory / static_cast<double>(spec.total_files());
  double rate = 0.0;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    rate += level_rate(spec, i, per_file * static_cast<double>(levels[i].files));
  }
  return rate;
}

std::vector<CurveRow> rate_curve(const SystemSpec& spec, std::span<const double> grid) {
  std::vector<CurveRow> rows;
  rows.reserve(grid.size());
  if (spec.is_multi_user()) {
    const auto table = interval_table(spec);
    for (double m : grid) {
      CurveRow row;
      row.memory = m;
      row.memory_sharing = multiuser_rate_total(spec, table, m);
      row.lfu = lfu_rate(spec, m, false);
      row.coded_lfu = lfu_rate(spec, m, true);
      row.uniform = uniform_sharing_rate(spec, m);
      rows.push_back(row);
    }
  } else {
    for (double m : grid) {
      const auto r = singleuser_rate(spec, m);
      CurveRow row;
      row.memory = m;
      row.single_user = r.total;
      row.prior = r.prior_knowledge_rate;
      row.lfu = lfu_rate(spec, m, false);
      row.coded_lfu = lfu_rate(spec, m, true);
      rows.push_back(row);
    }
  }
  return rows;
}

}  // namespace mlcache
