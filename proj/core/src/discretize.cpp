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

#include "mlcache/discretize.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mlcache/errors.hpp"
#include "mlcache/rates.hpp"

namespace mlcache {
namespace {

struct Prefix {
  std::vector<double> sum;  // sum[k] = mass of files [0, k)
  explicit Prefix(std::span<const double> w) : sum(w.size() + 1, 0.0) {
    double total = 0.0;
    for (double x : w) total += x;
    for (std::size_t i = 0; i < w.size(); ++i) sum[i + 1] = sum[i] + w[i] / total;
  }
  double mass(std::int64_t a, std::int64_t b) const {
    return sum[static_cast<std::size_t>(b)] - sum[static_cast<std::size_t>(a)];
  }
};

void check_weights(std::span<const double> weights) {
  if (weights.empty()) throw ModelError(ModelErrorKind::kInvalidParameters, "popularity list is empty");
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (!(weights[i] > 0.0) || !std::isfinite(weights[i])) {
      throw ModelError(ModelErrorKind::kInvalidParameters, "popularity weights must be positive");
    }
    if (i > 0 && weights[i] > weights[i - 1]) {
      throw ModelError(ModelErrorKind::kInvalidParameters, "popularity weights must be sorted descending");
    }
  }
}

LevelSplit build_split(const Prefix& prefix, std::int64_t n, const std::vector<std::int64_t>& cuts, int caches,
                       double memory, std::int64_t total_users) {
  LevelSplit out;
  out.cuts = cuts;
  std::vector<std::int64_t> bounds = {0};
  bounds.insert(bounds.end(), cuts.begin(), cuts.end());
  bounds.push_back(n);
  const std::size_t L = bounds.size() - 1;
  out.segment_files.resize(L);
  out.segment_mass.resize(L);
  out.segment_users.assign(L, 0);
  std::int64_t assigned = 0;
  for (std::size_t k = 0; k < L; ++k) {
    out.segment_files[k] = bounds[k + 1] - bounds[k];
    out.segment_mass[k] = out.segment_files[k] > 0 ? prefix.mass(bounds[k], bounds[k + 1]) : 0.0;
    if (k > 0) {
      out.segment_users[k] = static_cast<std::int64_t>(std::llround(static_cast<double>(total_users) * out.segment_mass[k]));
      assigned += out.segment_users[k];
    }
  }
  out.segment_users[0] = std::max<std::int64_t>(0, total_users - assigned);

  std::vector<LevelSpec> levels;
  std::vector<std::size_t> source;
  for (std::size_t k = 0; k < L; ++k) {
    if (out.segment_files[k] > 0 && out.segment_users[k] > 0) {
      levels.push_back({out.segment_files[k], static_cast<double>(out.segment_users[k]) / caches, 1});
      source.push_back(k);
    }
  }
  if (levels.empty()) throw ModelError(ModelErrorKind::kInvalidParameters, "no segment receives any user");
  out.spec = SystemSpec::multi_user(caches, std::move(levels));
  out.segment_level.assign(L, LevelSplit::kDropped);
  for (std::size_t lvl = 0; lvl < out.spec.level_count(); ++lvl) {
    out.segment_level[source[out.spec.original_index(lvl)]] = lvl;
  }
  out.objective = multiuser_rate_total(out.spec, interval_table(out.spec), memory);
  return out;
}

}  // namespace

std::vector<double> zipf_weights(std::size_t n, double exponent) {
  std::vector<double> w(n);
  double total = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    w[r] = std::pow(static_cast<double>(r + 1), -exponent);
    total += w[r];
  }
  for (auto& x : w) x /= total;
  return w;
}

LevelSplit induced_split(std::span<const double> weights, const std::vector<std::int64_t>& cuts, int caches,
                         double memory, std::int64_t total_users) {
  check_weights(weights);
  const auto n = static_cast<std::int64_t>(weights.size());
  std::int64_t prev = 0;
  for (auto c : cuts) {
    if (c < prev || c > n) throw ModelError(ModelErrorKind::kInvalidParameters, "cuts must be nondecreasing in [0, N]");
    prev = c;
  }
  if (caches < 1 || total_users < 1) {
    throw ModelError(ModelErrorKind::kInvalidParameters, "caches and users must be positive");
  }
  return build_split(Prefix(weights), n, cuts, caches, memory, total_users);
}

LevelSplit split_levels(std::span<const double> weights, std::size_t levels, int caches, double memory,
                        std::int64_t total_users, bool allow_empty, std::size_t lattice) {
  check_weights(weights);
  if (levels < 1) throw ModelError(ModelErrorKind::kInvalidParameters, "at least one level is required");
  if (caches < 1 || total_users < 1) {
    throw ModelError(ModelErrorKind::kInvalidParameters, "caches and users must be positive");
  }
  if (lattice < 1) throw ModelError(ModelErrorKind::kInvalidParameters, "lattice must be positive");
  const auto n = static_cast<std::int64_t>(weights.size());
  const Prefix prefix(weights);

  std::vector<std::int64_t> points;
  for (std::size_t k = 1; k < lattice; ++k) {
    const auto c = static_cast<std::int64_t>(std::llround(static_cast<double>(k) * n / static_cast<double>(lattice)));
    if (c > 0 && c < n) points.push_back(c);
  }
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  const std::size_t need = levels - 1;
  if (need > 0 && (points.empty() || (!allow_empty && need > points.size()))) {
    throw ModelError(ModelErrorKind::kInvalidParameters,
                     "requested levels exceed the candidate cut lattice (" + std::to_string(points.size()) + " points)");
  }

  std::vector<std::size_t> idx(need);
  for (std::size_t k = 0; k < need; ++k) idx[k] = allow_empty ? 0 : k;
  std::vector<std::int64_t> cuts(need);
  LevelSplit best;
  bool have = false;
  for (;;) {
    for (std::size_t k = 0; k < need; ++k) cuts[k] = points[idx[k]];
    auto cand = build_split(prefix, n, cuts, caches, memory, total_users);
    if (!have || cand.objective < best.objective) {
      best = std::move(cand);
      have = true;
    }
    // Next combination (strictly increasing indices, or nondecreasing with empty levels).
    std::size_t k = need;
    bool advanced = false;
    while (k > 0) {
      --k;
      const std::size_t limit = allow_empty ? points.size() - 1 : points.size() - (need - k);
      if (idx[k] < limit) {
        ++idx[k];
        for (std::size_t j = k + 1; j < need; ++j) idx[j] = allow_empty ? idx[k] : idx[j - 1] + 1;
        advanced = true;
        break;
      }
    }
    if (!advanced) break;
  }
  return best;
}

bool degrees_feasible(const SystemSpec& spec, const std::vector<int>& degrees, int d_max, double d_avg) {
  const auto levels = spec.levels();
  if (degrees.size() != levels.size()) return false;
  double users = 0.0, weighted = 0.0;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (degrees[i] < 1 || degrees[i] > d_max || degrees[i] > spec.caches()) return false;
    users += levels[i].users_per_cache;
    weighted += levels[i].users_per_cache * degrees[i];
  }
  return weighted <= d_avg * users * (1.0 + 1e-12);
}

AccessPlan optimize_access(const SystemSpec& spec, double memory, int d_max, double d_avg) {
  const auto levels = spec.levels();
  if (d_max < 1) throw ModelError(ModelErrorKind::kInvalidParameters, "d_max must be >= 1");
  const std::size_t L = levels.size();
  const int top = std::min(d_max, spec.caches());
  std::vector<int> d(L, 1);
  AccessPlan best;
  bool have = false;
  for (;;) {
    if (degrees_feasible(spec, d, d_max, d_avg)) {
      std::vector<LevelSpec> input(L);
      for (std::size_t i = 0; i < L; ++i) {
        input[spec.original_index(i)] = {levels[i].files, levels[i].users_per_cache, d[i]};
      }
      auto candidate = SystemSpec::multi_user(spec.caches(), std::move(input), spec.level_separation());
      const double rate = multiuser_rate_total(candidate, interval_table(candidate), memory);
      const double eps = 1e-12 * std::max(1.0, std::abs(best.rate));
      if (!have || rate < best.rate - eps) {
        best.degrees = d;
        best.rate = rate;
        best.spec = std::move(candidate);
        have = true;
      }
    }
    std::size_t k = L;
    bool advanced = false;
    while (k > 0) {
      --k;
      if (d[k] < top) {
        ++d[k];
        for (std::size_t j = k + 1; j < L; ++j) d[j] = 1;
        advanced = true;
        break;
      }
    }
    if (!advanced) break;
  }
  if (!have) throw ModelError(ModelErrorKind::kInfeasible, "no degree tuple satisfies the constraints");
  return best;
}

}  // namespace mlcache
