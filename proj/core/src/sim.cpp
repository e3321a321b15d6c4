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

#include "mlcache/sim.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <random>

#include "mlcache/discretize.hpp"
#include "mlcache/errors.hpp"
#include "mlcache/rates.hpp"
#include "mlcache/single_level.hpp"

namespace mlcache {
namespace {

constexpr std::uint64_t kContentTag = 0xC0FFEEULL;
constexpr std::uint64_t kPlaceTag = 0x9A1ACEULL;
constexpr std::uint64_t kDemandTag = 0xDE3A2DULL;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b, std::uint64_t tag) {
  return splitmix64(splitmix64(splitmix64(seed ^ splitmix64(tag)) ^ a) ^ b);
}

// Marks exactly k of the first n bits, uniformly among all k-subsets.
void sample_subset(BitVector& mask, std::uint64_t n, std::uint64_t k, std::mt19937_64& rng) {
  if (k == 0) return;
  if (k >= n) {
    for (std::uint64_t i = 0; i < n; ++i) mask.set(i);
    return;
  }
  const bool invert = k > n / 2;
  std::uint64_t pick = invert ? n - k : k;
  if (invert) {
    for (std::uint64_t i = 0; i < n; ++i) mask.set(i);
  }
  std::uniform_int_distribution<std::uint64_t> dist(0, n - 1);
  while (pick > 0) {
    const auto i = dist(rng);
    if (mask.get(i) == invert) {
      mask.set(i, !invert);
      --pick;
    }
  }
}

struct Member {
  std::size_t user = 0;
  int cache = 0;
  std::int64_t file = 0;
};

struct GroupJob {
  std::size_t level = 0;
  int color = 0;
  std::size_t group = 0;
  std::vector<Member> members;
};

struct UserView {
  std::size_t level = 0;
  std::int64_t file = 0;
  std::vector<int> color_cache;  // cache read for each color
};

struct Packet {
  std::size_t level = 0;
  int color = 0;
  std::vector<Member> members;
  std::vector<std::vector<std::uint32_t>> segments;
  BitVector payload;
};

class ContentCache {
 public:
  ContentCache(std::uint64_t seed, std::int64_t file_bits) : seed_(seed), bits_(file_bits) {}
  const BitVector& get(std::size_t level, std::int64_t file) {
    auto [it, fresh] = store_.try_emplace({level, file});
    if (fresh) it->second = file_content(seed_, level, file, bits_);
    return it->second;
  }

 private:
  std::uint64_t seed_;
  std::int64_t bits_;
  std::map<std::pair<std::size_t, std::int64_t>, BitVector> store_;
};

bool subset_before(std::uint64_t a, std::uint64_t b) {
  const int pa = std::popcount(a), pb = std::popcount(b);
  if (pa != pb) return pa > pb;
  // Lexicographic on the sorted member lists.
  while (a != 0 && b != 0) {
    const int la = std::countr_zero(a), lb = std::countr_zero(b);
    if (la != lb) return la < lb;
    a &= a - 1;
    b &= b - 1;
  }
  return false;
}

struct Failure {
  std::size_t user;
  std::int64_t bit;
};

DeliveryResult run_delivery(const Placement& placement, const std::vector<GroupJob>& jobs,
                            const std::vector<UserView>& users, std::vector<Failure>& failures) {
  DeliveryResult result;
  ContentCache content(placement.seed, placement.file_bits);
  std::vector<Packet> packets;
  std::vector<std::vector<std::size_t>> user_packets(users.size());

  for (const auto& job : jobs) {
    const auto& lp = placement.levels[job.level];
    const std::size_t n = job.members.size();
    if (n > 64) {
      throw ModelError(ModelErrorKind::kUnsupportedGeometry, "delivery groups are limited to 64 users");
    }
    const auto sub = lp.subfile_bits;
    std::map<std::uint64_t, std::vector<std::vector<std::uint32_t>>> segs;
    for (std::size_t m = 0; m < n; ++m) {
      const auto base = static_cast<std::size_t>(job.members[m].file * sub);
      const auto& own = lp.masks[static_cast<std::size_t>(job.members[m].cache)];
      for (std::int64_t p = 0; p < sub; ++p) {
        const auto bit = base + static_cast<std::size_t>(p);
        if (own.get(bit)) continue;
        std::uint64_t S = std::uint64_t{1} << m;
        for (std::size_t v = 0; v < n; ++v) {
          if (v != m && lp.masks[static_cast<std::size_t>(job.members[v].cache)].get(bit)) {
            S |= std::uint64_t{1} << v;
          }
        }
        auto& entry = segs[S];
        if (entry.empty()) entry.resize(n);
        entry[m].push_back(static_cast<std::uint32_t>(p));
      }
    }
    std::vector<std::uint64_t> order;
    order.reserve(segs.size());
    for (const auto& [S, unused] : segs) order.push_back(S);
    std::sort(order.begin(), order.end(), subset_before);

    const auto offset = static_cast<std::size_t>(job.color) * static_cast<std::size_t>(sub);
    for (auto S : order) {
      auto& entry = segs[S];
      Packet pk;
      pk.level = job.level;
      pk.color = job.color;
      std::size_t length = 0;
      Transmission tx;
      tx.level = job.level;
      tx.color = job.color;
      tx.group = job.group;
      for (std::uint64_t rest = S; rest != 0; rest &= rest - 1) {
        const auto m = static_cast<std::size_t>(std::countr_zero(rest));
        pk.members.push_back(job.members[m]);
        pk.segments.push_back(std::move(entry[m]));
        length = std::max(length, pk.segments.back().size());
        tx.members.push_back(job.members[m].user);
      }
      pk.payload = BitVector(length);
      for (std::size_t k = 0; k < pk.members.size(); ++k) {
        const auto& file = content.get(job.level, pk.members[k].file);
        const auto& seg = pk.segments[k];
        for (std::size_t j = 0; j < seg.size(); ++j) {
          if (file.get(offset + seg[j])) pk.payload.flip(j);
        }
        if (!seg.empty()) user_packets[pk.members[k].user].push_back(packets.size());
      }
      tx.length = static_cast<std::int64_t>(length);
      result.total_bits += tx.length;
      result.transmissions.push_back(std::move(tx));
      packets.push_back(std::move(pk));
    }
  }

  // Replay every user's decoder: only its caches and the packets it takes part in.
  result.decoded_ok.assign(users.size(), true);
  for (std::size_t u = 0; u < users.size(); ++u) {
    const auto& view = users[u];
    const auto& lp = placement.levels[view.level];
    const auto sub = static_cast<std::size_t>(lp.subfile_bits);
    const auto& truth = content.get(view.level, view.file);
    auto fail = [&](std::int64_t bit) {
      if (result.decoded_ok[u]) failures.push_back({u, bit});
      result.decoded_ok[u] = false;
    };
    for (int c = 0; c < static_cast<int>(view.color_cache.size()) && result.decoded_ok[u]; ++c) {
      const auto& mask = lp.masks[static_cast<std::size_t>(view.color_cache[static_cast<std::size_t>(c)])];
      const std::size_t offset = static_cast<std::size_t>(c) * sub;
      BitVector rec(sub), known(sub);
      const auto base = static_cast<std::size_t>(view.file) * sub;
      for (std::size_t p = 0; p < sub; ++p) {
        if (mask.get(base + p)) {
          rec.set(p, truth.get(offset + p));
          known.set(p);
        }
      }
      for (auto id : user_packets[u]) {
        const auto& pk = packets[id];
        if (pk.color != c || pk.level != view.level) continue;
        BitVector payload = pk.payload;
        const std::vector<std::uint32_t>* mine = nullptr;
        for (std::size_t k = 0; k < pk.members.size(); ++k) {
          if (pk.members[k].user == u) {
            mine = &pk.segments[k];
            continue;
          }
          const auto& other = content.get(view.level, pk.members[k].file);
          const auto obase = static_cast<std::size_t>(pk.members[k].file) * sub;
          const auto& seg = pk.segments[k];
          for (std::size_t j = 0; j < seg.size(); ++j) {
            if (!mask.get(obase + seg[j])) {
              fail(static_cast<std::int64_t>(offset + seg[j]));
              break;
            }
            if (other.get(offset + seg[j])) payload.flip(j);
          }
        }
        if (mine == nullptr) continue;
        for (std::size_t j = 0; j < mine->size(); ++j) {
          rec.set((*mine)[j], payload.get(j));
          known.set((*mine)[j]);
        }
      }
      for (std::size_t p = 0; p < sub && result.decoded_ok[u]; ++p) {
        if (!known.get(p) || rec.get(p) != truth.get(offset + p)) fail(static_cast<std::int64_t>(offset + p));
      }
    }
  }
  result.empirical_rate = static_cast<double>(result.total_bits) / static_cast<double>(placement.file_bits);
  return result;
}

std::int64_t integral_users(const LevelSpec& l) {
  const double r = std::round(l.users_per_cache);
  if (std::abs(r - l.users_per_cache) > 1e-9) {
    throw ModelError(ModelErrorKind::kUnsupportedGeometry, "simulation needs integral users_per_cache");
  }
  return static_cast<std::int64_t>(r);
}

}  // namespace

BitVector file_content(std::uint64_t seed, std::size_t level, std::int64_t file, std::int64_t file_bits) {
  BitVector out(static_cast<std::size_t>(file_bits));
  std::mt19937_64 rng(stream_seed(seed, level, static_cast<std::uint64_t>(file), kContentTag));
  for (auto& w : out.words()) w = rng();
  const auto tail = static_cast<std::size_t>(file_bits) % 64;
  if (tail != 0) out.words().back() &= (std::uint64_t{1} << tail) - 1;
  return out;
}

bool Placement::stores(std::size_t level, int cache, std::int64_t file, std::int64_t position) const {
  const auto& lp = levels.at(level);
  return lp.masks.at(static_cast<std::size_t>(cache)).get(static_cast<std::size_t>(file * lp.subfile_bits + position));
}

Placement place(const SystemSpec& spec, const Allocation& allocation, std::int64_t file_bits, std::uint64_t seed) {
  const auto levels = spec.levels();
  const int K = spec.caches();
  if (file_bits < 1) throw ModelError(ModelErrorKind::kInvalidParameters, "file size must be positive");
  if (allocation.per_level.size() != levels.size()) {
    throw ModelError(ModelErrorKind::kInvalidParameters, "allocation does not match the spec");
  }
  Placement out;
  out.caches = K;
  out.seed = seed;
  out.file_bits = file_bits;
  out.memory = allocation.memory;
  const double F = static_cast<double>(file_bits);
  out.memory_budget_bits = static_cast<std::int64_t>(std::floor(allocation.memory * F * (1.0 + 1e-12) + 1e-9));
  out.stored_bits.assign(static_cast<std::size_t>(K), 0);
  for (std::size_t i = 0; i < levels.size(); ++i) {
    const auto& l = levels[i];
    if (K % l.degree != 0 || file_bits % l.degree != 0) {
      throw ModelError(ModelErrorKind::kUnsupportedGeometry,
                       "level " + std::to_string(spec.label(i)) + ": degree must divide both K and F");
    }
    LevelPlacement lp;
    lp.degree = l.degree;
    lp.files = l.files;
    lp.subfile_bits = file_bits / l.degree;
    const auto n = static_cast<std::uint64_t>(l.files * lp.subfile_bits);
    const double q = allocation.per_level[i] * l.degree / static_cast<double>(l.files);
    if (q > 1.0 + 1e-9) {
      throw ModelError(ModelErrorKind::kInfeasible, "allocation exceeds a level's full size");
    }
    const double want = std::clamp(q, 0.0, 1.0) * static_cast<double>(n) * (1.0 + 1e-12);
    const auto k = std::min<std::uint64_t>(n, static_cast<std::uint64_t>(std::floor(want)));
    lp.stored_per_cache = static_cast<std::int64_t>(k);
    lp.masks.reserve(static_cast<std::size_t>(K));
    for (int c = 0; c < K; ++c) {
      BitVector mask(n);
      std::mt19937_64 rng(stream_seed(seed, i, static_cast<std::uint64_t>(c), kPlaceTag));
      sample_subset(mask, n, k, rng);
      lp.masks.push_back(std::move(mask));
      out.stored_bits[static_cast<std::size_t>(c)] += lp.stored_per_cache;
    }
    out.levels.push_back(std::move(lp));
  }
  for (auto stored : out.stored_bits) {
    if (stored > out.memory_budget_bits) {
      throw ModelError(ModelErrorKind::kInfeasible, "placement exceeds the per-cache memory budget");
    }
  }
  return out;
}

RequestVector worst_case_requests(const SystemSpec& spec) {
  const auto levels = spec.levels();
  RequestVector out;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    const auto U = integral_users(levels[i]);
    const std::int64_t n = levels[i].files;
    std::int64_t next = 0;
    for (int w = 0; w < spec.caches(); ++w) {
      for (std::int64_t u = 0; u < U; ++u) {
        out.users.push_back({i, w, static_cast<int>(u), next % n});
        ++next;
      }
    }
    out.repeated.push_back(next > n);
  }
  return out;
}

namespace {

DeliveryResult deliver_impl(const SystemSpec& spec, const Placement& placement, const RequestVector& requests,
                            std::vector<Failure>& failures) {
  const auto levels = spec.levels();
  const int K = spec.caches();
  if (placement.levels.size() != levels.size()) {
    throw ModelError(ModelErrorKind::kInvalidParameters, "placement does not match the spec");
  }
  std::vector<GroupJob> jobs;
  std::vector<UserView> views(requests.users.size());
  std::size_t group_id = 0;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    const auto U = integral_users(levels[i]);
    const auto plan = coloring_plan(K, static_cast<int>(U), levels[i].degree);
    std::map<std::pair<int, int>, std::size_t> index;
    for (std::size_t r = 0; r < requests.users.size(); ++r) {
      const auto& req = requests.users[r];
      if (req.level != i) continue;
      if (req.file < 0 || req.file >= levels[i].files) {
        throw ModelError(ModelErrorKind::kInvalidParameters, "requested file index out of range");
      }
      index[{req.window_start, req.slot}] = r;
    }
    for (const auto& group : plan.groups) {
      std::vector<Member> base;
      for (const auto& wu : group) {
        auto it = index.find({wu.window_start, wu.slot});
        if (it == index.end()) {
          throw ModelError(ModelErrorKind::kInvalidParameters, "request vector misses a user");
        }
        base.push_back({it->second, 0, requests.users[it->second].file});
        auto& view = views[it->second];
        view.level = i;
        view.file = requests.users[it->second].file;
        view.color_cache.assign(static_cast<std::size_t>(plan.colors), -1);
        for (int c = 0; c < plan.colors; ++c) {
          const int cache = plan.cache_of_color(wu, c);
          const int dist = ((cache - wu.window_start) % K + K) % K;
          if (dist >= levels[i].degree || plan.cache_color[static_cast<std::size_t>(cache)] != c) {
            throw ModelError(ModelErrorKind::kUnsupportedGeometry, "coloring invariant violated");
          }
          view.color_cache[static_cast<std::size_t>(c)] = cache;
        }
      }
      for (int c = 0; c < plan.colors; ++c) {
        GroupJob job{i, c, group_id, base};
        for (auto& m : job.members) m.cache = views[m.user].color_cache[static_cast<std::size_t>(c)];
        jobs.push_back(std::move(job));
      }
      ++group_id;
    }
  }
  return run_delivery(placement, jobs, views, failures);
}

}  // namespace

DeliveryResult deliver(const SystemSpec& spec, const Placement& placement, const RequestVector& requests) {
  std::vector<Failure> failures;
  auto result = deliver_impl(spec, placement, requests, failures);
  if (!failures.empty()) {
    const auto& f = failures.front();
    throw DecodeError(f.user, f.bit,
                      "user " + std::to_string(f.user) + " failed to decode bit " + std::to_string(f.bit));
  }
  return result;
}

SimReport simulate(const SystemSpec& spec, double memory, std::int64_t file_bits, std::uint64_t seed, int trials) {
  if (trials < 1) throw ModelError(ModelErrorKind::kInvalidParameters, "trials must be >= 1");
  const auto table = interval_table(spec);
  const auto allocation = allocate(spec, table, memory);
  const auto requests = worst_case_requests(spec);
  SimReport report;
  report.analytic_rate = multiuser_rate_total(spec, table, memory);
  report.trials = trials;
  report.seed = seed;
  double sum = 0.0;
  for (int t = 0; t < trials; ++t) {
    const auto placement = place(spec, allocation, file_bits, seed + static_cast<std::uint64_t>(t));
    std::vector<Failure> failures;
    const auto result = deliver_impl(spec, placement, requests, failures);
    report.decode_failures += static_cast<std::int64_t>(failures.size());
    report.per_trial.push_back(result.empirical_rate);
    sum += result.empirical_rate;
    report.empirical_max = std::max(report.empirical_max, result.empirical_rate);
  }
  report.empirical_mean = sum / trials;
  return report;
}

SimReport simulate_stochastic(std::span<const double> weights, int caches, std::int64_t users, double memory,
                              std::int64_t file_bits, std::uint64_t seed, int trials,
                              const StochasticOptions& options) {
  if (trials < 1) throw ModelError(ModelErrorKind::kInvalidParameters, "trials must be >= 1");
  if (users < 1 || caches < 1) throw ModelError(ModelErrorKind::kInvalidParameters, "need users and caches");
  const auto N = static_cast<std::int64_t>(weights.size());
  LevelSplit split;
  if (options.cut) {
    split = induced_split(weights, {*options.cut}, caches, memory, users);
  } else if (N >= 2) {
    split = split_levels(weights, 2, caches, memory, users, false, options.lattice);
  } else {
    split = induced_split(weights, {}, caches, memory, users);
  }
  const auto& spec = split.spec;
  const auto allocation = allocate(spec, memory);

  // Segment start offsets and the canonical level of each segment.
  std::vector<std::int64_t> starts = {0};
  for (auto c : split.cuts) starts.push_back(c);

  SimReport report;
  report.analytic_rate = split.objective;
  report.trials = trials;
  report.seed = seed;
  std::discrete_distribution<std::int64_t> pick_file(weights.begin(), weights.end());
  std::uniform_int_distribution<int> pick_cache(0, caches - 1);
  double sum = 0.0;
  for (int t = 0; t < trials; ++t) {
    const std::uint64_t trial_seed = seed + static_cast<std::uint64_t>(t);
    const auto placement = place(spec, allocation, file_bits, trial_seed);
    std::mt19937_64 rng(stream_seed(trial_seed, 0, 0, kDemandTag));
    std::vector<UserView> views;
    std::vector<std::vector<std::deque<std::size_t>>> pending(
        spec.level_count(), std::vector<std::deque<std::size_t>>(static_cast<std::size_t>(caches)));
    std::vector<Member> members;
    std::int64_t uncached_bits = 0;
    for (std::int64_t u = 0; u < users; ++u) {
      const int cache = pick_cache(rng);
      const auto f = pick_file(rng);
      const auto seg = static_cast<std::size_t>(std::upper_bound(starts.begin(), starts.end(), f) - starts.begin() - 1);
      const auto level = split.segment_level[seg];
      if (level == LevelSplit::kDropped) {
        // No users were expected here, so the level got no memory: plain unicast.
        uncached_bits += file_bits;
        continue;
      }
      const std::size_t id = views.size();
      views.push_back({level, f - starts[seg], {cache}});
      members.push_back({id, cache, f - starts[seg]});
      pending[level][static_cast<std::size_t>(cache)].push_back(id);
    }
    std::vector<GroupJob> jobs;
    std::size_t row = 0;
    for (std::size_t l = 0; l < pending.size(); ++l) {
      for (;;) {
        GroupJob job{l, 0, row, {}};
        for (auto& q : pending[l]) {
          if (q.empty()) continue;
          job.members.push_back(members[q.front()]);
          q.pop_front();
        }
        if (job.members.empty()) break;
        jobs.push_back(std::move(job));
        ++row;
      }
    }
    std::vector<Failure> failures;
    auto result = run_delivery(placement, jobs, views, failures);
    report.decode_failures += static_cast<std::int64_t>(failures.size());
    const double rate =
        static_cast<double>(result.total_bits + uncached_bits) / static_cast<double>(file_bits);
    report.per_trial.push_back(rate);
    sum += rate;
    report.empirical_max = std::max(report.empirical_max, rate);
  }
  report.empirical_mean = sum / trials;
  return report;
}

std::string_view to_string(Corner corner) {
  switch (corner) {
    case Corner::kM0: return "M0";
    case Corner::kMhalf: return "Mhalf";
    case Corner::kM1: return "M1";
    case Corner::kM2: return "M2";
    case Corner::kMfull: return "Mfull";
  }
  return "?";
}

double corner_memory(Corner corner, std::int64_t n2) {
  switch (corner) {
    case Corner::kM0: return 0.0;
    case Corner::kMhalf: return 0.5;
    case Corner::kM1: return 1.0;
    case Corner::kM2: return 2.0;
    case Corner::kMfull: return 2.0 + static_cast<double>(n2) / 2.0;
  }
  return 0.0;
}

double corner_rate(Corner corner) {
  switch (corner) {
    case Corner::kM0: return 3.0;
    case Corner::kMhalf: return 2.0;
    case Corner::kM1: return 1.5;
    case Corner::kM2: return 1.0;
    case Corner::kMfull: return 0.0;
  }
  return 0.0;
}

namespace {

BitVector concat(std::initializer_list<const BitVector*> parts) {
  std::size_t n = 0;
  for (const auto* p : parts) n += p->size();
  BitVector out(n);
  std::size_t at = 0;
  for (const auto* p : parts) {
    out.assign_range(at, *p);
    at += p->size();
  }
  return out;
}

BitVector xored(const BitVector& a, const BitVector& b) {
  BitVector out = a;
  out ^= b;
  return out;
}

}  // namespace

SmallExampleScheme small_example_scheme(Corner corner, std::int64_t n2, std::int64_t file_bits, std::uint64_t seed) {
  if (n2 < 4) throw ModelError(ModelErrorKind::kOutOfModel, "the small example needs at least 4 level-2 files");
  if (file_bits < 2 || file_bits % 2 != 0) {
    throw ModelError(ModelErrorKind::kUnsupportedGeometry, "the small example needs an even file size");
  }
  SmallExampleScheme s;
  s.corner = corner;
  s.n2 = n2;
  s.file_bits = file_bits;
  const auto F = static_cast<std::size_t>(file_bits);
  const std::size_t h = F / 2;
  for (std::size_t r = 0; r < 2; ++r) s.level1[r] = file_content(seed, 0, static_cast<std::int64_t>(r), file_bits);
  for (std::int64_t r = 0; r < n2; ++r) s.level2.push_back(file_content(seed, 1, r, file_bits));
  const auto a0 = s.level1[0].slice(0, h), b0 = s.level1[0].slice(h, h);
  const auto a1 = s.level1[1].slice(0, h), b1 = s.level1[1].slice(h, h);
  switch (corner) {
    case Corner::kM0:
      break;
    case Corner::kMhalf:
      s.caches[0] = xored(a0, a1);
      s.caches[1] = xored(b0, b1);
      break;
    case Corner::kM1:
      s.caches[0] = concat({&a0, &a1});
      s.caches[1] = concat({&b0, &b1});
      break;
    case Corner::kM2:
      s.caches[0] = concat({&s.level1[0], &s.level1[1]});
      s.caches[1] = s.caches[0];
      break;
    case Corner::kMfull: {
      for (int c = 0; c < 2; ++c) {
        BitVector z(2 * F + static_cast<std::size_t>(n2) * h);
        z.assign_range(0, s.level1[0]);
        z.assign_range(F, s.level1[1]);
        for (std::int64_t r = 0; r < n2; ++r) {
          z.assign_range(2 * F + static_cast<std::size_t>(r) * h, s.level2[static_cast<std::size_t>(r)].slice(c * h, h));
        }
        s.caches[static_cast<std::size_t>(c)] = std::move(z);
      }
      break;
    }
  }
  return s;
}

std::vector<BitVector> small_example_broadcast(const SmallExampleScheme& s, const SmallDemand& d) {
  const auto h = static_cast<std::size_t>(s.file_bits / 2);
  const auto& w1 = s.level1[static_cast<std::size_t>(d[0])];
  const auto& w2 = s.level1[static_cast<std::size_t>(d[1])];
  const auto& w3 = s.level2[static_cast<std::size_t>(d[2])];
  switch (s.corner) {
    case Corner::kM0: return {w1, w2, w3};
    case Corner::kMhalf: return {w3, w1.slice(h, h), w2.slice(0, h)};
    case Corner::kM1: return {w3, xored(w1.slice(h, h), w2.slice(0, h))};
    case Corner::kM2: return {w3};
    case Corner::kMfull: return {};
  }
  return {};
}

std::array<BitVector, 3> small_example_decode(Corner corner, std::int64_t n2, std::int64_t file_bits,
                                              const std::array<BitVector, 2>& z, const SmallDemand& d,
                                              const std::vector<BitVector>& x) {
  const auto F = static_cast<std::size_t>(file_bits);
  const auto h = F / 2;
  const auto r1 = static_cast<std::size_t>(d[0]);
  const auto r2 = static_cast<std::size_t>(d[1]);
  const auto r3 = static_cast<std::size_t>(d[2]);
  std::array<BitVector, 3> out;
  switch (corner) {
    case Corner::kM0:
      out = {x.at(0), x.at(1), x.at(2)};
      break;
    case Corner::kMhalf: {
      // x = (W2_r3, W1_r1,b, W1_r2,a); each cache holds the XOR of both halves.
      const BitVector a1 = r1 == r2 ? x.at(2) : xored(z[0], x.at(2));
      const BitVector b2 = r1 == r2 ? x.at(1) : xored(z[1], x.at(1));
      out[0] = concat({&a1, &x.at(1)});
      out[1] = concat({&x.at(2), &b2});
      out[2] = x.at(0);
      break;
    }
    case Corner::kM1: {
      const BitVector a1 = z[0].slice(r1 * h, h);
      const BitVector b1 = xored(x.at(1), z[0].slice(r2 * h, h));
      const BitVector a2 = xored(x.at(1), z[1].slice(r1 * h, h));
      const BitVector b2 = z[1].slice(r2 * h, h);
      out[0] = concat({&a1, &b1});
      out[1] = concat({&a2, &b2});
      out[2] = x.at(0);
      break;
    }
    case Corner::kM2:
      out[0] = z[0].slice(r1 * F, F);
      out[1] = z[1].slice(r2 * F, F);
      out[2] = x.at(0);
      break;
    case Corner::kMfull: {
      out[0] = z[0].slice(r1 * F, F);
      out[1] = z[1].slice(r2 * F, F);
      const BitVector a = z[0].slice(2 * F + r3 * h, h);
      const BitVector b = z[1].slice(2 * F + r3 * h, h);
      out[2] = concat({&a, &b});
      break;
    }
  }
  (void)n2;
  return out;
}

SmallExampleCheck verify_small_example(Corner corner, std::int64_t n2, std::int64_t file_bits, std::uint64_t seed) {
  const auto s = small_example_scheme(corner, n2, file_bits, seed);
  SmallExampleCheck check;
  check.corner = corner;
  check.memory = corner_memory(corner, n2);
  check.rate = corner_rate(corner);
  check.cache_bits = static_cast<std::int64_t>(std::max(s.caches[0].size(), s.caches[1].size()));
  check.min_broadcast_bits = std::numeric_limits<std::int64_t>::max();
  for (std::int64_t r1 = 0; r1 < 2; ++r1) {
    for (std::int64_t r2 = 0; r2 < 2; ++r2) {
      for (std::int64_t r3 = 0; r3 < n2; ++r3) {
        const SmallDemand d{r1, r2, r3};
        const auto x = small_example_broadcast(s, d);
        std::int64_t bits = 0;
        for (const auto& p : x) bits += static_cast<std::int64_t>(p.size());
        check.min_broadcast_bits = std::min(check.min_broadcast_bits, bits);
        check.max_broadcast_bits = std::max(check.max_broadcast_bits, bits);
        const auto got = small_example_decode(corner, n2, file_bits, s.caches, d, x);
        ++check.demands;
        if (got[0] == s.level1[static_cast<std::size_t>(r1)] && got[1] == s.level1[static_cast<std::size_t>(r2)] &&
            got[2] == s.level2[static_cast<std::size_t>(r3)]) {
          ++check.decoded;
        }
      }
    }
  }
  return check;
}

}  // namespace mlcache
