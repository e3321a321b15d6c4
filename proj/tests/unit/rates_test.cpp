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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mlcache/single_level.hpp"
#include "support/generators.hpp"

namespace mlcache {
namespace {

SystemSpec fixture() { return SystemSpec::multi_user(4, {{16, 4, 1}, {64, 1, 1}}); }
SystemSpec su_example() { return SystemSpec::single_user(45, {{500, 30}, {1000, 15}}); }
SystemSpec lfu_example() { return SystemSpec::multi_user(30, {{600, 20, 1}, {1000, 10, 1}}); }

TEST(MultiuserRate, Fixture) {
  const auto r = multiuser_rate(fixture(), 16);
  ASSERT_EQ(r.per_level.size(), 2u);
  EXPECT_NEAR(r.per_level[0], 4.0 / 7.0, 1e-12);
  EXPECT_NEAR(r.per_level[1], 3.875, 1e-12);
  EXPECT_NEAR(r.total, 4.0 / 7.0 + 3.875, 1e-12);
  EXPECT_NEAR(r.total, 4.446, 1e-3);
  ASSERT_TRUE(r.allocation.has_value());
  EXPECT_NEAR(r.allocation->per_level[0], 14.0, 1e-12);
}

TEST(MultiuserRate, Endpoints) {
  const auto spec = fixture();
  EXPECT_DOUBLE_EQ(multiuser_rate(spec, 0).total, 20.0);
  EXPECT_DOUBLE_EQ(multiuser_rate(spec, 80).total, 0.0);
  EXPECT_DOUBLE_EQ(multiuser_rate(spec, 1000).total, 0.0);
}

TEST(MultiuserRate, TotalMatchesFastPath) {
  testing::Rng rng(31);
  for (int n = 0; n < 200; ++n) {
    const auto spec = testing::random_multi_user(rng);
    const auto table = interval_table(spec);
    for (double M : testing::sample_memories(rng, spec, 20)) {
      EXPECT_EQ(multiuser_rate(spec, table, M).total, multiuser_rate_total(spec, table, M));
    }
  }
}

TEST(MultiuserRate, ExtendedExampleGivenSplit) {
  const auto spec = SystemSpec::multi_user(25, {{900, 25, 1}, {2700, 16, 1}, {10500, 7, 1}, {48000, 1, 1}});
  const double M = 3600;
  const std::vector<double> split{0.25 * M, 0.35 * M, 0.4 * M, 0.0};
  EXPECT_NEAR(memory_sharing_rate(spec, split, SubsystemScheme::kCentralized), 76.4, 0.5);
  EXPECT_NEAR(memory_sharing_rate(spec, split, SubsystemScheme::kDecentralized), 87.33, 0.01);
}

TEST(MultiuserRate, PerLevelSumsToTotal) {
  testing::Rng rng(32);
  for (int n = 0; n < 500; ++n) {
    const auto spec = testing::random_multi_user(rng);
    const auto table = interval_table(spec);
    for (double M : testing::sample_memories(rng, spec, 20)) {
      const auto r = multiuser_rate(spec, table, M);
      double sum = 0.0;
      for (std::size_t i = 0; i < r.per_level.size(); ++i) {
        ASSERT_GE(r.per_level[i], 0.0);
        sum += r.per_level[i];
      }
      EXPECT_NEAR(r.total, sum, 1e-9 * std::max(1.0, sum));
      // Outside I1 the per-level bounds need no regularity.
      for (std::size_t i = 0; i < r.per_level.size(); ++i) {
        const auto& I1 = r.allocation->refined.I1;
        if (std::find(I1.begin(), I1.end(), i) != I1.end()) continue;
        EXPECT_LE(r.per_level[i], r.upper_bounds[i] * (1 + 1e-9) + 1e-9)
            << serialize_spec(spec, -1) << " M=" << M << " level " << i;
      }
    }
  }
}

// With K >= D/beta and separated levels every per-level bound applies.
TEST(MultiuserRate, UpperBoundSandwichOnRegularSpecs) {
  testing::Rng rng(132);
  int with_i1 = 0;
  for (int n = 0; n < 400; ++n) {
    testing::RegularShape shape;
    shape.min_caches = 200;
    shape.max_caches = 600;
    shape.max_degree = 3;
    const auto spec = testing::random_regular_multi_user(rng, shape);
    if (spec.caches() < spec.max_degree() / spec.beta()) continue;
    const auto table = interval_table(spec);
    for (double M : testing::sample_memories(rng, spec, 30)) {
      const auto r = multiuser_rate(spec, table, M);
      const double ub = std::accumulate(r.upper_bounds.begin(), r.upper_bounds.end(), 0.0);
      EXPECT_LE(r.total, ub * (1 + 1e-9) + 1e-9) << serialize_spec(spec, -1) << " M=" << M;
      with_i1 += !r.allocation->refined.I1.empty();
    }
  }
  EXPECT_GT(with_i1, 50);
}

// Where no level is in I1 and M - T_J >= V_I, the approximation stays under the
// sum of the per-level bounds.
TEST(MultiuserRate, ApproxBracket) {
  testing::Rng rng(33);
  int checked = 0;
  for (int n = 0; n < 500; ++n) {
    testing::RegularShape shape;
    shape.min_caches = 200;
    shape.max_caches = 600;
    shape.max_degree = 3;
    const auto spec = testing::random_regular_multi_user(rng, shape);
    const auto table = interval_table(spec);
    for (double M : testing::sample_memories(rng, spec, 200)) {
      const auto r = multiuser_rate(spec, table, M);
      const auto& a = *r.allocation;
      if (a.partition.I.empty() || !a.refined.I1.empty()) continue;
      const auto sI = aggregate(spec, a.partition.I);
      const auto sJ = aggregate(spec, a.partition.J);
      if (M - sJ.T < sI.V) continue;
      double bound = 0.0;
      for (auto h : a.partition.H) bound += spec.caches() * spec.levels()[h].users_per_cache;
      bound += 2.0 * sI.S * sI.S / (M - sJ.T + sI.V);
      EXPECT_LE(*r.approx, bound * (1 + 1e-12));
      ++checked;
    }
  }
  EXPECT_GT(checked, 200);
}

TEST(MultiuserRate, ApproxIsClamped) {
  testing::Rng rng(34);
  for (int n = 0; n < 200; ++n) {
    const auto spec = testing::random_multi_user(rng);
    double cap = 0.0;
    for (const auto& l : spec.levels()) cap += spec.caches() * l.users_per_cache;
    for (double M : testing::sample_memories(rng, spec, 20)) {
      const auto r = multiuser_rate(spec, M);
      EXPECT_GE(*r.approx, 0.0);
      EXPECT_LE(*r.approx, cap);
    }
  }
}

TEST(SingleuserRate, Examples) {
  const auto spec = su_example();
  const auto a = singleuser_rate(spec, 100);
  EXPECT_NEAR(a.total, 14.0, 1e-12);
  EXPECT_TRUE(a.su_partition->Hprime.empty());
  EXPECT_EQ(a.su_partition->Iprime, (LevelSet{0, 1}));

  const auto b = singleuser_rate(spec, 30);
  EXPECT_NEAR(b.total, 15.0 + 500.0 / 30.0 - 1.0, 1e-12);
  EXPECT_EQ(b.su_partition->Hprime, (LevelSet{1}));
  EXPECT_EQ(b.su_partition->Iprime, (LevelSet{0}));

  EXPECT_DOUBLE_EQ(singleuser_rate(spec, 1500).total, 0.0);
  EXPECT_DOUBLE_EQ(singleuser_rate(spec, 4000).total, 0.0);
  EXPECT_DOUBLE_EQ(singleuser_rate(spec, 0).total, 45.0);
}

TEST(SingleuserRate, RefinedSetMembership) {
  testing::Rng rng(35);
  for (int n = 0; n < 300; ++n) {
    const auto spec = testing::random_single_user(rng);
    const auto levels = spec.su_levels();
    for (double M : testing::sample_memories(rng, spec, 20)) {
      const auto p = su_partition(spec, M);
      for (auto g : p.G) {
        EXPECT_LE(levels[g].users_total, 5);
        EXPECT_LE(M, levels[g].files / 6.0);
        EXPECT_LT(M, static_cast<double>(levels[g].files) / levels[g].users_total);
      }
      for (auto h : p.H) {
        EXPECT_GE(levels[h].users_total, 6);
        EXPECT_LT(M, static_cast<double>(levels[h].files) / levels[h].users_total);
      }
      for (auto i : p.I) {
        EXPECT_GE(M, static_cast<double>(levels[i].files) / levels[i].users_total);
        EXPECT_LE(M, levels[i].files / 6.0);
      }
      double nj = 0.0;
      for (auto j : p.J) {
        EXPECT_GT(M, levels[j].files / 6.0);
        nj += static_cast<double>(levels[j].files);
      }
      EXPECT_DOUBLE_EQ(nj, p.NJ);
      // Every level lands in exactly one of G, H, I, J.
      std::vector<int> count(spec.level_count(), 0);
      for (const auto* s : {&p.G, &p.H, &p.I, &p.J}) {
        for (auto i : *s) ++count[i];
      }
      for (int c : count) EXPECT_EQ(c, 1);
      EXPECT_EQ(p.Hprime.size() + p.Iprime.size(), spec.level_count());
    }
  }
}

// The clustered rate differs from the refined G/H/I/J form only through the
// positive part in the J term; that slack is at most one unit.
TEST(SingleuserRate, RefinedFormSlack) {
  testing::Rng rng(36);
  for (int n = 0; n < 500; ++n) {
    const auto spec = testing::random_single_user(rng);
    for (double M : testing::sample_memories(rng, spec, 20)) {
      if (M <= 0.0) continue;
      const auto r = singleuser_rate(spec, M);
      EXPECT_LE(r.total, *r.refined_upper_bound + 1.0 + 1e-9) << serialize_spec(spec, -1) << " M=" << M;
    }
  }
}

TEST(SingleuserRate, PriorTermsShareGHI) {
  testing::Rng rng(37);
  for (int n = 0; n < 200; ++n) {
    const auto spec = testing::random_single_user(rng);
    for (double M : testing::sample_memories(rng, spec, 10)) {
      if (M <= 0.0) continue;
      const auto a = su_refined_terms(spec, M);
      const auto b = su_prior_terms(spec, M);
      EXPECT_EQ(a.g, b.g);
      EXPECT_EQ(a.h, b.h);
      EXPECT_EQ(a.i, b.i);
    }
  }
}

TEST(SingleuserRate, PriorKnowledgeRate) {
  const auto spec = su_example();
  // M = 100: min{30, 5} (0.8) + min{15, 10} (0.9).
  EXPECT_NEAR(*singleuser_rate(spec, 100).prior_knowledge_rate, 5 * 0.8 + 10 * 0.9, 1e-12);
  EXPECT_NEAR(*singleuser_rate(spec, 0).prior_knowledge_rate, 45.0, 1e-12);
}

TEST(LfuRate, Examples) {
  const auto spec = lfu_example();
  EXPECT_DOUBLE_EQ(lfu_rate(spec, 600, false), 300.0);
  EXPECT_DOUBLE_EQ(lfu_rate(spec, 0, false), 900.0);
  EXPECT_DOUBLE_EQ(lfu_rate(spec, 1600, false), 0.0);
  EXPECT_DOUBLE_EQ(lfu_rate(spec, 1600, true), 0.0);
  // 299 whole files plus half of one: 300 missing files and a half-missing one.
  EXPECT_DOUBLE_EQ(lfu_rate(spec, 299.5, false), 300.5 + 300.0);
  EXPECT_DOUBLE_EQ(lfu_rate(spec, 1599.5, false), 0.5);
}

TEST(LfuRate, CodedUsesSingleLevelOnNextLevel) {
  const auto spec = lfu_example();
  EXPECT_DOUBLE_EQ(lfu_rate(spec, 700, true), single_level_rate(100, 30, 1000, 10, 1));
  EXPECT_DOUBLE_EQ(lfu_rate(spec, 300, true), single_level_rate(300, 30, 600, 20, 1) + 300.0);
}

TEST(LfuRate, ContinuousAndNonincreasing) {
  testing::Rng rng(38);
  for (int n = 0; n < 200; ++n) {
    const auto spec = n % 2 ? testing::random_multi_user(rng) : testing::random_single_user(rng);
    const double top = static_cast<double>(spec.total_files());
    double prev = lfu_rate(spec, 0, false);
    for (int k = 1; k <= 500; ++k) {
      const double r = lfu_rate(spec, top * k / 480.0, false);
      EXPECT_LE(r, prev + 1e-9);
      prev = r;
    }
  }
}

TEST(LfuRate, MemorySharingDominatesOnExamples) {
  const auto spec = lfu_example();
  const auto table = interval_table(spec);
  for (int m = 0; m <= 1600; m += 10) {
    const double ms = multiuser_rate_total(spec, table, m);
    const double lfu = lfu_rate(spec, m, false);
    if (m == 20) {
      // Just past the second breakpoint the closed-form split is a little
      // worse than whole-file storage (881.16 vs 880).
      EXPECT_GT(ms, lfu);
      EXPECT_LT(ms, lfu * 1.002);
      continue;
    }
    EXPECT_LE(ms, lfu + 1e-9) << m;
  }
  const auto su = su_example();
  for (int m = 0; m <= 1500; m += 5) {
    EXPECT_LE(singleuser_rate(su, m).total, lfu_rate(su, m, false) + 1e-9) << m;
  }
}

TEST(UniformSharing, Examples) {
  EXPECT_NEAR(uniform_sharing_rate(fixture(), 16), 16.0, 1e-12);
  EXPECT_DOUBLE_EQ(uniform_sharing_rate(fixture(), 0), 20.0);
  testing::Rng rng(39);
  for (int n = 0; n < 100; ++n) {
    testing::MultiUserShape shape;
    shape.max_levels = 1;
    const auto spec = testing::random_multi_user(rng, shape);
    for (double M : testing::sample_memories(rng, spec, 10)) {
      EXPECT_NEAR(uniform_sharing_rate(spec, M), multiuser_rate(spec, M).total, 1e-9 * spec.caches() * 20);
    }
  }
}

TEST(RateCurve, ColumnsAndMonotonicity) {
  const auto spec = fixture();
  std::vector<double> grid;
  for (int m = 0; m <= 90; ++m) grid.push_back(m);
  const auto rows = rate_curve(spec, grid);
  ASSERT_EQ(rows.size(), grid.size());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    EXPECT_EQ(rows[k].memory, grid[k]);
    EXPECT_TRUE(rows[k].memory_sharing && rows[k].lfu && rows[k].coded_lfu && rows[k].uniform);
    EXPECT_FALSE(rows[k].single_user.has_value());
    if (k > 0) EXPECT_LE(*rows[k].memory_sharing, *rows[k - 1].memory_sharing + 1e-12);
  }
  const auto su = rate_curve(su_example(), grid);
  EXPECT_TRUE(su[5].single_user && su[5].prior);
  EXPECT_FALSE(su[5].memory_sharing.has_value());
}

TEST(RateCurve, MemorySharingNonincreasingOnRandomSpecs) {
  testing::Rng rng(40);
  for (int n = 0; n < 200; ++n) {
    const auto spec = testing::random_multi_user(rng);
    std::vector<double> grid;
    for (int k = 0; k <= 300; ++k) grid.push_back(spec.full_storage() * k / 290.0);
    const auto rows = rate_curve(spec, grid);
    for (std::size_t k = 1; k < rows.size(); ++k) {
      EXPECT_LE(*rows[k].memory_sharing, *rows[k - 1].memory_sharing * (1 + 1e-9) + 1e-9)
          << serialize_spec(spec, -1) << " M=" << grid[k];
    }
  }
}

}  // namespace
}  // namespace mlcache
