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

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "support/generators.hpp"

namespace mlcache {
namespace {

SystemSpec fixture() { return SystemSpec::multi_user(4, {{16, 4, 1}, {64, 1, 1}}); }

// Threshold conditions written out independently of check_m_feasible.
bool thresholds_hold(const SystemSpec& spec, double M, const Partition& p, double tol = 1e-9) {
  const auto levels = spec.levels();
  const double K = spec.caches();
  if (p.I.empty()) return p.H.empty() && M >= spec.full_storage() * (1 - 1e-12);
  double S = 0, T = 0, V = 0;
  for (auto i : p.I) {
    S += std::sqrt(static_cast<double>(levels[i].files) * levels[i].users_per_cache);
    V += static_cast<double>(levels[i].files) / K;
  }
  for (auto j : p.J) T += static_cast<double>(levels[j].files) / levels[j].degree;
  const double mt = (M - T + V) / S;
  const double slack = tol * std::max(1.0, std::abs(mt) + (M + T + V) / S);
  auto root = [&](std::size_t i) { return std::sqrt(static_cast<double>(levels[i].files) / levels[i].users_per_cache); };
  for (auto h : p.H) {
    if (!(mt <= root(h) / K + slack)) return false;
  }
  for (auto i : p.I) {
    if (!(mt >= root(i) / K - slack && mt <= (1.0 / levels[i].degree + 1.0 / K) * root(i) + slack)) return false;
  }
  for (auto j : p.J) {
    if (!(mt >= (1.0 / levels[j].degree + 1.0 / K) * root(j) - slack)) return false;
  }
  return true;
}

TEST(IntervalTable, FixtureBoundaries) {
  const auto spec = fixture();
  const auto table = interval_table(spec);
  const auto rows = table.rows();
  ASSERT_EQ(rows.size(), 4u);
  const double xs[] = {0.5, 2.0, 2.5, 10.0};
  const double ys[] = {0.0, 12.0, 20.0, 80.0};
  for (std::size_t t = 0; t < 4; ++t) {
    EXPECT_NEAR(rows[t].threshold.value, xs[t], 1e-12);
    EXPECT_NEAR(rows[t].lower, ys[t], 1e-9);
    EXPECT_EQ(rows[t].t, t + 1);
  }
  EXPECT_EQ(rows[0].partition, (Partition{{1}, {0}, {}}));
  EXPECT_EQ(rows[1].partition, (Partition{{}, {0, 1}, {}}));
  EXPECT_EQ(rows[2].partition, (Partition{{}, {1}, {0}}));
  EXPECT_EQ(rows[3].partition, (Partition{{}, {}, {0, 1}}));
  EXPECT_DOUBLE_EQ(table.full_storage(), 80.0);
}

TEST(IntervalTable, SingleLevel) {
  const auto spec = SystemSpec::multi_user(4, {{16, 4, 1}});
  const auto table = interval_table(spec);
  ASSERT_EQ(table.rows().size(), 2u);
  EXPECT_DOUBLE_EQ(table.rows()[0].lower, 0.0);
  EXPECT_DOUBLE_EQ(table.rows()[1].lower, 16.0);
  EXPECT_EQ(table.partition_at(15.9), (Partition{{}, {0}, {}}));
  EXPECT_EQ(table.partition_at(16.0), (Partition{{}, {}, {0}}));
}

TEST(PartitionAt, FixtureLookups) {
  const auto table = interval_table(fixture());
  EXPECT_EQ(partition_at(table, 16), (Partition{{}, {0, 1}, {}}));
  EXPECT_EQ(partition_at(table, 0), (Partition{{1}, {0}, {}}));
  EXPECT_EQ(partition_at(table, 1e6), (Partition{{}, {}, {0, 1}}));
  EXPECT_EQ(partition_at(table, 12), (Partition{{}, {0, 1}, {}}));
}

TEST(CheckMFeasible, FixtureExamples) {
  const auto spec = fixture();
  const auto ok = check_m_feasible(spec, 16, {{}, {0, 1}, {}});
  EXPECT_TRUE(ok.feasible);
  EXPECT_NEAR(ok.effective_memory, 2.25, 1e-12);
  EXPECT_EQ(ok.levels.size(), 2u);

  const auto bad = check_m_feasible(spec, 16, {{0, 1}, {}, {}});
  EXPECT_FALSE(bad.feasible);
  EXPECT_FALSE(bad.reason.empty());

  EXPECT_TRUE(check_m_feasible(spec, 80, {{}, {}, {0, 1}}).feasible);

  const auto wrong = check_m_feasible(spec, 16, {{}, {1}, {0}});
  EXPECT_FALSE(wrong.feasible);
  bool flagged = false;
  for (const auto& l : wrong.levels) flagged |= !l.ok && l.slack < 0;
  EXPECT_TRUE(flagged);

  EXPECT_FALSE(check_m_feasible(spec, 16, {{}, {0}, {}}).feasible);  // not a cover
}

TEST(Allocate, FixtureValues) {
  const auto spec = fixture();
  const auto a = allocate(spec, 16);
  EXPECT_NEAR(a.effective_memory, 2.25, 1e-12);
  EXPECT_NEAR(a.per_level[0], 14.0, 1e-12);
  EXPECT_NEAR(a.per_level[1], 2.0, 1e-12);

  const auto full = allocate(spec, 80);
  EXPECT_DOUBLE_EQ(full.per_level[0], 16.0);
  EXPECT_DOUBLE_EQ(full.per_level[1], 64.0);

  const auto beyond = allocate(spec, 500);
  EXPECT_DOUBLE_EQ(beyond.per_level[0], 16.0);
  EXPECT_DOUBLE_EQ(beyond.per_level[1], 64.0);

  const auto zero = allocate(spec, 0);
  EXPECT_EQ(zero.per_level, (std::vector<double>{0.0, 0.0}));
}

TEST(Refine, FixtureHasTwoLevelsInI1) {
  // Without separation the classes may overlap: level 2 is both below 4 and above 2.04.
  const auto r = refine(fixture(), 16);
  EXPECT_EQ(r.I1, (LevelSet{0, 1}));
  EXPECT_EQ(r.I0, (LevelSet{1}));
  EXPECT_EQ(r.warnings.size(), 1u);
}

TEST(Refine, ZeroMemoryHasEmptyI1) {
  testing::Rng rng(21);
  for (int n = 0; n < 300; ++n) {
    const auto spec = testing::random_multi_user(rng);
    EXPECT_TRUE(refine(spec, 0).I1.empty());
  }
}

TEST(Refine, SeparatedSpecsHaveAtMostOneI1Level) {
  testing::Rng rng(22);
  for (int n = 0; n < 300; ++n) {
    testing::RegularShape shape;
    shape.min_caches = 200;
    shape.max_caches = 450;
    shape.max_degree = 2;
    const auto spec = testing::random_regular_multi_user(rng, shape);
    ASSERT_TRUE(validate(spec).regular());
    if (spec.caches() < spec.max_degree() / spec.beta()) continue;
    for (double M : testing::sample_memories(rng, spec, 40)) {
      const auto r = refine(spec, M);
      EXPECT_LE(r.I1.size(), 1u);
      EXPECT_TRUE(r.warnings.empty());
    }
  }
}

TEST(Refine, CoversI) {
  testing::Rng rng(23);
  for (int n = 0; n < 300; ++n) {
    const auto spec = testing::random_multi_user(rng);
    const auto table = interval_table(spec);
    for (double M : testing::sample_memories(rng, spec, 20)) {
      const auto p = table.partition_at(M);
      const auto r = refine(spec, M, p);
      LevelSet all = r.I0;
      all.insert(all.end(), r.Iprime.begin(), r.Iprime.end());
      all.insert(all.end(), r.I1.begin(), r.I1.end());
      std::sort(all.begin(), all.end());
      all.erase(std::unique(all.begin(), all.end()), all.end());
      EXPECT_EQ(all, p.I);
    }
  }
}

TEST(IntervalTable, OracleOnRandomSpecs) {
  testing::Rng rng(24);
  for (int n = 0; n < 1000; ++n) {
    testing::MultiUserShape shape;
    shape.max_levels = 6;
    shape.max_caches = 50;
    shape.files_cover_users = n % 3 != 0;
    const auto spec = testing::random_multi_user(rng, shape);
    const auto table = interval_table(spec);
    for (double M : testing::sample_memories(rng, spec, 50)) {
      const auto p = table.partition_at(M);
      const auto report = check_m_feasible(spec, M, p);
      ASSERT_TRUE(report.feasible) << serialize_spec(spec, -1) << " M=" << M << ": " << report.reason;
      ASSERT_TRUE(thresholds_hold(spec, M, p)) << serialize_spec(spec, -1) << " M=" << M;
      if (M < spec.full_storage()) ASSERT_FALSE(p.I.empty());
    }
  }
}

TEST(IntervalTable, StructuralInvariants) {
  testing::Rng rng(25);
  for (int n = 0; n < 500; ++n) {
    const auto spec = testing::random_multi_user(rng);
    const auto table = interval_table(spec);
    const auto rows = table.rows();
    ASSERT_EQ(rows.size(), 2 * spec.level_count());
    EXPECT_EQ(rows.front().lower, 0.0);
    EXPECT_NEAR(rows.back().lower, spec.full_storage(), 1e-9 * spec.full_storage());
    std::vector<int> stage(spec.level_count(), 0);
    for (std::size_t t = 0; t < rows.size(); ++t) {
      if (t > 0) EXPECT_GE(rows[t].lower, rows[t - 1].lower);
      if (t > 0) EXPECT_GE(rows[t].threshold.value, rows[t - 1].threshold.value);
      if (rows[t].partition.I.empty() && t + 1 < rows.size()) {
        EXPECT_NEAR(rows[t].lower, rows[t + 1].lower, 1e-9 * spec.full_storage());
      }
      // Promotions only move H -> I -> J.
      for (auto i : rows[t].partition.I) {
        EXPECT_LE(stage[i], 1);
        stage[i] = 1;
      }
      for (auto j : rows[t].partition.J) stage[j] = 2;
      for (auto h : rows[t].partition.H) EXPECT_EQ(stage[h], 0);
    }
  }
}

// Exhaustive 3^L search: the table's partition is among the feasible ones and
// at least one feasible partition exists at every M.
TEST(IntervalTable, BruteForceAgreement) {
  testing::Rng rng(26);
  for (int n = 0; n < 200; ++n) {
    testing::MultiUserShape shape;
    shape.max_levels = 4;
    const auto spec = testing::random_multi_user(rng, shape);
    const auto table = interval_table(spec);
    const std::size_t L = spec.level_count();
    std::size_t total = 1;
    for (std::size_t i = 0; i < L; ++i) total *= 3;
    for (double M : testing::sample_memories(rng, spec, 10)) {
      std::vector<Partition> feasible;
      for (std::size_t code = 0; code < total; ++code) {
        Partition p;
        std::size_t c = code;
        for (std::size_t i = 0; i < L; ++i, c /= 3) (c % 3 == 0 ? p.H : c % 3 == 1 ? p.I : p.J).push_back(i);
        if (thresholds_hold(spec, M, p, 1e-12)) feasible.push_back(p);
      }
      EXPECT_FALSE(feasible.empty());
      const auto chosen = table.partition_at(M);
      EXPECT_TRUE(thresholds_hold(spec, M, chosen));
    }
  }
}

TEST(Allocate, AllocationInvariants) {
  testing::Rng rng(27);
  for (int n = 0; n < 1000; ++n) {
    testing::MultiUserShape shape;
    shape.max_levels = 6;
    shape.max_caches = 50;
    const auto spec = testing::random_multi_user(rng, shape);
    const auto table = interval_table(spec);
    for (double M : testing::sample_memories(rng, spec, 50)) {
      const auto a = allocate(spec, table, M);
      double sum = 0.0;
      for (std::size_t i = 0; i < spec.level_count(); ++i) {
        const auto& l = spec.levels()[i];
        ASSERT_GE(a.per_level[i], 0.0);
        ASSERT_LE(a.per_level[i], static_cast<double>(l.files) / l.degree);
        sum += a.per_level[i];
      }
      const double expect = std::min(M, spec.full_storage());
      ASSERT_NEAR(sum, expect, 1e-9 * std::max(1.0, expect)) << serialize_spec(spec, -1) << " M=" << M;
    }
  }
}

TEST(Allocate, ContinuousAndMonotone) {
  testing::Rng rng(28);
  for (int n = 0; n < 200; ++n) {
    const auto spec = testing::random_multi_user(rng);
    const auto table = interval_table(spec);
    const double full = spec.full_storage();
    // Boundaries: left and right limits agree.
    for (const auto& row : table.rows()) {
      const double y = row.lower;
      if (y <= 0.0) continue;
      const double h = 1e-7 * std::max(1.0, y);
      const auto left = allocate(spec, table, y - h);
      const auto right = allocate(spec, table, y + h);
      for (std::size_t i = 0; i < spec.level_count(); ++i) {
        EXPECT_NEAR(left.per_level[i], right.per_level[i], 1e-4 * std::max(1.0, full));
      }
    }
    // Nondecreasing per level on a fine sweep.
    auto prev = allocate(spec, table, 0.0).per_level;
    for (int k = 1; k <= 400; ++k) {
      const auto cur = allocate(spec, table, full * k / 380.0).per_level;
      for (std::size_t i = 0; i < cur.size(); ++i) EXPECT_GE(cur[i], prev[i] - 1e-9 * std::max(1.0, full));
      prev = cur;
    }
  }
}

TEST(FormatLevelSet, UsesOriginalLabels) {
  const auto spec = SystemSpec::multi_user(4, {{64, 1, 1}, {16, 4, 1}});
  EXPECT_EQ(format_level_set(spec, {0, 1}), "1-2");
  EXPECT_EQ(format_level_set(spec, {0}), "2");
  EXPECT_EQ(format_level_set(spec, {}), "");
}

}  // namespace
}  // namespace mlcache
