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

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "mlcache/errors.hpp"
#include "mlcache/rates.hpp"
#include "mlcache/single_level.hpp"
#include "support/generators.hpp"

namespace mlcache {
namespace {

TEST(ZipfWeights, NormalizedAndDescending) {
  const auto w = zipf_weights(1000, 0.8);
  EXPECT_NEAR(std::accumulate(w.begin(), w.end(), 0.0), 1.0, 1e-12);
  for (std::size_t i = 1; i < w.size(); ++i) EXPECT_LT(w[i], w[i - 1]);
  EXPECT_NEAR(w[0] / w[1], std::pow(2.0, 0.8), 1e-12);
  const auto flat = zipf_weights(4, 0.0);
  for (double x : flat) EXPECT_DOUBLE_EQ(x, 0.25);
}

TEST(InducedSplit, UsersFollowMass) {
  const std::vector<double> w{4, 3, 2, 1};
  const auto s = induced_split(w, {2}, 5, 1.0, 100);
  EXPECT_EQ(s.segment_files, (std::vector<std::int64_t>{2, 2}));
  EXPECT_NEAR(s.segment_mass[0], 0.7, 1e-12);
  EXPECT_EQ(s.segment_users, (std::vector<std::int64_t>{70, 30}));
  ASSERT_EQ(s.spec.level_count(), 2u);
  EXPECT_DOUBLE_EQ(s.spec.levels()[s.segment_level[0]].users_per_cache, 14.0);
  EXPECT_DOUBLE_EQ(s.spec.levels()[s.segment_level[1]].users_per_cache, 6.0);
  EXPECT_DOUBLE_EQ(s.objective, multiuser_rate(s.spec, 1.0).total);
}

TEST(InducedSplit, EmptySegmentsAreDropped) {
  const std::vector<double> w{4, 3, 2, 1};
  const auto s = induced_split(w, {0, 4}, 2, 0.5, 10);
  EXPECT_EQ(s.segment_files, (std::vector<std::int64_t>{0, 4, 0}));
  EXPECT_EQ(s.segment_level[0], LevelSplit::kDropped);
  EXPECT_EQ(s.segment_level[2], LevelSplit::kDropped);
  EXPECT_EQ(s.spec.level_count(), 1u);
  EXPECT_THROW(induced_split(w, {3, 2}, 2, 0.5, 10), ModelError);
  EXPECT_THROW(induced_split(w, {5}, 2, 0.5, 10), ModelError);
  EXPECT_THROW(induced_split(std::vector<double>{1, 2}, {}, 2, 0.5, 10), ModelError);
  EXPECT_THROW(induced_split(std::vector<double>{1, 0}, {}, 2, 0.5, 10), ModelError);
}

TEST(SplitLevels, OneLevelIsSingleLevelRate) {
  const auto w = zipf_weights(500, 0.8);
  for (double M : {0.0, 10.0, 100.0, 400.0}) {
    const auto s = split_levels(w, 1, 5, M, 100, false);
    EXPECT_TRUE(s.cuts.empty());
    EXPECT_NEAR(s.objective, single_level_rate(M, 5, 500, 20, 1), 1e-9 * (1 + s.objective));
  }
}

TEST(SplitLevels, ObjectiveIsRateOfInducedSpec) {
  const auto w = zipf_weights(2000, 0.9);
  for (std::size_t L : {2u, 3u}) {
    const auto s = split_levels(w, L, 10, 150.0, 500, false, 40);
    EXPECT_EQ(s.cuts.size(), L - 1);
    EXPECT_DOUBLE_EQ(s.objective, multiuser_rate(s.spec, 150.0).total);
    const auto again = induced_split(w, s.cuts, 10, 150.0, 500);
    EXPECT_DOUBLE_EQ(again.objective, s.objective);
  }
}

// Exhaustive check of the L=2 search against a direct scan of the lattice.
TEST(SplitLevels, TwoLevelMatchesScan) {
  const auto w = zipf_weights(1000, 0.8);
  const std::size_t lattice = 50;
  const auto s = split_levels(w, 2, 5, 60.0, 100, false, lattice);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k < lattice; ++k) {
    const auto c = static_cast<std::int64_t>(k * 1000 / lattice);
    best = std::min(best, induced_split(w, {c}, 5, 60.0, 100).objective);
  }
  EXPECT_DOUBLE_EQ(s.objective, best);
}

TEST(SplitLevels, AllowEmptyIsNested) {
  testing::Rng rng(17);
  for (int n = 0; n < 6; ++n) {
    const auto w = zipf_weights(static_cast<std::size_t>(testing::uniform_int(rng, 200, 3000)),
                                testing::uniform_real(rng, 0.3, 1.4));
    const double M = testing::uniform_real(rng, 0.01, 0.6) * static_cast<double>(w.size());
    double prev = std::numeric_limits<double>::infinity();
    for (std::size_t L = 1; L <= 3; ++L) {
      const auto s = split_levels(w, L, 5, M, 100, true, 20);
      EXPECT_LE(s.objective, prev * (1 + 1e-12)) << "L=" << L;
      prev = s.objective;
    }
  }
}

TEST(SplitLevels, Errors) {
  const auto w = zipf_weights(10, 0.8);
  EXPECT_THROW(split_levels(w, 0, 5, 1.0, 10, false), ModelError);
  EXPECT_THROW(split_levels(w, 11, 5, 1.0, 10, false), ModelError);  // only 9 interior points
  EXPECT_NO_THROW(split_levels(w, 11, 5, 1.0, 10, true));
  EXPECT_THROW(split_levels(w, 2, 0, 1.0, 10, false), ModelError);
  EXPECT_THROW(split_levels(w, 2, 5, 1.0, 10, false, 0), ModelError);
}

TEST(DegreesFeasible, Constraints) {
  const auto spec = SystemSpec::multi_user(4, {{100, 3, 1}, {200, 1, 1}});
  EXPECT_TRUE(degrees_feasible(spec, {1, 1}, 1, 1.0));
  EXPECT_TRUE(degrees_feasible(spec, {1, 4}, 4, 1.75));
  EXPECT_FALSE(degrees_feasible(spec, {2, 1}, 4, 1.5));
  EXPECT_FALSE(degrees_feasible(spec, {1, 5}, 5, 5.0));  // above K
  EXPECT_FALSE(degrees_feasible(spec, {1}, 4, 4.0));
  EXPECT_FALSE(degrees_feasible(spec, {0, 1}, 4, 4.0));
}

TEST(OptimizeAccess, SingleDegreeOnly) {
  const auto spec = SystemSpec::multi_user(6, {{50, 4, 2}, {400, 1, 3}});
  const auto plan = optimize_access(spec, 20, 1, 3.0);
  EXPECT_EQ(plan.degrees, (std::vector<int>{1, 1}));
  EXPECT_DOUBLE_EQ(plan.rate, multiuser_rate(SystemSpec::multi_user(6, {{50, 4, 1}, {400, 1, 1}}), 20).total);
  EXPECT_THROW(optimize_access(spec, 20, 0, 1.0), ModelError);
  EXPECT_THROW(optimize_access(spec, 20, 3, 0.5), ModelError);
}

// Equivalence against an independent filter over all tuples.
TEST(OptimizeAccess, MatchesBruteForce) {
  testing::Rng rng(23);
  testing::MultiUserShape shape;
  shape.max_levels = 3;
  shape.max_caches = 9;
  shape.max_files = 5000;
  for (int n = 0; n < 80; ++n) {
    const auto spec = testing::random_multi_user(rng, shape);
    const auto L = spec.level_count();
    const int d_max = static_cast<int>(testing::uniform_int(rng, 1, 3));
    const double d_avg = testing::uniform_real(rng, 1.0, 3.0);
    const double M = testing::uniform_real(rng, 0.0, 1.1) * static_cast<double>(spec.total_files());
    double best = std::numeric_limits<double>::infinity();
    std::vector<int> d(L, 1);
    const int top = std::min(d_max, spec.caches());
    const auto levels = spec.levels();
    for (int code = 0; code < static_cast<int>(std::pow(top, static_cast<double>(L))); ++code) {
      int c = code;
      double users = 0.0, weighted = 0.0;
      std::vector<LevelSpec> input;
      for (std::size_t i = 0; i < L; ++i) {
        d[i] = 1 + c % top;
        c /= top;
        users += levels[i].users_per_cache;
        weighted += levels[i].users_per_cache * d[i];
        input.push_back({levels[i].files, levels[i].users_per_cache, d[i]});
      }
      if (weighted > d_avg * users * (1 + 1e-12)) continue;
      best = std::min(best, multiuser_rate(SystemSpec::multi_user(spec.caches(), input), M).total);
    }
    const auto plan = optimize_access(spec, M, d_max, d_avg);
    EXPECT_TRUE(degrees_feasible(spec, plan.degrees, d_max, d_avg));
    EXPECT_NEAR(plan.rate, best, 1e-9 * (1.0 + best)) << serialize_spec(spec, -1);
  }
}

// Three Zipf segments holding 4%, 13% and 83% of the files.
TEST(OptimizeAccess, PopularLevelsGetWiderAccessAtSmallMemory) {
  const auto w = zipf_weights(10000, 0.8);
  const auto split = induced_split(w, {400, 1700}, 75, 0.0, 7500);
  ASSERT_EQ(split.spec.level_count(), 3u);
  const auto small = optimize_access(split.spec, 100.0, 3, 2.0);
  EXPECT_EQ(small.degrees, (std::vector<int>{3, 1, 1}));
  const auto large = optimize_access(split.spec, 2000.0, 3, 2.0);
  EXPECT_EQ(large.degrees, (std::vector<int>{1, 2, 3}));
  for (double frac : {0.005, 0.01}) {
    const auto plan = optimize_access(split.spec, frac * 10000, 3, 2.0);
    EXPECT_GE(plan.degrees[0], plan.degrees[1]);
    EXPECT_GE(plan.degrees[1], plan.degrees[2]);
  }
}

}  // namespace
}  // namespace mlcache
