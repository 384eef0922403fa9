/*
 * Copyright 2026 The oodkit Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "oodkit/metrics.hpp"

#include <cmath>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "oodkit/error.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

namespace oodkit {
namespace {

using testing::BruteAuprc;
using testing::BruteAuroc;
using testing::BruteFprAtTpr;

TEST(Auroc, Examples) {
  EXPECT_EQ(Auroc({{0.8, 0.9}, {0.1, 0.2}}), 1.0);
  EXPECT_EQ(Auroc({{0.4, 0.4}, {0.4, 0.4}}), 0.5);
  // Low confidence marks OOD: out=0.5 beats in=0.7 and ties at 0.7.
  EXPECT_EQ(Auroc({{0.5, 0.7}, {0.3, 0.7}}), 0.625);
  EXPECT_EQ(Auroc({{0.3, 0.7}, {0.5, 0.7}}), 0.375);
}

TEST(Auroc, EmptyOrNonFiniteSideThrows) {
  EXPECT_THROW(Auroc({{}, {1.0}}), Error);
  EXPECT_THROW(Auroc({{1.0}, {}}), Error);
  EXPECT_THROW(Auroc({{1.0}, {NAN}}), Error);
}

TEST(Auprc, Examples) {
  EXPECT_EQ(Auprc({{0.8, 0.9}, {0.1, 0.2}}), 1.0);
  EXPECT_DOUBLE_EQ(Auprc({{1, 1, 1}, {1, 1}}), 2.0 / 5.0);
  EXPECT_DOUBLE_EQ(Auprc({{0.5, 0.7}, {0.3, 0.7}}), 0.75);
  EXPECT_DOUBLE_EQ(Auprc({{0.3, 0.7}, {0.5, 0.7}}), 0.5);
}

TEST(FprAtTpr, Examples) {
  EXPECT_EQ(FprAtTpr({{0.8, 0.9}, {0.1, 0.2}}), 0.0);
  std::vector<double> hundred(100);
  std::iota(hundred.begin(), hundred.end(), 1.0);
  EXPECT_DOUBLE_EQ(FprAtTpr({hundred, hundred}), 0.95);
  EXPECT_EQ(FprAtTpr({{2, 2, 2}, {2, 2, 2}}), 1.0);
  EXPECT_THROW(FprAtTpr({{1}, {1}}, 0.0), Error);
  EXPECT_THROW(FprAtTpr({{1}, {1}}, 101.0), Error);
  EXPECT_EQ(FprAtTpr({{0.1, 0.9}, {0.2, 0.3}}, 100.0), 0.5);
}

TEST(RocPoints, Examples) {
  const auto sep = RocPoints({{0.9}, {0.1}});
  ASSERT_EQ(sep.size(), 3u);
  EXPECT_EQ(sep[0].x, 0.0);
  EXPECT_EQ(sep[0].y, 0.0);
  EXPECT_EQ(sep[1].x, 0.0);
  EXPECT_EQ(sep[1].y, 1.0);
  EXPECT_EQ(sep[2].x, 1.0);
  EXPECT_EQ(sep[2].y, 1.0);
  const auto ties = RocPoints({{1, 1}, {1}});
  ASSERT_EQ(ties.size(), 2u);
  EXPECT_EQ(ties[1].x, 1.0);
  EXPECT_EQ(ties[1].y, 1.0);
  EXPECT_NEAR(TrapezoidArea(RocPoints({{0.5, 0.7}, {0.3, 0.7}})), 0.625, 1e-12);
}

TEST(MetricsProperty, MatchBruteForce) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    const ScoreSet s = testing::RandomScoreSet(rng, 60);
    ASSERT_NEAR(Auroc(s), BruteAuroc(s), 1e-12);
    ASSERT_NEAR(Auprc(s), BruteAuprc(s), 1e-12);
    for (double n : {50.0, 95.0, 100.0}) ASSERT_NEAR(FprAtTpr(s, n), BruteFprAtTpr(s, n), 1e-12);
  }
}

TEST(MetricsProperty, TrapezoidOverRocEqualsAuroc) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 200; ++trial) {
    const ScoreSet s = testing::RandomScoreSet(rng, 80);
    const auto curve = RocPoints(s);
    for (std::size_t i = 1; i < curve.size(); ++i) {
      ASSERT_GE(curve[i].x, curve[i - 1].x);
      ASSERT_GE(curve[i].y, curve[i - 1].y);
    }
    EXPECT_EQ(curve.back().x, 1.0);
    EXPECT_EQ(curve.back().y, 1.0);
    EXPECT_NEAR(TrapezoidArea(curve), Auroc(s), 1e-9);
  }
}

TEST(MetricsProperty, MonotoneTransformInvariance) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 100; ++trial) {
    const ScoreSet s = testing::RandomScoreSet(rng, 50);
    ScoreSet t = s;
    for (auto* v : {&t.in_scores, &t.out_scores}) {
      for (double& x : *v) x = std::exp(3 * x) + 2;
    }
    EXPECT_EQ(Auroc(s), Auroc(t));
    EXPECT_EQ(Auprc(s), Auprc(t));
    EXPECT_EQ(FprAtTpr(s), FprAtTpr(t));
  }
}

TEST(MetricsProperty, LabelSwapComplementsAuroc) {
  std::mt19937_64 rng(14);
  for (int trial = 0; trial < 100; ++trial) {
    const ScoreSet s = testing::RandomScoreSet(rng, 50);
    EXPECT_NEAR(Auroc({s.out_scores, s.in_scores}), 1.0 - Auroc(s), 1e-12);
  }
}

TEST(MetricsProperty, SameDistributionNearHalf) {
  std::mt19937_64 rng(15);
  std::normal_distribution<double> g;
  ScoreSet s;
  for (int i = 0; i < 2000; ++i) {
    s.in_scores.push_back(g(rng));
    s.out_scores.push_back(g(rng));
  }
  EXPECT_NEAR(Auroc(s), 0.5, 0.05);
}

TEST(PrPoints, EndsAtFullRecall) {
  const auto pr = PrPoints({{0.5, 0.7}, {0.3, 0.7}});
  ASSERT_EQ(pr.size(), 3u);
  EXPECT_EQ(pr.back().x, 1.0);
  EXPECT_EQ(pr.back().y, 0.5);
}

}  // namespace
}  // namespace oodkit
