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

#include "oodkit/oe_head.hpp"

#include <cmath>
#include <map>
#include <random>

#include <gtest/gtest.h>

#include "oodkit/error.hpp"
#include "oodkit/metrics.hpp"
#include "support/fixtures.hpp"

namespace oodkit {
namespace {

using testing::MakeSet;

// Central-difference gradient of HeadLoss.
std::vector<double> NumericGradient(OeHead head, const EmbeddingSet& batch, double h) {
  std::vector<double> p = FlattenParameters(head);
  std::vector<double> g(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double orig = p[i];
    p[i] = orig + h;
    SetParameters(head, p);
    const double up = HeadLoss(head, batch);
    p[i] = orig - h;
    SetParameters(head, p);
    const double down = HeadLoss(head, batch);
    p[i] = orig;
    g[i] = (up - down) / (2 * h);
  }
  return g;
}

double MaxRelativeError(const std::vector<double>& a, const std::vector<double>& b) {
  double worst = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    worst = std::max(worst, std::abs(a[i] - b[i]) / std::max(1e-6, std::abs(a[i]) + std::abs(b[i])));
  }
  return worst;
}

TEST(OversamplingFactor, Examples) {
  EXPECT_EQ(OversamplingFactor(50000, 100, 100, 10), 50.0);
  EXPECT_EQ(OversamplingFactor(40, 40, 3, 3), 1.0);
  EXPECT_EQ(OversamplingFactor(1000, 10, 10, 1), 10.0);
  EXPECT_THROW(OversamplingFactor(10, 0, 1, 1), Error);
  EXPECT_THROW(OversamplingFactor(10, 1, 0, 1), Error);
}

TEST(OversampleEpoch, UnitFactorIsOnePass) {
  std::mt19937_64 rng(1);
  const std::vector<std::uint32_t> labels{0, 0, 1, 1, 1};
  const auto epoch = OversampleEpoch(5, labels, 1.0, rng);
  std::vector<int> seen(10, 0);
  for (std::size_t r : epoch) ++seen[r];
  for (int c : seen) EXPECT_EQ(c, 1);
}

TEST(OversampleEpoch, PerClassCountsWithinOneCopy) {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 100; ++t) {
    const std::size_t n_in = 1 + rng() % 50;
    const std::size_t n_oe = 1 + rng() % 20;
    std::vector<std::uint32_t> labels(n_oe);
    for (auto& l : labels) l = static_cast<std::uint32_t>(rng() % 4);
    const double gamma = 0.1 + static_cast<double>(rng() % 1000) / 97.0;
    const auto epoch = OversampleEpoch(n_in, labels, gamma, rng);
    std::map<std::uint32_t, double> got, raw;
    std::vector<int> row_count(n_oe, 0);
    for (std::size_t r : epoch) {
      if (r < n_in) continue;
      ++row_count[r - n_in];
      got[labels[r - n_in]] += 1;
    }
    for (std::uint32_t l : labels) raw[l] += 1;
    for (const auto& [cls, count] : raw) EXPECT_LE(std::abs(got[cls] - gamma * count), 1.0);
    for (int c : row_count) {
      EXPECT_GE(c, static_cast<int>(std::floor(gamma)));
      EXPECT_LE(c, static_cast<int>(std::floor(gamma)) + 1);
    }
  }
}

TEST(ScoreOe, ZeroHeadIsUniform) {
  OeHead head = MakeHead(HeadKind::kLinear, 4, 0, {9, 1, OutlierLabelMode::kLabeledOutliers}, 0);
  SetParameters(head, std::vector<double>(FlattenParameters(head).size(), 0.0));
  for (double s : ScoreOe(head, MakeSet({{1, 2, 3, 4}, {-1, 0, 5, 2}}))) EXPECT_NEAR(s, 0.9, 1e-12);
  EXPECT_THROW(ScoreOe(head, MakeSet({{1, 2}})), Error);
}

TEST(HeadGradient, MatchesFiniteDifferences) {
  std::mt19937_64 rng(3);
  for (HeadKind kind : {HeadKind::kLinear, HeadKind::kMlpOneHidden}) {
    for (int t = 0; t < 5; ++t) {
      OeHead head = MakeHead(kind, 3, 6, {2, 1, OutlierLabelMode::kLabeledOutliers}, rng());
      head.config.l2_penalty = 0.5;
      EmbeddingSet batch = testing::RandomSet(rng, 5, 3, 0);
      batch.labels = std::vector<std::uint32_t>{0, 1, 2, 0, 2};
      const auto analytic = HeadGradient(head, batch);
      const auto numeric = NumericGradient(head, batch, 1e-4);
      EXPECT_LT(MaxRelativeError(analytic, numeric), 1e-3);
    }
  }
}

TEST(HeadGradient, ZeroInputBiasGradientIsSoftmaxMinusTargets) {
  OeHead head = MakeHead(HeadKind::kLinear, 3, 0, {2, 1, OutlierLabelMode::kLabeledOutliers}, 0);
  head.config.l2_penalty = 0;
  SetParameters(head, std::vector<double>(FlattenParameters(head).size(), 0.0));
  EmbeddingSet batch = MakeSet({{0, 0, 0}, {0, 0, 0}, {0, 0, 0}, {0, 0, 0}}, std::vector<std::uint32_t>{0, 0, 1, 2});
  const auto g = HeadGradient(head, batch);
  // Weights (3x3) come first, then the 3 biases.
  for (std::size_t i = 0; i < 9; ++i) EXPECT_EQ(g[i], 0.0);
  EXPECT_NEAR(g[9], 1.0 / 3 - 2.0 / 4, 1e-12);
  EXPECT_NEAR(g[10], 1.0 / 3 - 1.0 / 4, 1e-12);
  EXPECT_NEAR(g[11], 1.0 / 3 - 1.0 / 4, 1e-12);
}

TEST(HeadGradient, L2TermIsLambdaTimesWeights) {
  std::mt19937_64 rng(4);
  for (HeadKind kind : {HeadKind::kLinear, HeadKind::kMlpOneHidden}) {
    OeHead head = MakeHead(kind, 3, 4, {2, 2, OutlierLabelMode::kLabeledOutliers}, 9);
    EmbeddingSet batch = testing::RandomSet(rng, 6, 3, 0);
    batch.labels = std::vector<std::uint32_t>{0, 1, 2, 3, 0, 1};
    head.config.l2_penalty = 0;
    const auto base = HeadGradient(head, batch);
    head.config.l2_penalty = 2.5;
    const auto with = HeadGradient(head, batch);
    std::size_t i = 0;
    for (const DenseLayer& layer : head.layers) {
      for (Eigen::Index r = 0; r < layer.weights.rows(); ++r) {
        for (Eigen::Index c = 0; c < layer.weights.cols(); ++c, ++i) {
          EXPECT_NEAR(with[i] - base[i], 2.5 * layer.weights(r, c), 1e-12);
        }
      }
      for (Eigen::Index r = 0; r < layer.bias.size(); ++r, ++i) EXPECT_EQ(with[i], base[i]);
    }
  }
}

struct Blobs {
  EmbeddingSet in_train, oe_train, in_test, out_test;
};

Blobs SeparableBlobs(std::uint64_t seed) {
  testing::ClusterWorld world(2, 2, 6.0f, 0.7f, seed);
  Blobs b;
  b.in_train = world.Sample({0}, 50, seed + 1);
  b.oe_train = world.Sample({1}, 50, seed + 2);
  b.in_test = world.Sample({0}, 100, seed + 3);
  b.out_test = world.Sample({1}, 100, seed + 4);
  return b;
}

TEST(TrainOeHead, SeparableBlobs) {
  const Blobs b = SeparableBlobs(10);
  OeConfig config = OeConfig::LinearDefaults();
  config.seed = 5;
  const OeHead head = TrainOeHead(b.in_train, b.oe_train, config);
  EXPECT_EQ(head.output_width(), 2u);
  EXPECT_EQ(head.training_log.size(), config.max_steps);
  for (double l : head.training_log) EXPECT_TRUE(std::isfinite(l));
  EXPECT_LT(head.training_log.back(), head.training_log.front());
  for (double s : ScoreOe(head, b.in_test)) EXPECT_GT(s, 0.5);
  for (double s : ScoreOe(head, b.out_test)) EXPECT_LT(s, 0.5);
  const EmbeddingSet seen = MakeSet({{b.oe_train.data(0, 0), b.oe_train.data(0, 1)}});
  EXPECT_LT(ScoreOe(head, seen)[0], 0.5);
}

TEST(TrainOeHead, DeterministicForSeed) {
  const Blobs b = SeparableBlobs(11);
  OeConfig config = OeConfig::MlpDefaults();
  config.hidden_units = 8;
  config.max_steps = 50;
  config.seed = 3;
  const OeHead a = TrainOeHead(b.in_train, b.oe_train, config);
  const OeHead c = TrainOeHead(b.in_train, b.oe_train, config);
  EXPECT_EQ(FlattenParameters(a), FlattenParameters(c));
  EXPECT_EQ(a.training_log, c.training_log);
  config.seed = 4;
  EXPECT_NE(FlattenParameters(a), FlattenParameters(TrainOeHead(b.in_train, b.oe_train, config)));
}

TEST(TrainOeHead, CollapsedModeHasWidthKPlusOne) {
  testing::ClusterWorld world(4, 5, 5.0f, 0.5f, 12);
  const EmbeddingSet in = world.Sample({0, 1}, 10, 1);
  const EmbeddingSet oe = world.Sample({2, 3, 4}, 3, 2);
  OeConfig config;
  config.mode = OutlierLabelMode::kCollapsedSingleClass;
  config.max_steps = 20;
  const OeHead head = TrainOeHead(in, oe, config);
  EXPECT_EQ(head.output_width(), 3u);
  EXPECT_EQ(head.partition.o_out, 3u);
  config.mode = OutlierLabelMode::kLabeledOutliers;
  EXPECT_EQ(TrainOeHead(in, oe, config).output_width(), 5u);
}

TEST(TrainOeHead, ProbabilitiesSumToOne) {
  testing::ClusterWorld world(3, 4, 4.0f, 1.0f, 13);
  const EmbeddingSet in = world.Sample({0, 1}, 10, 1);
  const EmbeddingSet oe = world.Sample({2, 3}, 2, 2);
  OeConfig config = OeConfig::MlpDefaults();
  config.hidden_units = 5;
  config.max_steps = 30;
  const OeHead head = TrainOeHead(in, oe, config);
  const EmbeddingSet q = world.Sample({0, 1, 2, 3}, 5, 3);
  const RowMatrixD p = HeadProbabilities(head, q);
  const auto s = ScoreOe(head, q);
  for (Eigen::Index r = 0; r < p.rows(); ++r) {
    EXPECT_NEAR(p.row(r).sum(), 1.0, 1e-6);
    EXPECT_NEAR(s[static_cast<std::size_t>(r)] + p.row(r).tail(2).sum(), 1.0, 1e-6);
    EXPECT_GT(s[static_cast<std::size_t>(r)], 0.0);
    EXPECT_LT(s[static_cast<std::size_t>(r)], 1.0);
  }
}

TEST(TrainOeHead, ValidationSelectsBestCheckpoint) {
  const Blobs b = SeparableBlobs(14);
  OeConfig config;
  config.max_steps = 300;
  config.eval_every = 50;
  OeValidation val{b.in_test, b.out_test};
  const OeHead head = TrainOeHead(b.in_train, b.oe_train, config, &val);
  EXPECT_EQ(head.selected_step % 50, 0u);
  EXPECT_GE(head.selected_step, 50u);
  EXPECT_EQ(head.selected_auroc, Auroc({ScoreOe(head, b.in_test), ScoreOe(head, b.out_test)}));
  EXPECT_EQ(head.training_log.size(), 300u);
}

TEST(TrainOeHead, Errors) {
  const Blobs b = SeparableBlobs(15);
  OeConfig config;
  config.max_steps = 5;
  EXPECT_THROW(TrainOeHead(b.in_train, MakeSet({{1, 2, 3}}, std::vector<std::uint32_t>{0}), config), Error);
  EXPECT_THROW(TrainOeHead(b.in_train, MakeSet({{1, 2}}), config), Error);
  // The first Adam step moves every weight by ~1e300; the second loss overflows.
  config.learning_rate = 1e300;
  try {
    TrainOeHead(b.in_train, b.oe_train, config);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kNumerical);
    EXPECT_NE(std::string(e.what()).find("step 2"), std::string::npos) << e.what();
  }
}

TEST(SubsampleShots, KeepsExactlyShotsPerClass) {
  testing::ClusterWorld world(2, 3, 3.0f, 1.0f, 16);
  const EmbeddingSet oe = world.Sample({0, 1, 2}, 25, 1);
  const EmbeddingSet ten = SubsampleShots(oe, 10, 7);
  for (const auto& [cls, rows] : SplitByLabel(ten)) EXPECT_EQ(rows.size(), 10u);
  EXPECT_EQ(ten.rows(), 30u);
  EXPECT_TRUE(BitEqual(ten, SubsampleShots(oe, 10, 7)));
  EXPECT_FALSE(BitEqual(ten, SubsampleShots(oe, 10, 8)));
  EXPECT_EQ(SubsampleShots(oe, 100, 1).rows(), 75u);
}

TEST(HeadFile, RoundTrip) {
  testing::TempDir dir;
  const Blobs b = SeparableBlobs(17);
  OeConfig config = OeConfig::MlpDefaults();
  config.hidden_units = 4;
  config.max_steps = 10;
  const OeHead head = TrainOeHead(b.in_train, b.oe_train, config);
  SaveHead(head, dir / "h.hed");
  const OeHead back = LoadHead(dir / "h.hed");
  EXPECT_EQ(FlattenParameters(back), FlattenParameters(head));
  EXPECT_EQ(back.training_log, head.training_log);
  EXPECT_EQ(back.partition.output_width(), head.partition.output_width());
  EXPECT_EQ(back.in_class_ids, head.in_class_ids);
  EXPECT_EQ(back.oversampling, head.oversampling);
  EXPECT_EQ(ScoreOe(back, b.in_test), ScoreOe(head, b.in_test));
}

}  // namespace
}  // namespace oodkit
