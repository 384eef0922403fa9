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

#include "oodkit/analysis.hpp"

#include <random>

#include <gtest/gtest.h>

#include "oodkit/error.hpp"
#include "support/fixtures.hpp"

namespace oodkit {
namespace {

TEST(Pca, PointsOnALine) {
  std::mt19937_64 rng(1);
  std::normal_distribution<float> g;
  EmbeddingSet s;
  s.data.resize(50, 3);
  for (Eigen::Index r = 0; r < 50; ++r) {
    const float t = g(rng);
    s.data.row(r) << 1 + t, 2 - 2 * t, 3 * t;
  }
  const PcaModel m = FitPca({&s}, 2);
  EXPECT_NEAR(m.explained_ratio[0], 1.0, 1e-6);
  const RowMatrixD p = ProjectPca(m, s);
  for (Eigen::Index r = 0; r < p.rows(); ++r) EXPECT_NEAR(p(r, 1), 0.0, 1e-4);
  // Largest-magnitude loading is positive.
  Eigen::Index arg;
  m.components.row(0).cwiseAbs().maxCoeff(&arg);
  EXPECT_GT(m.components(0, arg), 0.0);
}

// A single N=2000 draw lands outside 10% a few percent of the time, so the
// gap is averaged over independent draws.
TEST(Pca, IsotropicVariancesAreClose) {
  std::mt19937_64 rng(2);
  double gap = 0;
  for (int draw = 0; draw < 20; ++draw) {
    const EmbeddingSet s = testing::RandomSet(rng, 2000, 2, 0);
    const PcaModel m = FitPca({&s}, 2);
    EXPECT_NEAR(m.explained_variance[0], 1.0, 0.2);
    gap += (m.explained_variance[0] - m.explained_variance[1]) / m.explained_variance[0] / 20;
  }
  EXPECT_LT(gap, 0.1);
}

TEST(Pca, MeanProjectsToOrigin) {
  std::mt19937_64 rng(3);
  const EmbeddingSet a = testing::RandomSet(rng, 30, 4, 0);
  const EmbeddingSet b = testing::RandomSet(rng, 20, 4, 0);
  const PcaModel m = FitPca({&a, &b}, 2);
  EmbeddingSet mean;
  mean.data = m.mean.cast<float>();
  const RowMatrixD p = ProjectPca(m, mean);
  EXPECT_NEAR(p.norm(), 0.0, 1e-6);
  EXPECT_NEAR(m.components.row(0).dot(m.components.row(1)), 0.0, 1e-9);
}

TEST(Pca, Errors) {
  std::mt19937_64 rng(4);
  const EmbeddingSet s = testing::RandomSet(rng, 10, 1, 0);
  EXPECT_THROW(FitPca({&s}, 2), Error);
  const EmbeddingSet one = testing::RandomSet(rng, 1, 3, 0);
  EXPECT_THROW(FitPca({&one}, 2), Error);
}

}  // namespace
}  // namespace oodkit
