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

// Slow reference implementations used to check the library. None of them
// share code with the code under test.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <set>
#include <vector>

#include <Eigen/Dense>

#include "oodkit/embed_store.hpp"
#include "oodkit/metrics.hpp"

namespace oodkit::testing {

// P(out detection > in detection) + 0.5 P(tie), detection = -confidence,
// counted over all m*n pairs.
inline double BruteAuroc(const ScoreSet& s) {
  double wins = 0;
  for (double o : s.out_scores) {
    for (double i : s.in_scores) {
      if (-o > -i) {
        wins += 1;
      } else if (-o == -i) {
        wins += 0.5;
      }
    }
  }
  return wins / (static_cast<double>(s.out_scores.size()) * static_cast<double>(s.in_scores.size()));
}

struct Confusion {
  double tp = 0;
  double fp = 0;
};

// Flags everything with detection >= t as OOD.
inline Confusion CountAtThreshold(const ScoreSet& s, double t) {
  Confusion c;
  for (double o : s.out_scores) c.tp += (-o >= t) ? 1 : 0;
  for (double i : s.in_scores) c.fp += (-i >= t) ? 1 : 0;
  return c;
}

inline std::vector<double> DescendingThresholds(const ScoreSet& s) {
  std::set<double> t;
  for (double o : s.out_scores) t.insert(-o);
  for (double i : s.in_scores) t.insert(-i);
  return {t.rbegin(), t.rend()};
}

// Average precision: sum over every distinct threshold of
// (recall gain) * (precision at that threshold).
inline double BruteAuprc(const ScoreSet& s) {
  const double m = static_cast<double>(s.out_scores.size());
  double ap = 0;
  double prev_recall = 0;
  for (double t : DescendingThresholds(s)) {
    const Confusion c = CountAtThreshold(s, t);
    const double recall = c.tp / m;
    ap += (recall - prev_recall) * (c.tp / (c.tp + c.fp));
    prev_recall = recall;
  }
  return ap;
}

// Smallest FPR over every threshold (including "flag nothing") whose TPR
// reaches n_percent.
inline double BruteFprAtTpr(const ScoreSet& s, double n_percent) {
  const double m = static_cast<double>(s.out_scores.size());
  const double n = static_cast<double>(s.in_scores.size());
  std::vector<double> thresholds = DescendingThresholds(s);
  thresholds.push_back(std::numeric_limits<double>::infinity());
  double best = 1.0;
  for (double t : thresholds) {
    const Confusion c = CountAtThreshold(s, t);
    if (c.tp / m >= n_percent / 100.0) best = std::min(best, c.fp / n);
  }
  return best;
}

inline double NormalCdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

struct NaiveGaussianFit {
  std::map<std::uint32_t, Eigen::VectorXd> means;
  Eigen::MatrixXd covariance;
};

// Double loops straight from the definitions: per-class means, then the
// pooled 1/N scatter.
inline NaiveGaussianFit NaiveFit(const EmbeddingSet& set) {
  const std::size_t d = set.dim();
  std::map<std::uint32_t, Eigen::VectorXd> sums;
  std::map<std::uint32_t, double> counts;
  for (std::size_t r = 0; r < set.rows(); ++r) {
    const std::uint32_t y = (*set.labels)[r];
    if (!sums.count(y)) sums[y] = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d));
    for (std::size_t j = 0; j < d; ++j) {
      sums[y](static_cast<Eigen::Index>(j)) += static_cast<double>(set.data(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)));
    }
    counts[y] += 1;
  }
  NaiveGaussianFit fit;
  for (auto& [y, s] : sums) fit.means[y] = s / counts[y];
  fit.covariance = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  for (std::size_t r = 0; r < set.rows(); ++r) {
    const Eigen::VectorXd& mu = fit.means[(*set.labels)[r]];
    for (std::size_t a = 0; a < d; ++a) {
      for (std::size_t b = 0; b < d; ++b) {
        const auto ia = static_cast<Eigen::Index>(a);
        const auto ib = static_cast<Eigen::Index>(b);
        const auto ir = static_cast<Eigen::Index>(r);
        fit.covariance(ia, ib) += (set.data(ir, ia) - mu(ia)) * (set.data(ir, ib) - mu(ib));
      }
    }
  }
  fit.covariance /= static_cast<double>(set.rows());
  return fit;
}

// -min_c 0.5 (x - mu_c)^T Sigma^-1 (x - mu_c) via an explicit LU inverse.
inline double NaiveMahaScore(const NaiveGaussianFit& fit, const Eigen::VectorXd& x) {
  const Eigen::MatrixXd inv = fit.covariance.fullPivLu().inverse();
  double best = std::numeric_limits<double>::infinity();
  for (const auto& [y, mu] : fit.means) {
    const Eigen::VectorXd d = x - mu;
    best = std::min(best, 0.5 * d.dot(inv * d));
  }
  return -best;
}

}  // namespace oodkit::testing
