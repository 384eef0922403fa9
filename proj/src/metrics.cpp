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

#include <algorithm>
#include <cmath>
#include <string>

#include "oodkit/error.hpp"

namespace oodkit {

namespace {

void CheckScores(const ScoreSet& s, const char* metric) {
  if (s.in_scores.empty() || s.out_scores.empty()) {
    throw Error(ErrorKind::kInvalidArgument,
                std::string(metric) + ": both in- and out-distribution score arrays must be non-empty");
  }
  for (const auto* v : {&s.in_scores, &s.out_scores}) {
    for (double x : *v) {
      if (!std::isfinite(x)) {
        throw Error(ErrorKind::kNonFinite, std::string(metric) + ": non-finite score");
      }
    }
  }
}

// Cumulative (positives, negatives) counts swept from the most OOD-looking
// (lowest confidence) tie group to the least.
struct TieGroup {
  double tp;
  double fp;
};

std::vector<TieGroup> SweepTieGroups(const ScoreSet& s) {
  struct Item {
    double confidence;
    bool positive;
  };
  std::vector<Item> items;
  items.reserve(s.in_scores.size() + s.out_scores.size());
  for (double v : s.out_scores) items.push_back({v, true});
  for (double v : s.in_scores) items.push_back({v, false});
  std::sort(items.begin(), items.end(),
            [](const Item& a, const Item& b) { return a.confidence < b.confidence; });

  std::vector<TieGroup> groups;
  double tp = 0, fp = 0;
  for (std::size_t i = 0; i < items.size();) {
    std::size_t j = i;
    while (j < items.size() && items[j].confidence == items[i].confidence) {
      (items[j].positive ? tp : fp) += 1;
      ++j;
    }
    groups.push_back({tp, fp});
    i = j;
  }
  return groups;
}

}  // namespace

double Auroc(const ScoreSet& s) {
  CheckScores(s, "auroc");
  const double m = static_cast<double>(s.out_scores.size());
  const double n = static_cast<double>(s.in_scores.size());

  struct Item {
    double detection;
    bool positive;
  };
  std::vector<Item> items;
  items.reserve(s.in_scores.size() + s.out_scores.size());
  for (double v : s.out_scores) items.push_back({-v, true});
  for (double v : s.in_scores) items.push_back({-v, false});
  std::sort(items.begin(), items.end(),
            [](const Item& a, const Item& b) { return a.detection < b.detection; });

  // Ranks are 1-based; a tie group spanning [i, j) shares rank (i + 1 + j) / 2.
  // Twice the rank sum stays an exact integer in double.
  double twice_positive_rank_sum = 0;
  for (std::size_t i = 0; i < items.size();) {
    std::size_t j = i;
    double positives = 0;
    while (j < items.size() && items[j].detection == items[i].detection) {
      positives += items[j].positive ? 1 : 0;
      ++j;
    }
    twice_positive_rank_sum += positives * static_cast<double>(i + 1 + j);
    i = j;
  }
  const double twice_u = twice_positive_rank_sum - m * (m + 1);
  return twice_u / (2 * m * n);
}

double Auprc(const ScoreSet& s) {
  CheckScores(s, "auprc");
  const double m = static_cast<double>(s.out_scores.size());
  double ap = 0;
  double prev_tp = 0;
  for (const TieGroup& g : SweepTieGroups(s)) {
    if (g.tp > prev_tp) {
      ap += (g.tp - prev_tp) / m * (g.tp / (g.tp + g.fp));
      prev_tp = g.tp;
    }
  }
  return ap;
}

double FprAtTpr(const ScoreSet& s, double n_percent) {
  CheckScores(s, "fpr_at_tpr");
  if (!(n_percent > 0 && n_percent <= 100)) {
    throw Error(ErrorKind::kInvalidArgument,
                "fpr_at_tpr: n_percent must be in (0, 100], got " + std::to_string(n_percent));
  }
  const double m = static_cast<double>(s.out_scores.size());
  const double n = static_cast<double>(s.in_scores.size());
  // FPR only grows along the sweep, so the first group reaching the target
  // recall is the minimum.
  for (const TieGroup& g : SweepTieGroups(s)) {
    if (g.tp * 100 >= n_percent * m) return g.fp / n;
  }
  return 1.0;
}

std::vector<CurvePoint> RocPoints(const ScoreSet& s) {
  CheckScores(s, "roc_points");
  const double m = static_cast<double>(s.out_scores.size());
  const double n = static_cast<double>(s.in_scores.size());
  std::vector<CurvePoint> curve{{0.0, 0.0}};
  for (const TieGroup& g : SweepTieGroups(s)) curve.push_back({g.fp / n, g.tp / m});
  return curve;
}

std::vector<CurvePoint> PrPoints(const ScoreSet& s) {
  CheckScores(s, "pr_points");
  const double m = static_cast<double>(s.out_scores.size());
  std::vector<CurvePoint> curve;
  for (const TieGroup& g : SweepTieGroups(s)) {
    curve.push_back({g.tp / m, g.tp + g.fp > 0 ? g.tp / (g.tp + g.fp) : 1.0});
  }
  return curve;
}

double TrapezoidArea(const std::vector<CurvePoint>& curve) {
  double area = 0;
  for (std::size_t i = 1; i < curve.size(); ++i) {
    area += (curve[i].x - curve[i - 1].x) * (curve[i].y + curve[i - 1].y) / 2;
  }
  return area;
}

}  // namespace oodkit
