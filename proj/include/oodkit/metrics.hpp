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

#pragma once

#include <vector>

namespace oodkit {

// Confidence scores of in-distribution and OOD test rows.
//
// All metrics treat the OOD set as the positive class and use the negated
// confidence as the detection statistic: the lower the confidence, the more
// OOD the row looks.
struct ScoreSet {
  std::vector<double> in_scores;
  std::vector<double> out_scores;
};

// P(detection_out > detection_in) + 0.5 * P(tie), computed with midranks
// from one sort.
double Auroc(const ScoreSet& s);

// Average precision: sum over tie groups (in order of decreasing detection)
// of recall increment times precision at that group.
double Auprc(const ScoreSet& s);

// Smallest FPR over tie-group thresholds whose TPR >= n_percent / 100.
double FprAtTpr(const ScoreSet& s, double n_percent = 95.0);

struct CurvePoint {
  double x;
  double y;
};

// (fpr, tpr) from (0,0) to (1,1), one point per tie group.
std::vector<CurvePoint> RocPoints(const ScoreSet& s);

// (recall, precision), one point per tie group in sweep order.
std::vector<CurvePoint> PrPoints(const ScoreSet& s);

double TrapezoidArea(const std::vector<CurvePoint>& curve);

}  // namespace oodkit
