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

#include "oodkit/probs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "oodkit/error.hpp"

namespace oodkit {

namespace {

void SoftmaxInPlace(std::span<double> row) {
  double max = -std::numeric_limits<double>::infinity();
  for (double v : row) {
    if (!std::isfinite(v)) {
      throw Error(ErrorKind::kNonFinite, "softmax: non-finite input");
    }
    max = std::max(max, v);
  }
  double sum = 0;
  for (double& v : row) {
    v = std::exp(v - max);
    sum += v;
  }
  for (double& v : row) {
    v = std::max(v / sum, std::numeric_limits<double>::min());
  }
}

// Row-wise probabilities: softmax of the logits, or validated copies when the
// producer already exported probabilities.
RowMatrixD Probabilities(const LogitSet& set) {
  if (set.logits.cols() == 0) {
    throw Error(ErrorKind::kInvalidArgument, "logit set has no columns");
  }
  RowMatrixD p = set.logits;
  if (!set.are_probabilities) {
    SoftmaxRows(p);
    return p;
  }
  for (Eigen::Index r = 0; r < p.rows(); ++r) {
    double sum = 0;
    for (Eigen::Index c = 0; c < p.cols(); ++c) {
      const double v = p(r, c);
      if (!std::isfinite(v) || v < 0) {
        throw Error(ErrorKind::kInvalidArgument,
                    "probability input at row " + std::to_string(r) +
                        " is negative or non-finite");
      }
      sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-4) {
      throw Error(ErrorKind::kInvalidArgument,
                  "probability row " + std::to_string(r) + " sums to " +
                      std::to_string(sum) + ", not 1");
    }
  }
  return p;
}

}  // namespace

std::vector<double> Softmax(std::span<const double> row) {
  std::vector<double> out(row.begin(), row.end());
  SoftmaxInPlace(out);
  return out;
}

void SoftmaxRows(RowMatrixD& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    SoftmaxInPlace(std::span<double>(m.row(r).data(), static_cast<std::size_t>(m.cols())));
  }
}

std::vector<double> ScoreMsp(const LogitSet& logits) {
  if (logits.rows() == 0) return {};
  const RowMatrixD p = Probabilities(logits);
  std::vector<double> scores(logits.rows());
  for (Eigen::Index r = 0; r < p.rows(); ++r) scores[r] = p.row(r).maxCoeff();
  return scores;
}

std::vector<double> ScoreInMass(const LogitSet& logits) {
  if (logits.in_indices.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "score_in_mass: in_indices is empty");
  }
  std::vector<std::size_t> sorted = logits.in_indices;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw Error(ErrorKind::kInvalidArgument, "score_in_mass: duplicate in-index");
  }
  for (std::size_t idx : logits.in_indices) {
    if (idx >= logits.classes()) {
      throw Error(ErrorKind::kInvalidArgument,
                  "score_in_mass: in-index " + std::to_string(idx) + " out of range for " +
                      std::to_string(logits.classes()) + " classes");
    }
  }
  if (logits.rows() == 0) return {};
  const RowMatrixD p = Probabilities(logits);
  std::vector<double> scores(logits.rows());
  for (Eigen::Index r = 0; r < p.rows(); ++r) {
    double mass = 0;
    for (std::size_t idx : logits.in_indices) mass += p(r, static_cast<Eigen::Index>(idx));
    scores[r] = mass;
  }
  return scores;
}

}  // namespace oodkit
