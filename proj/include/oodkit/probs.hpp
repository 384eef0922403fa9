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

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace oodkit {

using RowMatrixD =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// N x C classifier outputs plus the columns that count as in-distribution.
struct LogitSet {
  RowMatrixD logits;
  std::vector<std::uint32_t> class_ids;
  std::vector<std::size_t> in_indices;
  // Rows already hold probabilities; softmax is skipped.
  bool are_probabilities = false;

  std::size_t rows() const { return static_cast<std::size_t>(logits.rows()); }
  std::size_t classes() const { return static_cast<std::size_t>(logits.cols()); }
};

// Max-subtracted softmax. Outputs are clamped away from zero so every
// probability is strictly positive.
std::vector<double> Softmax(std::span<const double> row);

// In-place row-wise softmax of a matrix (same semantics as Softmax).
void SoftmaxRows(RowMatrixD& m);

// max_c p(y=c|x) over all C columns.
std::vector<double> ScoreMsp(const LogitSet& logits);

// sum over in_indices of p(y=c|x).
std::vector<double> ScoreInMass(const LogitSet& logits);

}  // namespace oodkit
