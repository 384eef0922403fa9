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
#include <vector>

#include <Eigen/Core>

#include "oodkit/embed_store.hpp"
#include "oodkit/probs.hpp"

namespace oodkit {

struct PcaModel {
  Eigen::RowVectorXd mean;
  RowMatrixD components;  // C x D, orthonormal rows
  // Per-component variance (1/(N-1)) and its share of the total.
  std::vector<double> explained_variance;
  std::vector<double> explained_ratio;
};

// Principal axes of the row-concatenation of `sets`. Each axis is signed so
// that its largest-magnitude loading is positive.
PcaModel FitPca(const std::vector<const EmbeddingSet*>& sets, std::size_t components);

// (x - mean) projected onto the components: N x C.
RowMatrixD ProjectPca(const PcaModel& model, const EmbeddingSet& set);

}  // namespace oodkit
