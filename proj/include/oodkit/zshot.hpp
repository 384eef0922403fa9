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

#include <string>
#include <vector>

#include "oodkit/embed_store.hpp"
#include "oodkit/probs.hpp"

namespace oodkit {

// Text embeddings of the two candidate-label groups.
struct CandidateLabels {
  RowMatrixD in_text;   // K x E
  RowMatrixD out_text;  // O x E, O may be 0
  std::vector<std::string> in_names;
  std::vector<std::string> out_names;
  bool normalize = true;
  double temperature = 0.01;

  std::size_t k() const { return static_cast<std::size_t>(in_text.rows()); }
  std::size_t o() const { return static_cast<std::size_t>(out_text.rows()); }

  // Builds from embedding sets (label strings taken from class_names when
  // they cover every row). Rows are L2-normalized up front when `normalize`.
  static CandidateLabels FromSets(const EmbeddingSet& in_labels, const EmbeddingSet* out_labels,
                                  bool normalize, double temperature);
};

// Row i, column j: <image_i, text_j> / temperature (both unit-normalized
// first when labels.normalize). Columns: in-group, then out-group;
// in_indices = [0, K).
LogitSet SimilarityLogits(const EmbeddingSet& images, const CandidateLabels& labels);

// p(in|x) over the softmax of all K+O logits. With no out-group labels the
// in-mass is identically 1, so this falls back to MSP over the in-group.
std::vector<double> ScoreZshot(const EmbeddingSet& images, const CandidateLabels& labels);

inline bool ZshotUsesMspFallback(const CandidateLabels& labels) { return labels.o() == 0; }

}  // namespace oodkit
