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

#include "oodkit/zshot.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "oodkit/error.hpp"

namespace oodkit {

namespace {

void NormalizeRows(RowMatrixD& m, const char* what) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    const double norm = m.row(r).norm();
    if (!(norm > 0)) {
      throw Error(ErrorKind::kInvalidArgument,
                  std::string(what) + " row " + std::to_string(r) +
                      " has zero norm and cannot be normalized");
    }
    m.row(r) /= norm;
  }
}

std::vector<std::string> NamesFor(const EmbeddingSet& set) {
  if (set.class_names.size() == set.rows()) return set.class_names;
  std::vector<std::string> names;
  for (std::size_t i = 0; i < set.rows(); ++i) names.push_back("label_" + std::to_string(i));
  return names;
}

}  // namespace

CandidateLabels CandidateLabels::FromSets(const EmbeddingSet& in_labels,
                                          const EmbeddingSet* out_labels, bool normalize,
                                          double temperature) {
  if (!(temperature > 0) || !std::isfinite(temperature)) {
    throw Error(ErrorKind::kInvalidArgument, "temperature must be positive");
  }
  CandidateLabels labels;
  labels.normalize = normalize;
  labels.temperature = temperature;
  labels.in_text = in_labels.data.cast<double>();
  labels.in_names = NamesFor(in_labels);
  if (out_labels) {
    if (out_labels->dim() != in_labels.dim()) {
      throw Error(ErrorKind::kDimensionMismatch,
                  "in-label dimension " + std::to_string(in_labels.dim()) +
                      " != out-label dimension " + std::to_string(out_labels->dim()));
    }
    labels.out_text = out_labels->data.cast<double>();
    labels.out_names = NamesFor(*out_labels);
  } else {
    labels.out_text.resize(0, labels.in_text.cols());
  }
  if (normalize) {
    NormalizeRows(labels.in_text, "in-label");
    NormalizeRows(labels.out_text, "out-label");
  }
  return labels;
}

LogitSet SimilarityLogits(const EmbeddingSet& images, const CandidateLabels& labels) {
  if (labels.k() == 0) {
    throw Error(ErrorKind::kInvalidArgument, "zero-shot scoring needs at least one in-label");
  }
  if (static_cast<Eigen::Index>(images.dim()) != labels.in_text.cols() ||
      labels.out_text.cols() != labels.in_text.cols()) {
    throw Error(ErrorKind::kDimensionMismatch,
                "image dimension " + std::to_string(images.dim()) +
                    " does not match label dimension " +
                    std::to_string(labels.in_text.cols()));
  }
  if (!(labels.temperature > 0)) {
    throw Error(ErrorKind::kInvalidArgument, "temperature must be positive");
  }
  RowMatrixD text(static_cast<Eigen::Index>(labels.k() + labels.o()), labels.in_text.cols());
  text.topRows(labels.in_text.rows()) = labels.in_text;
  text.bottomRows(labels.out_text.rows()) = labels.out_text;
  RowMatrixD img = images.data.cast<double>();
  if (labels.normalize) {
    NormalizeRows(img, "image");
    // Labels built by hand may not be normalized yet.
    NormalizeRows(text, "label");
  }
  LogitSet out;
  out.logits = img * text.transpose() / labels.temperature;
  out.class_ids.resize(labels.k() + labels.o());
  std::iota(out.class_ids.begin(), out.class_ids.end(), 0u);
  out.in_indices.resize(labels.k());
  std::iota(out.in_indices.begin(), out.in_indices.end(), std::size_t{0});
  return out;
}

std::vector<double> ScoreZshot(const EmbeddingSet& images, const CandidateLabels& labels) {
  const LogitSet logits = SimilarityLogits(images, labels);
  if (ZshotUsesMspFallback(labels)) return ScoreMsp(logits);
  return ScoreInMass(logits);
}

}  // namespace oodkit
