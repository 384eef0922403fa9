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
#include <filesystem>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "oodkit/embed_store.hpp"
#include "oodkit/probs.hpp"

namespace oodkit {

enum class HeadKind { kLinear, kMlpOneHidden };

enum class OutlierLabelMode {
  // K + O outputs; each outlier class keeps its own output.
  kLabeledOutliers,
  // K + 1 outputs; every outlier row is trained as class K.
  kCollapsedSingleClass,
};

struct ClassPartition {
  std::size_t k_in = 0;
  std::size_t o_out = 0;  // true number of outlier classes
  OutlierLabelMode mode = OutlierLabelMode::kLabeledOutliers;

  std::size_t output_width() const {
    return k_in + (mode == OutlierLabelMode::kCollapsedSingleClass ? 1 : o_out);
  }
};

struct OeConfig {
  HeadKind head_kind = HeadKind::kLinear;
  std::size_t hidden_units = 1024;
  OutlierLabelMode mode = OutlierLabelMode::kLabeledOutliers;
  std::size_t batch_size = 200;
  double learning_rate = 1e-3;
  double l2_penalty = 1.0;
  std::size_t max_steps = 1000;
  std::uint64_t seed = 0;
  // Replaces the computed oversampling factor when set.
  std::optional<double> oversample_override;
  // Validation AUROC cadence for checkpoint selection.
  std::size_t eval_every = 100;

  // Linear head on supervised-pretrained embeddings.
  static OeConfig LinearDefaults();
  // One-hidden-layer MLP on unsupervised-pretrained embeddings.
  static OeConfig MlpDefaults();
};

struct DenseLayer {
  Eigen::MatrixXd weights;  // out x in
  Eigen::VectorXd bias;
};

// h: R^D -> R^(K+O'). Layers are separated by ReLU; the last one emits logits.
struct OeHead {
  std::vector<DenseLayer> layers;
  ClassPartition partition;
  OeConfig config;
  // Original class ids behind output columns [0, K) and the outlier classes.
  std::vector<std::uint32_t> in_class_ids;
  std::vector<std::uint32_t> out_class_ids;
  double oversampling = 1.0;
  // 0 when no validation set was used (final step returned).
  std::size_t selected_step = 0;
  double selected_auroc = 0;
  std::vector<double> training_log;

  std::size_t input_dim() const;
  std::size_t output_width() const;
};

inline constexpr char kHeadMagic[] = "OODHED01";

// Gamma = (n_in / n_oe) * (o / k).
double OversamplingFactor(std::size_t n_in, std::size_t n_oe, std::size_t k, std::size_t o);

// One shuffled epoch over the union of n_in in-distribution rows (indices
// [0, n_in)) and the outlier rows (indices n_in + j). Outlier rows of each
// class are replicated floor(gamma) times; the remaining frac(gamma) * count
// copies go to a random subset of that class, so every row appears
// floor(gamma) or floor(gamma) + 1 times and each class lands within one
// copy of gamma times its size.
std::vector<std::size_t> OversampleEpoch(std::size_t n_in,
                                         std::span<const std::uint32_t> oe_labels,
                                         double gamma, std::mt19937_64& rng);

// Glorot-uniform weights and zero biases.
OeHead MakeHead(HeadKind kind, std::size_t input_dim, std::size_t hidden_units,
                const ClassPartition& partition, std::uint64_t seed);

struct OeValidation {
  EmbeddingSet in;
  EmbeddingSet out;
};

// Minibatch cross-entropy + 0.5 * l2 * |W|^2 (biases excluded) minimized
// with Adam. With `validation`, returns the checkpoint with the best
// validation AUROC (evaluated every config.eval_every steps).
OeHead TrainOeHead(const EmbeddingSet& in_train, const EmbeddingSet& oe_train,
                   const OeConfig& config, const OeValidation* validation = nullptr);

// Output probabilities, N x (K+O').
RowMatrixD HeadProbabilities(const OeHead& head, const EmbeddingSet& query);

// p(in|x): probability mass on the K in-distribution outputs.
std::vector<double> ScoreOe(const OeHead& head, const EmbeddingSet& query);

// Parameters flattened layer by layer: weights row-major, then bias.
std::vector<double> FlattenParameters(const OeHead& head);
void SetParameters(OeHead& head, std::span<const double> flat);

// Mean cross-entropy plus L2 term on a batch whose labels are output
// indices of the head.
double HeadLoss(const OeHead& head, const EmbeddingSet& batch);

// Analytic gradient of HeadLoss, in FlattenParameters order.
std::vector<double> HeadGradient(const OeHead& head, const EmbeddingSet& batch);

// Keeps at most `shots` rows per class, sampled uniformly without
// replacement. Row order of the survivors is preserved.
EmbeddingSet SubsampleShots(const EmbeddingSet& set, std::size_t shots, std::uint64_t seed);

void SaveHead(const OeHead& head, const std::filesystem::path& path);
OeHead LoadHead(const std::filesystem::path& path);

}  // namespace oodkit
