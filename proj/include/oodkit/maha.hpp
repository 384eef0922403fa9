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
#include <vector>

#include <Eigen/Core>

#include "oodkit/embed_store.hpp"
#include "oodkit/probs.hpp"

namespace oodkit {

// Class-conditional Gaussians sharing one covariance. The covariance is kept
// only as the Cholesky factor of (Sigma + epsilon * I).
struct GaussianModel {
  Eigen::MatrixXd means;  // K x D
  Eigen::MatrixXd chol;   // D x D, lower triangular
  double epsilon = 0;     // ridge actually used
  // What the caller asked for (nullopt: relative default) and how many x10
  // escalations were needed to factorize.
  std::optional<double> epsilon_requested;
  int escalations = 0;
  std::vector<std::uint32_t> class_ids;
  std::vector<std::size_t> counts;

  std::size_t classes() const { return static_cast<std::size_t>(means.rows()); }
  std::size_t dim() const { return static_cast<std::size_t>(means.cols()); }
};

inline constexpr char kGaussianMagic[] = "OODGAU01";

// Per-class means and the 1/N pooled covariance of `train`. The ridge starts
// at `epsilon` (default 1e-6 * trace(Sigma) / D) and is multiplied by 10 on
// each failed factorization, up to 1e-2 * trace(Sigma) / D.
GaussianModel FitGaussian(const EmbeddingSet& train,
                          std::optional<double> epsilon = std::nullopt);

// Sigma recovered from the factor: L * L^T - epsilon * I.
Eigen::MatrixXd Covariance(const GaussianModel& model);

// N x K matrix of 0.5 * (x - mu_c)^T Sigma^-1 (x - mu_c).
RowMatrixD MahaPerClass(const GaussianModel& model, const EmbeddingSet& query);

// -min_c of MahaPerClass; always <= 0.
std::vector<double> ScoreMaha(const GaussianModel& model, const EmbeddingSet& query);

void SaveGaussianModel(const GaussianModel& model, const std::filesystem::path& path);
GaussianModel LoadGaussianModel(const std::filesystem::path& path);

}  // namespace oodkit
