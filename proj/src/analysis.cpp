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

#include "oodkit/analysis.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <string>

#include "oodkit/error.hpp"

namespace oodkit {

PcaModel FitPca(const std::vector<const EmbeddingSet*>& sets, std::size_t components) {
  if (sets.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "pca: no input sets");
  }
  const std::size_t d = sets.front()->dim();
  std::size_t n = 0;
  for (const EmbeddingSet* s : sets) {
    if (s->dim() != d) {
      throw Error(ErrorKind::kDimensionMismatch,
                  "pca: set '" + s->dataset_tag + "' has dimension " + std::to_string(s->dim()) +
                      ", expected " + std::to_string(d));
    }
    n += s->rows();
  }
  if (n < 2) {
    throw Error(ErrorKind::kInvalidArgument, "pca needs at least 2 samples");
  }
  if (components == 0 || d < components) {
    throw Error(ErrorKind::kInvalidArgument,
                "pca: cannot extract " + std::to_string(components) +
                    " components from dimension " + std::to_string(d));
  }

  Eigen::MatrixXd x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  Eigen::Index row = 0;
  for (const EmbeddingSet* s : sets) {
    x.middleRows(row, s->data.rows()) = s->data.cast<double>();
    row += s->data.rows();
  }
  PcaModel model;
  model.mean = x.colwise().mean();
  x.rowwise() -= model.mean;
  const Eigen::MatrixXd cov = x.transpose() * x / static_cast<double>(n - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  if (eig.info() != Eigen::Success) {
    throw Error(ErrorKind::kNumerical, "pca: eigendecomposition failed");
  }
  // Eigen sorts ascending.
  const Eigen::VectorXd values = eig.eigenvalues().cwiseMax(0.0);
  const double total = values.sum();
  model.components.resize(static_cast<Eigen::Index>(components), static_cast<Eigen::Index>(d));
  for (std::size_t c = 0; c < components; ++c) {
    const Eigen::Index idx = static_cast<Eigen::Index>(d - 1 - c);
    Eigen::VectorXd axis = eig.eigenvectors().col(idx);
    Eigen::Index arg = 0;
    axis.cwiseAbs().maxCoeff(&arg);
    if (axis(arg) < 0) axis = -axis;
    model.components.row(static_cast<Eigen::Index>(c)) = axis.transpose();
    model.explained_variance.push_back(values(idx));
    model.explained_ratio.push_back(total > 0 ? values(idx) / total : 0.0);
  }
  return model;
}

RowMatrixD ProjectPca(const PcaModel& model, const EmbeddingSet& set) {
  if (static_cast<Eigen::Index>(set.dim()) != model.mean.size()) {
    throw Error(ErrorKind::kDimensionMismatch, "pca: projection dimension mismatch");
  }
  Eigen::MatrixXd x = set.data.cast<double>();
  x.rowwise() -= model.mean;
  return x * model.components.transpose();
}

}  // namespace oodkit
