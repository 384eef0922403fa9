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

#include "oodkit/maha.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>

#include "container.hpp"
#include "oodkit/error.hpp"
#include "parallel.hpp"

namespace oodkit {

namespace {

constexpr double kDefaultRelativeEpsilon = 1e-6;
constexpr double kMaxRelativeEpsilon = 1e-2;

// Cholesky of `a`, rejecting factors whose pivots have collapsed to
// round-off level (LLT happily "succeeds" on many singular matrices).
std::optional<Eigen::MatrixXd> TryCholesky(const Eigen::MatrixXd& a) {
  Eigen::LLT<Eigen::MatrixXd> llt(a);
  if (llt.info() != Eigen::Success) return std::nullopt;
  Eigen::MatrixXd l = llt.matrixL();
  const double max_diag = a.diagonal().cwiseAbs().maxCoeff();
  const double floor = static_cast<double>(a.rows()) *
                       std::numeric_limits<double>::epsilon() * max_diag;
  for (Eigen::Index i = 0; i < l.rows(); ++i) {
    const double pivot = l(i, i);
    if (!(pivot > 0) || !std::isfinite(pivot) || pivot * pivot <= floor) return std::nullopt;
  }
  return l;
}

void CheckQuery(const GaussianModel& model, const EmbeddingSet& query) {
  if (query.dim() != model.dim()) {
    throw Error(ErrorKind::kDimensionMismatch,
                "query dimension " + std::to_string(query.dim()) +
                    " does not match model dimension " + std::to_string(model.dim()));
  }
}

}  // namespace

GaussianModel FitGaussian(const EmbeddingSet& train, std::optional<double> epsilon) {
  const auto groups = SplitByLabel(train);
  const std::size_t n = train.rows();
  const std::size_t d = train.dim();
  if (n < 2) {
    throw Error(ErrorKind::kInvalidArgument, "fit_gaussian needs at least 2 rows, got " +
                                                 std::to_string(n));
  }
  if (epsilon && !(*epsilon >= 0 && std::isfinite(*epsilon))) {
    throw Error(ErrorKind::kInvalidArgument, "epsilon must be finite and non-negative");
  }

  GaussianModel model;
  model.means.resize(static_cast<Eigen::Index>(groups.size()), static_cast<Eigen::Index>(d));
  Eigen::MatrixXd centered(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  Eigen::Index k = 0;
  for (const auto& [class_id, rows] : groups) {
    Eigen::RowVectorXd sum = Eigen::RowVectorXd::Zero(static_cast<Eigen::Index>(d));
    for (std::size_t r : rows) sum += train.data.row(static_cast<Eigen::Index>(r)).cast<double>();
    const Eigen::RowVectorXd mean = sum / static_cast<double>(rows.size());
    model.means.row(k) = mean;
    for (std::size_t r : rows) {
      centered.row(static_cast<Eigen::Index>(r)) =
          train.data.row(static_cast<Eigen::Index>(r)).cast<double>() - mean;
    }
    model.class_ids.push_back(class_id);
    model.counts.push_back(rows.size());
    ++k;
  }
  Eigen::MatrixXd sigma = centered.transpose() * centered / static_cast<double>(n);
  sigma = (sigma + sigma.transpose().eval()) / 2;

  // Relative ridge scale; an all-zero covariance falls back to unit scale.
  double scale = sigma.trace() / static_cast<double>(d);
  if (!(scale > 0)) scale = 1.0;
  const double default_eps = kDefaultRelativeEpsilon * scale;
  const double cap = kMaxRelativeEpsilon * scale;

  model.epsilon_requested = epsilon;
  double eps = epsilon.value_or(default_eps);
  while (true) {
    Eigen::MatrixXd a = sigma;
    a.diagonal().array() += eps;
    if (auto l = TryCholesky(a)) {
      model.chol = std::move(*l);
      model.epsilon = eps;
      return model;
    }
    if (eps >= cap) {
      throw Error(ErrorKind::kNumerical,
                  "covariance is not positive definite even with epsilon = " +
                      std::to_string(eps) + " (cap " + std::to_string(cap) + ")");
    }
    eps = eps == 0 ? default_eps : std::min(eps * 10, cap);
    ++model.escalations;
  }
}

Eigen::MatrixXd Covariance(const GaussianModel& model) {
  Eigen::MatrixXd sigma = model.chol * model.chol.transpose();
  sigma.diagonal().array() -= model.epsilon;
  return sigma;
}

RowMatrixD MahaPerClass(const GaussianModel& model, const EmbeddingSet& query) {
  CheckQuery(model, query);
  const auto n = static_cast<Eigen::Index>(query.rows());
  const auto k = static_cast<Eigen::Index>(model.classes());
  const auto lower = model.chol.triangularView<Eigen::Lower>();
  // With Sigma = L L^T, (x - mu)^T Sigma^-1 (x - mu) = |L^-1 x - L^-1 mu|^2.
  const Eigen::MatrixXd whitened_means = lower.solve(model.means.transpose());

  RowMatrixD out(n, k);
  ParallelFor(static_cast<std::size_t>(n), 64, [&](std::size_t begin, std::size_t end) {
    const auto rows = static_cast<Eigen::Index>(end - begin);
    const Eigen::MatrixXd block =
        query.data.middleRows(static_cast<Eigen::Index>(begin), rows).cast<double>().transpose();
    const Eigen::MatrixXd whitened = lower.solve(block);
    for (Eigen::Index i = 0; i < rows; ++i) {
      for (Eigen::Index c = 0; c < k; ++c) {
        out(static_cast<Eigen::Index>(begin) + i, c) =
            0.5 * (whitened.col(i) - whitened_means.col(c)).squaredNorm();
      }
    }
  });
  return out;
}

std::vector<double> ScoreMaha(const GaussianModel& model, const EmbeddingSet& query) {
  const RowMatrixD per_class = MahaPerClass(model, query);
  std::vector<double> scores(query.rows());
  for (Eigen::Index r = 0; r < per_class.rows(); ++r) scores[r] = -per_class.row(r).minCoeff();
  return scores;
}

void SaveGaussianModel(const GaussianModel& model, const std::filesystem::path& path) {
  nlohmann::json header = {
      {"kind", kGaussianMagic},
      {"k", model.classes()},
      {"d", model.dim()},
      {"epsilon", model.epsilon},
      {"escalations", model.escalations},
      {"class_ids", model.class_ids},
      {"counts", model.counts},
  };
  header["epsilon_requested"] =
      model.epsilon_requested ? nlohmann::json(*model.epsilon_requested) : nlohmann::json();
  container::Writer writer(path, kGaussianMagic);
  writer.Header(header);
  // Row-major payload: means (K x D), then the full D x D factor.
  const RowMatrixD means = model.means;
  const RowMatrixD chol = model.chol;
  writer.Array(std::span<const double>(means.data(), static_cast<std::size_t>(means.size())));
  writer.Array(std::span<const double>(chol.data(), static_cast<std::size_t>(chol.size())));
  writer.Finish();
}

GaussianModel LoadGaussianModel(const std::filesystem::path& path) {
  container::Reader reader(path);
  reader.ExpectMagic(kGaussianMagic);
  const nlohmann::json header = reader.Header();
  const auto k = container::Field<std::int64_t>(header, "k", path);
  const auto d = container::Field<std::int64_t>(header, "d", path);
  if (k < 1 || d < 1) {
    throw Error(ErrorKind::kMalformedHeader, path.string() + ": k and d must be >= 1");
  }
  GaussianModel model;
  model.epsilon = container::Field<double>(header, "epsilon", path);
  model.escalations = container::Field<int>(header, "escalations", path);
  model.class_ids = container::Field<std::vector<std::uint32_t>>(header, "class_ids", path);
  model.counts = container::Field<std::vector<std::size_t>>(header, "counts", path);
  if (header.contains("epsilon_requested") && !header["epsilon_requested"].is_null()) {
    model.epsilon_requested = container::Field<double>(header, "epsilon_requested", path);
  }
  if (model.class_ids.size() != static_cast<std::size_t>(k) ||
      model.counts.size() != static_cast<std::size_t>(k)) {
    throw Error(ErrorKind::kMalformedHeader,
                path.string() + ": class_ids/counts length does not match k");
  }
  RowMatrixD means(k, d);
  RowMatrixD chol(d, d);
  reader.Array(std::span<double>(means.data(), static_cast<std::size_t>(means.size())), "means");
  reader.Array(std::span<double>(chol.data(), static_cast<std::size_t>(chol.size())), "cholesky factor");
  reader.ExpectEnd();
  model.means = means;
  model.chol = chol;
  for (Eigen::Index i = 0; i < model.chol.rows(); ++i) {
    if (!(model.chol(i, i) > 0)) {
      throw Error(ErrorKind::kMalformedHeader,
                  path.string() + ": cholesky factor has a non-positive diagonal");
    }
  }
  return model;
}

}  // namespace oodkit
