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
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>
#include "json.hpp"

namespace oodkit {

using RowMatrixF =
    Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// N x D embeddings (or logits) with optional integer class labels. Values
// are immutable once validated; share freely across threads.
struct EmbeddingSet {
  RowMatrixF data;
  std::optional<std::vector<std::uint32_t>> labels;
  std::string dataset_tag;
  // Indexed by class id. Empty means "no vocabulary".
  std::vector<std::string> class_names;

  std::size_t rows() const { return static_cast<std::size_t>(data.rows()); }
  std::size_t dim() const { return static_cast<std::size_t>(data.cols()); }
  bool has_labels() const { return labels.has_value(); }

  // Throws Error on N == 0, D == 0, non-finite values, label/row count
  // mismatch or a label outside the class vocabulary.
  void Validate() const;
};

// Bitwise comparison of payloads (floats compared as bit patterns).
bool BitEqual(const EmbeddingSet& a, const EmbeddingSet& b);

enum class FileFormat { kBinary, kCsv };

struct CsvOptions {
  // The final column is an integer class label.
  bool label_column = false;
  // When set, every row must carry exactly this many value columns.
  std::optional<std::size_t> dim;
};

inline constexpr char kEmbeddingMagic[] = "OODEMB01";

EmbeddingSet LoadEmbeddings(const std::filesystem::path& path,
                            FileFormat format, const CsvOptions& csv = {});

void SaveEmbeddings(const EmbeddingSet& set,
                    const std::filesystem::path& path, FileFormat format);

// Binary when the file starts with the embedding magic, CSV otherwise.
FileFormat DetectFormat(const std::filesystem::path& path);

// Parsed JSON header of a binary embedding file. Producers may add extra
// fields (e.g. "in_indices" for logit files).
nlohmann::json ReadEmbeddingHeader(const std::filesystem::path& path);

// Class id -> ascending row indices. Requires labels.
std::map<std::uint32_t, std::vector<std::size_t>> SplitByLabel(
    const EmbeddingSet& set);

}  // namespace oodkit
