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

#include "oodkit/embed_store.hpp"

#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <span>
#include <sstream>

#include "container.hpp"
#include "oodkit/error.hpp"

namespace oodkit {

namespace {

std::string Where(const std::filesystem::path& path) {
  return path.empty() ? std::string("<memory>") : path.string();
}

void CheckFinite(const EmbeddingSet& set, const std::filesystem::path& path,
                 std::size_t payload_offset) {
  for (Eigen::Index r = 0; r < set.data.rows(); ++r) {
    for (Eigen::Index c = 0; c < set.data.cols(); ++c) {
      if (!std::isfinite(set.data(r, c))) {
        std::string msg = Where(path) + ": non-finite value at row " +
                          std::to_string(r) + ", column " + std::to_string(c);
        if (payload_offset != 0) {
          const std::size_t byte =
              payload_offset + (static_cast<std::size_t>(r * set.data.cols() + c)) * 4;
          msg += " (byte " + std::to_string(byte) + ")";
        }
        throw Error(ErrorKind::kNonFinite, msg);
      }
    }
  }
}

void CheckLabels(const EmbeddingSet& set, const std::filesystem::path& path) {
  if (!set.labels) return;
  if (set.labels->size() != set.rows()) {
    throw Error(ErrorKind::kDimensionMismatch,
                Where(path) + ": " + std::to_string(set.labels->size()) +
                    " labels for " + std::to_string(set.rows()) + " rows");
  }
  if (set.class_names.empty()) return;
  for (std::size_t i = 0; i < set.labels->size(); ++i) {
    if ((*set.labels)[i] >= set.class_names.size()) {
      throw Error(ErrorKind::kLabelOutOfRange,
                  Where(path) + ": label " + std::to_string((*set.labels)[i]) +
                      " at row " + std::to_string(i) + " exceeds the " +
                      std::to_string(set.class_names.size()) + " class names");
    }
  }
}

void CheckShape(const EmbeddingSet& set, const std::filesystem::path& path) {
  if (set.data.rows() < 1 || set.data.cols() < 1) {
    throw Error(ErrorKind::kInvalidArgument,
                Where(path) + ": embedding set must have N >= 1 and D >= 1, got " +
                    std::to_string(set.data.rows()) + "x" +
                    std::to_string(set.data.cols()));
  }
}

EmbeddingSet LoadBinary(const std::filesystem::path& path) {
  container::Reader reader(path);
  reader.ExpectMagic(kEmbeddingMagic);
  const nlohmann::json header = reader.Header();
  const auto n = container::Field<std::int64_t>(header, "n", path);
  const auto d = container::Field<std::int64_t>(header, "d", path);
  const bool has_labels = container::Field<bool>(header, "has_labels", path);
  if (n < 1 || d < 1) {
    throw Error(ErrorKind::kMalformedHeader,
                path.string() + ": header declares n=" + std::to_string(n) +
                    ", d=" + std::to_string(d) + "; both must be >= 1");
  }

  EmbeddingSet set;
  if (header.contains("dataset_tag")) {
    set.dataset_tag = container::Field<std::string>(header, "dataset_tag", path);
  }
  if (header.contains("class_names")) {
    set.class_names =
        container::Field<std::vector<std::string>>(header, "class_names", path);
  }

  const std::size_t payload_offset = reader.offset();
  const std::size_t value_bytes = static_cast<std::size_t>(n) * static_cast<std::size_t>(d) * 4;
  const std::size_t label_bytes = has_labels ? static_cast<std::size_t>(n) * 4 : 0;
  const std::size_t available = reader.size() - payload_offset;
  if (available != value_bytes + label_bytes) {
    const std::size_t row_bytes = static_cast<std::size_t>(d) * 4 + (has_labels ? 4 : 0);
    throw Error(ErrorKind::kDimensionMismatch,
                path.string() + ": header declares n=" + std::to_string(n) +
                    ", d=" + std::to_string(d) + " (" +
                    std::to_string(value_bytes + label_bytes) +
                    " payload bytes) but the payload starting at byte " +
                    std::to_string(payload_offset) + " holds " +
                    std::to_string(available) + " bytes (~" +
                    std::to_string(available / row_bytes) + " rows)");
  }

  set.data.resize(n, d);
  reader.Array(std::span<float>(set.data.data(), static_cast<std::size_t>(set.data.size())),
               "embedding values");
  if (has_labels) {
    std::vector<std::uint32_t> labels(static_cast<std::size_t>(n));
    reader.Array(std::span<std::uint32_t>(labels), "labels");
    set.labels = std::move(labels);
  }
  reader.ExpectEnd();
  CheckFinite(set, path, payload_offset);
  CheckLabels(set, path);
  return set;
}

void SaveBinary(const EmbeddingSet& set, const std::filesystem::path& path) {
  nlohmann::json header = {
      {"n", set.rows()},
      {"d", set.dim()},
      {"has_labels", set.has_labels()},
      {"dataset_tag", set.dataset_tag},
      {"class_names", set.class_names},
  };
  container::Writer writer(path, kEmbeddingMagic);
  writer.Header(header);
  writer.Array(std::span<const float>(set.data.data(), static_cast<std::size_t>(set.data.size())));
  if (set.labels) {
    writer.Array(std::span<const std::uint32_t>(*set.labels));
  }
  writer.Finish();
}

std::vector<std::string_view> SplitCommas(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    fields.push_back(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

std::string_view Trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

EmbeddingSet LoadCsv(const std::filesystem::path& path, const CsvOptions& options) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorKind::kIo, "cannot open '" + path.string() + "'");
  }
  std::vector<float> values;
  std::vector<std::uint32_t> labels;
  std::optional<std::size_t> dim = options.dim;
  std::size_t rows = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view trimmed = Trim(line);
    if (trimmed.empty()) continue;
    const auto fields = SplitCommas(trimmed);
    const std::size_t label_cols = options.label_column ? 1 : 0;
    if (fields.size() <= label_cols) {
      throw Error(ErrorKind::kDimensionMismatch,
                  path.string() + ":" + std::to_string(line_no) + ": row has no value columns");
    }
    const std::size_t row_dim = fields.size() - label_cols;
    if (!dim) dim = row_dim;
    if (row_dim != *dim) {
      throw Error(ErrorKind::kDimensionMismatch,
                  path.string() + ":" + std::to_string(line_no) + ": expected " +
                      std::to_string(*dim) + " value columns, found " +
                      std::to_string(row_dim));
    }
    for (std::size_t c = 0; c < row_dim; ++c) {
      const std::string_view field = Trim(fields[c]);
      float v = 0.0f;
      const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
      if (ec != std::errc() || ptr != field.data() + field.size()) {
        throw Error(ErrorKind::kMalformedHeader,
                    path.string() + ":" + std::to_string(line_no) + ": column " +
                        std::to_string(c) + " is not a number: '" + std::string(field) + "'");
      }
      if (!std::isfinite(v)) {
        throw Error(ErrorKind::kNonFinite,
                    path.string() + ":" + std::to_string(line_no) +
                        ": non-finite value at row " + std::to_string(rows) +
                        ", column " + std::to_string(c));
      }
      values.push_back(v);
    }
    if (options.label_column) {
      const std::string_view field = Trim(fields.back());
      std::uint32_t label = 0;
      const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), label);
      if (ec != std::errc() || ptr != field.data() + field.size()) {
        throw Error(ErrorKind::kLabelOutOfRange,
                    path.string() + ":" + std::to_string(line_no) +
                        ": label is not a non-negative integer: '" + std::string(field) + "'");
      }
      labels.push_back(label);
    }
    ++rows;
  }
  if (rows == 0) {
    throw Error(ErrorKind::kInvalidArgument, path.string() + ": no data rows");
  }
  EmbeddingSet set;
  set.data = Eigen::Map<RowMatrixF>(values.data(), static_cast<Eigen::Index>(rows),
                                    static_cast<Eigen::Index>(*dim));
  if (options.label_column) set.labels = std::move(labels);
  set.dataset_tag = path.stem().string();
  return set;
}

void SaveCsv(const EmbeddingSet& set, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    throw Error(ErrorKind::kIo, "cannot open '" + path.string() + "' for writing");
  }
  char buf[64];
  for (Eigen::Index r = 0; r < set.data.rows(); ++r) {
    for (Eigen::Index c = 0; c < set.data.cols(); ++c) {
      if (c) out << ',';
      // Shortest representation that parses back to the same float.
      const auto res = std::to_chars(buf, buf + sizeof(buf), set.data(r, c));
      out.write(buf, res.ptr - buf);
    }
    if (set.labels) out << ',' << (*set.labels)[static_cast<std::size_t>(r)];
    out << '\n';
  }
  out.flush();
  if (!out) {
    throw Error(ErrorKind::kIo, "write to '" + path.string() + "' failed");
  }
}

}  // namespace

void EmbeddingSet::Validate() const {
  CheckShape(*this, {});
  CheckFinite(*this, {}, 0);
  CheckLabels(*this, {});
}

bool BitEqual(const EmbeddingSet& a, const EmbeddingSet& b) {
  if (a.data.rows() != b.data.rows() || a.data.cols() != b.data.cols()) return false;
  if (std::memcmp(a.data.data(), b.data.data(),
                  static_cast<std::size_t>(a.data.size()) * sizeof(float)) != 0) {
    return false;
  }
  return a.labels == b.labels && a.dataset_tag == b.dataset_tag &&
         a.class_names == b.class_names;
}

EmbeddingSet LoadEmbeddings(const std::filesystem::path& path, FileFormat format,
                            const CsvOptions& csv) {
  return format == FileFormat::kBinary ? LoadBinary(path) : LoadCsv(path, csv);
}

void SaveEmbeddings(const EmbeddingSet& set, const std::filesystem::path& path,
                    FileFormat format) {
  set.Validate();
  if (format == FileFormat::kBinary) {
    SaveBinary(set, path);
  } else {
    SaveCsv(set, path);
  }
}

FileFormat DetectFormat(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    throw Error(ErrorKind::kIo, "no such file '" + path.string() + "'");
  }
  return container::HasMagic(path, kEmbeddingMagic) ? FileFormat::kBinary
                                                    : FileFormat::kCsv;
}

nlohmann::json ReadEmbeddingHeader(const std::filesystem::path& path) {
  container::Reader reader(path);
  reader.ExpectMagic(kEmbeddingMagic);
  return reader.Header();
}

std::map<std::uint32_t, std::vector<std::size_t>> SplitByLabel(const EmbeddingSet& set) {
  if (!set.labels) {
    throw Error(ErrorKind::kMissingLabels,
                "split_by_label: embedding set '" + set.dataset_tag + "' has no labels");
  }
  std::map<std::uint32_t, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < set.labels->size(); ++i) {
    groups[(*set.labels)[i]].push_back(i);
  }
  return groups;
}

}  // namespace oodkit
