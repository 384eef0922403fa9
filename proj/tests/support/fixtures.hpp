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

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "oodkit/embed_store.hpp"
#include "oodkit/metrics.hpp"

namespace oodkit::testing {

class TempDir {
 public:
  TempDir() {
    std::string tmpl = (std::filesystem::temp_directory_path() / "oodkit-test-XXXXXX").string();
    if (!mkdtemp(tmpl.data())) std::abort();
    path_ = tmpl;
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline EmbeddingSet MakeSet(const std::vector<std::vector<float>>& rows,
                            std::optional<std::vector<std::uint32_t>> labels = std::nullopt) {
  EmbeddingSet set;
  const auto n = static_cast<Eigen::Index>(rows.size());
  const auto d = static_cast<Eigen::Index>(rows.empty() ? 0 : rows[0].size());
  set.data.resize(n, d);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index c = 0; c < d; ++c) set.data(r, c) = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
  }
  set.labels = std::move(labels);
  return set;
}

inline EmbeddingSet RandomSet(std::mt19937_64& rng, std::size_t n, std::size_t d,
                              std::size_t classes) {
  std::normal_distribution<float> g(0.0f, 1.0f);
  EmbeddingSet set;
  set.data.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  for (Eigen::Index r = 0; r < set.data.rows(); ++r) {
    for (Eigen::Index c = 0; c < set.data.cols(); ++c) set.data(r, c) = g(rng);
  }
  if (classes > 0) {
    std::vector<std::uint32_t> labels(n);
    for (std::size_t r = 0; r < n; ++r) labels[r] = static_cast<std::uint32_t>(r % classes);
    std::shuffle(labels.begin(), labels.end(), rng);
    set.labels = labels;
  }
  return set;
}

// Scores drawn from a small value grid so ties across and within sides are
// frequent.
inline ScoreSet RandomScoreSet(std::mt19937_64& rng, std::size_t max_side) {
  std::uniform_int_distribution<std::size_t> size(1, max_side);
  std::uniform_int_distribution<int> mode(0, 2);
  ScoreSet s;
  const std::size_t m = size(rng);
  const std::size_t n = size(rng);
  const int kind = mode(rng);
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_int_distribution<int> grid(0, 12);
  auto draw = [&](double shift) {
    if (kind == 0) return static_cast<double>(grid(rng)) / 4.0;
    if (kind == 1) return g(rng) + shift;
    return std::round((g(rng) + shift) * 8.0) / 8.0;
  };
  for (std::size_t i = 0; i < n; ++i) s.in_scores.push_back(draw(0.7));
  for (std::size_t i = 0; i < m; ++i) s.out_scores.push_back(draw(0.0));
  // Duplicates copied across sides.
  std::uniform_int_distribution<std::size_t> pick_in(0, n - 1);
  std::uniform_int_distribution<std::size_t> pick_out(0, m - 1);
  for (int k = 0; k < 3; ++k) {
    s.out_scores[pick_out(rng)] = s.in_scores[pick_in(rng)];
    s.in_scores[pick_in(rng)] = s.out_scores[pick_out(rng)];
  }
  return s;
}

// Isotropic Gaussian clusters in `d` dimensions. Class c is centred on
// `spread` times the c-th row of a fixed random direction matrix.
struct ClusterWorld {
  std::size_t d;
  std::vector<Eigen::VectorXf> centers;
  float noise;

  ClusterWorld(std::size_t dim, std::size_t classes, float spread, float noise_sd, std::uint64_t seed)
      : d(dim), noise(noise_sd) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<float> g(0.0f, 1.0f);
    for (std::size_t c = 0; c < classes; ++c) {
      Eigen::VectorXf v(static_cast<Eigen::Index>(d));
      for (Eigen::Index j = 0; j < v.size(); ++j) v(j) = g(rng);
      centers.push_back(spread * v.normalized());
    }
  }

  // `per_class` rows for each class id in `classes`; labels are those ids.
  EmbeddingSet Sample(const std::vector<std::uint32_t>& classes, std::size_t per_class,
                      std::uint64_t seed) const {
    std::mt19937_64 rng(seed);
    std::normal_distribution<float> g(0.0f, noise);
    EmbeddingSet set;
    set.data.resize(static_cast<Eigen::Index>(classes.size() * per_class), static_cast<Eigen::Index>(d));
    std::vector<std::uint32_t> labels;
    Eigen::Index r = 0;
    for (std::uint32_t c : classes) {
      for (std::size_t i = 0; i < per_class; ++i, ++r) {
        for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(d); ++j) set.data(r, j) = centers[c](j) + g(rng);
        labels.push_back(c);
      }
    }
    set.labels = labels;
    return set;
  }
};

inline void WriteFile(const std::filesystem::path& path, const std::string& bytes) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream(path, std::ios::binary) << bytes;
}

inline std::string ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Minimal valid 1x1 PNG.
inline std::string TinyPng() {
  static const unsigned char bytes[] = {
      0x89, 0x50, 0x4e, 0x47, 0x0d, 0x0a, 0x1a, 0x0a, 0x00, 0x00, 0x00, 0x0d, 0x49, 0x48, 0x44, 0x52,
      0x00, 0x00, 0x00, 0x01, 0x00, 0x00, 0x00, 0x01, 0x08, 0x06, 0x00, 0x00, 0x00, 0x1f, 0x15, 0xc4,
      0x89, 0x00, 0x00, 0x00, 0x0d, 0x49, 0x44, 0x41, 0x54, 0x78, 0x9c, 0x63, 0x00, 0x01, 0x00, 0x00,
      0x05, 0x00, 0x01, 0x0d, 0x0a, 0x2d, 0xb4, 0x00, 0x00, 0x00, 0x00, 0x49, 0x45, 0x4e, 0x44, 0xae,
      0x42, 0x60, 0x82};
  return {reinterpret_cast<const char*>(bytes), sizeof(bytes)};
}

// `per_class` images per class under dir/<class>/NNN.png. Each file's bytes
// embed its class and index so payload tests can tell them apart.
inline void MakeImagePool(const std::filesystem::path& dir, const std::vector<std::string>& classes,
                          std::size_t per_class) {
  for (const std::string& c : classes) {
    for (std::size_t i = 0; i < per_class; ++i) {
      char name[32];
      std::snprintf(name, sizeof(name), "%03zu.png", i);
      WriteFile(dir / c / name, TinyPng() + c + std::to_string(i));
    }
  }
}

}  // namespace oodkit::testing
