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
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "json.hpp"
#include "oodkit/metrics.hpp"

namespace oodkit::bench {

enum class ImageSource { kIn, kOut };

const char* SourceName(ImageSource s);

struct PoolImage {
  std::filesystem::path file;
  std::string class_name;
};

// Image files (png/jpg/jpeg) one directory below `dir`; the parent
// directory name is the class. Sorted by class, then file name.
std::vector<PoolImage> ScanImagePool(const std::filesystem::path& dir);

// Sorted class directory names of a pool.
std::vector<std::string> PoolClassNames(const std::vector<PoolImage>& pool);

struct ManifestEntry {
  std::string image_id;
  ImageSource source;
  std::string true_class;
  std::filesystem::path file;
};

struct SessionParams {
  std::size_t total_images = 0;
  std::size_t page_size = 20;
  std::uint64_t seed = 0;
  // Exactly half the images from each pool instead of a fair coin per image.
  bool exact_balance = false;
  std::string session_id;
};

class BenchSession {
 public:
  BenchSession() = default;

  // Each manifest slot picks its pool with a fair seeded coin (falling back
  // to the other pool once one is exhausted) and draws without replacement.
  static BenchSession Create(const std::vector<PoolImage>& in_pool,
                             const std::vector<PoolImage>& out_pool,
                             std::vector<std::string> in_class_names, SessionParams params);

  // Rebuilds a session from a stored manifest (no selections applied).
  static BenchSession FromManifest(SessionParams params, std::vector<std::string> in_class_names,
                                   std::vector<ManifestEntry> manifest);

  const std::string& id() const { return params_.session_id; }
  const SessionParams& params() const { return params_; }
  const std::vector<std::string>& class_names() const { return class_names_; }
  const std::vector<ManifestEntry>& manifest() const { return manifest_; }
  std::size_t page_count() const;
  std::size_t submitted_pages() const;
  bool complete() const { return submitted_pages() == page_count(); }

  // Image ids on page k, in display order. Throws kNotFound out of range.
  std::vector<std::string> PageImageIds(std::size_t page) const;
  // Current selections on page k (only selected images).
  std::map<std::string, std::string> PageSelections(std::size_t page) const;
  const ManifestEntry& Image(const std::string& image_id) const;
  bool page_submitted(std::size_t page) const { return submitted_.at(page); }

  // Replaces the page's selections; unlisted images count as "not in".
  void Submit(std::size_t page, const std::map<std::string, std::string>& selections);

  // Binary confidences: 1 for a selected image, 0 otherwise.
  ScoreSet InducedScores() const;

  // {auroc, tpr, fpr, per_class_confusions, n_in, n_out, ...} plus the
  // revealed manifest. Throws kConflict until every page is submitted.
  nlohmann::json Score() const;

 private:
  std::pair<std::size_t, std::size_t> PageRange(std::size_t page) const;

  SessionParams params_;
  std::vector<std::string> class_names_;
  std::vector<ManifestEntry> manifest_;
  std::map<std::string, std::size_t> index_;
  std::vector<std::optional<std::string>> selected_;
  std::vector<bool> submitted_;
};

// Thread-safe session registry persisted as one append-only JSON-lines event
// log per session under `data_dir`. Existing logs are replayed on startup.
class SessionStore {
 public:
  SessionStore(std::vector<PoolImage> in_pool, std::vector<PoolImage> out_pool,
               std::vector<std::string> in_class_names, std::filesystem::path data_dir);

  // Returns the id of the new session.
  std::string Create(SessionParams params);

  // Client-visible views. None of them reveals image sources or classes
  // except Score/Report.
  nlohmann::json Status(const std::string& id) const;
  nlohmann::json Page(const std::string& id, std::size_t page) const;
  nlohmann::json Submit(const std::string& id, std::size_t page,
                        const std::map<std::string, std::string>& selections);
  nlohmann::json Score(const std::string& id);
  // Report of a scored session; kConflict before scoring.
  nlohmann::json Report(const std::string& id) const;
  ManifestEntry Image(const std::string& id, const std::string& image_id) const;

  std::vector<std::string> SessionIds() const;
  const std::vector<std::string>& class_names() const { return class_names_; }

 private:
  struct Entry {
    mutable std::mutex mu;
    BenchSession session;
    bool scored = false;
    std::filesystem::path log;
  };

  std::shared_ptr<Entry> Find(const std::string& id) const;
  void Replay(const std::filesystem::path& log);
  static void Append(const std::filesystem::path& log, const nlohmann::json& event);

  std::vector<PoolImage> in_pool_;
  std::vector<PoolImage> out_pool_;
  std::vector<std::string> class_names_;
  std::filesystem::path data_dir_;
  mutable std::shared_mutex mu_;
  std::map<std::string, std::shared_ptr<Entry>> sessions_;
};

}  // namespace oodkit::bench
