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

#include "oodkit/bench.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <tuple>
#include <random>
#include <set>
#include <sstream>

#include "oodkit/error.hpp"

namespace oodkit::bench {

namespace {

bool IsImageFile(const std::filesystem::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext == ".png" || ext == ".jpg" || ext == ".jpeg";
}

ImageSource ParseSource(const std::string& s) {
  if (s == "in") return ImageSource::kIn;
  if (s == "out") return ImageSource::kOut;
  throw Error(ErrorKind::kMalformedHeader, "unknown image source '" + s + "'");
}

std::string ImageId(std::size_t position) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "img-%05zu", position);
  return buf;
}

nlohmann::json ParamsJson(const SessionParams& p) {
  return {{"total_images", p.total_images},
          {"page_size", p.page_size},
          {"seed", p.seed},
          {"exact_balance", p.exact_balance},
          {"session_id", p.session_id}};
}

}  // namespace

const char* SourceName(ImageSource s) { return s == ImageSource::kIn ? "in" : "out"; }

std::vector<PoolImage> ScanImagePool(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw Error(ErrorKind::kIo, "image pool '" + dir.string() + "' is not a directory");
  }
  std::vector<PoolImage> pool;
  for (const auto& cls : std::filesystem::directory_iterator(dir)) {
    if (!cls.is_directory()) continue;
    for (const auto& file : std::filesystem::directory_iterator(cls.path())) {
      if (file.is_regular_file() && IsImageFile(file.path())) {
        pool.push_back({std::filesystem::absolute(file.path()), cls.path().filename().string()});
      }
    }
  }
  std::sort(pool.begin(), pool.end(), [](const PoolImage& a, const PoolImage& b) {
    return std::tie(a.class_name, a.file) < std::tie(b.class_name, b.file);
  });
  return pool;
}

std::vector<std::string> PoolClassNames(const std::vector<PoolImage>& pool) {
  std::set<std::string> names;
  for (const PoolImage& img : pool) names.insert(img.class_name);
  return {names.begin(), names.end()};
}

BenchSession BenchSession::Create(const std::vector<PoolImage>& in_pool,
                                  const std::vector<PoolImage>& out_pool,
                                  std::vector<std::string> in_class_names,
                                  SessionParams params) {
  if (in_pool.empty() || out_pool.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "both image pools must be non-empty");
  }
  if (params.total_images == 0) {
    throw Error(ErrorKind::kInvalidArgument, "total_images must be >= 1");
  }
  if (params.page_size == 0) {
    throw Error(ErrorKind::kInvalidArgument, "page_size must be >= 1");
  }
  if (params.total_images > in_pool.size() + out_pool.size()) {
    throw Error(ErrorKind::kInvalidArgument,
                "total_images " + std::to_string(params.total_images) + " exceeds the " +
                    std::to_string(in_pool.size() + out_pool.size()) + " pooled images");
  }
  if (in_class_names.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "in-distribution class list is empty");
  }

  std::mt19937_64 rng(params.seed);
  std::vector<std::size_t> in_order(in_pool.size()), out_order(out_pool.size());
  std::iota(in_order.begin(), in_order.end(), std::size_t{0});
  std::iota(out_order.begin(), out_order.end(), std::size_t{0});
  std::shuffle(in_order.begin(), in_order.end(), rng);
  std::shuffle(out_order.begin(), out_order.end(), rng);

  std::vector<ImageSource> sources;
  if (params.exact_balance) {
    std::size_t n_in = params.total_images / 2;
    if (params.total_images % 2 == 1 && std::bernoulli_distribution(0.5)(rng)) ++n_in;
    n_in = std::min(n_in, in_pool.size());
    n_in = std::max(n_in, params.total_images - std::min(params.total_images, out_pool.size()));
    sources.assign(n_in, ImageSource::kIn);
    sources.resize(params.total_images, ImageSource::kOut);
    std::shuffle(sources.begin(), sources.end(), rng);
  } else {
    std::bernoulli_distribution coin(0.5);
    std::size_t in_left = in_pool.size(), out_left = out_pool.size();
    for (std::size_t i = 0; i < params.total_images; ++i) {
      ImageSource s = coin(rng) ? ImageSource::kIn : ImageSource::kOut;
      if (s == ImageSource::kIn && in_left == 0) s = ImageSource::kOut;
      if (s == ImageSource::kOut && out_left == 0) s = ImageSource::kIn;
      (s == ImageSource::kIn ? in_left : out_left)--;
      sources.push_back(s);
    }
  }

  std::vector<ManifestEntry> manifest;
  std::size_t next_in = 0, next_out = 0;
  for (std::size_t i = 0; i < sources.size(); ++i) {
    const PoolImage& img = sources[i] == ImageSource::kIn ? in_pool[in_order[next_in++]]
                                                         : out_pool[out_order[next_out++]];
    manifest.push_back({ImageId(i), sources[i], img.class_name, img.file});
  }
  return FromManifest(std::move(params), std::move(in_class_names), std::move(manifest));
}

BenchSession BenchSession::FromManifest(SessionParams params,
                                        std::vector<std::string> in_class_names,
                                        std::vector<ManifestEntry> manifest) {
  BenchSession s;
  params.total_images = manifest.size();
  s.params_ = std::move(params);
  s.class_names_ = std::move(in_class_names);
  s.manifest_ = std::move(manifest);
  for (std::size_t i = 0; i < s.manifest_.size(); ++i) {
    if (!s.index_.emplace(s.manifest_[i].image_id, i).second) {
      throw Error(ErrorKind::kMalformedHeader,
                  "duplicate image id '" + s.manifest_[i].image_id + "' in manifest");
    }
  }
  s.selected_.resize(s.manifest_.size());
  s.submitted_.assign(s.page_count(), false);
  return s;
}

std::size_t BenchSession::page_count() const {
  return (manifest_.size() + params_.page_size - 1) / params_.page_size;
}

std::size_t BenchSession::submitted_pages() const {
  return static_cast<std::size_t>(std::count(submitted_.begin(), submitted_.end(), true));
}

std::pair<std::size_t, std::size_t> BenchSession::PageRange(std::size_t page) const {
  if (page >= page_count()) {
    throw Error(ErrorKind::kNotFound, "page " + std::to_string(page) + " out of range (" +
                                          std::to_string(page_count()) + " pages)");
  }
  const std::size_t begin = page * params_.page_size;
  return {begin, std::min(manifest_.size(), begin + params_.page_size)};
}

std::vector<std::string> BenchSession::PageImageIds(std::size_t page) const {
  const auto [begin, end] = PageRange(page);
  std::vector<std::string> ids;
  for (std::size_t i = begin; i < end; ++i) ids.push_back(manifest_[i].image_id);
  return ids;
}

std::map<std::string, std::string> BenchSession::PageSelections(std::size_t page) const {
  const auto [begin, end] = PageRange(page);
  std::map<std::string, std::string> out;
  for (std::size_t i = begin; i < end; ++i) {
    if (selected_[i]) out[manifest_[i].image_id] = *selected_[i];
  }
  return out;
}

const ManifestEntry& BenchSession::Image(const std::string& image_id) const {
  const auto it = index_.find(image_id);
  if (it == index_.end()) {
    throw Error(ErrorKind::kNotFound, "unknown image id '" + image_id + "'");
  }
  return manifest_[it->second];
}

void BenchSession::Submit(std::size_t page,
                          const std::map<std::string, std::string>& selections) {
  const auto [begin, end] = PageRange(page);
  for (const auto& [id, cls] : selections) {
    const auto it = index_.find(id);
    if (it == index_.end() || it->second < begin || it->second >= end) {
      throw Error(ErrorKind::kInvalidArgument,
                  "image '" + id + "' is not on page " + std::to_string(page));
    }
    if (std::find(class_names_.begin(), class_names_.end(), cls) == class_names_.end()) {
      throw Error(ErrorKind::kInvalidArgument,
                  "'" + cls + "' is not an in-distribution class name");
    }
  }
  for (std::size_t i = begin; i < end; ++i) selected_[i].reset();
  for (const auto& [id, cls] : selections) selected_[index_.at(id)] = cls;
  submitted_[page] = true;
}

ScoreSet BenchSession::InducedScores() const {
  ScoreSet s;
  for (std::size_t i = 0; i < manifest_.size(); ++i) {
    const double confidence = selected_[i] ? 1.0 : 0.0;
    (manifest_[i].source == ImageSource::kIn ? s.in_scores : s.out_scores).push_back(confidence);
  }
  return s;
}

nlohmann::json BenchSession::Score() const {
  if (!complete()) {
    throw Error(ErrorKind::kConflict,
                "session '" + id() + "' is incomplete: " + std::to_string(submitted_pages()) +
                    " of " + std::to_string(page_count()) + " pages submitted");
  }
  const ScoreSet scores = InducedScores();
  if (scores.in_scores.empty() || scores.out_scores.empty()) {
    throw Error(ErrorKind::kInvalidArgument,
                "session '" + id() + "' lacks in- or out-distribution images; AUROC undefined");
  }
  const double n_in = static_cast<double>(scores.in_scores.size());
  const double n_out = static_cast<double>(scores.out_scores.size());
  const double in_selected = std::count(scores.in_scores.begin(), scores.in_scores.end(), 1.0);
  const double out_selected = std::count(scores.out_scores.begin(), scores.out_scores.end(), 1.0);

  // (selected class or "none", true class, source) -> count
  std::map<std::tuple<std::string, std::string, std::string>, std::size_t> confusions;
  nlohmann::json revealed = nlohmann::json::array();
  for (std::size_t i = 0; i < manifest_.size(); ++i) {
    const ManifestEntry& e = manifest_[i];
    const std::string sel = selected_[i].value_or("none");
    ++confusions[{sel, e.true_class, SourceName(e.source)}];
    revealed.push_back({{"image_id", e.image_id},
                        {"source", SourceName(e.source)},
                        {"true_class", e.true_class},
                        {"selected", selected_[i] ? nlohmann::json(*selected_[i]) : nlohmann::json()}});
  }
  nlohmann::json conf = nlohmann::json::array();
  for (const auto& [key, count] : confusions) {
    conf.push_back({{"selected_class", std::get<0>(key)},
                    {"true_class", std::get<1>(key)},
                    {"source", std::get<2>(key)},
                    {"count", count}});
  }
  // OOD is the positive class: a true positive is an OOD image left unselected.
  return {{"session_id", id()},
          {"auroc", Auroc(scores)},
          {"tpr", (n_out - out_selected) / n_out},
          {"fpr", (n_in - in_selected) / n_in},
          {"in_selected_rate", in_selected / n_in},
          {"out_selected_rate", out_selected / n_out},
          {"n_in", scores.in_scores.size()},
          {"n_out", scores.out_scores.size()},
          {"per_class_confusions", conf},
          {"manifest", revealed}};
}

SessionStore::SessionStore(std::vector<PoolImage> in_pool, std::vector<PoolImage> out_pool,
                           std::vector<std::string> in_class_names,
                           std::filesystem::path data_dir)
    : in_pool_(std::move(in_pool)),
      out_pool_(std::move(out_pool)),
      class_names_(std::move(in_class_names)),
      data_dir_(std::move(data_dir)) {
  if (class_names_.empty()) class_names_ = PoolClassNames(in_pool_);
  std::filesystem::create_directories(data_dir_);
  std::vector<std::filesystem::path> logs;
  for (const auto& f : std::filesystem::directory_iterator(data_dir_)) {
    if (f.is_regular_file() && f.path().extension() == ".jsonl") logs.push_back(f.path());
  }
  std::sort(logs.begin(), logs.end());
  for (const auto& log : logs) Replay(log);
}

void SessionStore::Append(const std::filesystem::path& log, const nlohmann::json& event) {
  std::ofstream out(log, std::ios::app);
  out << event.dump() << '\n';
  out.flush();
  if (!out) {
    throw Error(ErrorKind::kIo, "cannot append to session log '" + log.string() + "'");
  }
}

void SessionStore::Replay(const std::filesystem::path& log) {
  std::ifstream in(log);
  std::string line;
  std::shared_ptr<Entry> entry;
  std::size_t line_no = 0;
  try {
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      const nlohmann::json ev = nlohmann::json::parse(line);
      const std::string type = ev.at("event").get<std::string>();
      if (type == "created") {
        SessionParams p;
        const auto& pj = ev.at("params");
        p.total_images = pj.at("total_images").get<std::size_t>();
        p.page_size = pj.at("page_size").get<std::size_t>();
        p.seed = pj.at("seed").get<std::uint64_t>();
        p.exact_balance = pj.at("exact_balance").get<bool>();
        p.session_id = pj.at("session_id").get<std::string>();
        std::vector<ManifestEntry> manifest;
        for (const auto& m : ev.at("manifest")) {
          manifest.push_back({m.at("image_id").get<std::string>(),
                              ParseSource(m.at("source").get<std::string>()),
                              m.at("true_class").get<std::string>(),
                              m.at("file").get<std::string>()});
        }
        entry = std::make_shared<Entry>();
        entry->session = BenchSession::FromManifest(
            p, ev.at("class_names").get<std::vector<std::string>>(), std::move(manifest));
        entry->log = log;
      } else if (!entry) {
        throw Error(ErrorKind::kMalformedHeader, "event before 'created'");
      } else if (type == "selections") {
        entry->session.Submit(ev.at("page").get<std::size_t>(),
                              ev.at("selections").get<std::map<std::string, std::string>>());
      } else if (type == "scored") {
        entry->scored = true;
      }
    }
  } catch (const std::exception& e) {
    throw Error(ErrorKind::kMalformedHeader,
                log.string() + ":" + std::to_string(line_no) + ": " + e.what());
  }
  if (entry) sessions_[entry->session.id()] = entry;
}

std::string SessionStore::Create(SessionParams params) {
  std::unique_lock lock(mu_);
  if (params.session_id.empty()) {
    for (std::size_t n = 0;; ++n) {
      char buf[48];
      std::snprintf(buf, sizeof(buf), "s%016llx-%zu",
                    static_cast<unsigned long long>(params.seed), n);
      if (!sessions_.count(buf)) {
        params.session_id = buf;
        break;
      }
    }
  } else {
    for (char c : params.session_id) {
      if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_') {
        throw Error(ErrorKind::kInvalidArgument,
                    "session id may only contain letters, digits, '-' and '_'");
      }
    }
    if (sessions_.count(params.session_id)) {
      throw Error(ErrorKind::kConflict, "session '" + params.session_id + "' already exists");
    }
  }
  BenchSession session = BenchSession::Create(in_pool_, out_pool_, class_names_, params);
  nlohmann::json manifest = nlohmann::json::array();
  for (const ManifestEntry& e : session.manifest()) {
    manifest.push_back({{"image_id", e.image_id},
                        {"source", SourceName(e.source)},
                        {"true_class", e.true_class},
                        {"file", e.file.string()}});
  }
  const auto log = data_dir_ / (session.id() + ".jsonl");
  Append(log, {{"event", "created"},
               {"params", ParamsJson(session.params())},
               {"class_names", session.class_names()},
               {"manifest", manifest}});
  const std::string id = session.id();
  auto entry = std::make_shared<Entry>();
  entry->session = std::move(session);
  entry->log = log;
  sessions_[id] = std::move(entry);
  return id;
}

std::shared_ptr<SessionStore::Entry> SessionStore::Find(const std::string& id) const {
  std::shared_lock lock(mu_);
  const auto it = sessions_.find(id);
  if (it == sessions_.end()) {
    throw Error(ErrorKind::kNotFound, "unknown session '" + id + "'");
  }
  return it->second;
}

nlohmann::json SessionStore::Status(const std::string& id) const {
  const auto entry = Find(id);
  std::lock_guard lock(entry->mu);
  const BenchSession& s = entry->session;
  nlohmann::json submitted = nlohmann::json::array();
  std::optional<std::size_t> next;
  for (std::size_t p = 0; p < s.page_count(); ++p) {
    submitted.push_back(s.page_submitted(p));
    if (!next && !s.page_submitted(p)) next = p;
  }
  return {{"session_id", s.id()},
          {"total_images", s.manifest().size()},
          {"page_size", s.params().page_size},
          {"n_pages", s.page_count()},
          {"class_names", s.class_names()},
          {"submitted", submitted},
          {"next_page", next ? nlohmann::json(*next) : nlohmann::json()},
          {"scored", entry->scored}};
}

nlohmann::json SessionStore::Page(const std::string& id, std::size_t page) const {
  const auto entry = Find(id);
  std::lock_guard lock(entry->mu);
  const BenchSession& s = entry->session;
  nlohmann::json images = nlohmann::json::array();
  for (const std::string& image_id : s.PageImageIds(page)) {
    images.push_back({{"image_id", image_id},
                      {"url", "/sessions/" + s.id() + "/images/" + image_id}});
  }
  return {{"session_id", s.id()},
          {"page_index", page},
          {"n_pages", s.page_count()},
          {"class_names", s.class_names()},
          {"images", images},
          {"selections", s.PageSelections(page)}};
}

nlohmann::json SessionStore::Submit(const std::string& id, std::size_t page,
                                    const std::map<std::string, std::string>& selections) {
  const auto entry = Find(id);
  std::lock_guard lock(entry->mu);
  if (entry->scored) {
    throw Error(ErrorKind::kConflict, "session '" + id + "' is already scored");
  }
  entry->session.Submit(page, selections);
  Append(entry->log, {{"event", "selections"}, {"page", page}, {"selections", selections}});
  return {{"ok", true},
          {"page_index", page},
          {"selected", selections.size()},
          {"submitted_pages", entry->session.submitted_pages()},
          {"n_pages", entry->session.page_count()}};
}

nlohmann::json SessionStore::Score(const std::string& id) {
  const auto entry = Find(id);
  std::lock_guard lock(entry->mu);
  nlohmann::json report = entry->session.Score();
  if (!entry->scored) {
    Append(entry->log, {{"event", "scored"}});
    entry->scored = true;
  }
  return report;
}

nlohmann::json SessionStore::Report(const std::string& id) const {
  const auto entry = Find(id);
  std::lock_guard lock(entry->mu);
  if (!entry->scored) {
    throw Error(ErrorKind::kConflict, "session '" + id + "' has not been scored yet");
  }
  return entry->session.Score();
}

ManifestEntry SessionStore::Image(const std::string& id, const std::string& image_id) const {
  const auto entry = Find(id);
  std::lock_guard lock(entry->mu);
  return entry->session.Image(image_id);
}

std::vector<std::string> SessionStore::SessionIds() const {
  std::shared_lock lock(mu_);
  std::vector<std::string> ids;
  for (const auto& [id, e] : sessions_) ids.push_back(id);
  return ids;
}

}  // namespace oodkit::bench
