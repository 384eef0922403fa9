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

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "oodkit/bench.hpp"

namespace httplib {
class Server;
}

namespace oodkit::bench {

inline constexpr int kDefaultPort = 8787;

// HTTP+JSON front end of a SessionStore:
//
//   POST /sessions
//   GET  /sessions/{id}
//   GET  /sessions/{id}/pages/{k}
//   POST /sessions/{id}/pages/{k}/selections
//   POST /sessions/{id}/score
//   GET  /sessions/{id}/report
//   GET  /sessions/{id}/images/{image_id}
//
// plus optional static files (the browser UI) under "/".
class BenchServer {
 public:
  explicit BenchServer(SessionStore& store,
                       std::optional<std::filesystem::path> static_dir = std::nullopt);
  ~BenchServer();

  BenchServer(const BenchServer&) = delete;
  BenchServer& operator=(const BenchServer&) = delete;

  // Returns the bound port, or -1.
  int BindToAnyPort(const std::string& host);
  bool Bind(const std::string& host, int port);
  // Blocks until Stop().
  bool ListenAfterBind();
  void Stop();
  bool is_running() const;

 private:
  SessionStore& store_;
  std::unique_ptr<httplib::Server> server_;
};

}  // namespace oodkit::bench
