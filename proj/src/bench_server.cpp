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

#include "oodkit/bench_server.hpp"

#include <fstream>
#include <iterator>

#include "httplib.h"
#include "oodkit/error.hpp"

namespace oodkit::bench {

namespace {

int HttpStatus(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kNotFound: return 404;
    case ErrorKind::kConflict: return 409;
    case ErrorKind::kIo: return 500;
    default: return 400;
  }
}

void SendJson(httplib::Response& res, const nlohmann::json& body, int status = 200) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void SendError(httplib::Response& res, int status, const std::string& kind,
               const std::string& message) {
  SendJson(res, {{"error", kind}, {"message", message}}, status);
}

std::string ContentType(const std::filesystem::path& file) {
  std::string ext = file.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  if (ext == ".png") return "image/png";
  if (ext == ".jpg" || ext == ".jpeg") return "image/jpeg";
  return "application/octet-stream";
}

std::size_t PageIndex(const std::string& s) {
  try {
    return static_cast<std::size_t>(std::stoull(s));
  } catch (...) {
    throw Error(ErrorKind::kNotFound, "bad page index '" + s + "'");
  }
}

// Runs `body`, translating library errors and bad JSON into HTTP statuses.
template <typename Fn>
httplib::Server::Handler Guard(Fn body) {
  return [body](const httplib::Request& req, httplib::Response& res) {
    try {
      body(req, res);
    } catch (const Error& e) {
      SendError(res, HttpStatus(e.kind()), ErrorKindName(e.kind()), e.what());
    } catch (const nlohmann::json::exception& e) {
      SendError(res, 400, "bad_request", e.what());
    } catch (const std::exception& e) {
      SendError(res, 500, "internal", e.what());
    }
  };
}

nlohmann::json ParseBody(const httplib::Request& req) {
  if (req.body.empty()) return nlohmann::json::object();
  nlohmann::json body = nlohmann::json::parse(req.body);
  if (!body.is_object()) {
    throw Error(ErrorKind::kInvalidArgument, "request body must be a JSON object");
  }
  return body;
}

}  // namespace

BenchServer::BenchServer(SessionStore& store, std::optional<std::filesystem::path> static_dir)
    : store_(store), server_(std::make_unique<httplib::Server>()) {
  auto& srv = *server_;
  srv.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                           {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
                           {"Access-Control-Allow-Headers", "Content-Type"}});
  srv.Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

  srv.Post("/sessions", Guard([this](const httplib::Request& req, httplib::Response& res) {
    const nlohmann::json body = ParseBody(req);
    SessionParams p;
    p.total_images = body.value("total_images", std::size_t{0});
    p.page_size = body.value("page_size", std::size_t{20});
    p.seed = body.value("seed", std::uint64_t{0});
    p.exact_balance = body.value("exact_balance", false);
    p.session_id = body.value("session_id", std::string());
    const std::string id = store_.Create(p);
    SendJson(res, store_.Status(id), 201);
  }));

  srv.Get(R"(/sessions/([A-Za-z0-9_-]+))",
          Guard([this](const httplib::Request& req, httplib::Response& res) {
            SendJson(res, store_.Status(req.matches[1]));
          }));

  srv.Get(R"(/sessions/([A-Za-z0-9_-]+)/pages/([^/]+))",
          Guard([this](const httplib::Request& req, httplib::Response& res) {
            SendJson(res, store_.Page(req.matches[1], PageIndex(req.matches[2])));
          }));

  srv.Post(R"(/sessions/([A-Za-z0-9_-]+)/pages/([^/]+)/selections)",
           Guard([this](const httplib::Request& req, httplib::Response& res) {
             const nlohmann::json body = ParseBody(req);
             std::map<std::string, std::string> selections;
             if (body.contains("selections")) {
               selections = body.at("selections").get<std::map<std::string, std::string>>();
             }
             SendJson(res, store_.Submit(req.matches[1], PageIndex(req.matches[2]), selections));
           }));

  srv.Post(R"(/sessions/([A-Za-z0-9_-]+)/score)",
           Guard([this](const httplib::Request& req, httplib::Response& res) {
             SendJson(res, store_.Score(req.matches[1]));
           }));

  srv.Get(R"(/sessions/([A-Za-z0-9_-]+)/report)",
          Guard([this](const httplib::Request& req, httplib::Response& res) {
            SendJson(res, store_.Report(req.matches[1]));
          }));

  srv.Get(R"(/sessions/([A-Za-z0-9_-]+)/images/([A-Za-z0-9_-]+))",
          Guard([this](const httplib::Request& req, httplib::Response& res) {
            const ManifestEntry entry = store_.Image(req.matches[1], req.matches[2]);
            std::ifstream in(entry.file, std::ios::binary);
            if (!in) {
              throw Error(ErrorKind::kIo, "image file for '" + entry.image_id + "' is unreadable");
            }
            std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
            res.set_content(std::move(bytes), ContentType(entry.file));
          }));

  if (static_dir) srv.set_mount_point("/", static_dir->string());
}

BenchServer::~BenchServer() { Stop(); }

int BenchServer::BindToAnyPort(const std::string& host) { return server_->bind_to_any_port(host); }

bool BenchServer::Bind(const std::string& host, int port) { return server_->bind_to_port(host, port); }

bool BenchServer::ListenAfterBind() { return server_->listen_after_bind(); }

void BenchServer::Stop() {
  if (server_ && server_->is_running()) server_->stop();
}

bool BenchServer::is_running() const { return server_->is_running(); }

}  // namespace oodkit::bench
