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

#include "container.hpp"

#include <iterator>

namespace oodkit::container {

namespace {
constexpr std::size_t kMagicSize = 8;
// Guards against reading a garbage length as a multi-gigabyte header.
constexpr std::uint32_t kMaxHeaderBytes = 64u << 20;
}  // namespace

Writer::Writer(const std::filesystem::path& path, std::string_view magic)
    : path_(path), out_(path, std::ios::binary | std::ios::trunc) {
  if (!out_) {
    throw Error(ErrorKind::kIo, "cannot open '" + path.string() + "' for writing");
  }
  out_.write(magic.data(), static_cast<std::streamsize>(magic.size()));
}

void Writer::Header(const nlohmann::json& header) {
  const std::string text = header.dump();
  const std::uint32_t len = ToLittleEndian(static_cast<std::uint32_t>(text.size()));
  out_.write(reinterpret_cast<const char*>(&len), sizeof(len));
  out_.write(text.data(), static_cast<std::streamsize>(text.size()));
}

void Writer::Finish() {
  out_.flush();
  if (!out_) {
    throw Error(ErrorKind::kIo, "write to '" + path_.string() + "' failed");
  }
  out_.close();
}

Reader::Reader(const std::filesystem::path& path) : path_(path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorKind::kIo, "cannot open '" + path.string() + "'");
  }
  bytes_.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void Reader::ExpectMagic(std::string_view magic) {
  if (bytes_.size() < kMagicSize ||
      std::string_view(bytes_.data(), kMagicSize) != magic) {
    throw Error(ErrorKind::kMalformedHeader,
                path_.string() + ": bad magic at byte 0, expected '" +
                    std::string(magic) + "'");
  }
  pos_ = kMagicSize;
}

nlohmann::json Reader::Header() {
  Require(sizeof(std::uint32_t), "header length");
  std::uint32_t len = 0;
  std::memcpy(&len, bytes_.data() + pos_, sizeof(len));
  len = ToLittleEndian(len);
  if (len > kMaxHeaderBytes) {
    throw Error(ErrorKind::kMalformedHeader,
                path_.string() + ": implausible header length " +
                    std::to_string(len) + " at byte " + std::to_string(pos_));
  }
  pos_ += sizeof(len);
  if (bytes_.size() - pos_ < len) {
    throw Error(ErrorKind::kMalformedHeader,
                path_.string() + ": header truncated at byte " + std::to_string(pos_));
  }
  const std::size_t start = pos_;
  pos_ += len;
  nlohmann::json header = nlohmann::json::parse(
      bytes_.begin() + static_cast<std::ptrdiff_t>(start),
      bytes_.begin() + static_cast<std::ptrdiff_t>(pos_), nullptr,
      /*allow_exceptions=*/false);
  if (header.is_discarded() || !header.is_object()) {
    throw Error(ErrorKind::kMalformedHeader,
                path_.string() + ": header at byte " + std::to_string(start) +
                    " is not a JSON object");
  }
  return header;
}

void Reader::Require(std::size_t n, std::string_view what) const {
  if (bytes_.size() - pos_ < n) {
    throw Error(ErrorKind::kDimensionMismatch,
                path_.string() + ": payload too short reading " + std::string(what) +
                    " at byte " + std::to_string(pos_) + " (need " + std::to_string(n) +
                    " bytes, " + std::to_string(bytes_.size() - pos_) + " remain)");
  }
}

void Reader::ExpectEnd() const {
  if (pos_ != bytes_.size()) {
    throw Error(ErrorKind::kDimensionMismatch,
                path_.string() + ": " + std::to_string(bytes_.size() - pos_) +
                    " unexpected trailing bytes at byte " + std::to_string(pos_));
  }
}

bool HasMagic(const std::filesystem::path& path, std::string_view magic) {
  std::ifstream in(path, std::ios::binary);
  char buf[kMagicSize] = {};
  in.read(buf, kMagicSize);
  return in.gcount() == static_cast<std::streamsize>(kMagicSize) &&
         std::string_view(buf, kMagicSize) == magic;
}

}  // namespace oodkit::container
