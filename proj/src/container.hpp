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

// Little-endian binary container primitives shared by the embedding, Gaussian
// model and OE head file formats:
//
//   8-byte magic | u32 header length | UTF-8 JSON header | raw payload
//
// Payload arrays are written little-endian regardless of host byte order.

#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "oodkit/error.hpp"

namespace oodkit::container {

template <typename T>
T ToLittleEndian(T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  if constexpr (std::endian::native == std::endian::little) {
    return value;
  } else {
    unsigned char bytes[sizeof(T)];
    std::memcpy(bytes, &value, sizeof(T));
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) {
      std::swap(bytes[i], bytes[sizeof(T) - 1 - i]);
    }
    std::memcpy(&value, bytes, sizeof(T));
    return value;
  }
}

class Writer {
 public:
  Writer(const std::filesystem::path& path, std::string_view magic);

  void Header(const nlohmann::json& header);

  template <typename T>
  void Array(std::span<const T> values) {
    for (const T v : values) {
      const T le = ToLittleEndian(v);
      out_.write(reinterpret_cast<const char*>(&le), sizeof(T));
    }
  }

  // Flushes and throws kIo if any write failed.
  void Finish();

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

class Reader {
 public:
  explicit Reader(const std::filesystem::path& path);

  // Throws kMalformedHeader unless the file starts with `magic`.
  void ExpectMagic(std::string_view magic);
  nlohmann::json Header();

  template <typename T>
  void Array(std::span<T> out, std::string_view what) {
    Require(out.size() * sizeof(T), what);
    for (T& v : out) {
      std::memcpy(&v, bytes_.data() + pos_, sizeof(T));
      v = ToLittleEndian(v);
      pos_ += sizeof(T);
    }
  }

  // Throws kDimensionMismatch if unread bytes remain.
  void ExpectEnd() const;

  std::size_t offset() const { return pos_; }
  std::size_t size() const { return bytes_.size(); }
  const std::filesystem::path& path() const { return path_; }

 private:
  void Require(std::size_t n, std::string_view what) const;

  std::filesystem::path path_;
  std::vector<char> bytes_;
  std::size_t pos_ = 0;
};

bool HasMagic(const std::filesystem::path& path, std::string_view magic);

// Typed header accessors that report the missing/mistyped field by name.
template <typename T>
T Field(const nlohmann::json& header, const char* name,
        const std::filesystem::path& path) {
  if (!header.contains(name)) {
    throw Error(ErrorKind::kMalformedHeader,
                path.string() + ": header is missing field '" + name + "'");
  }
  try {
    return header.at(name).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kMalformedHeader, path.string() + ": header field '" +
                                                 name + "' has wrong type: " +
                                                 e.what());
  }
}

}  // namespace oodkit::container
