// Copyright 2026 The logformer-cpp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Versioned binary container for ModelParams.
//
// Layout: "LGFM" | u32 version | u64 header length | JSON header | payload.
// Integers and tensor values are little-endian; tensors are stored
// back-to-back in header index order. The header records the config
// fingerprints, the training stage, each tensor's name/shape/dtype/offset
// and flags, and a SHA-256 of the payload.

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <type_traits>
#include <vector>

#include "json.hpp"
#include "logformer/error.hpp"
#include "logformer/hash.hpp"
#include "logformer/model.hpp"

namespace logformer::ckpt {

inline constexpr char kMagic[4] = {'L', 'G', 'F', 'M'};
inline constexpr std::uint32_t kFormatVersion = 1;

struct Meta {
  std::string config_fingerprint;  // whole pipeline config
  std::string model_fingerprint;   // sections that fix tensor shapes
  std::uint64_t seed = 0;
  nlohmann::json model_config = nlohmann::json::object();
};

template <class Real>
struct Checkpoint {
  model::ModelParams<Real> params;
  Meta meta;
  std::string dtype;  // dtype stored on disk
};

namespace detail {

template <class T>
void put_le(std::string& out, T v) {
  static_assert(std::is_trivially_copyable_v<T>);
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(buf, buf + sizeof(T));
  out.append(buf, sizeof(T));
}

template <class T>
T get_le(const char* p) {
  char buf[sizeof(T)];
  std::memcpy(buf, p, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(buf, buf + sizeof(T));
  T v;
  std::memcpy(&v, buf, sizeof(T));
  return v;
}

template <class Real>
constexpr const char* dtype_name() {
  return std::is_same_v<Real, double> ? "f64" : "f32";
}

}  // namespace detail

template <class Real>
std::string serialize(const model::ModelParams<Real>& params, const Meta& meta) {
  std::string payload;
  nlohmann::json index = nlohmann::json::array();
  for (const auto& e : params.entries()) {
    const auto offset = payload.size();
    for (Real v : e.tensor.data()) detail::put_le(payload, v);
    index.push_back({{"name", e.name},
                     {"shape", {e.tensor.rows(), e.tensor.cols()}},
                     {"dtype", detail::dtype_name<Real>()},
                     {"offset", offset},
                     {"nbytes", payload.size() - offset},
                     {"trainable", e.tensor.requires_grad()},
                     {"adapter", e.adapter},
                     {"constant", e.constant}});
  }
  nlohmann::json header = {{"config_fingerprint", meta.config_fingerprint},
                           {"model_fingerprint", meta.model_fingerprint},
                           {"seed", meta.seed},
                           {"model_config", meta.model_config},
                           {"stage", model::to_string(params.stage())},
                           {"tensors", index},
                           {"payload_bytes", payload.size()},
                           {"payload_sha256", sha256_hex(payload)}};
  const std::string h = header.dump();
  std::string out(kMagic, 4);
  detail::put_le<std::uint32_t>(out, kFormatVersion);
  detail::put_le<std::uint64_t>(out, h.size());
  out += h;
  out += payload;
  return out;
}

template <class Real>
Checkpoint<Real> deserialize(const std::string& bytes, const std::string& what = "checkpoint") {
  constexpr std::size_t kPrefix = 4 + 4 + 8;
  if (bytes.size() < kPrefix || std::memcmp(bytes.data(), kMagic, 4) != 0)
    throw DataError(what + ": not a checkpoint (bad magic)");
  const auto version = detail::get_le<std::uint32_t>(bytes.data() + 4);
  if (version != kFormatVersion)
    throw DataError(what + ": unsupported checkpoint format version " + std::to_string(version) +
                    " (this build reads version " + std::to_string(kFormatVersion) + ")");
  const auto hlen = detail::get_le<std::uint64_t>(bytes.data() + 8);
  if (hlen > bytes.size() - kPrefix) throw DataError(what + ": truncated header");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(bytes.begin() + kPrefix,
                                   bytes.begin() + static_cast<std::ptrdiff_t>(kPrefix + hlen));
  } catch (const nlohmann::json::exception& e) {
    throw DataError(what + ": corrupt header: " + e.what());
  }
  const std::string_view payload(bytes.data() + kPrefix + hlen, bytes.size() - kPrefix - hlen);
  Checkpoint<Real> ck;
  try {
    const auto expected = header.at("payload_bytes").get<std::uint64_t>();
    if (payload.size() != expected)
      throw DataError(what + ": payload is " + std::to_string(payload.size()) + " bytes, expected " +
                      std::to_string(expected) + " (truncated or padded file)");
    if (sha256_hex(payload) != header.at("payload_sha256").get<std::string>())
      throw DataError(what + ": payload checksum mismatch");
    ck.meta.config_fingerprint = header.at("config_fingerprint").get<std::string>();
    ck.meta.model_fingerprint = header.at("model_fingerprint").get<std::string>();
    ck.meta.seed = header.at("seed").get<std::uint64_t>();
    ck.meta.model_config = header.at("model_config");
    ck.params.set_stage_flag(model::stage_from_string(header.at("stage").get<std::string>()));
    std::uint64_t cursor = 0;
    for (const auto& t : header.at("tensors")) {
      const auto name = t.at("name").get<std::string>();
      const auto shape = t.at("shape").get<std::vector<std::size_t>>();
      const auto dtype = t.at("dtype").get<std::string>();
      const auto offset = t.at("offset").get<std::uint64_t>();
      const auto nbytes = t.at("nbytes").get<std::uint64_t>();
      if (shape.size() != 2 || shape[0] == 0 || shape[1] == 0)
        throw DataError(what + ": tensor '" + name + "' has an invalid shape");
      const std::size_t width = dtype == "f64" ? 8 : dtype == "f32" ? 4 : 0;
      if (width == 0) throw DataError(what + ": tensor '" + name + "' has unknown dtype " + dtype);
      const std::size_t n = shape[0] * shape[1];
      if (offset != cursor || nbytes != n * width || offset + nbytes > payload.size())
        throw DataError(what + ": tensor '" + name + "' index entry overlaps or overruns the payload");
      cursor += nbytes;
      ck.dtype = dtype;
      std::vector<Real> values(n);
      const char* p = payload.data() + offset;
      for (std::size_t i = 0; i < n; ++i)
        values[i] = width == 8 ? static_cast<Real>(detail::get_le<double>(p + 8 * i))
                               : static_cast<Real>(detail::get_le<float>(p + 4 * i));
      auto tensor = Tensor<Real>::from_vector(shape[0], shape[1], std::move(values));
      tensor.set_requires_grad(t.at("trainable").get<bool>());
      ck.params.add(name, std::move(tensor), t.at("adapter").get<bool>(),
                    t.at("constant").get<bool>());
    }
    if (cursor != payload.size()) throw DataError(what + ": payload has bytes not covered by the index");
  } catch (const nlohmann::json::exception& e) {
    throw DataError(what + ": malformed header: " + e.what());
  }
  return ck;
}

template <class Real>
void save(const model::ModelParams<Real>& params, const Meta& meta, const std::string& path) {
  const auto bytes = serialize(params, meta);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw RuntimeError("cannot write checkpoint '" + path + "'");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw RuntimeError("failed writing checkpoint '" + path + "'");
}

template <class Real>
Checkpoint<Real> load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open checkpoint '" + path + "'");
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return deserialize<Real>(bytes, path);
}

}  // namespace logformer::ckpt
