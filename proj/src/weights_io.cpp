/* Copyright 2026 The dpdfnet-cpp Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "dpdfnet/model.hpp"
#include "json.hpp"

namespace dpdfnet {
namespace {

constexpr char kMagic[8] = {'D', 'P', 'D', 'F', 'N', 'E', 'T', 'W'};
constexpr std::uint64_t kMaxManifestBytes = 64ull << 20;

using json = nlohmann::json;

json config_to_json(const ModelConfig& c) {
  return json{{"dprnn_blocks", c.dprnn_blocks}, {"conv_channels", c.conv_channels},
              {"erb_bands", c.erb_bands},       {"df_bins", c.df_bins},
              {"df_order", c.df_order},         {"lookahead", c.lookahead},
              {"fft_bins", c.fft_bins},         {"emb_dim", c.emb_dim},
              {"groups", c.groups}};
}

ModelConfig config_from_json(const json& j) {
  ModelConfig c;
  c.dprnn_blocks = j.at("dprnn_blocks").get<std::size_t>();
  c.conv_channels = j.at("conv_channels").get<std::size_t>();
  c.erb_bands = j.at("erb_bands").get<std::size_t>();
  c.df_bins = j.at("df_bins").get<std::size_t>();
  c.df_order = j.at("df_order").get<std::size_t>();
  c.lookahead = j.at("lookahead").get<std::size_t>();
  c.fft_bins = j.at("fft_bins").get<std::size_t>();
  c.emb_dim = j.at("emb_dim").get<std::size_t>();
  c.groups = j.at("groups").get<std::size_t>();
  return c;
}

void put_u64_le(std::ostream& os, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  os.write(reinterpret_cast<const char*>(b), 8);
}

std::uint32_t to_le(std::uint32_t v) {
  if constexpr (std::endian::native == std::endian::little) {
    return v;
  } else {
    return ((v & 0xffu) << 24) | ((v & 0xff00u) << 8) | ((v >> 8) & 0xff00u) |
           (v >> 24);
  }
}

[[noreturn]] void truncated(const std::string& what) {
  throw WeightError(WeightError::Kind::kTruncated, "",
                    "weights: file truncated while reading " + what);
}

}  // namespace

void save_weights(const ModelWeights& weights, std::ostream& sink) {
  json manifest;
  manifest["config"] = config_to_json(weights.config);
  manifest["tensors"] = json::array();
  for (const auto& t : weights.tensors) {
    if (t.numel() != t.values.size()) {
      throw WeightError(WeightError::Kind::kShapeMismatch, t.name,
                        "weights: tensor '" + t.name +
                            "' value count does not match its shape");
    }
    manifest["tensors"].push_back({{"name", t.name}, {"shape", t.shape}});
  }
  const std::string text = manifest.dump();
  sink.write(kMagic, sizeof(kMagic));
  put_u64_le(sink, text.size());
  sink.write(text.data(), static_cast<std::streamsize>(text.size()));
  std::vector<std::uint32_t> buf;
  for (const auto& t : weights.tensors) {
    buf.resize(t.values.size());
    for (std::size_t i = 0; i < t.values.size(); ++i) {
      buf[i] = to_le(std::bit_cast<std::uint32_t>(t.values[i]));
    }
    sink.write(reinterpret_cast<const char*>(buf.data()),
               static_cast<std::streamsize>(buf.size() * 4));
  }
  if (!sink) throw std::runtime_error("weights: write failed");
}

ModelWeights load_weights(std::istream& source) {
  char magic[8];
  if (!source.read(magic, 8)) {
    if (source.gcount() == 0) {
      throw WeightError(WeightError::Kind::kBadMagic, "",
                        "weights: empty input, expected magic DPDFNETW");
    }
    truncated("magic");
  }
  if (std::memcmp(magic, kMagic, 8) != 0) {
    throw WeightError(WeightError::Kind::kBadMagic, "",
                      "weights: bad magic, not a DPDFNETW container");
  }
  unsigned char lenb[8];
  if (!source.read(reinterpret_cast<char*>(lenb), 8)) truncated("manifest length");
  std::uint64_t len = 0;
  for (int i = 0; i < 8; ++i) len |= static_cast<std::uint64_t>(lenb[i]) << (8 * i);
  if (len > kMaxManifestBytes) {
    throw WeightError(WeightError::Kind::kMalformedManifest, "",
                      "weights: manifest length " + std::to_string(len) +
                          " is implausible");
  }
  std::string text(len, '\0');
  if (!source.read(text.data(), static_cast<std::streamsize>(len))) {
    truncated("manifest");
  }

  ModelWeights w;
  try {
    const json manifest = json::parse(text);
    w.config = config_from_json(manifest.at("config"));
    for (const auto& jt : manifest.at("tensors")) {
      NamedTensor t;
      t.name = jt.at("name").get<std::string>();
      t.shape = jt.at("shape").get<std::vector<std::size_t>>();
      w.tensors.push_back(std::move(t));
    }
  } catch (const json::exception& e) {
    throw WeightError(WeightError::Kind::kMalformedManifest, "",
                      std::string("weights: malformed manifest: ") + e.what());
  }

  std::vector<std::uint32_t> buf;
  for (auto& t : w.tensors) {
    const std::size_t n = t.numel();
    buf.resize(n);
    if (!source.read(reinterpret_cast<char*>(buf.data()),
                     static_cast<std::streamsize>(n * 4))) {
      truncated("tensor '" + t.name + "'");
    }
    t.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      t.values[i] = std::bit_cast<float>(to_le(buf[i]));
      if (!std::isfinite(t.values[i])) {
        throw WeightError(WeightError::Kind::kNonFinite, t.name,
                          "weights: tensor '" + t.name +
                              "' contains a non-finite value at index " +
                              std::to_string(i));
      }
    }
  }
  return w;
}

void save_weights_file(const ModelWeights& weights, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("weights: cannot open '" + path + "' for writing");
  save_weights(weights, os);
}

ModelWeights load_weights_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("weights: cannot open '" + path + "'");
  return load_weights(is);
}

}  // namespace dpdfnet
