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

#include "dpdfnet/wav.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

namespace dpdfnet {
namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint16_t u16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}
std::uint32_t u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}
void put16(std::vector<unsigned char>& b, std::uint16_t v) {
  b.push_back(static_cast<unsigned char>(v));
  b.push_back(static_cast<unsigned char>(v >> 8));
}
void put32(std::vector<unsigned char>& b, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) b.push_back(static_cast<unsigned char>(v >> (8 * i)));
}
void put_tag(std::vector<unsigned char>& b, const char* tag) { b.insert(b.end(), tag, tag + 4); }

}  // namespace

WavData read_wav(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw WavError("cannot open '" + path + "'");
  const std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                         std::istreambuf_iterator<char>());
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    throw WavError("'" + path + "' is not a RIFF/WAVE file");
  }

  WavData wav;
  std::uint16_t format = 0, bits = 0, block_align = 0;
  bool have_fmt = false;
  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const unsigned char* chunk = bytes.data() + pos;
    const std::uint32_t size = u32(chunk + 4);
    const std::size_t body = pos + 8;
    if (body + size > bytes.size() && std::memcmp(chunk, "data", 4) != 0) {
      throw WavError("'" + path + "': truncated chunk");
    }
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (size < 16) throw WavError("'" + path + "': fmt chunk too short");
      const unsigned char* f = bytes.data() + body;
      format = u16(f);
      wav.channels = u16(f + 2);
      wav.sample_rate = static_cast<int>(u32(f + 4));
      block_align = u16(f + 12);
      bits = u16(f + 14);
      if (format == kFormatExtensible && size >= 26) format = u16(f + 24);
      have_fmt = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      if (!have_fmt) throw WavError("'" + path + "': data chunk before fmt chunk");
      // Tolerate a data size that overruns the file (streamed writers).
      const std::size_t avail = std::min<std::size_t>(size, bytes.size() - body);
      const unsigned char* d = bytes.data() + body;
      if (format == kFormatPcm && bits == 16) {
        wav.encoding = WavEncoding::kPcm16;
        wav.samples.resize(avail / 2);
        for (std::size_t i = 0; i < wav.samples.size(); ++i) {
          wav.samples[i] = static_cast<std::int16_t>(u16(d + 2 * i)) / 32768.0;
        }
      } else if (format == kFormatFloat && bits == 32) {
        wav.encoding = WavEncoding::kFloat32;
        wav.samples.resize(avail / 4);
        for (std::size_t i = 0; i < wav.samples.size(); ++i) {
          wav.samples[i] = std::bit_cast<float>(u32(d + 4 * i));
        }
      } else {
        throw WavError("'" + path + "': unsupported encoding (format " +
                       std::to_string(format) + ", " + std::to_string(bits) +
                       " bits); need PCM 16-bit or float 32-bit");
      }
      if (wav.channels < 1 || block_align == 0) {
        throw WavError("'" + path + "': invalid channel layout");
      }
      return wav;
    }
    pos = body + size + (size & 1u);
  }
  throw WavError("'" + path + "': no data chunk");
}

void write_wav(const std::string& path, const WavData& wav) {
  const bool pcm = wav.encoding == WavEncoding::kPcm16;
  const std::uint16_t bits = pcm ? 16 : 32;
  const std::uint16_t align = static_cast<std::uint16_t>(wav.channels * bits / 8);
  const auto data_bytes = static_cast<std::uint32_t>(wav.samples.size() * (bits / 8));

  std::vector<unsigned char> b;
  b.reserve(44 + data_bytes);
  put_tag(b, "RIFF");
  put32(b, 36 + data_bytes);
  put_tag(b, "WAVE");
  put_tag(b, "fmt ");
  put32(b, 16);
  put16(b, pcm ? kFormatPcm : kFormatFloat);
  put16(b, static_cast<std::uint16_t>(wav.channels));
  put32(b, static_cast<std::uint32_t>(wav.sample_rate));
  put32(b, static_cast<std::uint32_t>(wav.sample_rate) * align);
  put16(b, align);
  put16(b, bits);
  put_tag(b, "data");
  put32(b, data_bytes);
  for (double s : wav.samples) {
    if (pcm) {
      const long q = std::clamp(std::lround(s * 32768.0), -32768L, 32767L);
      put16(b, static_cast<std::uint16_t>(static_cast<std::int16_t>(q)));
    } else {
      put32(b, std::bit_cast<std::uint32_t>(static_cast<float>(s)));
    }
  }

  std::ofstream out(path, std::ios::binary);
  if (!out) throw WavError("cannot open '" + path + "' for writing");
  out.write(reinterpret_cast<const char*>(b.data()), static_cast<std::streamsize>(b.size()));
  if (!out) throw WavError("write to '" + path + "' failed");
}

void require_16k_mono(const WavData& wav, const std::string& path) {
  if (wav.sample_rate != 16000) {
    throw WavError("'" + path + "' has sample rate " + std::to_string(wav.sample_rate) +
                   " Hz; only 16000 Hz is supported (no resampling)");
  }
  if (wav.channels != 1) {
    throw WavError("'" + path + "' has " + std::to_string(wav.channels) +
                   " channels; only mono is supported");
  }
}

}  // namespace dpdfnet
