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

#pragma once

// Minimal RIFF/WAVE reader and writer: PCM 16-bit and IEEE float 32-bit.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace dpdfnet {

enum class WavEncoding { kPcm16, kFloat32 };

struct WavData {
  int sample_rate = 16000;
  int channels = 1;
  WavEncoding encoding = WavEncoding::kPcm16;
  std::vector<double> samples;  // interleaved, full scale = 1.0
};

class WavError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

WavData read_wav(const std::string& path);
// PCM16 output is scaled by 32768, rounded and saturated.
void write_wav(const std::string& path, const WavData& wav);

// Throws WavError unless the file is 16 kHz mono.
void require_16k_mono(const WavData& wav, const std::string& path);

}  // namespace dpdfnet
