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

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "dpdfnet/fft.hpp"

namespace dpdfnet {

using cplx = std::complex<double>;

// Analysis parameters. The default is 16 kHz, 20 ms window, 10 ms hop.
struct StftConfig {
  int sample_rate = 16000;
  std::size_t window_len = 320;
  std::size_t hop = 160;
  std::size_t fft_bins = 161;

  // 50% hop, transform size equal to the window. Throws on odd/zero length.
  static StftConfig with_window(int sample_rate, std::size_t window_len);

  // Throws std::invalid_argument if the invariants do not hold.
  void validate() const;

  double bin_hz() const {
    return static_cast<double>(sample_rate) / static_cast<double>(window_len);
  }
  std::size_t frames_for(std::size_t num_samples) const {
    return (num_samples + hop - 1) / hop;
  }

  bool operator==(const StftConfig&) const = default;
};

// Row-major [frames x fft_bins].
struct ComplexSpectrogram {
  StftConfig config;
  std::size_t frames = 0;
  std::vector<cplx> data;

  ComplexSpectrogram() = default;
  ComplexSpectrogram(const StftConfig& cfg, std::size_t num_frames)
      : config(cfg), frames(num_frames), data(num_frames * cfg.fft_bins) {}

  std::size_t bins() const { return config.fft_bins; }
  cplx& at(std::size_t t, std::size_t f) { return data[t * bins() + f]; }
  const cplx& at(std::size_t t, std::size_t f) const {
    return data[t * bins() + f];
  }
  std::span<cplx> frame(std::size_t t) {
    return {data.data() + t * bins(), bins()};
  }
  std::span<const cplx> frame(std::size_t t) const {
    return {data.data() + t * bins(), bins()};
  }
};

// w[n] = sin(pi/2 * sin^2(pi (n + 0.5) / L)). Power-complementary at 50% hop.
std::vector<double> vorbis_window(std::size_t length);

// One-frame windowed transform, shared by the batch and streaming paths so
// both produce identical arithmetic.
class FrameTransform {
 public:
  explicit FrameTransform(const StftConfig& config);

  const StftConfig& config() const { return config_; }
  const std::vector<double>& window() const { return window_; }

  // frame: window_len samples -> fft_bins complex values.
  void analyze(std::span<const double> frame, std::span<cplx> out);
  // spectrum: fft_bins values -> window_len synthesis-windowed samples.
  void synthesize(std::span<const cplx> spectrum, std::span<double> out);

 private:
  StftConfig config_;
  std::vector<double> window_;
  std::vector<double> scratch_;
  RealFft fft_;
};

// Frame k covers samples [k*hop, k*hop + window_len), zero-padded on the
// right; ceil(len / hop) frames.
ComplexSpectrogram stft(std::span<const double> samples,
                        const StftConfig& config);

// Weighted overlap-add with the analysis window. Returns
// (frames - 1) * hop + window_len samples, or exactly `length` samples when
// given (truncated or zero-extended). Throws if spec.config != config.
std::vector<double> istft(const ComplexSpectrogram& spec,
                          const StftConfig& config);
std::vector<double> istft(const ComplexSpectrogram& spec,
                          const StftConfig& config, std::size_t length);

}  // namespace dpdfnet
