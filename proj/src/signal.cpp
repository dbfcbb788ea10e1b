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

#include "dpdfnet/signal.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace dpdfnet {

StftConfig StftConfig::with_window(int sample_rate, std::size_t window_len) {
  StftConfig c;
  c.sample_rate = sample_rate;
  c.window_len = window_len;
  c.hop = window_len / 2;
  c.fft_bins = window_len / 2 + 1;
  c.validate();
  return c;
}

void StftConfig::validate() const {
  if (sample_rate <= 0) {
    throw std::invalid_argument("StftConfig: sample_rate must be positive");
  }
  if (window_len < 2 || window_len % 2 != 0) {
    throw std::invalid_argument("StftConfig: window_len must be even and >= 2");
  }
  if (hop != window_len / 2 || fft_bins != window_len / 2 + 1) {
    throw std::invalid_argument(
        "StftConfig: requires hop = window_len/2 and fft_bins = window_len/2+1");
  }
}

std::vector<double> vorbis_window(std::size_t length) {
  if (length < 2 || length % 2 != 0) {
    throw std::invalid_argument("vorbis_window: length must be even and >= 2, got " +
                                std::to_string(length));
  }
  std::vector<double> w(length);
  const double L = static_cast<double>(length);
  for (std::size_t n = 0; n < length; ++n) {
    const double s = std::sin(std::numbers::pi * (static_cast<double>(n) + 0.5) / L);
    w[n] = std::sin(std::numbers::pi / 2.0 * s * s);
  }
  return w;
}

FrameTransform::FrameTransform(const StftConfig& config)
    : config_(config),
      window_(vorbis_window(config.window_len)),
      scratch_(config.window_len),
      fft_(config.window_len) {
  config_.validate();
}

void FrameTransform::analyze(std::span<const double> frame,
                             std::span<cplx> out) {
  if (frame.size() != config_.window_len || out.size() != config_.fft_bins) {
    throw std::invalid_argument("FrameTransform::analyze: size mismatch");
  }
  for (std::size_t n = 0; n < frame.size(); ++n) {
    scratch_[n] = frame[n] * window_[n];
  }
  fft_.forward(scratch_, out);
}

void FrameTransform::synthesize(std::span<const cplx> spectrum,
                                std::span<double> out) {
  if (spectrum.size() != config_.fft_bins || out.size() != config_.window_len) {
    throw std::invalid_argument("FrameTransform::synthesize: size mismatch");
  }
  fft_.inverse(spectrum, out);
  for (std::size_t n = 0; n < out.size(); ++n) out[n] *= window_[n];
}

ComplexSpectrogram stft(std::span<const double> samples,
                        const StftConfig& config) {
  config.validate();
  const std::size_t frames = config.frames_for(samples.size());
  ComplexSpectrogram spec(config, frames);
  FrameTransform transform(config);
  std::vector<double> frame(config.window_len);
  for (std::size_t k = 0; k < frames; ++k) {
    const std::size_t start = k * config.hop;
    std::fill(frame.begin(), frame.end(), 0.0);
    if (start < samples.size()) {
      const std::size_t n = std::min(config.window_len, samples.size() - start);
      std::copy_n(samples.begin() + static_cast<std::ptrdiff_t>(start), n,
                  frame.begin());
    }
    transform.analyze(frame, spec.frame(k));
  }
  return spec;
}

std::vector<double> istft(const ComplexSpectrogram& spec,
                          const StftConfig& config) {
  const std::size_t full =
      spec.frames == 0 ? 0 : (spec.frames - 1) * config.hop + config.window_len;
  return istft(spec, config, full);
}

std::vector<double> istft(const ComplexSpectrogram& spec,
                          const StftConfig& config, std::size_t length) {
  if (!(spec.config == config)) {
    throw std::invalid_argument("istft: spectrogram was produced with a different StftConfig");
  }
  config.validate();
  std::vector<double> out(length, 0.0);
  FrameTransform transform(config);
  std::vector<double> frame(config.window_len);
  for (std::size_t k = 0; k < spec.frames; ++k) {
    const std::size_t start = k * config.hop;
    if (start >= length) break;
    transform.synthesize(spec.frame(k), frame);
    const std::size_t n = std::min(config.window_len, length - start);
    for (std::size_t i = 0; i < n; ++i) out[start + i] += frame[i];
  }
  return out;
}

}  // namespace dpdfnet
