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

// Two-stage enhancement: ERB-gain masking followed by deep filtering of the
// lowest df_bins bins, in batch and streaming form.

#include <cstddef>
#include <deque>
#include <span>
#include <vector>

#include "dpdfnet/erb.hpp"
#include "dpdfnet/matrix.hpp"
#include "dpdfnet/model.hpp"
#include "dpdfnet/signal.hpp"

namespace dpdfnet {

// Per-frame encoder inputs with running normalization.
//   ERB: dB band power, minus an exponential running mean (decay 0.99,
//        start -60 dB), divided by 40.
//   DF:  complex bins divided by sqrt of a running mean magnitude (decay
//        0.99, start 1e-3).
class FeatureExtractor {
 public:
  static constexpr double kDecay = 0.99;
  static constexpr double kErbMeanInit = -60.0;
  static constexpr double kErbScale = 40.0;
  static constexpr double kDfNormInit = 1e-3;

  FeatureExtractor(const ErbFilterbank& fb, std::size_t df_bins);

  // spectrum: fft_bins values. erb_out: bands; df_out: 2 * df_bins (re, im).
  void process(std::span<const cplx> spectrum, std::span<float> erb_out,
               std::span<float> df_out);
  void reset();

 private:
  const ErbFilterbank* fb_;
  std::size_t df_bins_;
  std::vector<double> power_;
  std::vector<double> band_db_;
  std::vector<double> erb_mean_;
  std::vector<double> df_norm_;
};

// Deep-filter coefficients C(k, i, f): [frames x taps x bins] complex.
struct DfCoefficients {
  std::size_t frames = 0;
  std::size_t taps = 0;
  std::size_t bins = 0;
  std::vector<cplx> data;

  DfCoefficients() = default;
  DfCoefficients(std::size_t t, std::size_t n_taps, std::size_t n_bins)
      : frames(t), taps(n_taps), bins(n_bins), data(t * n_taps * n_bins) {}

  cplx& at(std::size_t k, std::size_t i, std::size_t f) {
    return data[(k * taps + i) * bins + f];
  }
  const cplx& at(std::size_t k, std::size_t i, std::size_t f) const {
    return data[(k * taps + i) * bins + f];
  }
  std::span<const cplx> tap(std::size_t k, std::size_t i) const {
    return {data.data() + (k * taps + i) * bins, bins};
  }
  std::span<cplx> frame(std::size_t k) {
    return {data.data() + k * taps * bins, taps * bins};
  }

  // From the model layout [tap][bin][re, im] (float) for frame k.
  void set_frame(std::size_t k, std::span<const float> model_coefs);
};

// Y_G(k, f) = X(k, f) * G(k, f) with G interpolated from the band gains.
ComplexSpectrogram apply_erb_mask(const ComplexSpectrogram& x,
                                  const RealMatrix& gains_erb,
                                  const ErbFilterbank& fb);

// Y(k, f) = sum_{i=0..N} C(k, i, f) * Y_G(k - i + lookahead, f) for f < bins
// of C, with out-of-range frames read as zero. Higher bins pass through.
ComplexSpectrogram deep_filter(const ComplexSpectrogram& masked,
                               const DfCoefficients& coefs,
                               std::size_t lookahead);

// Shared inner step: accumulates one output frame from the available masked
// frames. history[j] is Y_G(k - N + lookahead + j) for j = 0..N, or an empty
// span for a frame outside the signal.
void deep_filter_frame(std::span<const std::span<const cplx>> history,
                       std::span<const cplx> coefs_frame, std::size_t taps,
                       std::size_t df_bins, std::span<const cplx> current,
                       std::span<cplx> out);

// stft -> features -> model -> mask -> deep filter -> istft. Output has the
// input length. Input must be 16 kHz mono.
std::vector<double> enhance_offline(std::span<const double> samples,
                                    const Model& model);

// Fixed-latency streaming enhancer. The output is enhance_offline's result
// delayed by latency() samples: push(n) returns exactly n samples and
// flush() returns the final latency() samples. One stream per owner; many
// streams may share one model.
class EnhancerStream {
 public:
  explicit EnhancerStream(const Model& model);

  // window_len + lookahead * hop samples (640 at the default config).
  std::size_t latency() const;

  std::vector<double> push(std::span<const double> samples);
  std::vector<double> flush();
  // Back to the cold-start state.
  void reset();

 private:
  void analyze_available();
  void analyze_frame(std::span<const double> frame);
  void emit_block(std::span<const cplx> spectrum);

  const Model* model_;
  StftConfig config_;
  ErbFilterbank fb_;
  FrameTransform transform_;
  FeatureExtractor features_;
  ModelState state_;

  std::vector<double> pending_;  // input not yet fully consumed by frames
  std::size_t pushed_ = 0;
  std::size_t analyzed_ = 0;
  std::deque<std::vector<cplx>> masked_;  // last N + 1 masked frames
  std::deque<std::vector<cplx>> coefs_;   // coefficients awaiting look-ahead
  std::vector<double> overlap_;           // second half of previous frame
  std::deque<double> out_;

  // Scratch.
  std::vector<cplx> spectrum_;
  std::vector<float> erb_feat_;
  std::vector<float> df_feat_;
  std::vector<float> gains_;
  std::vector<float> model_coefs_;
  std::vector<double> band_gains_;
  std::vector<double> bin_gains_;
  std::vector<double> synth_;
};

}  // namespace dpdfnet
