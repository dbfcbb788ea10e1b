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

// Evaluation-clip construction and training-style augmentations: SNR mixing,
// random second-order filtering, gain perturbation and RIR early/late split.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace dpdfnet {

inline constexpr int kCorpusSampleRate = 16000;

// Mean power over 20 ms frames whose energy is within 40 dB of the loudest
// frame. Throws invalid_argument on silent input.
double active_power(std::span<const double> x, int sample_rate = kCorpusSampleRate);
double mean_power(std::span<const double> x);
// 10 log10(active_power(speech) / mean_power(noise)).
double measure_snr(std::span<const double> speech, std::span<const double> noise,
                   int sample_rate = kCorpusSampleRate);

struct Mixture {
  std::vector<double> mixture;
  std::vector<double> speech;
  std::vector<double> noise;  // looped, offset and scaled
  double noise_scale = 1.0;
};

// The noise is looped from a seeded start offset to the speech length, then
// scaled so measure_snr(speech, noise) == snr_db.
Mixture mix_at_snr(std::span<const double> speech, std::span<const double> noise,
                   double snr_db, std::uint64_t seed,
                   int sample_rate = kCorpusSampleRate);

// Normalized so a0 = 1: y = b0 x + b1 x1 + b2 x2 - a1 y1 - a2 y2.
struct BiquadCoeffs {
  double b0 = 1.0, b1 = 0.0, b2 = 0.0;
  double a1 = 0.0, a2 = 0.0;

  bool stable() const;
};

enum class BiquadKind { kLowShelf, kPeaking, kHighShelf };

BiquadCoeffs design_biquad(BiquadKind kind, double f0_hz, double gain_db, double q,
                           int sample_rate = kCorpusSampleRate);
// Kind uniform, gain uniform in [-6, 6] dB, f0 log-uniform in [100, 7000] Hz,
// Q log-uniform in [0.5, 2].
BiquadCoeffs random_biquad(std::uint64_t seed, int sample_rate = kCorpusSampleRate);
// Throws invalid_argument for unstable coefficients.
std::vector<double> apply_biquad(std::span<const double> x, const BiquadCoeffs& c);

// Uniform in [-10, 10] dB.
double random_gain_db(std::uint64_t seed);
std::vector<double> apply_gain_db(std::span<const double> x, double gain_db);

struct RirSplit {
  std::vector<double> early;
  std::vector<double> late;
};

// Both outputs have the RIR's length. early keeps everything up to the
// direct-path peak plus split_ms, then fades out with a raised cosine of
// fade_ms; late = rir - early.
RirSplit split_rir(std::span<const double> rir, double split_ms = 50.0,
                   double fade_ms = 5.0, int sample_rate = kCorpusSampleRate);

struct MixSpec {
  double snr_db = 5.0;
  double clip_seconds = 150.0;
  double max_gap_seconds = 15.0;
  int sample_rate = kCorpusSampleRate;

  void validate() const;
};

struct SpeechSegment {
  std::string source;
  std::vector<double> samples;
};

struct Placement {
  std::size_t segment = 0;  // index into the input segments
  std::string source;
  std::size_t start = 0;    // sample offset in the clip
  std::size_t length = 0;   // samples placed (last one may be truncated)
};

struct EvalClip {
  std::uint64_t seed = 0;
  MixSpec spec;
  std::vector<double> mixture;
  std::vector<double> clean;
  std::vector<double> noise;
  std::vector<Placement> placements;
  std::string noise_source;
  double noise_scale = 1.0;
};

// Segments are taken once each in seeded shuffled order, separated by gaps
// uniform in [0, max_gap]; the noise bed runs under the whole clip.
EvalClip assemble_eval_clip(std::span<const SpeechSegment> segments,
                            std::span<const double> noise, const MixSpec& spec,
                            std::uint64_t seed, std::string noise_source = "noise");

// {seed, snr_db, clip_seconds, max_gap_seconds, sample_rate, noise_scale,
//  noise_source, placements: [{source, segment, start, length}], sources}
std::string clip_sidecar_json(const EvalClip& clip);

}  // namespace dpdfnet
