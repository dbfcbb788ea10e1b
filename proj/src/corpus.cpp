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

#include "dpdfnet/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "dpdfnet/rng.hpp"
#include "json.hpp"

namespace dpdfnet {
namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kActiveFrameMs = 20.0;
constexpr double kActiveRangeDb = 40.0;

// Decorrelates the noise-offset stream from the placement stream.
constexpr std::uint64_t kNoiseSeedSalt = 0x9E3779B97F4A7C15ull;

std::size_t ms_to_samples(double ms, int sample_rate) {
  return static_cast<std::size_t>(std::lround(ms * sample_rate / 1000.0));
}

}  // namespace

double mean_power(std::span<const double> x) {
  if (x.empty()) return 0.0;
  double acc = 0.0;
  for (double v : x) acc += v * v;
  return acc / static_cast<double>(x.size());
}

double active_power(std::span<const double> x, int sample_rate) {
  const std::size_t frame = std::max<std::size_t>(1, ms_to_samples(kActiveFrameMs, sample_rate));
  const std::size_t frames = (x.size() + frame - 1) / frame;
  std::vector<double> energy(frames, 0.0);
  std::vector<std::size_t> length(frames, 0);
  for (std::size_t t = 0; t < frames; ++t) {
    const std::size_t begin = t * frame;
    const std::size_t end = std::min(x.size(), begin + frame);
    double acc = 0.0;
    for (std::size_t i = begin; i < end; ++i) acc += x[i] * x[i];
    energy[t] = acc;
    length[t] = end - begin;
  }
  double loudest = 0.0;
  for (std::size_t t = 0; t < frames; ++t) {
    loudest = std::max(loudest, energy[t] / static_cast<double>(length[t]));
  }
  if (!(loudest > 0.0)) throw std::invalid_argument("active_power: signal is silent");

  const double threshold = loudest * std::pow(10.0, -kActiveRangeDb / 10.0);
  double acc = 0.0;
  std::size_t count = 0;
  for (std::size_t t = 0; t < frames; ++t) {
    if (energy[t] / static_cast<double>(length[t]) >= threshold) {
      acc += energy[t];
      count += length[t];
    }
  }
  return acc / static_cast<double>(count);
}

double measure_snr(std::span<const double> speech, std::span<const double> noise,
                   int sample_rate) {
  const double pn = mean_power(noise);
  if (!(pn > 0.0)) throw std::invalid_argument("measure_snr: noise is silent");
  return 10.0 * std::log10(active_power(speech, sample_rate) / pn);
}

Mixture mix_at_snr(std::span<const double> speech, std::span<const double> noise,
                   double snr_db, std::uint64_t seed, int sample_rate) {
  if (speech.empty()) throw std::invalid_argument("mix_at_snr: empty speech");
  if (noise.empty()) throw std::invalid_argument("mix_at_snr: empty noise");
  if (!std::isfinite(snr_db)) throw std::invalid_argument("mix_at_snr: non-finite SNR");
  if (!(mean_power(noise) > 0.0)) throw std::invalid_argument("mix_at_snr: noise is silent");
  if (!(mean_power(speech) > 0.0)) throw std::invalid_argument("mix_at_snr: speech is silent");

  Rng rng(seed);
  const std::size_t offset = rng.index(noise.size());
  Mixture out;
  out.speech.assign(speech.begin(), speech.end());
  out.noise.resize(speech.size());
  for (std::size_t i = 0; i < speech.size(); ++i) {
    out.noise[i] = noise[(offset + i) % noise.size()];
  }

  const double ps = active_power(speech, sample_rate);
  const double pn = mean_power(out.noise);
  if (!(pn > 0.0)) {
    throw std::invalid_argument("mix_at_snr: noise excerpt is silent");
  }
  out.noise_scale = std::sqrt(ps / (pn * std::pow(10.0, snr_db / 10.0)));
  out.mixture.resize(speech.size());
  for (std::size_t i = 0; i < speech.size(); ++i) {
    out.noise[i] *= out.noise_scale;
    out.mixture[i] = out.speech[i] + out.noise[i];
  }
  return out;
}

bool BiquadCoeffs::stable() const {
  // Jury conditions for z^2 + a1 z + a2.
  return std::isfinite(a1) && std::isfinite(a2) && std::abs(a2) < 1.0 &&
         std::abs(a1) < 1.0 + a2;
}

BiquadCoeffs design_biquad(BiquadKind kind, double f0_hz, double gain_db, double q,
                           int sample_rate) {
  if (!(f0_hz > 0.0 && f0_hz < 0.5 * sample_rate)) {
    throw std::invalid_argument("design_biquad: f0 must lie in (0, fs/2)");
  }
  if (!(q > 0.0)) throw std::invalid_argument("design_biquad: Q must be positive");
  const double A = std::pow(10.0, gain_db / 40.0);
  const double w0 = 2.0 * kPi * f0_hz / sample_rate;
  const double cw = std::cos(w0);
  const double alpha = std::sin(w0) / (2.0 * q);
  const double sa = 2.0 * std::sqrt(A) * alpha;

  double b0, b1, b2, a0, a1, a2;
  switch (kind) {
    case BiquadKind::kPeaking:
      b0 = 1.0 + alpha * A;
      b1 = -2.0 * cw;
      b2 = 1.0 - alpha * A;
      a0 = 1.0 + alpha / A;
      a1 = -2.0 * cw;
      a2 = 1.0 - alpha / A;
      break;
    case BiquadKind::kLowShelf:
      b0 = A * ((A + 1) - (A - 1) * cw + sa);
      b1 = 2 * A * ((A - 1) - (A + 1) * cw);
      b2 = A * ((A + 1) - (A - 1) * cw - sa);
      a0 = (A + 1) + (A - 1) * cw + sa;
      a1 = -2 * ((A - 1) + (A + 1) * cw);
      a2 = (A + 1) + (A - 1) * cw - sa;
      break;
    case BiquadKind::kHighShelf:
    default:
      b0 = A * ((A + 1) + (A - 1) * cw + sa);
      b1 = -2 * A * ((A - 1) + (A + 1) * cw);
      b2 = A * ((A + 1) + (A - 1) * cw - sa);
      a0 = (A + 1) - (A - 1) * cw + sa;
      a1 = 2 * ((A - 1) - (A + 1) * cw);
      a2 = (A + 1) - (A - 1) * cw - sa;
      break;
  }
  return {b0 / a0, b1 / a0, b2 / a0, a1 / a0, a2 / a0};
}

BiquadCoeffs random_biquad(std::uint64_t seed, int sample_rate) {
  Rng rng(seed);
  const auto kind = static_cast<BiquadKind>(rng.index(3));
  const double gain_db = rng.uniform(-6.0, 6.0);
  const double f0 = rng.log_uniform(100.0, 7000.0);
  const double q = rng.log_uniform(0.5, 2.0);
  return design_biquad(kind, f0, gain_db, q, sample_rate);
}

std::vector<double> apply_biquad(std::span<const double> x, const BiquadCoeffs& c) {
  if (!c.stable()) {
    throw std::invalid_argument("apply_biquad: unstable coefficients (pole on or outside the unit circle)");
  }
  std::vector<double> y(x.size());
  double x1 = 0.0, x2 = 0.0, y1 = 0.0, y2 = 0.0;
  for (std::size_t n = 0; n < x.size(); ++n) {
    const double v = c.b0 * x[n] + c.b1 * x1 + c.b2 * x2 - c.a1 * y1 - c.a2 * y2;
    x2 = x1;
    x1 = x[n];
    y2 = y1;
    y1 = v;
    y[n] = v;
  }
  return y;
}

double random_gain_db(std::uint64_t seed) { return Rng(seed).uniform(-10.0, 10.0); }

std::vector<double> apply_gain_db(std::span<const double> x, double gain_db) {
  const double g = std::pow(10.0, gain_db / 20.0);
  std::vector<double> y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = g * x[i];
  return y;
}

RirSplit split_rir(std::span<const double> rir, double split_ms, double fade_ms,
                   int sample_rate) {
  if (rir.empty()) throw std::invalid_argument("split_rir: empty impulse response");
  if (split_ms < 0.0 || fade_ms < 0.0) {
    throw std::invalid_argument("split_rir: negative split or fade length");
  }
  std::size_t peak = 0;
  for (std::size_t i = 1; i < rir.size(); ++i) {
    if (std::abs(rir[i]) > std::abs(rir[peak])) peak = i;
  }
  const std::size_t split = peak + ms_to_samples(split_ms, sample_rate);
  const std::size_t fade = ms_to_samples(fade_ms, sample_rate);

  RirSplit out{std::vector<double>(rir.size(), 0.0), std::vector<double>(rir.size(), 0.0)};
  for (std::size_t n = 0; n < rir.size(); ++n) {
    double w = 0.0;
    if (n < split) {
      w = 1.0;
    } else if (n < split + fade) {
      w = 0.5 * (1.0 + std::cos(kPi * static_cast<double>(n - split) / static_cast<double>(fade)));
    }
    out.early[n] = w * rir[n];
    out.late[n] = rir[n] - out.early[n];
  }
  return out;
}

void MixSpec::validate() const {
  if (!(clip_seconds > 0.0)) throw std::invalid_argument("MixSpec: clip duration must be positive");
  if (!(max_gap_seconds >= 0.0)) throw std::invalid_argument("MixSpec: gaps must be nonnegative");
  if (sample_rate <= 0) throw std::invalid_argument("MixSpec: bad sample rate");
  if (!std::isfinite(snr_db)) throw std::invalid_argument("MixSpec: non-finite SNR");
}

EvalClip assemble_eval_clip(std::span<const SpeechSegment> segments,
                            std::span<const double> noise, const MixSpec& spec,
                            std::uint64_t seed, std::string noise_source) {
  spec.validate();
  if (segments.empty()) throw std::invalid_argument("assemble_eval_clip: no speech segments");
  for (const SpeechSegment& s : segments) {
    if (s.samples.empty()) {
      throw std::invalid_argument("assemble_eval_clip: empty segment '" + s.source + "'");
    }
  }
  const auto total = static_cast<std::size_t>(std::lround(spec.clip_seconds * spec.sample_rate));
  const auto max_gap = static_cast<std::size_t>(std::lround(spec.max_gap_seconds * spec.sample_rate));

  Rng rng(seed);
  std::vector<std::size_t> order(segments.size());
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t i = order.size(); i > 1; --i) {
    std::swap(order[i - 1], order[rng.index(i)]);
  }

  EvalClip clip;
  clip.seed = seed;
  clip.spec = spec;
  clip.noise_source = std::move(noise_source);
  clip.clean.assign(total, 0.0);
  std::size_t pos = 0;
  for (std::size_t idx : order) {
    pos += rng.index(max_gap + 1);
    if (pos >= total) break;
    const SpeechSegment& seg = segments[idx];
    const std::size_t len = std::min(seg.samples.size(), total - pos);
    std::copy_n(seg.samples.begin(), len, clip.clean.begin() + static_cast<std::ptrdiff_t>(pos));
    clip.placements.push_back({idx, seg.source, pos, len});
    pos += len;
    if (pos >= total) break;
  }
  if (pos < total && total - pos > max_gap) {
    const double short_s = static_cast<double>(total - pos - max_gap) / spec.sample_rate;
    throw std::runtime_error("assemble_eval_clip: insufficient speech material, " +
                             std::to_string(short_s) + " s short of a " +
                             std::to_string(spec.clip_seconds) + " s clip");
  }
  if (clip.placements.empty()) {
    throw std::runtime_error("assemble_eval_clip: no segment fits in the clip");
  }

  Mixture mix = mix_at_snr(clip.clean, noise, spec.snr_db, seed ^ kNoiseSeedSalt,
                           spec.sample_rate);
  clip.mixture = std::move(mix.mixture);
  clip.noise = std::move(mix.noise);
  clip.noise_scale = mix.noise_scale;
  return clip;
}

std::string clip_sidecar_json(const EvalClip& clip) {
  nlohmann::json placements = nlohmann::json::array();
  std::vector<std::string> sources;
  for (const Placement& p : clip.placements) {
    placements.push_back({{"source", p.source},
                          {"segment", p.segment},
                          {"start", p.start},
                          {"length", p.length},
                          {"start_s", static_cast<double>(p.start) / clip.spec.sample_rate}});
    if (std::find(sources.begin(), sources.end(), p.source) == sources.end()) {
      sources.push_back(p.source);
    }
  }
  const nlohmann::json j = {{"seed", clip.seed},
                            {"snr_db", clip.spec.snr_db},
                            {"clip_seconds", clip.spec.clip_seconds},
                            {"max_gap_seconds", clip.spec.max_gap_seconds},
                            {"sample_rate", clip.spec.sample_rate},
                            {"noise_scale", clip.noise_scale},
                            {"noise_source", clip.noise_source},
                            {"placements", placements},
                            {"sources", sources}};
  return j.dump(2);
}

}  // namespace dpdfnet
