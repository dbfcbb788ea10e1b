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

#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "dpdfnet/corpus.hpp"
#include "dpdfnet/prism.hpp"
#include "json.hpp"
#include "test_support.hpp"

namespace dpdfnet {
namespace {

using testing::kPi;
using testing::random_signal;

double power(const std::vector<double>& x, std::size_t begin = 0, std::size_t end = 0) {
  if (end == 0) end = x.size();
  double acc = 0.0;
  for (std::size_t i = begin; i < end; ++i) acc += x[i] * x[i];
  return acc / static_cast<double>(end - begin);
}

std::vector<double> sine(std::size_t n, double hz, double amp) {
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = amp * std::sin(2.0 * kPi * hz * static_cast<double>(i) / 16000.0);
  return x;
}

TEST(Mix, ScaleHandValues) {
  std::vector<double> speech(3200), noise(1000);
  for (std::size_t i = 0; i < speech.size(); ++i) speech[i] = (i / 7) % 2 ? 1.0 : -1.0;
  for (std::size_t i = 0; i < noise.size(); ++i) noise[i] = i % 3 ? 1.0 : -1.0;
  EXPECT_NEAR(mix_at_snr(speech, noise, 0.0, 1).noise_scale, 1.0, 1e-12);
  EXPECT_NEAR(mix_at_snr(speech, noise, 10.0, 1).noise_scale, std::sqrt(0.1), 1e-12);
  EXPECT_NEAR(std::sqrt(0.1), 0.3162, 1e-4);
}

TEST(Mix, ContinuousSpeechHitsTarget) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    const double snr = rng.uniform(-5.0, 20.0);
    const auto speech = sine(16000, 200.0 + 37.0 * static_cast<double>(seed), 0.5);
    const auto noise = random_signal(7000 + 131 * seed, 1000 + seed);
    const auto m = mix_at_snr(speech, noise, snr, seed);
    ASSERT_EQ(m.mixture.size(), speech.size());
    const double measured = 10.0 * std::log10(power(speech) / power(m.noise));
    EXPECT_NEAR(measured, snr, 0.1) << "seed " << seed;
    for (std::size_t i = 0; i < speech.size(); ++i) {
      ASSERT_DOUBLE_EQ(m.mixture[i], m.speech[i] + m.noise[i]);
    }
  }
}

TEST(Mix, SilentFramesExcludedFromSpeechPower) {
  // Bursts on 20 ms frame boundaries: active power is the burst power.
  std::vector<double> speech(32000, 0.0);
  for (std::size_t f = 0; f < 100; f += 2) {
    for (std::size_t i = f * 320; i < (f + 1) * 320; ++i) speech[i] = 0.3 * std::sin(0.05 * static_cast<double>(i));
  }
  double burst = 0.0;
  std::size_t n = 0;
  for (std::size_t f = 0; f < 100; f += 2) {
    for (std::size_t i = f * 320; i < (f + 1) * 320; ++i, ++n) burst += speech[i] * speech[i];
  }
  burst /= static_cast<double>(n);
  EXPECT_NEAR(active_power(speech), burst, 1e-15);
  const auto noise = random_signal(5000, 3);
  const auto m = mix_at_snr(speech, noise, 5.0, 4);
  EXPECT_NEAR(10.0 * std::log10(burst / power(m.noise)), 5.0, 1e-9);
}

TEST(Mix, ScaleInvariantInSpeechLevel) {
  const auto speech = sine(8000, 440.0, 0.1);
  auto loud = speech;
  for (double& v : loud) v *= 10.0;
  const auto noise = random_signal(3000, 5);
  const auto a = mix_at_snr(speech, noise, 3.0, 6);
  const auto b = mix_at_snr(loud, noise, 3.0, 6);
  EXPECT_NEAR(b.noise_scale, 10.0 * a.noise_scale, 1e-9 * b.noise_scale);
}

TEST(Mix, Errors) {
  const std::vector<double> silent(100, 0.0), some(100, 0.1);
  EXPECT_THROW(mix_at_snr(silent, some, 0.0, 1), std::invalid_argument);
  EXPECT_THROW(mix_at_snr(some, silent, 0.0, 1), std::invalid_argument);
  EXPECT_THROW(mix_at_snr(std::vector<double>{}, some, 0.0, 1), std::invalid_argument);
  EXPECT_THROW(active_power(silent), std::invalid_argument);
}

TEST(Biquad, IdentityAndHandCases) {
  const auto x = random_signal(500, 7);
  EXPECT_EQ(apply_biquad(x, BiquadCoeffs{}), x);
  const auto half = apply_biquad(x, BiquadCoeffs{0.5, 0, 0, 0, 0});
  for (std::size_t i = 0; i < x.size(); ++i) EXPECT_EQ(half[i], 0.5 * x[i]);
  // y = x + x[n-1] on an impulse.
  const auto y = apply_biquad(std::vector<double>{1, 0, 0}, BiquadCoeffs{1, 1, 0, 0, 0});
  EXPECT_EQ(y, (std::vector<double>{1, 1, 0}));
  // One pole at 0.5: impulse response 0.5^n.
  const auto p = apply_biquad(std::vector<double>{1, 0, 0, 0}, BiquadCoeffs{1, 0, 0, -0.5, 0});
  EXPECT_EQ(p, (std::vector<double>{1, 0.5, 0.25, 0.125}));
}

TEST(Biquad, UnstableRejected) {
  const BiquadCoeffs bad{1, 0, 0, 0, 1.0};
  EXPECT_FALSE(bad.stable());
  EXPECT_THROW(apply_biquad(std::vector<double>{1.0}, bad), std::invalid_argument);
}

TEST(Biquad, DesignedFiltersHitGainAtCenter) {
  const double fs = 16000.0, f0 = 1000.0;
  const auto c = design_biquad(BiquadKind::kPeaking, f0, 6.0, 1.0);
  const std::complex<double> z = std::polar(1.0, -2.0 * kPi * f0 / fs);
  const auto h = (c.b0 + c.b1 * z + c.b2 * z * z) / (1.0 + c.a1 * z + c.a2 * z * z);
  EXPECT_NEAR(20.0 * std::log10(std::abs(h)), 6.0, 1e-9);
  const auto ls = design_biquad(BiquadKind::kLowShelf, 500.0, -4.0, 0.7);
  EXPECT_NEAR(20.0 * std::log10(std::abs((ls.b0 + ls.b1 + ls.b2) / (1.0 + ls.a1 + ls.a2))), -4.0, 1e-9);
  EXPECT_THROW(design_biquad(BiquadKind::kPeaking, 9000.0, 1.0, 1.0), std::invalid_argument);
}

TEST(Biquad, RandomIsStableAndDeterministic) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto a = random_biquad(seed), b = random_biquad(seed);
    EXPECT_TRUE(a.stable());
    EXPECT_EQ(a.b0, b.b0);
    EXPECT_EQ(a.a2, b.a2);
  }
  EXPECT_NE(random_biquad(1).b0, random_biquad(2).b0);
}

TEST(Gain, RangeAndApplication) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const double g = random_gain_db(seed);
    EXPECT_GE(g, -10.0);
    EXPECT_LE(g, 10.0);
  }
  const auto y = apply_gain_db(std::vector<double>{1.0, -2.0}, 20.0);
  EXPECT_NEAR(y[0], 10.0, 1e-12);
  EXPECT_NEAR(y[1], -20.0, 1e-12);
}

TEST(SplitRir, Delta) {
  std::vector<double> rir(4000, 0.0);
  rir[100] = 1.0;
  const auto s = split_rir(rir);
  EXPECT_EQ(s.early, rir);
  for (double v : s.late) EXPECT_EQ(v, 0.0);
}

TEST(SplitRir, TwoImpulses) {
  std::vector<double> rir(4000, 0.0);
  rir[100] = 1.0;     // direct path
  rir[500] = 0.4;     // inside 50 ms
  rir[2000] = -0.3;   // past split + fade
  rir[900 + 40] = 0.2;  // mid-fade: 0.5 (1 + cos(pi/2)) = 0.5
  const auto s = split_rir(rir);
  EXPECT_EQ(s.early[500], 0.4);
  EXPECT_EQ(s.early[2000], 0.0);
  EXPECT_EQ(s.late[2000], -0.3);
  EXPECT_NEAR(s.early[940], 0.1, 1e-15);
  EXPECT_NEAR(s.late[940], 0.1, 1e-15);
}

TEST(SplitRir, ShortAndReconstruction) {
  const std::vector<double> shortr{0.1, 0.9, 0.2};
  const auto a = split_rir(shortr);
  EXPECT_EQ(a.early, shortr);
  auto rir = random_signal(8000, 9);
  for (std::size_t i = 0; i < rir.size(); ++i) rir[i] *= std::exp(-static_cast<double>(i) / 2000.0);
  const auto s = split_rir(rir);
  for (std::size_t i = 0; i < rir.size(); ++i) ASSERT_NEAR(s.early[i] + s.late[i], rir[i], 1e-9);
  EXPECT_THROW(split_rir(std::vector<double>{}), std::invalid_argument);
}

std::vector<SpeechSegment> segments(std::size_t count, std::size_t seconds, bool gapped = false) {
  std::vector<SpeechSegment> out;
  for (std::size_t i = 0; i < count; ++i) {
    auto s = sine(seconds * 16000, 150.0 + 50.0 * static_cast<double>(i), 0.3);
    if (gapped) std::fill(s.begin(), s.begin() + 1600, 0.0);
    out.push_back({"lang" + std::to_string(i), std::move(s)});
  }
  return out;
}

TEST(Clip, DeterministicAndSeedSensitive) {
  MixSpec spec;
  spec.clip_seconds = 30.0;
  spec.max_gap_seconds = 2.0;
  const auto segs = segments(6, 5);
  const auto noise = random_signal(16000, 10);
  const auto a = assemble_eval_clip(segs, noise, spec, 11);
  const auto b = assemble_eval_clip(segs, noise, spec, 11);
  const auto c = assemble_eval_clip(segs, noise, spec, 12);
  EXPECT_EQ(a.mixture, b.mixture);
  EXPECT_EQ(clip_sidecar_json(a), clip_sidecar_json(b));
  EXPECT_NE(a.mixture, c.mixture);
  EXPECT_EQ(a.mixture.size(), 30u * 16000u);
}

TEST(Clip, PlacementsRespectGapsAndUseEachSegmentOnce) {
  MixSpec spec;
  spec.clip_seconds = 150.0;
  const auto segs = segments(12, 20);
  const auto noise = random_signal(32000, 13);
  const auto clip = assemble_eval_clip(segs, noise, spec, 14);
  std::set<std::size_t> used;
  std::size_t prev_end = 0;
  for (const auto& p : clip.placements) {
    EXPECT_TRUE(used.insert(p.segment).second);
    EXPECT_GE(p.start, prev_end);
    EXPECT_LE(p.start - prev_end, 15u * 16000u);
    EXPECT_EQ(p.source, segs[p.segment].source);
    prev_end = p.start + p.length;
  }
  EXPECT_LE(prev_end, clip.clean.size());
  EXPECT_LE(clip.clean.size() - prev_end, 15u * 16000u);
}

TEST(Clip, DenseSpeechSiSnrNearTarget) {
  MixSpec spec;
  spec.clip_seconds = 20.0;
  spec.max_gap_seconds = 0.0;
  for (double snr : {0.0, 5.0, 10.0}) {
    spec.snr_db = snr;
    const auto clip = assemble_eval_clip(segments(3, 8), random_signal(48000, 15), spec, 16);
    EXPECT_NEAR(si_snr(clip.mixture, clip.clean), snr, 1.0);
  }
}

TEST(Clip, ShortfallReportsSeconds) {
  MixSpec spec;
  spec.clip_seconds = 60.0;
  spec.max_gap_seconds = 1.0;
  try {
    assemble_eval_clip(segments(2, 5), random_signal(16000, 17), spec, 18);
    FAIL();
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find("s short"), std::string::npos) << e.what();
  }
  EXPECT_THROW(assemble_eval_clip({}, random_signal(100, 1), spec, 1), std::invalid_argument);
}

TEST(Clip, SidecarFields) {
  MixSpec spec;
  spec.clip_seconds = 10.0;
  spec.max_gap_seconds = 1.0;
  const auto clip = assemble_eval_clip(segments(4, 4), random_signal(8000, 19), spec, 20, "babble");
  const auto j = nlohmann::json::parse(clip_sidecar_json(clip));
  EXPECT_EQ(j["seed"], 20);
  EXPECT_EQ(j["noise_source"], "babble");
  EXPECT_EQ(j["sample_rate"], 16000);
  EXPECT_EQ(j["placements"].size(), clip.placements.size());
  EXPECT_EQ(j["placements"][0]["start"], clip.placements[0].start);
  EXPECT_DOUBLE_EQ(j["snr_db"].get<double>(), 5.0);
}

}  // namespace
}  // namespace dpdfnet
