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
#include <complex>
#include <vector>

#include "dpdfnet/pipeline.hpp"
#include "test_support.hpp"

namespace dpdfnet {
namespace {

using testing::identity_model;
using testing::max_abs_diff;
using testing::random_signal;

constexpr std::size_t kLatency = 640;

ComplexSpectrogram random_spec(std::size_t T, std::uint64_t seed) {
  ComplexSpectrogram s(StftConfig{}, T);
  Rng rng(seed);
  for (auto& v : s.data) v = {rng.normal(), rng.normal()};
  return s;
}

// Direct evaluation of the deep-filter sum.
ComplexSpectrogram deep_filter_oracle(const ComplexSpectrogram& y, const DfCoefficients& c,
                                      std::size_t lookahead) {
  ComplexSpectrogram out = y;
  for (std::size_t k = 0; k < y.frames; ++k) {
    for (std::size_t f = 0; f < c.bins; ++f) {
      cplx acc{};
      for (std::size_t i = 0; i < c.taps; ++i) {
        const long src = static_cast<long>(k) - static_cast<long>(i) + static_cast<long>(lookahead);
        if (src >= 0 && src < static_cast<long>(y.frames)) acc += c.at(k, i, f) * y.at(src, f);
      }
      out.at(k, f) = acc;
    }
  }
  return out;
}

std::vector<double> run_stream(EnhancerStream& s, std::span<const double> x,
                               const std::vector<std::size_t>& chunks) {
  std::vector<double> out;
  std::size_t pos = 0, c = 0;
  while (pos < x.size()) {
    const std::size_t n = std::min(chunks[c++ % chunks.size()], x.size() - pos);
    const auto y = s.push(x.subspan(pos, n));
    EXPECT_EQ(y.size(), n);
    out.insert(out.end(), y.begin(), y.end());
    pos += n;
  }
  const auto tail = s.flush();
  EXPECT_EQ(tail.size(), kLatency);
  out.insert(out.end(), tail.begin(), tail.end());
  return out;
}

// Stream output minus the latency, compared to the offline result.
double stream_offline_gap(const std::vector<double>& streamed, const std::vector<double>& offline) {
  double m = 0.0;
  for (std::size_t i = 0; i < offline.size(); ++i) {
    m = std::max(m, std::abs(streamed[i + kLatency] - offline[i]));
  }
  return m;
}

TEST(DeepFilter, HandCase) {
  ComplexSpectrogram y(StftConfig{}, 6);
  y.at(5, 0) = {2.0, 1.0};
  y.at(3, 0) = {1.0, 0.0};
  DfCoefficients c(6, 6, 1);
  c.at(3, 0, 0) = {1.0, 1.0};   // reads frame 3 - 0 + 2 = 5
  c.at(3, 2, 0) = {0.0, 1.0};   // reads frame 3
  const auto out = deep_filter(y, c, 2);
  // (1+j)(2+j) + j*1 = 1+3j+j
  EXPECT_NEAR(out.at(3, 0).real(), 1.0, 1e-15);
  EXPECT_NEAR(out.at(3, 0).imag(), 4.0, 1e-15);
  EXPECT_EQ(out.at(0, 0), cplx(0.0, 0.0));
}

TEST(DeepFilter, MatchesDirectSum) {
  const auto y = random_spec(9, 1);
  DfCoefficients c(9, 6, 96);
  Rng rng(2);
  for (auto& v : c.data) v = {rng.normal(), rng.normal()};
  const auto out = deep_filter(y, c, 2);
  const auto ref = deep_filter_oracle(y, c, 2);
  EXPECT_LE(max_abs_diff(out.data, ref.data), 1e-12);
  for (std::size_t k = 0; k < 9; ++k) {
    for (std::size_t f = 96; f < 161; ++f) EXPECT_EQ(out.at(k, f), y.at(k, f));
  }
}

TEST(DeepFilter, IdentityAndZeroCoefficients) {
  const auto y = random_spec(7, 3);
  DfCoefficients id(7, 6, 96);
  for (std::size_t k = 0; k < 7; ++k) {
    for (std::size_t f = 0; f < 96; ++f) id.at(k, 2, f) = 1.0;
  }
  EXPECT_EQ(deep_filter(y, id, 2).data, y.data);

  const DfCoefficients zero(7, 6, 96);
  const auto out = deep_filter(y, zero, 2);
  for (std::size_t k = 0; k < 7; ++k) {
    for (std::size_t f = 0; f < 96; ++f) EXPECT_EQ(out.at(k, f), cplx(0.0, 0.0));
    for (std::size_t f = 96; f < 161; ++f) EXPECT_EQ(out.at(k, f), y.at(k, f));
  }
}

TEST(DfCoefficients, SetFrameLayout) {
  DfCoefficients c(1, 2, 3);
  const std::vector<float> raw{1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12};
  c.set_frame(0, raw);
  EXPECT_EQ(c.at(0, 0, 0), cplx(1, 2));
  EXPECT_EQ(c.at(0, 0, 2), cplx(5, 6));
  EXPECT_EQ(c.at(0, 1, 0), cplx(7, 8));
  EXPECT_EQ(c.at(0, 1, 2), cplx(11, 12));
}

TEST(ErbMask, TwoBandGains) {
  const auto fb = ErbFilterbank::from_edges({0, 2, 161}, 161);
  const auto x = random_spec(3, 4);
  RealMatrix g(3, 2);
  for (std::size_t t = 0; t < 3; ++t) {
    g(t, 0) = 0.5;
    g(t, 1) = 1.0;
  }
  const auto y = apply_erb_mask(x, g, fb);
  for (std::size_t t = 0; t < 3; ++t) {
    EXPECT_EQ(y.at(t, 0), 0.5 * x.at(t, 0));
    EXPECT_EQ(y.at(t, 1), 0.5 * x.at(t, 1));
    for (std::size_t f = 2; f < 161; ++f) EXPECT_EQ(y.at(t, f), x.at(t, f));
  }
}

TEST(Pipeline, IdentityModelReconstructsInterior) {
  for (std::size_t k : {0u, 2u}) {
    const Model m = identity_model(k);
    const auto x = random_signal(16000, 10 + k);
    const auto y = enhance_offline(x, m);
    ASSERT_EQ(y.size(), x.size());
    double err = 0.0;
    for (std::size_t n = 160; n < x.size(); ++n) err = std::max(err, std::abs(y[n] - x[n]));
    EXPECT_LE(err, 1e-5) << "k=" << k;
  }
}

TEST(Pipeline, ZeroInZeroOutForIdentity) {
  const Model m = identity_model(0);
  const std::vector<double> x(4000, 0.0);
  for (double v : enhance_offline(x, m)) EXPECT_EQ(v, 0.0);
}

TEST(Pipeline, EmptyAndNonFiniteInput) {
  const Model m = identity_model(0);
  EXPECT_TRUE(enhance_offline(std::vector<double>{}, m).empty());
  std::vector<double> x(500, 0.1);
  x[17] = std::nan("");
  EXPECT_THROW(enhance_offline(x, m), std::invalid_argument);
}

TEST(Pipeline, OfflineIsCausalWithLatency) {
  const Model m = Model::with_seed(ModelConfig{.dprnn_blocks = 2}, 21);
  auto x = random_signal(8000, 22);
  const auto y0 = enhance_offline(x, m);
  const std::size_t p = 5000;
  for (std::size_t n = p; n < x.size(); ++n) x[n] += 0.5;
  const auto y1 = enhance_offline(x, m);
  for (std::size_t n = 0; n + kLatency < p; ++n) ASSERT_EQ(y0[n], y1[n]) << n;
  bool changed = false;
  for (std::size_t n = p - kLatency; n < x.size(); ++n) changed |= y0[n] != y1[n];
  EXPECT_TRUE(changed);
}

class StreamPerK : public ::testing::TestWithParam<std::size_t> {};

TEST_P(StreamPerK, RandomChunksMatchOffline) {
  const Model m = Model::with_seed(ModelConfig{.dprnn_blocks = GetParam()}, 31);
  const auto x = random_signal(24011, 32);
  const auto offline = enhance_offline(x, m);
  EnhancerStream s(m);
  EXPECT_EQ(s.latency(), kLatency);
  const auto streamed = run_stream(s, x, {1, 7, 160, 333, 2, 1024, 159});
  ASSERT_EQ(streamed.size(), x.size() + kLatency);
  EXPECT_LE(stream_offline_gap(streamed, offline), 1e-5);
  for (std::size_t n = 0; n < kLatency; ++n) EXPECT_EQ(streamed[n], 0.0);
}

INSTANTIATE_TEST_SUITE_P(Depths, StreamPerK, ::testing::Values(0u, 2u));

TEST(Stream, SingleSampleChunks) {
  const Model m = Model::with_seed(ModelConfig{.dprnn_blocks = 2}, 33);
  const auto x = random_signal(4000, 34);
  EnhancerStream s(m);
  const auto streamed = run_stream(s, x, {1});
  EXPECT_LE(stream_offline_gap(streamed, enhance_offline(x, m)), 1e-5);
}

TEST(Stream, FlushWithoutInput) {
  const Model m = identity_model(0);
  EnhancerStream s(m);
  const auto tail = s.flush();
  ASSERT_EQ(tail.size(), kLatency);
  for (double v : tail) EXPECT_EQ(v, 0.0);
}

TEST(Stream, ResetGivesColdStart) {
  const Model m = Model::with_seed(ModelConfig{}, 35);
  const auto x = random_signal(3000, 36);
  EnhancerStream s(m);
  const auto a = run_stream(s, x, {256});
  s.reset();
  const auto b = run_stream(s, x, {256});
  EXPECT_EQ(a, b);
}

TEST(Stream, InterleavedStreamsShareModel) {
  const Model m = Model::with_seed(ModelConfig{.dprnn_blocks = 2}, 37);
  const auto x1 = random_signal(3200, 38), x2 = random_signal(3200, 39);
  EnhancerStream solo1(m), solo2(m);
  const auto r1 = run_stream(solo1, x1, {100});
  const auto r2 = run_stream(solo2, x2, {100});

  EnhancerStream a(m), b(m);
  std::vector<double> o1, o2;
  for (std::size_t pos = 0; pos < 3200; pos += 100) {
    const auto y1 = a.push(std::span<const double>(x1).subspan(pos, 100));
    const auto y2 = b.push(std::span<const double>(x2).subspan(pos, 100));
    o1.insert(o1.end(), y1.begin(), y1.end());
    o2.insert(o2.end(), y2.begin(), y2.end());
  }
  const auto t1 = a.flush(), t2 = b.flush();
  o1.insert(o1.end(), t1.begin(), t1.end());
  o2.insert(o2.end(), t2.begin(), t2.end());
  EXPECT_EQ(o1, r1);
  EXPECT_EQ(o2, r2);
}

TEST(Stream, ImpulseArrivesAfterLatency) {
  const Model m = identity_model(0);
  std::vector<double> x(8000, 0.0);
  const std::size_t n0 = 4000;
  x[n0] = 1.0;
  EnhancerStream s(m);
  const auto y = run_stream(s, x, {160});
  std::size_t peak = 0;
  for (std::size_t n = 1; n < y.size(); ++n) {
    if (std::abs(y[n]) > std::abs(y[peak])) peak = n;
  }
  EXPECT_EQ(peak, n0 + kLatency);
  EXPECT_NEAR(y[peak], 1.0, 1e-5);
}

}  // namespace
}  // namespace dpdfnet
