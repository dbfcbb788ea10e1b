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

#include "dpdfnet/losses.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace dpdfnet {

void MrLossConfig::validate() const {
  if (!(compression > 0.0 && compression <= 1.0)) {
    throw std::invalid_argument("MrLossConfig: compression must lie in (0, 1]");
  }
  if (lambda_mr < 0.0 || lambda_oa < 0.0) {
    throw std::invalid_argument("MrLossConfig: loss weights must be nonnegative");
  }
  if (window_ms.empty()) {
    throw std::invalid_argument("MrLossConfig: need at least one resolution");
  }
  for (double w : window_ms) {
    if (!(w > 0.0)) throw std::invalid_argument("MrLossConfig: window sizes must be positive");
  }
}

std::vector<StftConfig> MrLossConfig::resolutions() const {
  validate();
  std::vector<StftConfig> out;
  for (double ms : window_ms) {
    const auto len =
        static_cast<std::size_t>(std::lround(ms * sample_rate / 1000.0));
    out.push_back(StftConfig::with_window(sample_rate, len));
  }
  return out;
}

namespace {

// |z|^c * exp(j angle z) without atan2: z / |z| * |z|^c.
inline cplx phase_aware(cplx z, double mag, double mag_c) {
  return mag > 0.0 ? z * (mag_c / mag) : cplx{};
}

}  // namespace

CompressedSpectrum compress_spectrum(const ComplexSpectrogram& z, double c) {
  if (!(c > 0.0)) throw std::invalid_argument("compress_spectrum: c must be positive");
  CompressedSpectrum out{RealMatrix(z.frames, z.bins()), Matrix<cplx>(z.frames, z.bins())};
  for (std::size_t i = 0; i < z.data.size(); ++i) {
    const double mag = std::abs(z.data[i]);
    const double mag_c = std::pow(mag, c);
    out.magnitude.data[i] = mag_c;
    out.phase_aware.data[i] = phase_aware(z.data[i], mag, mag_c);
  }
  return out;
}

Matrix<unsigned char> oa_mask(const ComplexSpectrogram& s,
                              const ComplexSpectrogram& y) {
  if (s.frames != y.frames || s.bins() != y.bins()) {
    throw std::invalid_argument("oa_mask: shape mismatch");
  }
  Matrix<unsigned char> m(s.frames, s.bins());
  for (std::size_t i = 0; i < s.data.size(); ++i) {
    m.data[i] = std::abs(s.data[i]) > std::abs(y.data[i]) ? 1 : 0;
  }
  return m;
}

LossTerms loss_terms(std::span<const double> y, std::span<const double> s,
                     const MrLossConfig& config) {
  if (y.size() != s.size()) {
    throw std::invalid_argument("loss: length mismatch (" + std::to_string(y.size()) +
                                " vs " + std::to_string(s.size()) + ")");
  }
  LossTerms terms;
  const double c = config.compression;
  for (const StftConfig& res : config.resolutions()) {
    const ComplexSpectrogram Y = stft(y, res);
    const ComplexSpectrogram S = stft(s, res);
    for (std::size_t i = 0; i < Y.data.size(); ++i) {
      const double my = std::abs(Y.data[i]);
      const double ms = std::abs(S.data[i]);
      const double my_c = std::pow(my, c);
      const double ms_c = std::pow(ms, c);
      const double dm = my_c - ms_c;
      const double dp = std::norm(phase_aware(Y.data[i], my, my_c) -
                                  phase_aware(S.data[i], ms, ms_c));
      const double term = dm * dm + dp;
      terms.mr += term;
      if (ms > my) terms.oa += term;
    }
  }
  return terms;
}

double mr_loss(std::span<const double> y, std::span<const double> s,
               const MrLossConfig& config) {
  return loss_terms(y, s, config).mr;
}

double oa_loss(std::span<const double> y, std::span<const double> s,
               const MrLossConfig& config) {
  return loss_terms(y, s, config).oa;
}

double total_loss(std::span<const double> y, std::span<const double> s,
                  const MrLossConfig& config) {
  const LossTerms t = loss_terms(y, s, config);
  return config.lambda_mr * t.mr + config.lambda_oa * t.oa;
}

}  // namespace dpdfnet
