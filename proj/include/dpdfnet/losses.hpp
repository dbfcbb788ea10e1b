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

// Multi-resolution spectral loss and the over-attenuation variant, forward
// only. Norms are plain sums of squared terms (no averaging).

#include <cstddef>
#include <span>
#include <vector>

#include "dpdfnet/matrix.hpp"
#include "dpdfnet/signal.hpp"

namespace dpdfnet {

struct MrLossConfig {
  int sample_rate = 16000;
  std::vector<double> window_ms{5.0, 10.0, 20.0, 40.0};
  double compression = 0.3;
  double lambda_mr = 500.0;
  double lambda_oa = 500.0;

  void validate() const;
  // One STFT per resolution: window = ms * rate / 1000, hop = window / 2.
  std::vector<StftConfig> resolutions() const;
};

struct CompressedSpectrum {
  RealMatrix magnitude;     // |Z|^c
  Matrix<cplx> phase_aware;  // |Z|^c * exp(j angle(Z)), angle(0) = 0
};

CompressedSpectrum compress_spectrum(const ComplexSpectrogram& z, double c);

// 1 where |S| > |Y| (strict), else 0.
Matrix<unsigned char> oa_mask(const ComplexSpectrogram& s,
                              const ComplexSpectrogram& y);

// Per-resolution terms, exposed so both losses share one pass.
struct LossTerms {
  double mr = 0.0;
  double oa = 0.0;
};
LossTerms loss_terms(std::span<const double> y, std::span<const double> s,
                     const MrLossConfig& config);

double mr_loss(std::span<const double> y, std::span<const double> s,
               const MrLossConfig& config = {});
double oa_loss(std::span<const double> y, std::span<const double> s,
               const MrLossConfig& config = {});
// lambda_mr * L_MR + lambda_oa * L_OA
double total_loss(std::span<const double> y, std::span<const double> s,
                  const MrLossConfig& config = {});

}  // namespace dpdfnet
