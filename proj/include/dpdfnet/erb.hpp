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

#include <cstddef>
#include <span>
#include <vector>

#include "dpdfnet/matrix.hpp"
#include "dpdfnet/signal.hpp"

namespace dpdfnet {

inline constexpr double kErbEpsilon = 1e-10;
inline constexpr double kErbFloorDb = -100.0;

// ERB-rate in Cams: 21.4 * log10(1 + 0.00437 f).
double hz_to_erb_rate(double hz);
double erb_rate_to_hz(double erb);

// Contiguous rectangular bands over the STFT bins. Band b owns bins
// [edges[b], edges[b+1]). Analysis averages member bins; synthesis copies the
// band value to every member bin, so each synthesis column sums to 1.
class ErbFilterbank {
 public:
  // Throws std::invalid_argument unless edges start at 0, end at fft_bins and
  // are strictly increasing.
  static ErbFilterbank from_edges(std::vector<std::size_t> edges,
                                  std::size_t fft_bins);

  std::size_t bands() const { return edges_.size() - 1; }
  std::size_t fft_bins() const { return fft_bins_; }
  const std::vector<std::size_t>& edges() const { return edges_; }
  std::size_t width(std::size_t band) const {
    return edges_[band + 1] - edges_[band];
  }
  std::size_t band_of(std::size_t bin) const { return band_of_[bin]; }

  // Dense [bands x fft_bins] analysis matrix (rows average member bins).
  RealMatrix analysis_matrix() const;
  // Dense [fft_bins x bands] synthesis matrix (transposed, column-normalized).
  RealMatrix synthesis_matrix() const;

  // Per-band mean of one frame.
  void analyze(std::span<const double> bins, std::span<double> out) const;
  // Band value -> member bins for one frame.
  void synthesize(std::span<const double> bands, std::span<double> out) const;

 private:
  std::vector<std::size_t> edges_;
  std::vector<std::size_t> band_of_;
  std::size_t fft_bins_ = 0;
};

// Edges equally spaced on the ERB-rate scale up to Nyquist, each band at least
// one bin wide (low bands widened greedily).
ErbFilterbank build_erb_filterbank(const StftConfig& config, std::size_t bands);

// Log-power band features in dB, floored.
struct ErbFeatures {
  RealMatrix data;  // [T x bands]
  double floor_db = kErbFloorDb;
};

// 10 log10(band mean power + 1e-10), clamped at -100 dB. power_spec is
// [T x fft_bins] and must be nonnegative.
ErbFeatures erb_compress(const RealMatrix& power_spec, const ErbFilterbank& fb);

// Full-band mask from band gains in [0, 1]; [T x bands] -> [T x fft_bins].
RealMatrix erb_interpolate(const RealMatrix& gains_erb, const ErbFilterbank& fb);

}  // namespace dpdfnet
