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

#include "dpdfnet/erb.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace dpdfnet {

double hz_to_erb_rate(double hz) { return 21.4 * std::log10(1.0 + 0.00437 * hz); }

double erb_rate_to_hz(double erb) {
  return (std::pow(10.0, erb / 21.4) - 1.0) / 0.00437;
}

ErbFilterbank ErbFilterbank::from_edges(std::vector<std::size_t> edges,
                                        std::size_t fft_bins) {
  if (edges.size() < 2 || edges.front() != 0 || edges.back() != fft_bins) {
    throw std::invalid_argument(
        "ErbFilterbank: edges must start at 0 and end at fft_bins");
  }
  for (std::size_t i = 1; i < edges.size(); ++i) {
    if (edges[i] <= edges[i - 1]) {
      throw std::invalid_argument(
          "ErbFilterbank: edges must be strictly increasing");
    }
  }
  ErbFilterbank fb;
  fb.fft_bins_ = fft_bins;
  fb.band_of_.resize(fft_bins);
  for (std::size_t b = 0; b + 1 < edges.size(); ++b) {
    for (std::size_t f = edges[b]; f < edges[b + 1]; ++f) fb.band_of_[f] = b;
  }
  fb.edges_ = std::move(edges);
  return fb;
}

RealMatrix ErbFilterbank::analysis_matrix() const {
  RealMatrix m(bands(), fft_bins_);
  for (std::size_t b = 0; b < bands(); ++b) {
    const double w = 1.0 / static_cast<double>(width(b));
    for (std::size_t f = edges_[b]; f < edges_[b + 1]; ++f) m(b, f) = w;
  }
  return m;
}

RealMatrix ErbFilterbank::synthesis_matrix() const {
  RealMatrix m(fft_bins_, bands());
  for (std::size_t f = 0; f < fft_bins_; ++f) m(f, band_of_[f]) = 1.0;
  return m;
}

void ErbFilterbank::analyze(std::span<const double> bins,
                            std::span<double> out) const {
  for (std::size_t b = 0; b < bands(); ++b) {
    double acc = 0.0;
    for (std::size_t f = edges_[b]; f < edges_[b + 1]; ++f) acc += bins[f];
    out[b] = acc / static_cast<double>(width(b));
  }
}

void ErbFilterbank::synthesize(std::span<const double> bands_in,
                               std::span<double> out) const {
  for (std::size_t f = 0; f < fft_bins_; ++f) out[f] = bands_in[band_of_[f]];
}

ErbFilterbank build_erb_filterbank(const StftConfig& config, std::size_t bands) {
  config.validate();
  const std::size_t nbins = config.fft_bins;
  if (bands < 2 || bands > nbins) {
    throw std::invalid_argument("build_erb_filterbank: need 2 <= bands <= fft_bins (" +
                                std::to_string(nbins) + "), got " +
                                std::to_string(bands));
  }
  const double nyquist = config.sample_rate / 2.0;
  const double top = hz_to_erb_rate(nyquist);
  std::vector<std::size_t> edges{0};
  for (std::size_t b = 1; b < bands; ++b) {
    const double hz = erb_rate_to_hz(top * static_cast<double>(b) /
                                     static_cast<double>(bands));
    auto target = static_cast<std::size_t>(std::lround(hz / config.bin_hz()));
    // At least one bin per band, and room left for the bands above.
    target = std::max(target, edges.back() + 1);
    target = std::min(target, nbins - (bands - b));
    edges.push_back(target);
  }
  edges.push_back(nbins);
  return ErbFilterbank::from_edges(std::move(edges), nbins);
}

ErbFeatures erb_compress(const RealMatrix& power_spec, const ErbFilterbank& fb) {
  if (power_spec.cols != fb.fft_bins()) {
    throw std::invalid_argument("erb_compress: power spectrum has " +
                                std::to_string(power_spec.cols) +
                                " bins, filterbank expects " +
                                std::to_string(fb.fft_bins()));
  }
  for (double p : power_spec.data) {
    if (!(p >= 0.0)) {
      throw std::invalid_argument("erb_compress: power must be nonnegative and finite");
    }
  }
  ErbFeatures out;
  out.data = RealMatrix(power_spec.rows, fb.bands());
  for (std::size_t t = 0; t < power_spec.rows; ++t) {
    auto row = out.data.row(t);
    fb.analyze(power_spec.row(t), row);
    for (double& v : row) {
      v = std::max(kErbFloorDb, 10.0 * std::log10(v + kErbEpsilon));
    }
  }
  return out;
}

RealMatrix erb_interpolate(const RealMatrix& gains_erb, const ErbFilterbank& fb) {
  if (gains_erb.cols != fb.bands()) {
    throw std::invalid_argument("erb_interpolate: expected " +
                                std::to_string(fb.bands()) + " band gains, got " +
                                std::to_string(gains_erb.cols));
  }
  for (double g : gains_erb.data) {
    if (!(g >= 0.0 && g <= 1.0)) {
      throw std::invalid_argument("erb_interpolate: gains must lie in [0, 1]");
    }
  }
  RealMatrix out(gains_erb.rows, fb.fft_bins());
  for (std::size_t t = 0; t < gains_erb.rows; ++t) {
    fb.synthesize(gains_erb.row(t), out.row(t));
  }
  return out;
}

}  // namespace dpdfnet
