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

#include "dpdfnet/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dpdfnet/kernels.hpp"

namespace dpdfnet {

// ---------------------------------------------------------------------------
// Features

FeatureExtractor::FeatureExtractor(const ErbFilterbank& fb, std::size_t df_bins)
    : fb_(&fb), df_bins_(df_bins) {
  if (df_bins > fb.fft_bins()) {
    throw std::invalid_argument("FeatureExtractor: df_bins exceeds fft_bins");
  }
  power_.resize(fb.fft_bins());
  band_db_.resize(fb.bands());
  reset();
}

void FeatureExtractor::reset() {
  erb_mean_.assign(fb_->bands(), kErbMeanInit);
  df_norm_.assign(df_bins_, kDfNormInit);
}

void FeatureExtractor::process(std::span<const cplx> spectrum,
                               std::span<float> erb_out,
                               std::span<float> df_out) {
  for (std::size_t f = 0; f < power_.size(); ++f) power_[f] = std::norm(spectrum[f]);
  fb_->analyze(power_, band_db_);
  for (std::size_t b = 0; b < band_db_.size(); ++b) {
    const double db = std::max(kErbFloorDb, 10.0 * std::log10(band_db_[b] + kErbEpsilon));
    erb_mean_[b] = db * (1.0 - kDecay) + erb_mean_[b] * kDecay;
    erb_out[b] = static_cast<float>((db - erb_mean_[b]) / kErbScale);
  }
  for (std::size_t f = 0; f < df_bins_; ++f) {
    df_norm_[f] = std::abs(spectrum[f]) * (1.0 - kDecay) + df_norm_[f] * kDecay;
    const cplx v = spectrum[f] / std::sqrt(df_norm_[f]);
    df_out[2 * f] = static_cast<float>(v.real());
    df_out[2 * f + 1] = static_cast<float>(v.imag());
  }
}

// ---------------------------------------------------------------------------
// Masking and deep filtering

void DfCoefficients::set_frame(std::size_t k, std::span<const float> model_coefs) {
  if (model_coefs.size() != 2 * taps * bins) {
    throw std::invalid_argument("DfCoefficients::set_frame: size mismatch");
  }
  auto dst = frame(k);
  for (std::size_t j = 0; j < dst.size(); ++j) {
    dst[j] = {model_coefs[2 * j], model_coefs[2 * j + 1]};
  }
}

ComplexSpectrogram apply_erb_mask(const ComplexSpectrogram& x,
                                  const RealMatrix& gains_erb,
                                  const ErbFilterbank& fb) {
  if (gains_erb.rows != x.frames || fb.fft_bins() != x.bins()) {
    throw std::invalid_argument("apply_erb_mask: shape mismatch between spectrogram (" +
                                std::to_string(x.frames) + " x " +
                                std::to_string(x.bins()) + ") and gains/filterbank");
  }
  const RealMatrix mask = erb_interpolate(gains_erb, fb);
  ComplexSpectrogram y(x.config, x.frames);
  for (std::size_t i = 0; i < y.data.size(); ++i) y.data[i] = x.data[i] * mask.data[i];
  return y;
}

void deep_filter_frame(std::span<const std::span<const cplx>> history,
                       std::span<const cplx> coefs_frame, std::size_t taps,
                       std::size_t df_bins, std::span<const cplx> current,
                       std::span<cplx> out) {
  const std::size_t order = taps - 1;
  std::fill(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(df_bins), cplx{});
  const auto& k = kernels::active();
  auto* acc = reinterpret_cast<double*>(out.data());
  for (std::size_t i = 0; i < taps; ++i) {
    const auto& src = history[order - i];
    if (src.empty()) continue;
    k.cmac(reinterpret_cast<const double*>(coefs_frame.data() + i * df_bins),
           reinterpret_cast<const double*>(src.data()), acc, df_bins);
  }
  std::copy(current.begin() + static_cast<std::ptrdiff_t>(df_bins), current.end(),
            out.begin() + static_cast<std::ptrdiff_t>(df_bins));
}

ComplexSpectrogram deep_filter(const ComplexSpectrogram& masked,
                               const DfCoefficients& coefs,
                               std::size_t lookahead) {
  if (coefs.frames != masked.frames || coefs.bins > masked.bins() ||
      coefs.taps == 0) {
    throw std::invalid_argument("deep_filter: coefficient shape (" +
                                std::to_string(coefs.frames) + " x " +
                                std::to_string(coefs.taps) + " x " +
                                std::to_string(coefs.bins) +
                                ") does not fit the spectrogram");
  }
  if (lookahead >= coefs.taps) {
    throw std::invalid_argument("deep_filter: lookahead must be < taps");
  }
  for (const cplx& c : coefs.data) {
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) {
      throw std::invalid_argument("deep_filter: non-finite coefficient");
    }
  }
  const std::size_t T = masked.frames;
  const std::size_t order = coefs.taps - 1;
  ComplexSpectrogram y(masked.config, T);
  std::vector<std::span<const cplx>> history(coefs.taps);
  for (std::size_t k = 0; k < T; ++k) {
    for (std::size_t j = 0; j <= order; ++j) {
      // Frame index k - order + lookahead + j, zero outside [0, T).
      const auto idx = static_cast<std::ptrdiff_t>(k + lookahead + j) -
                       static_cast<std::ptrdiff_t>(order);
      history[j] = (idx >= 0 && idx < static_cast<std::ptrdiff_t>(T))
                       ? masked.frame(static_cast<std::size_t>(idx))
                       : std::span<const cplx>{};
    }
    const std::span<const cplx> c(coefs.data.data() + k * coefs.taps * coefs.bins,
                                  coefs.taps * coefs.bins);
    deep_filter_frame(history, c, coefs.taps, coefs.bins, masked.frame(k),
                      y.frame(k));
  }
  return y;
}

// ---------------------------------------------------------------------------
// Offline

namespace {

StftConfig config_for(const Model& model) {
  StftConfig cfg;
  if (model.config().fft_bins != cfg.fft_bins) {
    throw std::invalid_argument("model expects " + std::to_string(model.config().fft_bins) +
                                " bins; the engine runs at 16 kHz with 161 bins");
  }
  return cfg;
}

void check_finite(std::span<const double> samples) {
  for (double s : samples) {
    if (!std::isfinite(s)) throw std::invalid_argument("input contains non-finite samples");
  }
}

}  // namespace

std::vector<double> enhance_offline(std::span<const double> samples,
                                    const Model& model) {
  check_finite(samples);
  const StftConfig cfg = config_for(model);
  const ModelConfig& mc = model.config();
  const ErbFilterbank fb = build_erb_filterbank(cfg, mc.erb_bands);

  const ComplexSpectrogram x = stft(samples, cfg);
  const std::size_t T = x.frames;

  FeatureExtractor features(fb, mc.df_bins);
  Matrix<float> erb_feat(T, mc.erb_bands);
  Matrix<std::complex<float>> df_feat(T, mc.df_bins);
  std::vector<float> df_frame(2 * mc.df_bins);
  for (std::size_t t = 0; t < T; ++t) {
    features.process(x.frame(t), erb_feat.row(t), df_frame);
    for (std::size_t f = 0; f < mc.df_bins; ++f) {
      df_feat(t, f) = {df_frame[2 * f], df_frame[2 * f + 1]};
    }
  }

  ModelState state = model.make_state();
  const ModelOutput out = model_forward(erb_feat, df_feat, model, state);

  RealMatrix gains(T, mc.erb_bands);
  for (std::size_t i = 0; i < gains.data.size(); ++i) gains.data[i] = out.gains.data[i];
  DfCoefficients coefs(T, mc.taps(), mc.df_bins);
  for (std::size_t t = 0; t < T; ++t) coefs.set_frame(t, out.coefs.row(t));

  const ComplexSpectrogram masked = apply_erb_mask(x, gains, fb);
  const ComplexSpectrogram y = deep_filter(masked, coefs, mc.lookahead);
  return istft(y, cfg, samples.size());
}

// ---------------------------------------------------------------------------
// Streaming

EnhancerStream::EnhancerStream(const Model& model)
    : model_(&model),
      config_(config_for(model)),
      fb_(build_erb_filterbank(config_, model.config().erb_bands)),
      transform_(config_),
      features_(fb_, model.config().df_bins),
      state_(model.make_state()) {
  const ModelConfig& mc = model.config();
  spectrum_.resize(config_.fft_bins);
  erb_feat_.resize(mc.erb_bands);
  df_feat_.resize(2 * mc.df_bins);
  gains_.resize(mc.erb_bands);
  model_coefs_.resize(mc.coef_size());
  band_gains_.resize(mc.erb_bands);
  bin_gains_.resize(config_.fft_bins);
  synth_.resize(config_.window_len);
  reset();
}

std::size_t EnhancerStream::latency() const {
  return config_.window_len + model_->config().lookahead * config_.hop;
}

void EnhancerStream::reset() {
  features_.reset();
  state_.reset();
  pending_.clear();
  pushed_ = 0;
  analyzed_ = 0;
  masked_.clear();
  coefs_.clear();
  overlap_.assign(config_.window_len - config_.hop, 0.0);
  out_.assign(latency(), 0.0);
}

void EnhancerStream::emit_block(std::span<const cplx> spectrum) {
  transform_.synthesize(spectrum, synth_);
  const std::size_t hop = config_.hop;
  for (std::size_t i = 0; i < hop; ++i) out_.push_back(overlap_[i] + synth_[i]);
  std::copy(synth_.begin() + static_cast<std::ptrdiff_t>(hop), synth_.end(),
            overlap_.begin());
}

void EnhancerStream::analyze_frame(std::span<const double> frame) {
  const ModelConfig& mc = model_->config();
  transform_.analyze(frame, spectrum_);
  features_.process(spectrum_, erb_feat_, df_feat_);
  model_->step(erb_feat_, df_feat_, state_, gains_, model_coefs_);

  for (std::size_t b = 0; b < gains_.size(); ++b) band_gains_[b] = gains_[b];
  fb_.synthesize(band_gains_, bin_gains_);
  std::vector<cplx> masked(config_.fft_bins);
  for (std::size_t f = 0; f < masked.size(); ++f) masked[f] = spectrum_[f] * bin_gains_[f];
  masked_.push_back(std::move(masked));
  if (masked_.size() > mc.taps()) masked_.pop_front();

  std::vector<cplx> c(mc.taps() * mc.df_bins);
  for (std::size_t j = 0; j < c.size(); ++j) {
    c[j] = {model_coefs_[2 * j], model_coefs_[2 * j + 1]};
  }
  coefs_.push_back(std::move(c));
  ++analyzed_;

  if (analyzed_ <= mc.lookahead) return;
  // Frame k = analyzed_ - 1 - lookahead is now complete.
  std::vector<std::span<const cplx>> history(mc.taps());
  const std::size_t missing = mc.taps() - masked_.size();
  for (std::size_t j = 0; j < mc.taps(); ++j) {
    history[j] = j < missing ? std::span<const cplx>{}
                             : std::span<const cplx>(masked_[j - missing]);
  }
  const std::vector<cplx>& current = masked_[masked_.size() - 1 - mc.lookahead];
  std::vector<cplx> y(config_.fft_bins);
  deep_filter_frame(history, coefs_.front(), mc.taps(), mc.df_bins, current, y);
  coefs_.pop_front();
  emit_block(y);
}

void EnhancerStream::analyze_available() {
  const std::size_t L = config_.window_len;
  const std::size_t hop = config_.hop;
  std::size_t offset = 0;
  while (pending_.size() - offset >= L) {
    analyze_frame(std::span<const double>(pending_).subspan(offset, L));
    offset += hop;
  }
  pending_.erase(pending_.begin(), pending_.begin() + static_cast<std::ptrdiff_t>(offset));
}

std::vector<double> EnhancerStream::push(std::span<const double> samples) {
  check_finite(samples);
  pending_.insert(pending_.end(), samples.begin(), samples.end());
  pushed_ += samples.size();
  analyze_available();
  // out_ always holds more than samples.size() values here: the delay line
  // starts with latency() zeros and each analyzed frame beyond the
  // look-ahead adds one hop.
  std::vector<double> result(samples.size());
  for (double& v : result) {
    v = out_.front();
    out_.pop_front();
  }
  return result;
}

std::vector<double> EnhancerStream::flush() {
  const std::size_t frames = config_.frames_for(pushed_);
  const std::size_t needed = frames + model_->config().lookahead;
  while (analyzed_ < needed) {
    pending_.resize(pending_.size() + config_.hop, 0.0);
    analyze_available();
  }
  const std::size_t n = latency();
  std::vector<double> result(n);
  for (double& v : result) {
    v = out_.front();
    out_.pop_front();
  }
  reset();
  return result;
}

}  // namespace dpdfnet
