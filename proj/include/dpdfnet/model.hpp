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

// DPDFNet network: two-branch conv encoder with k dual-path blocks per
// branch, grouped-linear + GRU fusion, ERB-gain decoder (U-Net skips) and
// deep-filter coefficient decoder. All inference is frame-by-frame with
// explicit recurrent state, so batch and streaming use the same arithmetic.

#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "dpdfnet/dprnn.hpp"
#include "dpdfnet/matrix.hpp"
#include "dpdfnet/nn.hpp"

namespace dpdfnet {

struct ModelConfig {
  std::size_t dprnn_blocks = 0;  // k, per branch
  std::size_t conv_channels = 64;
  std::size_t erb_bands = 32;
  std::size_t df_bins = 96;
  std::size_t df_order = 5;  // N; N + 1 taps
  std::size_t lookahead = 2;
  std::size_t fft_bins = 161;
  std::size_t emb_dim = 256;  // fusion and decoder GRU width
  std::size_t groups = 8;     // grouped-linear groups

  // Channel width of the dual-path blocks (equals conv_channels).
  std::size_t feature_dim() const { return conv_channels; }
  std::size_t taps() const { return df_order + 1; }
  std::size_t erb_bottleneck_bins() const { return ceil_div(erb_bands, 8); }
  std::size_t df_bottleneck_bins() const { return ceil_div(df_bins, 8); }
  // Reals per frame of DF coefficients: (N + 1) taps x df_bins x (re, im).
  std::size_t coef_size() const { return 2 * taps() * df_bins; }

  void validate() const;
  bool operator==(const ModelConfig&) const = default;

 private:
  static std::size_t ceil_div(std::size_t a, std::size_t b) {
    return (a + b - 1) / b;
  }
};

// Named float32 tensors in a fixed order, plus the config they belong to.
struct NamedTensor {
  std::string name;
  std::vector<std::size_t> shape;
  std::vector<float> values;

  std::size_t numel() const;
};

struct ModelWeights {
  ModelConfig config;
  std::vector<NamedTensor> tensors;

  const NamedTensor* find(const std::string& name) const;
  std::size_t total_elements() const;
  bool operator==(const ModelWeights& o) const;
};

// Recurrent state of one stream.
struct ModelState {
  nn::GruState fusion;
  std::array<nn::GruState, 2> erb_dec;
  std::array<nn::GruState, 2> df_dec;
  std::vector<dprnn::DprnnInterState> erb_dprnn;
  std::vector<dprnn::DprnnInterState> df_dprnn;

  void reset();
};

class Model {
 public:
  // Seeded construction: uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) weights
  // drawn from std::mt19937_64(seed) as (next() >> 11) * 2^-53. Norm scales
  // start at 1 and shifts at 0. Bit-identical across runs and platforms.
  static Model with_seed(const ModelConfig& config, std::uint64_t seed);
  // Throws WeightError naming the first tensor that is missing, unexpected,
  // mis-shaped or non-finite.
  static Model from_weights(const ModelWeights& weights);

  const ModelConfig& config() const { return config_; }

  ModelState make_state() const;
  // Throws std::invalid_argument if the state does not fit this model.
  void check_state(const ModelState& state) const;

  // One frame. erb_feat has erb_bands values, df_feat df_bins interleaved
  // (re, im) pairs. gains receives erb_bands values in [0, 1]; coefs
  // receives coef_size() reals laid out [tap][bin][re, im].
  void step(std::span<const float> erb_feat, std::span<const float> df_feat,
            ModelState& state, std::span<float> gains,
            std::span<float> coefs) const;

  ModelWeights weights() const;
  std::size_t param_count() const;
  std::size_t macs_per_frame() const;

  void visit(const nn::ConstParamVisitor& v) const;

 private:
  explicit Model(const ModelConfig& config);
  void visit_mut(const nn::ParamVisitor& v);
  template <typename Self, typename Visitor>
  static void visit_all(Self& self, const Visitor& v);

  ModelConfig config_;

  std::array<nn::ConvBlock, 4> erb_enc_;
  std::array<nn::ConvBlock, 4> df_enc_;
  std::vector<dprnn::DprnnBlockParams> erb_dprnn_;
  std::vector<dprnn::DprnnBlockParams> df_dprnn_;

  nn::GroupedLinear fusion_fc_;
  nn::GruParams fusion_gru_;

  std::array<nn::GruParams, 2> erb_dec_gru_;
  std::array<nn::ConvBlock, 4> erb_skip_;  // 1x1 pathway per encoder level
  std::array<nn::ConvTransposeBlock, 3> erb_up_;
  nn::ConvBlock erb_out_;

  nn::GroupedLinear df_in_;
  std::array<nn::GruParams, 2> df_dec_gru_;
  nn::GroupedLinear df_out_;
  nn::ConvBlock df_skip_;  // 1x1 from the first DF conv block
};

// Weight-container errors. `tensor` is empty when not tensor-specific.
class WeightError : public std::runtime_error {
 public:
  enum class Kind {
    kBadMagic,
    kTruncated,
    kMalformedManifest,
    kShapeMismatch,
    kMissingTensor,
    kUnexpectedTensor,
    kNonFinite,
    kConfigMismatch,
  };
  WeightError(Kind kind, std::string tensor, const std::string& what)
      : std::runtime_error(what), kind_(kind), tensor_(std::move(tensor)) {}
  Kind kind() const { return kind_; }
  const std::string& tensor() const { return tensor_; }

 private:
  Kind kind_;
  std::string tensor_;
};

Model build_model(const ModelConfig& config, std::uint64_t seed);
Model build_model(const ModelConfig& config, const ModelWeights& weights);

// Frame-wise inference over T frames. erb_feat is [T x erb_bands], df_feat
// [T x df_bins] complex.
struct ModelOutput {
  Matrix<float> gains;  // [T x erb_bands]
  Matrix<float> coefs;  // [T x coef_size()]
};
ModelOutput model_forward(const Matrix<float>& erb_feat,
                          const Matrix<std::complex<float>>& df_feat,
                          const Model& model, ModelState& state);

std::size_t count_params(const Model& model);
// Multiply-accumulates per `seconds` of audio at 100 frames per second.
std::uint64_t estimate_macs(const Model& model, double seconds);

// Container: 8-byte magic "DPDFNETW", u64 little-endian manifest length,
// UTF-8 JSON manifest {config, tensors: [{name, shape}]}, then float32
// little-endian payloads in manifest order.
void save_weights(const ModelWeights& weights, std::ostream& sink);
ModelWeights load_weights(std::istream& source);
void save_weights_file(const ModelWeights& weights, const std::string& path);
ModelWeights load_weights_file(const std::string& path);

}  // namespace dpdfnet
