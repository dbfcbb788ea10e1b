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

// Forward-only neural operators with explicit state. Activations are float32,
// laid out [B, T, F, D] row-major with channels innermost.

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace dpdfnet::nn {

struct TensorBTFD {
  std::array<std::size_t, 4> shape{0, 0, 0, 0};  // B, T, F, D
  std::vector<float> data;

  TensorBTFD() = default;
  TensorBTFD(std::size_t b, std::size_t t, std::size_t f, std::size_t d,
             float fill = 0.0f)
      : shape{b, t, f, d}, data(b * t * f * d, fill) {}

  std::size_t batch() const { return shape[0]; }
  std::size_t time() const { return shape[1]; }
  std::size_t freq() const { return shape[2]; }
  std::size_t depth() const { return shape[3]; }

  std::size_t offset(std::size_t b, std::size_t t, std::size_t f,
                     std::size_t d = 0) const {
    return ((b * shape[1] + t) * shape[2] + f) * shape[3] + d;
  }
  float& at(std::size_t b, std::size_t t, std::size_t f, std::size_t d) {
    return data[offset(b, t, f, d)];
  }
  float at(std::size_t b, std::size_t t, std::size_t f, std::size_t d) const {
    return data[offset(b, t, f, d)];
  }
  // Channel vector at one (b, t, f) position.
  std::span<float> vec(std::size_t b, std::size_t t, std::size_t f) {
    return {data.data() + offset(b, t, f), shape[3]};
  }
  std::span<const float> vec(std::size_t b, std::size_t t, std::size_t f) const {
    return {data.data() + offset(b, t, f), shape[3]};
  }
};

enum class Activation { kNone, kRelu, kSigmoid, kTanh };

void activate(Activation act, std::span<float> v);

// Parameter traversal: (name, shape, values). Used for seeding, weight IO and
// counting.
using ParamVisitor = std::function<void(const std::string&,
                                        const std::vector<std::size_t>&,
                                        std::vector<float>&)>;
using ConstParamVisitor = std::function<void(const std::string&,
                                             const std::vector<std::size_t>&,
                                             const std::vector<float>&)>;

// ---------------------------------------------------------------------------
// GRU
//
// z = sigmoid(W_z x + U_z h + b_z)
// r = sigmoid(W_r x + U_r h + b_r)
// n = tanh(W_n x + r * (U_n h) + b_n)
// h' = (1 - z) * n + z * h
//
// Gate blocks are stacked in the order (z, r, n). One bias per gate.
struct GruParams {
  std::size_t input_dim = 0;
  std::size_t hidden_dim = 0;
  std::vector<float> w_input;      // [3H x I]
  std::vector<float> w_recurrent;  // [3H x H]
  std::vector<float> bias;         // [3H]

  GruParams() = default;
  GruParams(std::size_t input, std::size_t hidden);

  std::size_t param_count() const {
    return 3 * (input_dim * hidden_dim + hidden_dim * hidden_dim + hidden_dim);
  }
  std::size_t macs_per_step() const {
    return 3 * (input_dim * hidden_dim + hidden_dim * hidden_dim);
  }

  void visit(const std::string& prefix, const ParamVisitor& v);
  void visit(const std::string& prefix, const ConstParamVisitor& v) const;
};

struct GruState {
  std::vector<float> hidden;

  GruState() = default;
  explicit GruState(std::size_t hidden_dim) : hidden(hidden_dim, 0.0f) {}
  void reset() { std::fill(hidden.begin(), hidden.end(), 0.0f); }
};

// Scratch for one GRU step; reuse across steps to avoid allocation.
struct GruScratch {
  std::vector<float> gi;
  std::vector<float> gh;
};

// One recurrence step. x has input_dim entries; h is updated in place.
void gru_step(const GruParams& p, std::span<const float> x, std::span<float> h,
              GruScratch& scratch);

// x: [T x input_dim] row-major. Returns [T x hidden_dim]; state carries over.
std::vector<float> gru_forward(std::span<const float> x, const GruParams& p,
                               GruState& state);

// ---------------------------------------------------------------------------
// Grouped linear: block-diagonal affine map. Group g maps input slice g to
// output slice g.
struct GroupedLinear {
  std::size_t input_dim = 0;
  std::size_t output_dim = 0;
  std::size_t groups = 1;
  std::vector<float> weight;  // [groups x (O/g) x (I/g)]
  std::vector<float> bias;    // [O]

  GroupedLinear() = default;
  GroupedLinear(std::size_t in, std::size_t out, std::size_t groups);

  std::size_t param_count() const {
    return groups * ((input_dim / groups) * (output_dim / groups)) + output_dim;
  }
  std::size_t macs() const {
    return groups * (input_dim / groups) * (output_dim / groups);
  }

  void forward(std::span<const float> x, std::span<float> y) const;

  void visit(const std::string& prefix, const ParamVisitor& v);
  void visit(const std::string& prefix, const ConstParamVisitor& v) const;
};

// x: [N x input_dim] -> [N x output_dim].
std::vector<float> grouped_linear(std::span<const float> x,
                                  const GroupedLinear& layer);

// ---------------------------------------------------------------------------
// Separable conv block over frequency: depthwise (1 x kernel) with symmetric
// zero padding, pointwise 1x1, folded batch-norm affine, activation. Kernel
// extent in time is 1. With stride 2 the output has ceil(F / 2) bins.
struct ConvBlock {
  std::size_t in_channels = 0;
  std::size_t out_channels = 0;
  std::size_t kernel = 3;  // 1 or 3
  std::size_t stride = 1;
  Activation act = Activation::kRelu;
  std::vector<float> depthwise;  // [in x kernel]
  std::vector<float> pointwise;  // [out x in]
  std::vector<float> bn_scale;   // [out]
  std::vector<float> bn_shift;   // [out]

  ConvBlock() = default;
  ConvBlock(std::size_t in, std::size_t out, std::size_t kernel,
            std::size_t stride, Activation act);

  std::size_t output_bins(std::size_t in_bins) const {
    return (in_bins + stride - 1) / stride;
  }
  std::size_t param_count() const {
    return in_channels * kernel + out_channels * in_channels + 2 * out_channels;
  }
  std::size_t macs(std::size_t in_bins) const {
    const std::size_t fo = output_bins(in_bins);
    return fo * (in_channels * kernel + in_channels * out_channels);
  }

  // One frame: x is [F_in x in], y is [F_out x out].
  void forward_frame(std::span<const float> x, std::size_t in_bins,
                     std::span<float> y, std::vector<float>& scratch) const;

  void visit(const std::string& prefix, const ParamVisitor& v);
  void visit(const std::string& prefix, const ConstParamVisitor& v) const;
};

TensorBTFD conv_block_forward(const TensorBTFD& x, const ConvBlock& block);

// Separable transposed conv block: depthwise transposed conv (kernel 3,
// stride 2, padding 1, output padding 1) doubling F, then pointwise, folded
// batch norm and activation.
struct ConvTransposeBlock {
  std::size_t in_channels = 0;
  std::size_t out_channels = 0;
  Activation act = Activation::kRelu;
  std::vector<float> depthwise;  // [in x 3]
  std::vector<float> pointwise;  // [out x in]
  std::vector<float> bn_scale;
  std::vector<float> bn_shift;

  ConvTransposeBlock() = default;
  ConvTransposeBlock(std::size_t in, std::size_t out, Activation act);

  std::size_t param_count() const {
    return in_channels * 3 + out_channels * in_channels + 2 * out_channels;
  }
  std::size_t macs(std::size_t in_bins) const {
    return in_bins * in_channels * 3 + 2 * in_bins * in_channels * out_channels;
  }

  void forward_frame(std::span<const float> x, std::size_t in_bins,
                     std::span<float> y, std::vector<float>& scratch) const;

  void visit(const std::string& prefix, const ParamVisitor& v);
  void visit(const std::string& prefix, const ConstParamVisitor& v) const;
};

TensorBTFD conv_transpose_block_forward(const TensorBTFD& x,
                                        const ConvTransposeBlock& block);

// ---------------------------------------------------------------------------
// Layer norm over the last axis, population variance, eps = 1e-5.
inline constexpr float kLayerNormEps = 1e-5f;

struct LayerNorm {
  std::size_t dim = 0;
  std::vector<float> gain;
  std::vector<float> bias;

  LayerNorm() = default;
  explicit LayerNorm(std::size_t d) : dim(d), gain(d, 1.0f), bias(d, 0.0f) {}

  std::size_t param_count() const { return 2 * dim; }
  void apply(std::span<float> v) const;

  void visit(const std::string& prefix, const ParamVisitor& v);
  void visit(const std::string& prefix, const ConstParamVisitor& v) const;
};

// x: [N x D] (any leading shape flattened).
std::vector<float> layer_norm(std::span<const float> x,
                              std::span<const float> gain,
                              std::span<const float> bias);

}  // namespace dpdfnet::nn
