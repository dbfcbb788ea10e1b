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

#include "dpdfnet/nn.hpp"

#include <cmath>
#include <stdexcept>

#include "dpdfnet/kernels.hpp"

namespace dpdfnet::nn {
namespace {

inline float sigmoid(float x) { return 1.0f / (1.0f + std::exp(-x)); }

std::string dims(std::size_t a, std::size_t b) {
  return std::to_string(a) + " vs " + std::to_string(b);
}

}  // namespace

void activate(Activation act, std::span<float> v) {
  switch (act) {
    case Activation::kNone:
      return;
    case Activation::kRelu:
      for (float& x : v) x = x > 0.0f ? x : 0.0f;
      return;
    case Activation::kSigmoid:
      for (float& x : v) x = sigmoid(x);
      return;
    case Activation::kTanh:
      for (float& x : v) x = std::tanh(x);
      return;
  }
}

// ---------------------------------------------------------------------------
// GRU

GruParams::GruParams(std::size_t input, std::size_t hidden)
    : input_dim(input),
      hidden_dim(hidden),
      w_input(3 * hidden * input),
      w_recurrent(3 * hidden * hidden),
      bias(3 * hidden) {}

void GruParams::visit(const std::string& prefix, const ParamVisitor& v) {
  v(prefix + ".w_input", {3 * hidden_dim, input_dim}, w_input);
  v(prefix + ".w_recurrent", {3 * hidden_dim, hidden_dim}, w_recurrent);
  v(prefix + ".bias", {3 * hidden_dim}, bias);
}

void GruParams::visit(const std::string& prefix,
                      const ConstParamVisitor& v) const {
  v(prefix + ".w_input", {3 * hidden_dim, input_dim}, w_input);
  v(prefix + ".w_recurrent", {3 * hidden_dim, hidden_dim}, w_recurrent);
  v(prefix + ".bias", {3 * hidden_dim}, bias);
}

void gru_step(const GruParams& p, std::span<const float> x, std::span<float> h,
              GruScratch& s) {
  const std::size_t H = p.hidden_dim;
  const auto& k = kernels::active();
  s.gi.assign(p.bias.begin(), p.bias.end());
  s.gh.assign(3 * H, 0.0f);
  k.gemv_acc(p.w_input.data(), x.data(), s.gi.data(), 3 * H, p.input_dim);
  k.gemv_acc(p.w_recurrent.data(), h.data(), s.gh.data(), 3 * H, H);
  for (std::size_t j = 0; j < H; ++j) {
    const float z = sigmoid(s.gi[j] + s.gh[j]);
    const float r = sigmoid(s.gi[H + j] + s.gh[H + j]);
    const float n = std::tanh(s.gi[2 * H + j] + r * s.gh[2 * H + j]);
    h[j] = (1.0f - z) * n + z * h[j];
  }
}

std::vector<float> gru_forward(std::span<const float> x, const GruParams& p,
                               GruState& state) {
  if (p.input_dim == 0 || x.size() % p.input_dim != 0) {
    throw std::invalid_argument("gru_forward: input length " +
                                std::to_string(x.size()) +
                                " is not a multiple of input_dim " +
                                std::to_string(p.input_dim));
  }
  if (state.hidden.size() != p.hidden_dim) {
    throw std::invalid_argument("gru_forward: state size mismatch (" +
                                dims(state.hidden.size(), p.hidden_dim) + ")");
  }
  const std::size_t steps = x.size() / p.input_dim;
  std::vector<float> y(steps * p.hidden_dim);
  GruScratch scratch;
  for (std::size_t t = 0; t < steps; ++t) {
    gru_step(p, x.subspan(t * p.input_dim, p.input_dim), state.hidden, scratch);
    std::copy(state.hidden.begin(), state.hidden.end(),
              y.begin() + static_cast<std::ptrdiff_t>(t * p.hidden_dim));
  }
  return y;
}

// ---------------------------------------------------------------------------
// Grouped linear

GroupedLinear::GroupedLinear(std::size_t in, std::size_t out, std::size_t g)
    : input_dim(in), output_dim(out), groups(g) {
  if (g == 0 || in % g != 0 || out % g != 0) {
    throw std::invalid_argument("GroupedLinear: dims " + dims(in, out) +
                                " not divisible by groups " + std::to_string(g));
  }
  weight.resize(g * (in / g) * (out / g));
  bias.resize(out);
}

void GroupedLinear::forward(std::span<const float> x, std::span<float> y) const {
  const std::size_t gi = input_dim / groups;
  const std::size_t go = output_dim / groups;
  const auto& k = kernels::active();
  std::copy(bias.begin(), bias.end(), y.begin());
  for (std::size_t g = 0; g < groups; ++g) {
    k.gemv_acc(weight.data() + g * go * gi, x.data() + g * gi,
               y.data() + g * go, go, gi);
  }
}

void GroupedLinear::visit(const std::string& prefix, const ParamVisitor& v) {
  v(prefix + ".weight", {groups, output_dim / groups, input_dim / groups},
    weight);
  v(prefix + ".bias", {output_dim}, bias);
}

void GroupedLinear::visit(const std::string& prefix,
                          const ConstParamVisitor& v) const {
  v(prefix + ".weight", {groups, output_dim / groups, input_dim / groups},
    weight);
  v(prefix + ".bias", {output_dim}, bias);
}

std::vector<float> grouped_linear(std::span<const float> x,
                                  const GroupedLinear& layer) {
  if (layer.groups == 0 || layer.input_dim % layer.groups != 0 ||
      layer.output_dim % layer.groups != 0) {
    throw std::invalid_argument("grouped_linear: dims not divisible by groups");
  }
  if (x.size() % layer.input_dim != 0) {
    throw std::invalid_argument("grouped_linear: input length " +
                                std::to_string(x.size()) +
                                " is not a multiple of " +
                                std::to_string(layer.input_dim));
  }
  const std::size_t n = x.size() / layer.input_dim;
  std::vector<float> y(n * layer.output_dim);
  for (std::size_t i = 0; i < n; ++i) {
    layer.forward(x.subspan(i * layer.input_dim, layer.input_dim),
                  std::span(y).subspan(i * layer.output_dim, layer.output_dim));
  }
  return y;
}

// ---------------------------------------------------------------------------
// Conv blocks

ConvBlock::ConvBlock(std::size_t in, std::size_t out, std::size_t k,
                     std::size_t s, Activation a)
    : in_channels(in),
      out_channels(out),
      kernel(k),
      stride(s),
      act(a),
      depthwise(in * k),
      pointwise(out * in),
      bn_scale(out, 1.0f),
      bn_shift(out, 0.0f) {
  if (k != 1 && k != 3) {
    throw std::invalid_argument("ConvBlock: kernel must be 1 or 3");
  }
  if (s != 1 && s != 2) {
    throw std::invalid_argument("ConvBlock: stride must be 1 or 2");
  }
}

void ConvBlock::forward_frame(std::span<const float> x, std::size_t in_bins,
                              std::span<float> y,
                              std::vector<float>& scratch) const {
  const std::size_t fo_n = output_bins(in_bins);
  const std::size_t C = in_channels;
  const auto pad = static_cast<std::ptrdiff_t>(kernel / 2);
  scratch.assign(C, 0.0f);
  const auto& kt = kernels::active();
  for (std::size_t fo = 0; fo < fo_n; ++fo) {
    std::fill(scratch.begin(), scratch.end(), 0.0f);
    const auto center = static_cast<std::ptrdiff_t>(fo * stride);
    for (std::size_t k = 0; k < kernel; ++k) {
      const std::ptrdiff_t fi = center + static_cast<std::ptrdiff_t>(k) - pad;
      if (fi < 0 || fi >= static_cast<std::ptrdiff_t>(in_bins)) continue;
      const float* xv = x.data() + static_cast<std::size_t>(fi) * C;
      for (std::size_t c = 0; c < C; ++c) {
        scratch[c] += depthwise[c * kernel + k] * xv[c];
      }
    }
    auto out = y.subspan(fo * out_channels, out_channels);
    std::fill(out.begin(), out.end(), 0.0f);
    kt.gemv_acc(pointwise.data(), scratch.data(), out.data(), out_channels, C);
    for (std::size_t o = 0; o < out_channels; ++o) {
      out[o] = out[o] * bn_scale[o] + bn_shift[o];
    }
    activate(act, out);
  }
}

void ConvBlock::visit(const std::string& prefix, const ParamVisitor& v) {
  v(prefix + ".depthwise", {in_channels, kernel}, depthwise);
  v(prefix + ".pointwise", {out_channels, in_channels}, pointwise);
  v(prefix + ".bn_scale", {out_channels}, bn_scale);
  v(prefix + ".bn_shift", {out_channels}, bn_shift);
}

void ConvBlock::visit(const std::string& prefix,
                      const ConstParamVisitor& v) const {
  v(prefix + ".depthwise", {in_channels, kernel}, depthwise);
  v(prefix + ".pointwise", {out_channels, in_channels}, pointwise);
  v(prefix + ".bn_scale", {out_channels}, bn_scale);
  v(prefix + ".bn_shift", {out_channels}, bn_shift);
}

TensorBTFD conv_block_forward(const TensorBTFD& x, const ConvBlock& block) {
  if (x.depth() != block.in_channels) {
    throw std::invalid_argument("conv_block_forward: input has " +
                                std::to_string(x.depth()) +
                                " channels, block expects " +
                                std::to_string(block.in_channels));
  }
  const std::size_t fo = block.output_bins(x.freq());
  TensorBTFD y(x.batch(), x.time(), fo, block.out_channels);
  std::vector<float> scratch;
  const std::size_t in_frame = x.freq() * x.depth();
  const std::size_t out_frame = fo * block.out_channels;
  for (std::size_t b = 0; b < x.batch(); ++b) {
    for (std::size_t t = 0; t < x.time(); ++t) {
      block.forward_frame(
          std::span(x.data).subspan(x.offset(b, t, 0), in_frame), x.freq(),
          std::span(y.data).subspan(y.offset(b, t, 0), out_frame), scratch);
    }
  }
  return y;
}

ConvTransposeBlock::ConvTransposeBlock(std::size_t in, std::size_t out,
                                       Activation a)
    : in_channels(in),
      out_channels(out),
      act(a),
      depthwise(in * 3),
      pointwise(out * in),
      bn_scale(out, 1.0f),
      bn_shift(out, 0.0f) {}

void ConvTransposeBlock::forward_frame(std::span<const float> x,
                                       std::size_t in_bins, std::span<float> y,
                                       std::vector<float>& scratch) const {
  const std::size_t C = in_channels;
  const std::size_t fo_n = 2 * in_bins;
  scratch.assign(fo_n * C, 0.0f);
  // out[o] = sum over (i, k) with o = 2 i + k - 1 of w[k] x[i].
  for (std::size_t i = 0; i < in_bins; ++i) {
    const float* xv = x.data() + i * C;
    for (std::size_t k = 0; k < 3; ++k) {
      const std::ptrdiff_t o = 2 * static_cast<std::ptrdiff_t>(i) +
                               static_cast<std::ptrdiff_t>(k) - 1;
      if (o < 0 || o >= static_cast<std::ptrdiff_t>(fo_n)) continue;
      float* sv = scratch.data() + static_cast<std::size_t>(o) * C;
      for (std::size_t c = 0; c < C; ++c) sv[c] += depthwise[c * 3 + k] * xv[c];
    }
  }
  const auto& kt = kernels::active();
  for (std::size_t fo = 0; fo < fo_n; ++fo) {
    auto out = y.subspan(fo * out_channels, out_channels);
    std::fill(out.begin(), out.end(), 0.0f);
    kt.gemv_acc(pointwise.data(), scratch.data() + fo * C, out.data(),
                out_channels, C);
    for (std::size_t o = 0; o < out_channels; ++o) {
      out[o] = out[o] * bn_scale[o] + bn_shift[o];
    }
    activate(act, out);
  }
}

void ConvTransposeBlock::visit(const std::string& prefix,
                               const ParamVisitor& v) {
  v(prefix + ".depthwise", {in_channels, 3}, depthwise);
  v(prefix + ".pointwise", {out_channels, in_channels}, pointwise);
  v(prefix + ".bn_scale", {out_channels}, bn_scale);
  v(prefix + ".bn_shift", {out_channels}, bn_shift);
}

void ConvTransposeBlock::visit(const std::string& prefix,
                               const ConstParamVisitor& v) const {
  v(prefix + ".depthwise", {in_channels, 3}, depthwise);
  v(prefix + ".pointwise", {out_channels, in_channels}, pointwise);
  v(prefix + ".bn_scale", {out_channels}, bn_scale);
  v(prefix + ".bn_shift", {out_channels}, bn_shift);
}

TensorBTFD conv_transpose_block_forward(const TensorBTFD& x,
                                        const ConvTransposeBlock& block) {
  if (x.depth() != block.in_channels) {
    throw std::invalid_argument("conv_transpose_block_forward: channel mismatch (" +
                                dims(x.depth(), block.in_channels) + ")");
  }
  TensorBTFD y(x.batch(), x.time(), 2 * x.freq(), block.out_channels);
  std::vector<float> scratch;
  for (std::size_t b = 0; b < x.batch(); ++b) {
    for (std::size_t t = 0; t < x.time(); ++t) {
      block.forward_frame(
          std::span(x.data).subspan(x.offset(b, t, 0), x.freq() * x.depth()),
          x.freq(),
          std::span(y.data).subspan(y.offset(b, t, 0),
                                    y.freq() * y.depth()),
          scratch);
    }
  }
  return y;
}

// ---------------------------------------------------------------------------
// Layer norm

void LayerNorm::apply(std::span<float> v) const {
  double mean = 0.0;
  for (float x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double var = 0.0;
  for (float x : v) var += (x - mean) * (x - mean);
  var /= static_cast<double>(v.size());
  const double inv = 1.0 / std::sqrt(var + kLayerNormEps);
  for (std::size_t i = 0; i < v.size(); ++i) {
    v[i] = static_cast<float>((v[i] - mean) * inv) * gain[i] + bias[i];
  }
}

void LayerNorm::visit(const std::string& prefix, const ParamVisitor& v) {
  v(prefix + ".gain", {dim}, gain);
  v(prefix + ".bias", {dim}, bias);
}

void LayerNorm::visit(const std::string& prefix,
                      const ConstParamVisitor& v) const {
  v(prefix + ".gain", {dim}, gain);
  v(prefix + ".bias", {dim}, bias);
}

std::vector<float> layer_norm(std::span<const float> x,
                              std::span<const float> gain,
                              std::span<const float> bias) {
  const std::size_t d = gain.size();
  if (d == 0 || bias.size() != d || x.size() % d != 0) {
    throw std::invalid_argument("layer_norm: shape mismatch");
  }
  LayerNorm ln;
  ln.dim = d;
  ln.gain.assign(gain.begin(), gain.end());
  ln.bias.assign(bias.begin(), bias.end());
  std::vector<float> y(x.begin(), x.end());
  for (std::size_t i = 0; i < y.size(); i += d) {
    ln.apply(std::span(y).subspan(i, d));
  }
  return y;
}

}  // namespace dpdfnet::nn
