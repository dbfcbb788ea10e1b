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

#include "dpdfnet/dprnn.hpp"

#include <stdexcept>

namespace dpdfnet::dprnn {

using nn::TensorBTFD;

DprnnBlockParams::DprnnBlockParams(std::size_t d) : dim(d) {
  if (d == 0 || d % 2 != 0) {
    throw std::invalid_argument("DprnnBlockParams: feature dim must be even, got " +
                                std::to_string(d));
  }
  intra_fwd = nn::GruParams(d, d / 2);
  intra_bwd = nn::GruParams(d, d / 2);
  intra_fc = nn::GroupedLinear(d, d, 1);
  intra_ln = nn::LayerNorm(d);
  inter_gru = nn::GruParams(d, d);
  inter_fc = nn::GroupedLinear(d, d, 1);
  inter_ln = nn::LayerNorm(d);
}

std::size_t DprnnBlockParams::param_count() const {
  return intra_fwd.param_count() + intra_bwd.param_count() +
         intra_fc.param_count() + intra_ln.param_count() +
         inter_gru.param_count() + inter_fc.param_count() +
         inter_ln.param_count();
}

std::size_t DprnnBlockParams::macs_per_frame(std::size_t bins) const {
  return bins * (intra_fwd.macs_per_step() + intra_bwd.macs_per_step() +
                 intra_fc.macs() + inter_gru.macs_per_step() + inter_fc.macs());
}

void DprnnBlockParams::visit(const std::string& prefix,
                             const nn::ParamVisitor& v) {
  intra_fwd.visit(prefix + ".intra.gru_fwd", v);
  intra_bwd.visit(prefix + ".intra.gru_bwd", v);
  intra_fc.visit(prefix + ".intra.fc", v);
  intra_ln.visit(prefix + ".intra.ln", v);
  inter_gru.visit(prefix + ".inter.gru", v);
  inter_fc.visit(prefix + ".inter.fc", v);
  inter_ln.visit(prefix + ".inter.ln", v);
}

void DprnnBlockParams::visit(const std::string& prefix,
                             const nn::ConstParamVisitor& v) const {
  intra_fwd.visit(prefix + ".intra.gru_fwd", v);
  intra_bwd.visit(prefix + ".intra.gru_bwd", v);
  intra_fc.visit(prefix + ".intra.fc", v);
  intra_ln.visit(prefix + ".intra.ln", v);
  inter_gru.visit(prefix + ".inter.gru", v);
  inter_fc.visit(prefix + ".inter.fc", v);
  inter_ln.visit(prefix + ".inter.ln", v);
}

namespace {

void check_dim(const TensorBTFD& x, const DprnnBlockParams& p) {
  if (x.depth() % 2 != 0) {
    throw std::invalid_argument("dprnn: feature dim must be even, got " +
                                std::to_string(x.depth()));
  }
  if (x.depth() != p.dim) {
    throw std::invalid_argument("dprnn: input depth " + std::to_string(x.depth()) +
                                " does not match block dim " +
                                std::to_string(p.dim));
  }
}

// FC -> LN -> add residual, in place on `y`, residual from `x`.
void refine(std::span<const float> x, std::span<float> rnn_out,
            const nn::GroupedLinear& fc, const nn::LayerNorm& ln,
            std::vector<float>& tmp, std::span<float> y) {
  tmp.resize(fc.output_dim);
  fc.forward(rnn_out, tmp);
  ln.apply(tmp);
  for (std::size_t d = 0; d < y.size(); ++d) y[d] = x[d] + tmp[d];
}

}  // namespace

TensorBTFD dprnn_intra(const TensorBTFD& x, const DprnnBlockParams& p) {
  check_dim(x, p);
  const std::size_t F = x.freq();
  const std::size_t D = x.depth();
  const std::size_t half = D / 2;
  TensorBTFD y(x.batch(), x.time(), F, D);
  std::vector<float> rnn(F * D);
  std::vector<float> h(half);
  std::vector<float> tmp;
  nn::GruScratch scratch;
  for (std::size_t b = 0; b < x.batch(); ++b) {
    for (std::size_t t = 0; t < x.time(); ++t) {
      // Forward direction fills the first half of each position.
      std::fill(h.begin(), h.end(), 0.0f);
      for (std::size_t f = 0; f < F; ++f) {
        nn::gru_step(p.intra_fwd, x.vec(b, t, f), h, scratch);
        std::copy(h.begin(), h.end(), rnn.begin() + static_cast<std::ptrdiff_t>(f * D));
      }
      std::fill(h.begin(), h.end(), 0.0f);
      for (std::size_t f = F; f-- > 0;) {
        nn::gru_step(p.intra_bwd, x.vec(b, t, f), h, scratch);
        std::copy(h.begin(), h.end(),
                  rnn.begin() + static_cast<std::ptrdiff_t>(f * D + half));
      }
      for (std::size_t f = 0; f < F; ++f) {
        refine(x.vec(b, t, f), std::span(rnn).subspan(f * D, D), p.intra_fc,
               p.intra_ln, tmp, y.vec(b, t, f));
      }
    }
  }
  return y;
}

TensorBTFD dprnn_inter(const TensorBTFD& x, const DprnnBlockParams& p,
                       DprnnInterState& state) {
  check_dim(x, p);
  const std::size_t F = x.freq();
  const std::size_t D = x.depth();
  if (state.states.size() != x.batch() * F) {
    throw std::invalid_argument("dprnn_inter: state holds " +
                                std::to_string(state.states.size()) +
                                " sequences, input needs " +
                                std::to_string(x.batch() * F));
  }
  TensorBTFD y(x.batch(), x.time(), F, D);
  std::vector<float> tmp;
  nn::GruScratch scratch;
  for (std::size_t b = 0; b < x.batch(); ++b) {
    for (std::size_t t = 0; t < x.time(); ++t) {
      for (std::size_t f = 0; f < F; ++f) {
        auto& h = state.states[b * F + f].hidden;
        if (h.size() != D) {
          throw std::invalid_argument("dprnn_inter: state width mismatch");
        }
        nn::gru_step(p.inter_gru, x.vec(b, t, f), h, scratch);
        refine(x.vec(b, t, f), h, p.inter_fc, p.inter_ln, tmp, y.vec(b, t, f));
      }
    }
  }
  return y;
}

TensorBTFD dprnn_block(const TensorBTFD& x, const DprnnBlockParams& p,
                       DprnnInterState& state) {
  return dprnn_inter(dprnn_intra(x, p), p, state);
}

}  // namespace dpdfnet::dprnn
