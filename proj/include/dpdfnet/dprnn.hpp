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

// Dual-path recurrent block.
//
// Intra stage: per frame, a bidirectional GRU runs along the frequency axis
// (hidden D/2 per direction, concatenated back to D), then a position-wise
// FC and layer norm; the result is added to the stage input. It sees only
// the current frame, so it is causal in time.
//
// Inter stage: per frequency index, a unidirectional GRU runs along time
// with hidden D. Parameters are shared across frequencies, each frequency
// keeps its own recurrent state. FC, layer norm and residual as above.

#include <cstddef>
#include <string>
#include <vector>

#include "dpdfnet/nn.hpp"

namespace dpdfnet::dprnn {

struct DprnnBlockParams {
  std::size_t dim = 0;  // D, must be even
  nn::GruParams intra_fwd;
  nn::GruParams intra_bwd;
  nn::GroupedLinear intra_fc;
  nn::LayerNorm intra_ln;
  nn::GruParams inter_gru;
  nn::GroupedLinear inter_fc;
  nn::LayerNorm inter_ln;

  DprnnBlockParams() = default;
  explicit DprnnBlockParams(std::size_t d);

  std::size_t param_count() const;
  // Per frame with `bins` frequency positions.
  std::size_t macs_per_frame(std::size_t bins) const;

  void visit(const std::string& prefix, const nn::ParamVisitor& v);
  void visit(const std::string& prefix, const nn::ConstParamVisitor& v) const;
};

// One GRU state per (batch, frequency) sequence, index b * F + f.
struct DprnnInterState {
  std::vector<nn::GruState> states;

  DprnnInterState() = default;
  DprnnInterState(std::size_t sequences, std::size_t hidden)
      : states(sequences, nn::GruState(hidden)) {}
  void reset() {
    for (auto& s : states) s.reset();
  }
};

nn::TensorBTFD dprnn_intra(const nn::TensorBTFD& x, const DprnnBlockParams& p);

// Throws std::invalid_argument if state does not hold B * F sequences.
nn::TensorBTFD dprnn_inter(const nn::TensorBTFD& x, const DprnnBlockParams& p,
                           DprnnInterState& state);

// dprnn_inter(dprnn_intra(x)).
nn::TensorBTFD dprnn_block(const nn::TensorBTFD& x, const DprnnBlockParams& p,
                           DprnnInterState& state);

}  // namespace dpdfnet::dprnn
