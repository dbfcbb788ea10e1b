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

#include "dpdfnet/model.hpp"

#include <cmath>
#include <cstring>
#include <random>
#include <unordered_set>

namespace dpdfnet {

using nn::Activation;
using nn::ConvBlock;
using nn::ConvTransposeBlock;
using nn::GroupedLinear;
using nn::GruParams;
using nn::GruState;
using nn::TensorBTFD;

void ModelConfig::validate() const {
  auto fail = [](const std::string& msg) {
    throw std::invalid_argument("ModelConfig: " + msg);
  };
  if (conv_channels == 0 || conv_channels % 2 != 0) {
    fail("conv_channels must be even and positive");
  }
  if (erb_bands == 0 || erb_bands % 8 != 0) {
    fail("erb_bands must be a positive multiple of 8");
  }
  if (df_bins == 0 || df_bins > fft_bins) fail("need 0 < df_bins <= fft_bins");
  if (erb_bands > fft_bins) fail("need erb_bands <= fft_bins");
  if (df_order < 1) fail("df_order must be >= 1");
  if (lookahead > df_order) fail("lookahead must be <= df_order");
  if (groups == 0) fail("groups must be positive");
  if (emb_dim != erb_bottleneck_bins() * conv_channels) {
    fail("emb_dim must equal (erb_bands / 8) * conv_channels = " +
         std::to_string(erb_bottleneck_bins() * conv_channels));
  }
  const std::size_t fused =
      (erb_bottleneck_bins() + df_bottleneck_bins()) * conv_channels;
  if (fused % groups != 0 || emb_dim % groups != 0 ||
      coef_size() % groups != 0) {
    fail("grouped-linear widths must be divisible by groups");
  }
}

std::size_t NamedTensor::numel() const {
  std::size_t n = 1;
  for (std::size_t d : shape) n *= d;
  return n;
}

const NamedTensor* ModelWeights::find(const std::string& name) const {
  for (const auto& t : tensors) {
    if (t.name == name) return &t;
  }
  return nullptr;
}

std::size_t ModelWeights::total_elements() const {
  std::size_t n = 0;
  for (const auto& t : tensors) n += t.values.size();
  return n;
}

bool ModelWeights::operator==(const ModelWeights& o) const {
  if (!(config == o.config) || tensors.size() != o.tensors.size()) return false;
  for (std::size_t i = 0; i < tensors.size(); ++i) {
    const auto& a = tensors[i];
    const auto& b = o.tensors[i];
    if (a.name != b.name || a.shape != b.shape ||
        a.values.size() != b.values.size()) {
      return false;
    }
    // Bitwise, so NaN payloads and signed zeros compare exactly.
    if (!a.values.empty() &&
        std::memcmp(a.values.data(), b.values.data(),
                    a.values.size() * sizeof(float)) != 0) {
      return false;
    }
  }
  return true;
}

void ModelState::reset() {
  fusion.reset();
  for (auto& s : erb_dec) s.reset();
  for (auto& s : df_dec) s.reset();
  for (auto& s : erb_dprnn) s.reset();
  for (auto& s : df_dprnn) s.reset();
}

Model::Model(const ModelConfig& config) : config_(config) {
  config_.validate();
  const std::size_t C = config.conv_channels;
  const std::size_t H = config.emb_dim;
  const std::size_t G = config.groups;

  erb_enc_[0] = ConvBlock(1, C, 3, 1, Activation::kRelu);
  df_enc_[0] = ConvBlock(2, C, 3, 1, Activation::kRelu);
  for (std::size_t i = 1; i < 4; ++i) {
    erb_enc_[i] = ConvBlock(C, C, 3, 2, Activation::kRelu);
    df_enc_[i] = ConvBlock(C, C, 3, 2, Activation::kRelu);
  }
  for (std::size_t i = 0; i < config.dprnn_blocks; ++i) {
    erb_dprnn_.emplace_back(config.feature_dim());
    df_dprnn_.emplace_back(config.feature_dim());
  }

  const std::size_t fused =
      (config.erb_bottleneck_bins() + config.df_bottleneck_bins()) * C;
  fusion_fc_ = GroupedLinear(fused, H, G);
  fusion_gru_ = GruParams(H, H);

  erb_dec_gru_[0] = GruParams(H, H);
  erb_dec_gru_[1] = GruParams(H, H);
  for (auto& s : erb_skip_) s = ConvBlock(C, C, 1, 1, Activation::kRelu);
  for (auto& u : erb_up_) u = ConvTransposeBlock(C, C, Activation::kRelu);
  erb_out_ = ConvBlock(C, 1, 3, 1, Activation::kSigmoid);

  df_in_ = GroupedLinear(H, H, G);
  df_dec_gru_[0] = GruParams(H, H);
  df_dec_gru_[1] = GruParams(H, H);
  df_out_ = GroupedLinear(H, config.coef_size(), G);
  df_skip_ = ConvBlock(C, 2 * config.taps(), 1, 1, Activation::kNone);
}

template <typename Self, typename Visitor>
void Model::visit_all(Self& self, const Visitor& v) {
  for (std::size_t i = 0; i < 4; ++i) {
    self.erb_enc_[i].visit("enc.erb.conv" + std::to_string(i), v);
  }
  for (std::size_t i = 0; i < 4; ++i) {
    self.df_enc_[i].visit("enc.df.conv" + std::to_string(i), v);
  }
  for (std::size_t i = 0; i < self.erb_dprnn_.size(); ++i) {
    self.erb_dprnn_[i].visit("enc.erb.dprnn" + std::to_string(i), v);
  }
  for (std::size_t i = 0; i < self.df_dprnn_.size(); ++i) {
    self.df_dprnn_[i].visit("enc.df.dprnn" + std::to_string(i), v);
  }
  self.fusion_fc_.visit("enc.fusion.fc", v);
  self.fusion_gru_.visit("enc.fusion.gru", v);
  for (std::size_t i = 0; i < 2; ++i) {
    self.erb_dec_gru_[i].visit("erb_dec.gru" + std::to_string(i), v);
  }
  for (std::size_t i = 0; i < 4; ++i) {
    self.erb_skip_[i].visit("erb_dec.skip" + std::to_string(i), v);
  }
  for (std::size_t i = 0; i < 3; ++i) {
    self.erb_up_[i].visit("erb_dec.up" + std::to_string(i), v);
  }
  self.erb_out_.visit("erb_dec.out", v);
  self.df_in_.visit("df_dec.fc_in", v);
  for (std::size_t i = 0; i < 2; ++i) {
    self.df_dec_gru_[i].visit("df_dec.gru" + std::to_string(i), v);
  }
  self.df_out_.visit("df_dec.fc_out", v);
  self.df_skip_.visit("df_dec.skip", v);
}

void Model::visit(const nn::ConstParamVisitor& v) const { visit_all(*this, v); }

void Model::visit_mut(const nn::ParamVisitor& v) { visit_all(*this, v); }

namespace {

bool ends_with(const std::string& s, std::string_view suffix) {
  return s.size() >= suffix.size() &&
         s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

std::string shape_str(const std::vector<std::size_t>& shape) {
  std::string s = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += ", ";
    s += std::to_string(shape[i]);
  }
  return s + "]";
}

}  // namespace

Model Model::with_seed(const ModelConfig& config, std::uint64_t seed) {
  Model m(config);
  std::mt19937_64 rng(seed);
  std::size_t fan_in = 1;
  m.visit_mut([&](const std::string& name, const std::vector<std::size_t>& shape,
                  std::vector<float>& values) {
    if (ends_with(name, ".bn_scale") || ends_with(name, ".ln.gain")) {
      std::fill(values.begin(), values.end(), 1.0f);
      return;
    }
    if (ends_with(name, ".bn_shift") || ends_with(name, ".ln.bias")) {
      std::fill(values.begin(), values.end(), 0.0f);
      return;
    }
    // Biases reuse the fan-in of the weight visited just before them.
    if (shape.size() >= 2) fan_in = shape.back();
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    for (float& v : values) {
      const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
      v = static_cast<float>((2.0 * u - 1.0) * bound);
    }
  });
  return m;
}

Model Model::from_weights(const ModelWeights& weights) {
  Model m(weights.config);
  std::unordered_set<std::string> consumed;
  m.visit_mut([&](const std::string& name, const std::vector<std::size_t>& shape,
                  std::vector<float>& values) {
    const NamedTensor* t = weights.find(name);
    if (t == nullptr) {
      throw WeightError(WeightError::Kind::kMissingTensor, name,
                        "weights: missing tensor '" + name + "'");
    }
    if (t->shape != shape || t->values.size() != values.size()) {
      throw WeightError(WeightError::Kind::kShapeMismatch, name,
                        "weights: tensor '" + name + "' has shape " +
                            shape_str(t->shape) + ", expected " +
                            shape_str(shape));
    }
    for (float v : t->values) {
      if (!std::isfinite(v)) {
        throw WeightError(WeightError::Kind::kNonFinite, name,
                          "weights: tensor '" + name +
                              "' contains a non-finite value");
      }
    }
    values = t->values;
    consumed.insert(name);
  });
  for (const auto& t : weights.tensors) {
    if (!consumed.contains(t.name)) {
      throw WeightError(WeightError::Kind::kUnexpectedTensor, t.name,
                        "weights: unexpected tensor '" + t.name +
                            "' for this configuration");
    }
  }
  return m;
}

ModelState Model::make_state() const {
  ModelState s;
  const std::size_t H = config_.emb_dim;
  const std::size_t D = config_.feature_dim();
  s.fusion = GruState(H);
  s.erb_dec = {GruState(H), GruState(H)};
  s.df_dec = {GruState(H), GruState(H)};
  for (std::size_t i = 0; i < config_.dprnn_blocks; ++i) {
    s.erb_dprnn.emplace_back(config_.erb_bottleneck_bins(), D);
    s.df_dprnn.emplace_back(config_.df_bottleneck_bins(), D);
  }
  return s;
}

void Model::check_state(const ModelState& s) const {
  const std::size_t H = config_.emb_dim;
  bool ok = s.fusion.hidden.size() == H &&
            s.erb_dprnn.size() == config_.dprnn_blocks &&
            s.df_dprnn.size() == config_.dprnn_blocks;
  for (const auto& g : s.erb_dec) ok = ok && g.hidden.size() == H;
  for (const auto& g : s.df_dec) ok = ok && g.hidden.size() == H;
  for (const auto& d : s.erb_dprnn) {
    ok = ok && d.states.size() == config_.erb_bottleneck_bins();
  }
  for (const auto& d : s.df_dprnn) {
    ok = ok && d.states.size() == config_.df_bottleneck_bins();
  }
  if (!ok) {
    throw std::invalid_argument("model state does not match the model configuration");
  }
}

void Model::step(std::span<const float> erb_feat, std::span<const float> df_feat,
                 ModelState& state, std::span<float> gains,
                 std::span<float> coefs) const {
  const ModelConfig& c = config_;
  const std::size_t C = c.conv_channels;
  const std::size_t H = c.emb_dim;
  if (erb_feat.size() != c.erb_bands || df_feat.size() != 2 * c.df_bins ||
      gains.size() != c.erb_bands || coefs.size() != c.coef_size()) {
    throw std::invalid_argument("Model::step: buffer size mismatch");
  }
  std::vector<float> scratch;

  // ERB encoder: levels at erb_bands, /2, /4, /8 bins.
  std::array<std::vector<float>, 4> e;
  std::array<std::size_t, 4> e_bins{};
  {
    std::size_t bins = c.erb_bands;
    std::span<const float> in = erb_feat;
    for (std::size_t i = 0; i < 4; ++i) {
      const std::size_t out_bins = erb_enc_[i].output_bins(bins);
      e[i].resize(out_bins * C);
      erb_enc_[i].forward_frame(in, bins, e[i], scratch);
      e_bins[i] = out_bins;
      bins = out_bins;
      in = e[i];
    }
  }
  // DF encoder.
  std::array<std::vector<float>, 4> d;
  {
    std::size_t bins = c.df_bins;
    std::span<const float> in = df_feat;
    for (std::size_t i = 0; i < 4; ++i) {
      const std::size_t out_bins = df_enc_[i].output_bins(bins);
      d[i].resize(out_bins * C);
      df_enc_[i].forward_frame(in, bins, d[i], scratch);
      bins = out_bins;
      in = d[i];
    }
  }

  // Dual-path blocks on each branch bottleneck.
  if (!erb_dprnn_.empty()) {
    TensorBTFD t(1, 1, e_bins[3], C);
    t.data = e[3];
    for (std::size_t i = 0; i < erb_dprnn_.size(); ++i) {
      t = dprnn::dprnn_block(t, erb_dprnn_[i], state.erb_dprnn[i]);
    }
    e[3] = std::move(t.data);
  }
  if (!df_dprnn_.empty()) {
    TensorBTFD t(1, 1, c.df_bottleneck_bins(), C);
    t.data = d[3];
    for (std::size_t i = 0; i < df_dprnn_.size(); ++i) {
      t = dprnn::dprnn_block(t, df_dprnn_[i], state.df_dprnn[i]);
    }
    d[3] = std::move(t.data);
  }

  // Fusion: flatten, concatenate, grouped linear, GRU.
  std::vector<float> fused(e[3]);
  fused.insert(fused.end(), d[3].begin(), d[3].end());
  std::vector<float> emb(H);
  fusion_fc_.forward(fused, emb);
  nn::activate(Activation::kRelu, emb);
  nn::GruScratch gs;
  nn::gru_step(fusion_gru_, emb, state.fusion.hidden, gs);
  const std::vector<float>& fused_emb = state.fusion.hidden;

  // ERB decoder.
  std::vector<float> g(fused_emb);
  for (std::size_t i = 0; i < 2; ++i) {
    nn::gru_step(erb_dec_gru_[i], g, state.erb_dec[i].hidden, gs);
    g = state.erb_dec[i].hidden;
  }
  std::vector<float> up = std::move(g);  // [bottleneck bins x C]
  std::vector<float> skip;
  for (std::size_t lvl = 3; lvl-- > 0;) {
    // Pathway from encoder level lvl+1, summed with the decoder input, then
    // upsampled to the bin count of level lvl.
    const std::size_t bins = e_bins[lvl + 1];
    skip.resize(bins * C);
    erb_skip_[lvl + 1].forward_frame(e[lvl + 1], bins, skip, scratch);
    for (std::size_t j = 0; j < skip.size(); ++j) skip[j] += up[j];
    up.assign(2 * bins * C, 0.0f);
    erb_up_[2 - lvl].forward_frame(skip, bins, up, scratch);
  }
  skip.resize(e_bins[0] * C);
  erb_skip_[0].forward_frame(e[0], e_bins[0], skip, scratch);
  for (std::size_t j = 0; j < skip.size(); ++j) skip[j] += up[j];
  erb_out_.forward_frame(skip, e_bins[0], gains, scratch);

  // DF decoder.
  std::vector<float> u(H);
  df_in_.forward(fused_emb, u);
  nn::activate(Activation::kRelu, u);
  std::vector<float> h(u);
  for (std::size_t i = 0; i < 2; ++i) {
    nn::gru_step(df_dec_gru_[i], h, state.df_dec[i].hidden, gs);
    h = state.df_dec[i].hidden;
  }
  for (std::size_t j = 0; j < H; ++j) h[j] += u[j];
  df_out_.forward(h, coefs);
  nn::activate(Activation::kTanh, coefs);
  const std::size_t ch = 2 * c.taps();
  std::vector<float> s(c.df_bins * ch);
  df_skip_.forward_frame(d[0], c.df_bins, s, scratch);
  for (std::size_t f = 0; f < c.df_bins; ++f) {
    for (std::size_t tap = 0; tap < c.taps(); ++tap) {
      const std::size_t o = (tap * c.df_bins + f) * 2;
      coefs[o] += s[f * ch + 2 * tap];
      coefs[o + 1] += s[f * ch + 2 * tap + 1];
    }
  }
}

ModelWeights Model::weights() const {
  ModelWeights w;
  w.config = config_;
  visit([&](const std::string& name, const std::vector<std::size_t>& shape,
            const std::vector<float>& values) {
    w.tensors.push_back({name, shape, values});
  });
  return w;
}

std::size_t Model::param_count() const {
  std::size_t n = 0;
  visit([&](const std::string&, const std::vector<std::size_t>&,
            const std::vector<float>& values) { n += values.size(); });
  return n;
}

std::size_t Model::macs_per_frame() const {
  const ModelConfig& c = config_;
  std::size_t macs = 0;
  std::size_t bins = c.erb_bands;
  std::array<std::size_t, 4> e_bins{};
  for (std::size_t i = 0; i < 4; ++i) {
    macs += erb_enc_[i].macs(bins);
    bins = erb_enc_[i].output_bins(bins);
    e_bins[i] = bins;
  }
  bins = c.df_bins;
  for (const auto& b : df_enc_) {
    macs += b.macs(bins);
    bins = b.output_bins(bins);
  }
  for (const auto& p : erb_dprnn_) macs += p.macs_per_frame(c.erb_bottleneck_bins());
  for (const auto& p : df_dprnn_) macs += p.macs_per_frame(c.df_bottleneck_bins());
  macs += fusion_fc_.macs() + fusion_gru_.macs_per_step();
  for (const auto& g : erb_dec_gru_) macs += g.macs_per_step();
  for (std::size_t i = 0; i < 4; ++i) macs += erb_skip_[i].macs(e_bins[i]);
  for (std::size_t i = 0; i < 3; ++i) macs += erb_up_[i].macs(e_bins[3 - i]);
  macs += erb_out_.macs(e_bins[0]);
  macs += df_in_.macs() + df_out_.macs();
  for (const auto& g : df_dec_gru_) macs += g.macs_per_step();
  macs += df_skip_.macs(c.df_bins);
  return macs;
}

Model build_model(const ModelConfig& config, std::uint64_t seed) {
  return Model::with_seed(config, seed);
}

Model build_model(const ModelConfig& config, const ModelWeights& weights) {
  if (!(config == weights.config)) {
    throw WeightError(WeightError::Kind::kConfigMismatch, "",
                      "weights: container config does not match the requested config");
  }
  return Model::from_weights(weights);
}

ModelOutput model_forward(const Matrix<float>& erb_feat,
                          const Matrix<std::complex<float>>& df_feat,
                          const Model& model, ModelState& state) {
  const ModelConfig& c = model.config();
  if (erb_feat.rows != df_feat.rows) {
    throw std::invalid_argument("model_forward: ERB and DF features differ in frame count");
  }
  if (erb_feat.cols != c.erb_bands || df_feat.cols != c.df_bins) {
    throw std::invalid_argument("model_forward: feature width mismatch");
  }
  model.check_state(state);
  const std::size_t T = erb_feat.rows;
  ModelOutput out{Matrix<float>(T, c.erb_bands), Matrix<float>(T, c.coef_size())};
  std::vector<float> df_frame(2 * c.df_bins);
  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t f = 0; f < c.df_bins; ++f) {
      df_frame[2 * f] = df_feat(t, f).real();
      df_frame[2 * f + 1] = df_feat(t, f).imag();
    }
    model.step(erb_feat.row(t), df_frame, state, out.gains.row(t),
               out.coefs.row(t));
  }
  return out;
}

std::size_t count_params(const Model& model) { return model.param_count(); }

std::uint64_t estimate_macs(const Model& model, double seconds) {
  constexpr double kFramesPerSecond = 100.0;
  return static_cast<std::uint64_t>(
      std::llround(static_cast<double>(model.macs_per_frame()) * kFramesPerSecond *
                   seconds));
}

}  // namespace dpdfnet
