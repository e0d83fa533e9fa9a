// Copyright 2026 The logformer-cpp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Log-Attention transformer encoder with bottleneck adapters.
//
// Layout per layer (pre-norm):
//   parallel: Y = X + Attn(LN1 X) + D_a(LN1 X);  Z = Y + FFN(LN2 Y) + D_f(LN2 Y)
//   serial:   Y = X + A_a(Attn(LN1 X));          Z = Y + A_f(FFN(LN2 Y))
// where A(h) = h + D(h) and D(h) = tanh(h W_down + b_down) W_up + b_up.
// The parallel branch contributes only D because the layer's residual path
// already carries the skip connection; with W_up = 0 both variants reduce
// exactly to the adapter-free layer.
//
// Attention logits for key j receive the scalar phi[j] computed from the
// parameter features of event j. Matrices multiply row vectors from the
// right, so W_down is stored d x m and W_up m x d.

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "logformer/embedder.hpp"
#include "logformer/error.hpp"
#include "logformer/rng.hpp"
#include "logformer/tensor.hpp"

namespace logformer::model {

enum class AdapterKind { kParallel, kSerial, kNone };
enum class Stage { kPretrain, kAdapt };

inline std::string to_string(AdapterKind k) {
  switch (k) {
    case AdapterKind::kParallel:
      return "parallel";
    case AdapterKind::kSerial:
      return "serial";
    case AdapterKind::kNone:
      return "none";
  }
  return "none";
}

inline AdapterKind adapter_kind_from_string(const std::string& s) {
  if (s == "parallel") return AdapterKind::kParallel;
  if (s == "serial") return AdapterKind::kSerial;
  if (s == "none") return AdapterKind::kNone;
  throw ConfigError("unknown adapter kind '" + s + "'");
}

inline std::string to_string(Stage s) { return s == Stage::kPretrain ? "pretrain" : "adapt"; }

inline Stage stage_from_string(const std::string& s) {
  if (s == "pretrain") return Stage::kPretrain;
  if (s == "adapt") return Stage::kAdapt;
  throw ConfigError("unknown stage '" + s + "'");
}

struct ModelConfig {
  std::size_t d = 64;
  std::size_t h = 8;
  std::size_t d_ff = 256;
  std::size_t n_layers = 2;
  std::size_t m = 8;
  AdapterKind adapter_kind = AdapterKind::kParallel;
  std::size_t l = 20;
  std::size_t c = 16;
  /// false ablates the parameter bias (plain scaled dot-product attention).
  bool log_attention = true;
  double ln_eps = 1e-5;

  void validate() const {
    if (d == 0 || h == 0 || d % h != 0) throw ConfigError("model.d must be divisible by model.h");
    if (n_layers < 1) throw ConfigError("model.n_layers must be >= 1");
    if (d_ff == 0) throw ConfigError("model.d_ff must be positive");
    if (m == 0 || m >= d) throw ConfigError("model.m must satisfy 0 < m < d");
    if (l == 0 || c == 0) throw ConfigError("model.l and model.c must be positive");
    if (!(ln_eps > 0)) throw ConfigError("model.ln_eps must be positive");
  }

  std::size_t head_dim() const { return d / h; }

  /// d = 768 and d_ff = 3072 with 8 heads and m = 96; the adapt-stage
  /// trainable share is about 4.0% at 1, 2 or 4 layers.
  static ModelConfig full_scale(std::size_t layers) {
    ModelConfig c;
    c.d = 768;
    c.h = 8;
    c.d_ff = 3072;
    c.n_layers = layers;
    c.m = 96;
    return c;
  }

  nlohmann::json to_json() const {
    return {{"d", d},
            {"h", h},
            {"d_ff", d_ff},
            {"n_layers", n_layers},
            {"m", m},
            {"adapter_kind", to_string(adapter_kind)},
            {"l", l},
            {"c", c},
            {"log_attention", log_attention},
            {"ln_eps", ln_eps}};
  }
};

template <class Real>
struct NamedTensor {
  std::string name;
  Tensor<Real> tensor;
  bool adapter = false;
  bool constant = false;  // never trainable (positional table)
};

template <class Real>
class ModelParams {
 public:
  void add(std::string name, Tensor<Real> t, bool adapter = false, bool constant = false) {
    if (index_.count(name)) throw RuntimeError("duplicate parameter '" + name + "'");
    index_.emplace(name, entries_.size());
    if (constant) t.set_requires_grad(false);
    entries_.push_back({std::move(name), std::move(t), adapter, constant});
  }

  bool contains(const std::string& name) const { return index_.count(name) > 0; }

  const Tensor<Real>& get(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) throw RuntimeError("missing parameter '" + name + "'");
    return entries_[it->second].tensor;
  }

  Tensor<Real>& get(const std::string& name) {
    return const_cast<Tensor<Real>&>(std::as_const(*this).get(name));
  }

  std::vector<NamedTensor<Real>>& entries() noexcept { return entries_; }
  const std::vector<NamedTensor<Real>>& entries() const noexcept { return entries_; }

  bool has_adapters() const {
    for (const auto& e : entries_)
      if (e.adapter) return true;
    return false;
  }

  Stage stage() const noexcept { return stage_; }
  void set_stage_flag(Stage s) noexcept { stage_ = s; }

  void clear_grads() {
    for (auto& e : entries_) e.tensor.clear_grad();
  }

  /// Independent copy: fresh leaves with the same values and flags.
  ModelParams clone() const {
    ModelParams out;
    out.stage_ = stage_;
    for (const auto& e : entries_)
      out.add(e.name, e.tensor.clone(e.tensor.requires_grad()), e.adapter, e.constant);
    return out;
  }

 private:
  std::vector<NamedTensor<Real>> entries_;
  std::map<std::string, std::size_t> index_;
  Stage stage_ = Stage::kPretrain;
};

/// Fixed sinusoidal table: PE[pos, 2i] = sin(pos / 10000^(2i/d)),
/// PE[pos, 2i+1] = cos(same angle).
template <class Real>
Tensor<Real> positional_encoding(std::size_t l, std::size_t d) {
  if (l == 0 || d == 0) throw ConfigError("positional_encoding: l and d must be positive");
  std::vector<Real> pe(l * d);
  for (std::size_t pos = 0; pos < l; ++pos) {
    for (std::size_t k = 0; k < d; ++k) {
      const double i2 = static_cast<double>(k - (k % 2));
      const double angle = static_cast<double>(pos) / std::pow(10000.0, i2 / static_cast<double>(d));
      pe[pos * d + k] = static_cast<Real>(k % 2 == 0 ? std::sin(angle) : std::cos(angle));
    }
  }
  return Tensor<Real>::from_vector(l, d, std::move(pe));
}

namespace detail {

template <class Real>
Tensor<Real> xavier(std::size_t fan_in, std::size_t fan_out, Rng& rng) {
  const double a = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  std::vector<Real> v(fan_in * fan_out);
  for (auto& x : v) x = static_cast<Real>(rng.uniform(-a, a));
  return Tensor<Real>::from_vector(fan_in, fan_out, std::move(v), true);
}

template <class Real>
Tensor<Real> zeros(std::size_t r, std::size_t c) {
  return Tensor<Real>::zeros(r, c, true);
}

template <class Real>
Tensor<Real> ones(std::size_t r, std::size_t c) {
  return Tensor<Real>::full(r, c, Real(1), true);
}

inline std::string layer_key(std::size_t i, const std::string& rest) {
  return "layers." + std::to_string(i) + "." + rest;
}

}  // namespace detail

/// Fresh pre-training parameters (no adapters). Everything except the
/// positional table is trainable.
template <class Real>
ModelParams<Real> init_params(const ModelConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  Rng rng(derive_seed(seed, "model-init"));
  ModelParams<Real> p;
  p.add("pos_table", positional_encoding<Real>(cfg.l, cfg.d), false, true);
  if (cfg.log_attention) {
    p.add("param_proj.weight", detail::xavier<Real>(cfg.c, 1, rng));
    p.add("param_proj.bias", detail::zeros<Real>(1, 1));
  }
  for (std::size_t i = 0; i < cfg.n_layers; ++i) {
    using detail::layer_key;
    p.add(layer_key(i, "ln1.gain"), detail::ones<Real>(1, cfg.d));
    p.add(layer_key(i, "ln1.bias"), detail::zeros<Real>(1, cfg.d));
    for (const char* w : {"q", "k", "v", "o"}) {
      p.add(layer_key(i, std::string("attn.w_") + w), detail::xavier<Real>(cfg.d, cfg.d, rng));
      p.add(layer_key(i, std::string("attn.b_") + w), detail::zeros<Real>(1, cfg.d));
    }
    p.add(layer_key(i, "ln2.gain"), detail::ones<Real>(1, cfg.d));
    p.add(layer_key(i, "ln2.bias"), detail::zeros<Real>(1, cfg.d));
    p.add(layer_key(i, "ffn.w1"), detail::xavier<Real>(cfg.d, cfg.d_ff, rng));
    p.add(layer_key(i, "ffn.b1"), detail::zeros<Real>(1, cfg.d_ff));
    p.add(layer_key(i, "ffn.w2"), detail::xavier<Real>(cfg.d_ff, cfg.d, rng));
    p.add(layer_key(i, "ffn.b2"), detail::zeros<Real>(1, cfg.d));
  }
  p.add("classifier.weight", detail::xavier<Real>(cfg.d, 1, rng));
  p.add("classifier.bias", detail::zeros<Real>(1, 1));
  p.set_stage_flag(Stage::kPretrain);
  return p;
}

/// Inserts adapters for both sublayers of every layer; W_up starts at zero
/// so the model output is unchanged.
template <class Real>
void add_adapters(ModelParams<Real>& p, const ModelConfig& cfg, std::uint64_t seed) {
  if (p.has_adapters()) throw RuntimeError("add_adapters: adapters already present");
  Rng rng(derive_seed(seed, "adapter-init"));
  for (std::size_t i = 0; i < cfg.n_layers; ++i) {
    for (const char* where : {"adapter_attn", "adapter_ffn"}) {
      const std::string base = detail::layer_key(i, where);
      p.add(base + ".w_down", detail::xavier<Real>(cfg.d, cfg.m, rng), true);
      p.add(base + ".b_down", detail::zeros<Real>(1, cfg.m), true);
      p.add(base + ".w_up", detail::zeros<Real>(cfg.m, cfg.d), true);
      p.add(base + ".b_up", detail::zeros<Real>(1, cfg.d), true);
    }
  }
}

inline bool is_classifier(const std::string& name) { return name.rfind("classifier.", 0) == 0; }

/// pretrain: every non-adapter tensor trainable, adapters frozen.
/// adapt: only adapters and the classifier trainable.
template <class Real>
void set_stage(ModelParams<Real>& p, Stage stage) {
  for (auto& e : p.entries()) {
    bool on = false;
    if (!e.constant) {
      on = stage == Stage::kPretrain ? !e.adapter : (e.adapter || is_classifier(e.name));
    }
    e.tensor.set_requires_grad(on);
  }
  p.set_stage_flag(stage);
}

/// Makes every tensor except the constant table trainable (full fine-tuning).
template <class Real>
void unfreeze_all(ModelParams<Real>& p) {
  for (auto& e : p.entries()) e.tensor.set_requires_grad(!e.constant);
}

template <class Real>
std::size_t count_params(const ModelParams<Real>& p, bool trainable_only) {
  std::size_t n = 0;
  for (const auto& e : p.entries())
    if (!trainable_only || e.tensor.requires_grad()) n += e.tensor.size();
  return n;
}

// ---------------------------------------------------------------------------
// Forward pieces
// ---------------------------------------------------------------------------

template <class Real>
Tensor<Real> row_mask_tensor(const Mask& mask, std::size_t cols) {
  std::vector<Real> v(mask.size() * cols);
  for (std::size_t i = 0; i < mask.size(); ++i)
    for (std::size_t j = 0; j < cols; ++j) v[i * cols + j] = mask[i] ? Real(1) : Real(0);
  return Tensor<Real>::from_vector(mask.size(), cols, std::move(v));
}

/// phi[j] = P_E[j] . w + b for real positions, 0 for padded ones; 1 x l.
template <class Real>
Tensor<Real> param_bias(const Tensor<Real>& p_e, const Tensor<Real>& w_phi,
                        const Tensor<Real>& b_phi, const Mask& mask) {
  auto col = add_broadcast_row(matmul(p_e, w_phi), b_phi);
  auto row = transpose(col);
  std::vector<Real> m(mask.size());
  for (std::size_t i = 0; i < mask.size(); ++i) m[i] = mask[i] ? Real(1) : Real(0);
  return mul(row, Tensor<Real>::from_vector(1, mask.size(), std::move(m)));
}

/// Multi-head attention with an additive per-key bias `phi` (1 x l, may be
/// undefined for plain attention). Masked keys get zero weight.
template <class Real>
Tensor<Real> log_attention(const Tensor<Real>& x, const Tensor<Real>* phi, const Mask& mask,
                           const ModelParams<Real>& p, std::size_t layer, const ModelConfig& cfg) {
  if (cfg.d % cfg.h != 0) throw ConfigError("log_attention: d not divisible by h");
  bool any = false;
  for (auto v : mask) any = any || v;
  if (!any) throw DataError("log_attention: fully masked window");
  using detail::layer_key;
  auto proj = [&](const char* w) {
    return add_broadcast_row(matmul(x, p.get(layer_key(layer, std::string("attn.w_") + w))),
                             p.get(layer_key(layer, std::string("attn.b_") + w)));
  };
  const auto q = proj("q");
  const auto k = proj("k");
  const auto v = proj("v");
  const std::size_t dh = cfg.head_dim();
  const Real inv_scale = Real(1) / std::sqrt(static_cast<Real>(dh));
  std::vector<Tensor<Real>> heads;
  heads.reserve(cfg.h);
  for (std::size_t hd = 0; hd < cfg.h; ++hd) {
    const auto qh = slice_cols(q, hd * dh, dh);
    const auto kh = slice_cols(k, hd * dh, dh);
    const auto vh = slice_cols(v, hd * dh, dh);
    auto logits = scale(matmul(qh, transpose(kh)), inv_scale);
    if (phi != nullptr && phi->defined()) logits = add_broadcast_row(logits, *phi);
    heads.push_back(matmul(softmax_lastdim_masked(logits, mask), vh));
  }
  const auto joined = cfg.h == 1 ? heads.front() : concat_cols(heads);
  return add_broadcast_row(matmul(joined, p.get(layer_key(layer, "attn.w_o"))),
                           p.get(layer_key(layer, "attn.b_o")));
}

/// Bottleneck branch tanh(h W_down + b_down) W_up + b_up (no skip).
template <class Real>
Tensor<Real> adapter_delta(const Tensor<Real>& hid, const Tensor<Real>& w_down,
                           const Tensor<Real>& b_down, const Tensor<Real>& w_up,
                           const Tensor<Real>& b_up) {
  auto z = tanh(add_broadcast_row(matmul(hid, w_down), b_down));
  return add_broadcast_row(matmul(z, w_up), b_up);
}

/// Full adapter with its internal skip connection: h + delta(h).
template <class Real>
Tensor<Real> adapter_forward(const Tensor<Real>& hid, const Tensor<Real>& w_down,
                             const Tensor<Real>& b_down, const Tensor<Real>& w_up,
                             const Tensor<Real>& b_up) {
  return add(hid, adapter_delta(hid, w_down, b_down, w_up, b_up));
}

namespace detail {

template <class Real>
Tensor<Real> adapter_delta_named(const Tensor<Real>& hid, const ModelParams<Real>& p,
                                 const std::string& base) {
  return adapter_delta(hid, p.get(base + ".w_down"), p.get(base + ".b_down"),
                       p.get(base + ".w_up"), p.get(base + ".b_up"));
}

template <class Real>
Tensor<Real> ffn(const Tensor<Real>& x, const ModelParams<Real>& p, std::size_t layer) {
  auto hdn = gelu(add_broadcast_row(matmul(x, p.get(layer_key(layer, "ffn.w1"))),
                                    p.get(layer_key(layer, "ffn.b1"))));
  return add_broadcast_row(matmul(hdn, p.get(layer_key(layer, "ffn.w2"))),
                           p.get(layer_key(layer, "ffn.b2")));
}

}  // namespace detail

template <class Real>
Tensor<Real> encoder_layer(const Tensor<Real>& x, const Tensor<Real>* phi, const Mask& mask,
                           const ModelParams<Real>& p, std::size_t layer, const ModelConfig& cfg) {
  using detail::layer_key;
  const Real eps = static_cast<Real>(cfg.ln_eps);
  const bool adapters = cfg.adapter_kind != AdapterKind::kNone &&
                        p.contains(layer_key(layer, "adapter_attn.w_down"));
  const bool serial = cfg.adapter_kind == AdapterKind::kSerial;

  const auto n1 = layer_norm(x, p.get(layer_key(layer, "ln1.gain")),
                             p.get(layer_key(layer, "ln1.bias")), eps);
  auto attn = log_attention(n1, phi, mask, p, layer, cfg);
  Tensor<Real> y;
  if (adapters && serial) {
    y = add(x, add(attn, detail::adapter_delta_named(attn, p, layer_key(layer, "adapter_attn"))));
  } else {
    y = add(x, attn);
    if (adapters) y = add(y, detail::adapter_delta_named(n1, p, layer_key(layer, "adapter_attn")));
  }

  const auto n2 = layer_norm(y, p.get(layer_key(layer, "ln2.gain")),
                             p.get(layer_key(layer, "ln2.bias")), eps);
  auto f = detail::ffn(n2, p, layer);
  Tensor<Real> z;
  if (adapters && serial) {
    z = add(y, add(f, detail::adapter_delta_named(f, p, layer_key(layer, "adapter_ffn"))));
  } else {
    z = add(y, f);
    if (adapters) z = add(z, detail::adapter_delta_named(n2, p, layer_key(layer, "adapter_ffn")));
  }
  return z;
}

/// Encoder output (l x d) before pooling.
template <class Real>
Tensor<Real> encode(const embed::WindowEmbedding<Real>& w, const ModelParams<Real>& p,
                    const ModelConfig& cfg) {
  const std::size_t l = w.length();
  if (w.x.cols() != cfg.d || w.p.cols() != cfg.c || w.x.rows() != l || w.p.rows() != l)
    throw DataError("forward: embedding shape does not match model config");
  if (l > cfg.l) throw DataError("forward: window longer than model.l");
  if (w.true_length == 0) throw DataError("forward: window has no real events");
  const auto keep = row_mask_tensor<Real>(w.mask, cfg.d);
  const auto& table = p.get("pos_table");
  const auto pe = l == cfg.l ? table : slice_rows(table, 0, l);
  auto x = add(mul(w.x, keep), mul(pe, keep));
  Tensor<Real> phi;
  if (cfg.log_attention)
    phi = param_bias(w.p, p.get("param_proj.weight"), p.get("param_proj.bias"), w.mask);
  for (std::size_t i = 0; i < cfg.n_layers; ++i)
    x = encoder_layer(x, cfg.log_attention ? &phi : nullptr, w.mask, p, i, cfg);
  return x;
}

/// Scalar logit (1 x 1): masked mean pooling followed by one linear layer.
template <class Real>
Tensor<Real> forward(const embed::WindowEmbedding<Real>& w, const ModelParams<Real>& p,
                     const ModelConfig& cfg) {
  const auto hidden = encode(w, p, cfg);
  const auto pooled = mean_rows_masked(hidden, w.mask);
  return add_broadcast_row(matmul(pooled, p.get("classifier.weight")),
                           p.get("classifier.bias"));
}

}  // namespace logformer::model
