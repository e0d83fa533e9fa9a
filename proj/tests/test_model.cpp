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


#include <gtest/gtest.h>

#include <cmath>
#include <string>
#include <vector>

#include "logformer/embedder.hpp"
#include "logformer/grad_check.hpp"
#include "logformer/model.hpp"
#include "logformer/rng.hpp"

namespace lf = logformer;
namespace md = logformer::model;
namespace em = logformer::embed;
using T = lf::Tensor<double>;
using Params = md::ModelParams<double>;

namespace {

md::ModelConfig small(std::size_t layers = 2) {
  md::ModelConfig c;
  c.l = 6;
  c.d = 16;
  c.h = 2;
  c.d_ff = 32;
  c.n_layers = layers;
  c.m = 4;
  c.c = 5;
  return c;
}

T randn(std::size_t r, std::size_t c, lf::Rng& rng, double s = 1.0, bool grad = false) {
  std::vector<double> v(r * c);
  for (auto& x : v) x = s * rng.normal();
  return T::from_vector(r, c, std::move(v), grad);
}

em::WindowEmbedding<double> window(const md::ModelConfig& cfg, std::size_t true_length, lf::Rng& rng) {
  em::WindowEmbedding<double> w;
  w.x = randn(cfg.l, cfg.d, rng);
  w.p = randn(cfg.l, cfg.c, rng);
  w.mask.assign(cfg.l, 0);
  for (std::size_t i = 0; i < true_length; ++i) w.mask[i] = 1;
  // Padded rows are zero as the embedder produces them.
  for (std::size_t i = true_length; i < cfg.l; ++i) {
    for (std::size_t k = 0; k < cfg.d; ++k) w.x.data()[i * cfg.d + k] = 0;
    for (std::size_t k = 0; k < cfg.c; ++k) w.p.data()[i * cfg.c + k] = 0;
  }
  w.true_length = true_length;
  return w;
}

// Every tensor gets random values, including zero-initialized ones.
void randomize(Params& p, lf::Rng& rng, double s = 0.3) {
  for (auto& e : p.entries()) {
    if (e.constant) continue;
    for (auto& v : e.tensor.data()) v = s * rng.normal();
  }
}

using Mat = std::vector<std::vector<double>>;

Mat to_mat(const T& t) {
  Mat m(t.rows(), std::vector<double>(t.cols()));
  for (std::size_t i = 0; i < t.rows(); ++i)
    for (std::size_t j = 0; j < t.cols(); ++j) m[i][j] = t(i, j);
  return m;
}

Mat mm(const Mat& a, const Mat& b) {
  Mat c(a.size(), std::vector<double>(b[0].size(), 0.0));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t k = 0; k < b.size(); ++k)
      for (std::size_t j = 0; j < b[0].size(); ++j) c[i][j] += a[i][k] * b[k][j];
  return c;
}

Mat plus_row(Mat a, const Mat& row) {
  for (auto& r : a)
    for (std::size_t j = 0; j < r.size(); ++j) r[j] += row[0][j];
  return a;
}

// Straight-line multi-head attention with an additive per-key bias.
Mat oracle_attention(const Mat& x, const std::vector<double>& phi, const lf::Mask& mask,
                     const Params& p, std::size_t layer, const md::ModelConfig& cfg) {
  auto get = [&](const std::string& n) { return to_mat(p.get("layers." + std::to_string(layer) + "." + n)); };
  const Mat q = plus_row(mm(x, get("attn.w_q")), get("attn.b_q"));
  const Mat k = plus_row(mm(x, get("attn.w_k")), get("attn.b_k"));
  const Mat v = plus_row(mm(x, get("attn.w_v")), get("attn.b_v"));
  const std::size_t l = x.size(), dh = cfg.d / cfg.h;
  Mat joined(l, std::vector<double>(cfg.d, 0.0));
  for (std::size_t h = 0; h < cfg.h; ++h) {
    for (std::size_t i = 0; i < l; ++i) {
      std::vector<double> logit(l, -INFINITY);
      double mx = -INFINITY;
      for (std::size_t j = 0; j < l; ++j) {
        if (!mask[j]) continue;
        double s = 0;
        for (std::size_t t = 0; t < dh; ++t) s += q[i][h * dh + t] * k[j][h * dh + t];
        logit[j] = s / std::sqrt(static_cast<double>(dh)) + phi[j];
        mx = std::max(mx, logit[j]);
      }
      double z = 0;
      std::vector<double> a(l, 0.0);
      for (std::size_t j = 0; j < l; ++j)
        if (mask[j]) z += (a[j] = std::exp(logit[j] - mx));
      for (std::size_t j = 0; j < l; ++j)
        for (std::size_t t = 0; t < dh; ++t) joined[i][h * dh + t] += a[j] / z * v[j][h * dh + t];
    }
  }
  return plus_row(mm(joined, get("attn.w_o")), get("attn.b_o"));
}

double max_abs_diff(const T& a, const Mat& b) {
  double m = 0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) m = std::max(m, std::abs(a(i, j) - b[i][j]));
  return m;
}

std::size_t adapter_layer_count(std::size_t d, std::size_t m) { return 2 * (d * m + m + m * d + d); }

// Closed form: attention, FFN and the two norms.
std::size_t encoder_layer_count(std::size_t d, std::size_t d_ff) {
  return 4 * d * d + 4 * d + 2 * d * d_ff + d_ff + d + 4 * d;
}

}  // namespace

// ---------------------------------------------------------------------------
// positional_encoding
// ---------------------------------------------------------------------------

TEST(PositionalEncoding, FirstRowAndBounds) {
  const auto pe = md::positional_encoding<double>(20, 64);
  for (std::size_t k = 0; k < 64; ++k) EXPECT_EQ(pe(0, k), k % 2 == 0 ? 0.0 : 1.0);
  for (double v : pe.data()) {
    EXPECT_LE(v, 1.0);
    EXPECT_GE(v, -1.0);
  }
  EXPECT_NEAR(pe(3, 2), std::sin(3.0 / std::pow(10000.0, 2.0 / 64.0)), 1e-15);
  EXPECT_NEAR(pe(3, 3), std::cos(3.0 / std::pow(10000.0, 2.0 / 64.0)), 1e-15);
  const auto again = md::positional_encoding<double>(20, 64);
  EXPECT_TRUE(std::equal(pe.data().begin(), pe.data().end(), again.data().begin()));
  EXPECT_THROW(md::positional_encoding<double>(0, 4), lf::ConfigError);
}

TEST(PositionalEncoding, NeverTrainable) {
  auto p = md::init_params<double>(small(), 1);
  EXPECT_FALSE(p.get("pos_table").requires_grad());
  md::unfreeze_all(p);
  EXPECT_FALSE(p.get("pos_table").requires_grad());
  md::add_adapters(p, small(), 1);
  md::set_stage(p, md::Stage::kAdapt);
  EXPECT_FALSE(p.get("pos_table").requires_grad());
}

// ---------------------------------------------------------------------------
// param_bias
// ---------------------------------------------------------------------------

TEST(ParamBias, ZeroProjectionGivesZero) {
  lf::Rng rng(1);
  const auto phi = md::param_bias(randn(6, 5, rng), T::zeros(5, 1), T::zeros(1, 1), lf::Mask(6, 1));
  for (double v : phi.data()) EXPECT_EQ(v, 0.0);
}

TEST(ParamBias, ParamFreeEventsGetTheBiasAndPaddingGetsZero) {
  lf::Rng rng(2);
  const lf::Mask mask{1, 1, 1, 0, 0, 0};
  const auto phi = md::param_bias(T::zeros(6, 5), randn(5, 1, rng), T::scalar(0.25), mask);
  ASSERT_EQ(phi.rows(), 1u);
  for (std::size_t j = 0; j < 6; ++j) EXPECT_EQ(phi(0, j), mask[j] ? 0.25 : 0.0);
}

TEST(ParamBias, LinearInWeights) {
  lf::Rng rng(3);
  const auto pe = randn(6, 5, rng), w = randn(5, 1, rng);
  const auto b = T::scalar(0.7);
  const auto one = md::param_bias(pe, w, b, lf::Mask(6, 1));
  const auto two = md::param_bias(pe, lf::scale(w, 2.0), b, lf::Mask(6, 1));
  for (std::size_t j = 0; j < 6; ++j) EXPECT_NEAR(two(0, j) - 0.7, 2 * (one(0, j) - 0.7), 1e-14);
}

// ---------------------------------------------------------------------------
// log_attention
// ---------------------------------------------------------------------------

TEST(LogAttention, MatchesStraightLineOracle) {
  lf::Rng rng(4);
  const auto cfg = small();
  auto p = md::init_params<double>(cfg, 4);
  randomize(p, rng);
  const lf::Mask mask{1, 1, 1, 1, 0, 0};
  const auto x = randn(6, 16, rng);
  const auto phi = randn(1, 6, rng);
  const std::vector<double> phiv(phi.data().begin(), phi.data().end());
  const auto got = md::log_attention(x, &phi, mask, p, 1, cfg);
  EXPECT_LE(max_abs_diff(got, oracle_attention(to_mat(x), phiv, mask, p, 1, cfg)), 1e-12);
}

TEST(LogAttention, ZeroBiasReducesToVanillaAttention) {
  lf::Rng rng(5);
  const auto cfg = small();
  auto p = md::init_params<double>(cfg, 5);
  randomize(p, rng);
  const lf::Mask mask(6, 1);
  const auto x = randn(6, 16, rng);
  const auto phi = md::param_bias(randn(6, 5, rng), T::zeros(5, 1), T::zeros(1, 1), mask);
  const auto with_bias = md::log_attention(x, &phi, mask, p, 0, cfg);
  const auto plain = md::log_attention<double>(x, nullptr, mask, p, 0, cfg);
  EXPECT_LE(max_abs_diff(with_bias, to_mat(plain)), 1e-12);
  EXPECT_LE(max_abs_diff(plain, oracle_attention(to_mat(x), std::vector<double>(6, 0.0), mask, p, 0, cfg)), 1e-12);
}

TEST(LogAttention, ZeroQueriesAttendUniformly) {
  lf::Rng rng(6);
  const auto cfg = small();
  auto p = md::init_params<double>(cfg, 6);
  randomize(p, rng);
  for (auto* n : {"layers.0.attn.w_q", "layers.0.attn.b_q"})
    for (auto& v : p.get(n).data()) v = 0;
  const lf::Mask mask{1, 1, 0, 1, 0, 0};
  const auto x = randn(6, 16, rng);
  const auto got = to_mat(md::log_attention<double>(x, nullptr, mask, p, 0, cfg));
  // Uniform weights: every query sees the mean of the unmasked value rows.
  Mat v = plus_row(mm(to_mat(x), to_mat(p.get("layers.0.attn.w_v"))), to_mat(p.get("layers.0.attn.b_v")));
  Mat mean(1, std::vector<double>(16, 0.0));
  for (std::size_t j : {0, 1, 3})
    for (std::size_t k = 0; k < 16; ++k) mean[0][k] += v[j][k] / 3.0;
  const Mat want = plus_row(mm(mean, to_mat(p.get("layers.0.attn.w_o"))), to_mat(p.get("layers.0.attn.b_o")));
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t k = 0; k < 16; ++k) EXPECT_NEAR(got[i][k], want[0][k], 1e-12);
}

TEST(LogAttention, LargeBiasConcentratesOnOneKey) {
  lf::Rng rng(7);
  const auto cfg = small();
  auto p = md::init_params<double>(cfg, 7);
  const lf::Mask mask(6, 1);
  const auto x = randn(6, 16, rng, 0.1);
  auto phi = T::zeros(1, 6);
  phi.data()[2] = 1e4;
  const auto got = to_mat(md::log_attention(x, &phi, mask, p, 0, cfg));
  Mat v = plus_row(mm(to_mat(x), to_mat(p.get("layers.0.attn.w_v"))), to_mat(p.get("layers.0.attn.b_v")));
  const Mat want = plus_row(mm(Mat{v[2]}, to_mat(p.get("layers.0.attn.w_o"))), to_mat(p.get("layers.0.attn.b_o")));
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t k = 0; k < 16; ++k) EXPECT_NEAR(got[i][k], want[0][k], 1e-12);
}

TEST(LogAttention, FullyMaskedWindowIsRejected) {
  const auto cfg = small();
  const auto p = md::init_params<double>(cfg, 1);
  EXPECT_THROW(md::log_attention<double>(T::zeros(6, 16), nullptr, lf::Mask(6, 0), p, 0, cfg),
               lf::DataError);
}

// ---------------------------------------------------------------------------
// adapters
// ---------------------------------------------------------------------------

TEST(Adapter, ZeroUpProjectionIsIdentity) {
  lf::Rng rng(8);
  const auto hid = randn(5, 8, rng);
  const auto out = md::adapter_forward(hid, randn(8, 3, rng), randn(1, 3, rng), T::zeros(3, 8), T::zeros(1, 8));
  EXPECT_TRUE(std::equal(out.data().begin(), out.data().end(), hid.data().begin()));
}

TEST(Adapter, HandExample) {
  const auto out = md::adapter_forward(T::from_vector(1, 2, {0, 3}), T::from_vector(2, 1, {1, 0}),
                                       T::zeros(1, 1), T::from_vector(1, 2, {0.5, 0}), T::zeros(1, 2));
  EXPECT_EQ(out(0, 0), 0.0);
  EXPECT_EQ(out(0, 1), 3.0);
}

TEST(Adapter, DeltaLiesInTheImageOfWUp) {
  lf::Rng rng(9);
  const auto hid = randn(7, 6, rng);
  const auto w_up = randn(1, 6, rng);
  const auto out = md::adapter_forward(hid, randn(6, 1, rng), randn(1, 1, rng), w_up, T::zeros(1, 6));
  // m = 1: every delta row is a multiple of the single W_up row (rank <= 1).
  for (std::size_t i = 0; i < 7; ++i)
    for (std::size_t a = 0; a < 6; ++a)
      for (std::size_t b = 0; b < 6; ++b) {
        const double da = out(i, a) - hid(i, a), db = out(i, b) - hid(i, b);
        EXPECT_NEAR(da * w_up(0, b) - db * w_up(0, a), 0.0, 1e-12);
      }
}

// ---------------------------------------------------------------------------
// encoder_layer / forward
// ---------------------------------------------------------------------------

TEST(Encoder, ZeroInitAdaptersMatchNoAdaptersBitwise) {
  lf::Rng rng(10);
  for (auto kind : {md::AdapterKind::kParallel, md::AdapterKind::kSerial}) {
    auto cfg = small();
    cfg.adapter_kind = kind;
    auto base = md::init_params<double>(cfg, 10);
    auto with = base.clone();
    md::add_adapters(with, cfg, 11);
    const auto w = window(cfg, 4, rng);
    const auto a = md::encode(w, base, cfg), b = md::encode(w, with, cfg);
    EXPECT_TRUE(std::equal(a.data().begin(), a.data().end(), b.data().begin())) << md::to_string(kind);
    auto none = cfg;
    none.adapter_kind = md::AdapterKind::kNone;
    EXPECT_EQ(md::forward(w, with, none).item(), md::forward(w, base, cfg).item());
  }
}

TEST(Encoder, SerialAndParallelDifferOnceAdaptersAreNonZero) {
  lf::Rng rng(12);
  auto cfg = small();
  auto p = md::init_params<double>(cfg, 12);
  md::add_adapters(p, cfg, 12);
  randomize(p, rng);
  const auto w = window(cfg, 6, rng);
  auto serial = cfg;
  serial.adapter_kind = md::AdapterKind::kSerial;
  const auto a = md::forward(w, p, cfg).item(), b = md::forward(w, p, serial).item();
  EXPECT_GT(std::abs(a - b), 1e-6);
  const auto out = md::encoder_layer<double>(w.x, nullptr, w.mask, p, 0, cfg);
  EXPECT_EQ(out.rows(), 6u);
  EXPECT_EQ(out.cols(), 16u);
}

TEST(Forward, IdenticalInputsAndZeroClassifierGiveZero) {
  const auto cfg = small();
  auto p = md::init_params<double>(cfg, 13);
  for (auto& v : p.get("classifier.weight").data()) v = 0;
  em::WindowEmbedding<double> w;
  w.x = T::full(6, 16, 0.25);
  w.p = T::full(6, 5, 0.5);
  w.mask.assign(6, 1);
  w.true_length = 6;
  EXPECT_EQ(md::forward(w, p, cfg).item(), 0.0);
}

TEST(Forward, FiniteOnRandomWindows) {
  lf::Rng rng(14);
  const auto cfg = small(1);
  auto p = md::init_params<double>(cfg, 14);
  md::add_adapters(p, cfg, 14);
  randomize(p, rng, 1.0);
  lf::NoGradGuard guard;
  for (int i = 0; i < 1000; ++i) {
    auto w = window(cfg, 1 + rng.below(cfg.l), rng);
    w.x = lf::scale(w.x, 1.0 + 20.0 * rng.uniform());
    ASSERT_TRUE(std::isfinite(md::forward(w, p, cfg).item())) << "window " << i;
  }
}

TEST(Forward, SwappingTwoEventsChangesTheLogit) {
  lf::Rng rng(15);
  const auto cfg = small();
  const auto p = md::init_params<double>(cfg, 15);
  int changed = 0;
  for (int trial = 0; trial < 20; ++trial) {
    auto w = window(cfg, 6, rng);
    const double before = md::forward(w, p, cfg).item();
    for (std::size_t k = 0; k < cfg.d; ++k) std::swap(w.x.data()[k], w.x.data()[cfg.d + k]);
    for (std::size_t k = 0; k < cfg.c; ++k) std::swap(w.p.data()[k], w.p.data()[cfg.c + k]);
    if (std::abs(md::forward(w, p, cfg).item() - before) > 1e-9) ++changed;
  }
  EXPECT_GT(changed, 0);
}

TEST(Forward, PaddedContentNeverChangesTheLogit) {
  lf::Rng rng(16);
  const auto cfg = small();
  auto p = md::init_params<double>(cfg, 16);
  md::add_adapters(p, cfg, 16);
  randomize(p, rng);
  for (int trial = 0; trial < 20; ++trial) {
    auto w = window(cfg, 1 + rng.below(5), rng);
    const double before = md::forward(w, p, cfg).item();
    for (std::size_t i = w.true_length; i < cfg.l; ++i) {
      for (std::size_t k = 0; k < cfg.d; ++k) w.x.data()[i * cfg.d + k] = 100 * rng.normal();
      for (std::size_t k = 0; k < cfg.c; ++k) w.p.data()[i * cfg.c + k] = 100 * rng.normal();
    }
    EXPECT_EQ(md::forward(w, p, cfg).item(), before);
    EXPECT_EQ(md::forward(w.trimmed(), p, cfg).item(), before);
  }
}

TEST(Forward, RejectsEmptyAndMisshapenWindows) {
  lf::Rng rng(17);
  const auto cfg = small();
  const auto p = md::init_params<double>(cfg, 17);
  auto w = window(cfg, 3, rng);
  w.true_length = 0;
  w.mask.assign(6, 0);
  EXPECT_THROW(md::forward(w, p, cfg), lf::DataError);
  auto bad = window(cfg, 3, rng);
  bad.x = T::zeros(6, 8);
  EXPECT_THROW(md::forward(bad, p, cfg), lf::DataError);
}

TEST(Forward, GradientMatchesFiniteDifferences) {
  lf::Rng rng(18);
  const auto cfg = small();
  auto p = md::init_params<double>(cfg, 18);
  md::add_adapters(p, cfg, 18);
  randomize(p, rng);
  md::unfreeze_all(p);
  const auto w1 = window(cfg, 6, rng), w2 = window(cfg, 3, rng);
  std::vector<T> inputs;
  std::vector<std::string> names;
  for (auto& e : p.entries())
    if (!e.constant) {
      inputs.push_back(e.tensor);
      names.push_back(e.name);
    }
  auto loss = [&] {
    const std::vector<double> y{1.0, 0.0};
    auto logits = lf::concat_rows(std::vector<T>{md::forward(w1, p, cfg), md::forward(w2, p, cfg)});
    return lf::bce_with_logits(logits, std::span<const double>(y));
  };
  const auto report = lf::grad_check(loss, inputs, names, 1e-5, 50, 1);
  EXPECT_LE(report.max_rel_error, 1e-6) << report.worst_tensor << " " << report.worst_analytic << " " << report.worst_numeric;
}

// ---------------------------------------------------------------------------
// counting and stages
// ---------------------------------------------------------------------------

TEST(CountParams, FullScaleFullTuning) {
  const auto cfg = md::ModelConfig::full_scale(1);
  const auto p = md::init_params<double>(cfg, 0);
  const std::size_t want = encoder_layer_count(768, 3072) + (cfg.c + 1) + (768 + 1);
  EXPECT_EQ(md::count_params(p, true), want);
  EXPECT_EQ(md::count_params(p, false), want + cfg.l * 768);
  EXPECT_LE(std::abs(static_cast<double>(want) - 7.2e6) / 7.2e6, 0.03);
}

TEST(CountParams, AdapterIncrementPerLayer) {
  for (std::size_t layers : {1, 2, 4}) {
    auto cfg = md::ModelConfig::full_scale(layers);
    cfg.m = 64;
    auto p = md::init_params<double>(cfg, 0);
    const auto before = md::count_params(p, false);
    md::add_adapters(p, cfg, 0);
    const auto inc = md::count_params(p, false) - before;
    EXPECT_EQ(inc, layers * adapter_layer_count(768, 64));
    EXPECT_NEAR(static_cast<double>(inc) / static_cast<double>(layers), 0.20e6, 0.01e6);
  }
}

TEST(CountParams, AdaptStageFraction) {
  // Closed-form share of trainable scalars held by adapters + classifier.
  for (std::size_t m : {64, 96}) {
    for (std::size_t layers : {1, 2, 4}) {
      auto cfg = md::ModelConfig::full_scale(layers);
      cfg.m = m;
      auto p = md::init_params<double>(cfg, 0);
      md::add_adapters(p, cfg, 0);
      md::unfreeze_all(p);
      const auto total = md::count_params(p, true);
      md::set_stage(p, md::Stage::kAdapt);
      const auto adapt = md::count_params(p, true);
      EXPECT_EQ(adapt, layers * adapter_layer_count(768, m) + 769);
      const double frac = static_cast<double>(adapt) / static_cast<double>(total);
      const double want = static_cast<double>(layers * adapter_layer_count(768, m) + 769) /
                          static_cast<double>(layers * (encoder_layer_count(768, 3072) +
                                                        adapter_layer_count(768, m)) + 17 + 769);
      EXPECT_NEAR(frac, want, 1e-15);
    }
  }
}

TEST(Stages, FreezeContractAndReversibility) {
  lf::Rng rng(19);
  const auto cfg = small();
  auto p = md::init_params<double>(cfg, 19);
  md::add_adapters(p, cfg, 19);
  md::set_stage(p, md::Stage::kAdapt);
  for (const auto& e : p.entries())
    EXPECT_EQ(e.tensor.requires_grad(), e.adapter || md::is_classifier(e.name)) << e.name;
  const auto w = window(cfg, 5, rng);
  lf::backward(md::forward(w, p, cfg));
  for (const auto& e : p.entries())
    if (!e.tensor.requires_grad()) {
      EXPECT_FALSE(e.tensor.has_grad()) << e.name;
    }
  md::set_stage(p, md::Stage::kPretrain);
  for (const auto& e : p.entries()) EXPECT_EQ(e.tensor.requires_grad(), !e.adapter && !e.constant) << e.name;
  md::set_stage(p, md::Stage::kAdapt);
  EXPECT_EQ(p.stage(), md::Stage::kAdapt);
  EXPECT_EQ(md::count_params(p, true), 2 * adapter_layer_count(16, 4) + 17);
}

TEST(ModelConfigTest, Validation) {
  auto c = small();
  c.n_layers = 0;
  EXPECT_THROW(c.validate(), lf::ConfigError);
  c = small();
  c.h = 3;
  EXPECT_THROW(c.validate(), lf::ConfigError);
  c = small();
  c.m = 16;
  EXPECT_THROW(c.validate(), lf::ConfigError);
  EXPECT_THROW(md::adapter_kind_from_string("lora"), lf::ConfigError);
  auto p = md::init_params<double>(small(), 0);
  md::add_adapters(p, small(), 0);
  EXPECT_THROW(md::add_adapters(p, small(), 0), lf::RuntimeError);
}

TEST(ModelConfigTest, VanillaAblationHasNoParamProjection) {
  auto c = small();
  c.log_attention = false;
  const auto p = md::init_params<double>(c, 0);
  EXPECT_FALSE(p.contains("param_proj.weight"));
}
