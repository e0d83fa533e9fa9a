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

// Two-stage supervised training with Adam and a one-cycle schedule.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <numbers>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include "json.hpp"
#include "logformer/embedder.hpp"
#include "logformer/error.hpp"
#include "logformer/metrics.hpp"
#include "logformer/model.hpp"
#include "logformer/rng.hpp"
#include "logformer/runlog.hpp"
#include "logformer/tensor.hpp"

namespace logformer::train {

using model::ModelConfig;
using model::ModelParams;

struct TrainConfig {
  double max_lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.99;
  double eps = 1e-8;
  std::size_t batch_size = 16;
  std::size_t epochs = 5;
  std::uint64_t seed = 0;
  std::size_t eval_interval = 50;
  double pct_start = 0.3;
  double div_factor = 25.0;
  double final_div_factor = 1e4;

  void validate() const {
    if (!(max_lr > 0)) throw ConfigError("train.max_lr must be positive");
    if (batch_size < 1) throw ConfigError("train.batch_size must be >= 1");
    if (epochs < 1) throw ConfigError("train.epochs must be >= 1");
    if (eval_interval < 1) throw ConfigError("train.eval_interval must be >= 1");
    if (!(beta1 >= 0 && beta1 < 1 && beta2 >= 0 && beta2 < 1))
      throw ConfigError("train.betas must lie in [0, 1)");
    if (!(eps > 0)) throw ConfigError("train.eps must be positive");
    if (!(pct_start > 0 && pct_start < 1)) throw ConfigError("train.pct_start must be in (0, 1)");
    if (!(div_factor > 0 && final_div_factor > 0))
      throw ConfigError("train.div_factor and train.final_div_factor must be positive");
  }
};

/// One-cycle learning rate: linear warm-up from max_lr / div to max_lr over
/// the first pct_start of the steps, then cosine annealing down to
/// max_lr / final_div at the last step.
inline double one_cycle_lr(std::uint64_t step, std::uint64_t total_steps, double max_lr,
                           double pct_start = 0.3, double div = 25.0, double final_div = 1e4) {
  if (total_steps == 0) throw ConfigError("one_cycle_lr: total_steps must be positive");
  if (step >= total_steps) throw ConfigError("one_cycle_lr: step out of range");
  const double initial = max_lr / div;
  const double final_lr = max_lr / final_div;
  const auto peak = static_cast<std::uint64_t>(pct_start * static_cast<double>(total_steps));
  if (step < peak)
    return initial + (max_lr - initial) * static_cast<double>(step) / static_cast<double>(peak);
  const std::uint64_t span = total_steps - 1 - peak;
  if (span == 0) return max_lr;
  const double frac = static_cast<double>(step - peak) / static_cast<double>(span);
  return final_lr + (max_lr - final_lr) * 0.5 * (1.0 + std::cos(std::numbers::pi * frac));
}

/// A labelled model input.
template <class Real>
struct Example {
  embed::WindowEmbedding<Real> emb;
  Real label = 0;
};

template <class Real>
using Dataset = std::vector<Example<Real>>;

/// Mean binary cross-entropy of raw logits.
inline double bce_loss(std::span<const double> logits, std::span<const double> labels) {
  if (logits.size() != labels.size()) throw DataError("bce_loss: length mismatch");
  if (logits.empty()) throw DataError("bce_loss: empty batch");
  NoGradGuard guard;
  auto z = Tensor<double>::from_vector(logits.size(), 1,
                                       std::vector<double>(logits.begin(), logits.end()));
  return bce_with_logits(z, labels).item();
}

/// Bias-corrected Adam. Moments exist only for trainable tensors; the step
/// counter is shared.
template <class Real>
class Adam {
 public:
  explicit Adam(const TrainConfig& cfg) : beta1_(cfg.beta1), beta2_(cfg.beta2), eps_(cfg.eps) {}

  std::uint64_t steps() const noexcept { return t_; }
  std::size_t state_size() const noexcept { return moments_.size(); }
  bool has_state(const std::string& name) const { return moments_.count(name) > 0; }

  /// Applies one update with learning rate `lr`, then clears every gradient.
  /// A non-finite gradient aborts the step before anything changes.
  void step(ModelParams<Real>& params, double lr) {
    for (const auto& e : params.entries()) {
      if (!e.tensor.requires_grad() || !e.tensor.has_grad()) continue;
      for (Real g : e.tensor.grad())
        if (!std::isfinite(static_cast<double>(g)))
          throw RuntimeError("adam: non-finite gradient in '" + e.name + "'");
    }
    ++t_;
    const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
    for (auto& e : params.entries()) {
      if (!e.tensor.requires_grad()) continue;
      auto& mom = moments_[e.name];
      if (mom.m.empty()) {
        mom.m.assign(e.tensor.size(), 0.0);
        mom.v.assign(e.tensor.size(), 0.0);
      }
      if (!e.tensor.has_grad()) continue;
      auto w = e.tensor.data();
      const auto g = e.tensor.grad();
      for (std::size_t i = 0; i < w.size(); ++i) {
        const double gi = static_cast<double>(g[i]);
        mom.m[i] = beta1_ * mom.m[i] + (1.0 - beta1_) * gi;
        mom.v[i] = beta2_ * mom.v[i] + (1.0 - beta2_) * gi * gi;
        const double mhat = mom.m[i] / bc1;
        const double vhat = mom.v[i] / bc2;
        w[i] = static_cast<Real>(static_cast<double>(w[i]) - lr * mhat / (std::sqrt(vhat) + eps_));
      }
    }
    params.clear_grads();
  }

 private:
  struct Moments {
    std::vector<double> m;
    std::vector<double> v;
  };
  double beta1_, beta2_, eps_;
  std::uint64_t t_ = 0;
  std::map<std::string, Moments> moments_;
};

template <class Real>
std::vector<double> predict_logits(const ModelParams<Real>& params, const ModelConfig& cfg,
                                   const Dataset<Real>& data) {
  NoGradGuard guard;
  std::vector<double> out;
  out.reserve(data.size());
  for (const auto& ex : data)
    out.push_back(static_cast<double>(model::forward(ex.emb.trimmed(), params, cfg).item()));
  return out;
}

struct Evaluation {
  double loss = 0;
  eval::ConfusionCounts counts;
  eval::Metrics metrics;
  std::vector<double> logits;
};

template <class Real>
Evaluation evaluate(const ModelParams<Real>& params, const ModelConfig& cfg,
                    const Dataset<Real>& data, double threshold = 0.5) {
  if (data.empty()) throw DataError("evaluate: empty dataset");
  Evaluation ev;
  ev.logits = predict_logits(params, cfg, data);
  std::vector<double> y;
  std::vector<int> yi;
  for (const auto& ex : data) {
    y.push_back(static_cast<double>(ex.label));
    yi.push_back(ex.label != Real(0) ? 1 : 0);
  }
  ev.loss = bce_loss(ev.logits, y);
  ev.counts = eval::confusion(ev.logits, yi, threshold);
  ev.metrics = eval::precision_recall_f1(ev.counts);
  return ev;
}

template <class Real>
struct TrainResult {
  ModelParams<Real> params;
  RunLog log;
};

/// Optional hook called after every optimizer step (step number, params).
template <class Real>
using StepHook = std::function<void(std::uint64_t, const ModelParams<Real>&)>;

template <class Real>
void check_two_classes(const Dataset<Real>& train) {
  if (train.empty()) throw DataError("training set is empty");
  bool pos = false, neg = false;
  for (const auto& ex : train) (ex.label != Real(0) ? pos : neg) = true;
  if (!(pos && neg)) throw DataError("training set contains a single class; cannot train a classifier");
}

/// Mini-batch loop over the trainable tensors of `params`. Batches follow a
/// seeded shuffle per epoch; the held-out split is evaluated every
/// eval_interval steps and after the final step.
template <class Real>
RunLog fit(ModelParams<Real>& params, const Dataset<Real>& train,
           std::type_identity_t<const Dataset<Real>*> test,
           const ModelConfig& cfg, const TrainConfig& tcfg, const StepHook<Real>& hook = {}) {
  tcfg.validate();
  check_two_classes(train);
  std::vector<embed::WindowEmbedding<Real>> inputs;
  inputs.reserve(train.size());
  for (const auto& ex : train) inputs.push_back(ex.emb.trimmed());

  const std::size_t per_epoch = (train.size() + tcfg.batch_size - 1) / tcfg.batch_size;
  const std::uint64_t total = per_epoch * tcfg.epochs;
  Adam<Real> adam(tcfg);
  Rng rng(derive_seed(tcfg.seed, "batch-order"));
  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  RunLog log;
  std::uint64_t step = 0;
  for (std::size_t epoch = 0; epoch < tcfg.epochs; ++epoch) {
    rng.shuffle(order.begin(), order.end());
    for (std::size_t b = 0; b < per_epoch; ++b) {
      const std::size_t lo = b * tcfg.batch_size;
      const std::size_t hi = std::min(train.size(), lo + tcfg.batch_size);
      std::vector<Tensor<Real>> logits;
      std::vector<Real> labels;
      logits.reserve(hi - lo);
      for (std::size_t i = lo; i < hi; ++i) {
        logits.push_back(model::forward(inputs[order[i]], params, cfg));
        labels.push_back(train[order[i]].label);
      }
      const auto loss = bce_with_logits(concat_rows(logits), std::span<const Real>(labels));
      backward(loss);
      const double lr = one_cycle_lr(step, total, tcfg.max_lr, tcfg.pct_start, tcfg.div_factor,
                                     tcfg.final_div_factor);
      adam.step(params, lr);
      ++step;
      StepRecord rec{step, lr, static_cast<double>(loss.item()), std::nullopt};
      if (test != nullptr && !test->empty() && (step % tcfg.eval_interval == 0 || step == total)) {
        const auto ev = evaluate(params, cfg, *test);
        rec.eval = EvalRecord{ev.loss, ev.metrics.precision, ev.metrics.recall, ev.metrics.f1};
      }
      log.steps.push_back(rec);
      if (hook) hook(step, params);
    }
  }
  return log;
}

/// Stage one: every encoder tensor trained on the source domain, no adapters.
template <class Real>
TrainResult<Real> pretrain(const Dataset<Real>& source, std::type_identity_t<const Dataset<Real>*> held_out,
                           const ModelConfig& cfg, const TrainConfig& tcfg,
                           const StepHook<Real>& hook = {}) {
  cfg.validate();
  check_two_classes(source);
  TrainResult<Real> r{model::init_params<Real>(cfg, derive_seed(tcfg.seed, "pretrain")), {}};
  model::set_stage(r.params, model::Stage::kPretrain);
  r.log = fit(r.params, source, held_out, cfg, tcfg, hook);
  return r;
}

/// Same procedure as pretrain() on target data only (the from-scratch baseline).
template <class Real>
TrainResult<Real> train_from_scratch(const Dataset<Real>& target, std::type_identity_t<const Dataset<Real>*> held_out,
                                     const ModelConfig& cfg, const TrainConfig& tcfg,
                                     const StepHook<Real>& hook = {}) {
  return pretrain(target, held_out, cfg, tcfg, hook);
}

enum class AdaptMode {
  kAdapter,   // zero-init adapters + classifier trainable, encoder frozen
  kFullTune,  // no adapters, every tensor trainable
};

/// Prepares pre-trained params for stage two without training them.
template <class Real>
ModelParams<Real> prepare_adapt(const ModelParams<Real>& pretrained, const ModelConfig& cfg,
                                AdaptMode mode, std::uint64_t seed) {
  if (pretrained.has_adapters()) throw ConfigError("adapt: checkpoint already contains adapters");
  auto params = pretrained.clone();
  if (mode == AdaptMode::kAdapter) {
    if (cfg.adapter_kind == model::AdapterKind::kNone)
      throw ConfigError("adapt: model.adapter_kind is 'none'");
    model::add_adapters(params, cfg, derive_seed(seed, "adapt"));
    model::set_stage(params, model::Stage::kAdapt);
  } else {
    model::unfreeze_all(params);
    params.set_stage_flag(model::Stage::kAdapt);
  }
  return params;
}

/// Stage two on the target domain.
template <class Real>
TrainResult<Real> adapt(const ModelParams<Real>& pretrained, const Dataset<Real>& target,
                        std::type_identity_t<const Dataset<Real>*> held_out, const ModelConfig& cfg,
                        const TrainConfig& tcfg, AdaptMode mode = AdaptMode::kAdapter,
                        const StepHook<Real>& hook = {}) {
  cfg.validate();
  check_two_classes(target);
  TrainResult<Real> r{prepare_adapt(pretrained, cfg, mode, tcfg.seed), {}};
  r.log = fit(r.params, target, held_out, cfg, tcfg, hook);
  return r;
}

}  // namespace logformer::train
