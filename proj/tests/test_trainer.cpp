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
#include <limits>
#include <sstream>
#include <vector>

#include "logformer/trainer.hpp"
#include "test_support.hpp"

namespace lf = logformer;
namespace md = logformer::model;
namespace tr = logformer::train;
using T = lf::Tensor<double>;

namespace {

const auto& domain() {
  static const auto d = lf::testing::tiny_domain(5, 3000);
  return d;
}

tr::TrainConfig quick(std::size_t epochs = 2) {
  tr::TrainConfig t;
  t.max_lr = 3e-3;
  t.epochs = epochs;
  t.batch_size = 16;
  t.eval_interval = 10;
  return t;
}

bool same_bits(const md::ModelParams<double>& a, const md::ModelParams<double>& b, const std::string& name) {
  const auto x = a.get(name).data(), y = b.get(name).data();
  return std::equal(x.begin(), x.end(), y.begin(), y.end());
}

}  // namespace

// ---------------------------------------------------------------------------
// bce_loss
// ---------------------------------------------------------------------------

TEST(BceLoss, Examples) {
  EXPECT_NEAR(tr::bce_loss(std::vector<double>{0.0}, std::vector<double>{1.0}), std::log(2.0), 1e-15);
  EXPECT_NEAR(tr::bce_loss(std::vector<double>{20.0}, std::vector<double>{1.0}), 2.06e-9, 0.01e-9);
  EXPECT_NEAR(tr::bce_loss(std::vector<double>{20.0}, std::vector<double>{1.0}),
              std::log1p(std::exp(-20.0)), 1e-22);
  const double z = 1.7;
  EXPECT_NEAR(tr::bce_loss(std::vector<double>{z, -z}, std::vector<double>{1.0, 0.0}),
              tr::bce_loss(std::vector<double>{z}, std::vector<double>{1.0}), 1e-15);
}

TEST(BceLoss, Errors) {
  EXPECT_THROW(tr::bce_loss(std::vector<double>{}, std::vector<double>{}), lf::DataError);
  EXPECT_THROW(tr::bce_loss(std::vector<double>{1.0}, std::vector<double>{}), lf::DataError);
}

// ---------------------------------------------------------------------------
// Adam
// ---------------------------------------------------------------------------

TEST(Adam, ZeroGradientLeavesParametersUnchanged) {
  md::ModelParams<double> p;
  p.add("w", T::from_vector(1, 3, {1, 2, 3}, true));
  p.get("w").grad();  // materialize
  lf::backward(lf::sum(lf::scale(p.get("w"), 0.0)));
  tr::Adam<double> adam(tr::TrainConfig{});
  adam.step(p, 0.1);
  EXPECT_EQ(std::vector<double>(p.get("w").data().begin(), p.get("w").data().end()),
            (std::vector<double>{1, 2, 3}));
}

TEST(Adam, FirstStepClosedForm) {
  tr::TrainConfig cfg;
  for (double g : {0.5, -3.0, 1e-3}) {
    md::ModelParams<double> p;
    p.add("w", T::from_vector(1, 1, {2.0}, true));
    lf::backward(lf::scale(p.get("w"), g));
    tr::Adam<double> adam(cfg);
    adam.step(p, 0.01);
    // m_hat = g, v_hat = g^2 after bias correction.
    EXPECT_NEAR(p.get("w").data()[0], 2.0 - 0.01 * g / (std::abs(g) + cfg.eps), 1e-15);
    EXPECT_NEAR(p.get("w").data()[0], 2.0 - 0.01 * (g > 0 ? 1 : -1), 1e-7);
    EXPECT_FALSE(p.get("w").has_grad());
  }
}

TEST(Adam, FrozenTensorsUntouchedAndStateOnlyForTrainable) {
  md::ModelParams<double> p;
  p.add("a", T::from_vector(1, 2, {1, 1}, true));
  p.add("b", T::from_vector(1, 2, {5, 5}, false));
  lf::backward(lf::sum(lf::mul(p.get("a"), p.get("b"))));
  tr::Adam<double> adam(tr::TrainConfig{});
  adam.step(p, 0.1);
  EXPECT_EQ(p.get("b").data()[0], 5.0);
  EXPECT_EQ(adam.state_size(), 1u);
  EXPECT_TRUE(adam.has_state("a"));
  EXPECT_FALSE(adam.has_state("b"));
  EXPECT_EQ(adam.steps(), 1u);
}

TEST(Adam, NonFiniteGradientAbortsBeforeAnyChange) {
  md::ModelParams<double> p;
  p.add("a", T::from_vector(1, 1, {1}, true));
  p.add("b", T::from_vector(1, 1, {1}, true));
  lf::backward(lf::add(lf::scale(p.get("a"), 2.0), lf::scale(p.get("b"), std::numeric_limits<double>::infinity())));
  tr::Adam<double> adam(tr::TrainConfig{});
  EXPECT_THROW(adam.step(p, 0.1), lf::RuntimeError);
  EXPECT_EQ(p.get("a").data()[0], 1.0);
  EXPECT_EQ(adam.steps(), 0u);
}

// ---------------------------------------------------------------------------
// one_cycle_lr
// ---------------------------------------------------------------------------

TEST(OneCycle, Landmarks) {
  const double lr = 1e-3;
  EXPECT_DOUBLE_EQ(tr::one_cycle_lr(0, 1000, lr), lr / 25);
  EXPECT_DOUBLE_EQ(tr::one_cycle_lr(300, 1000, lr), lr);
  EXPECT_NEAR(tr::one_cycle_lr(999, 1000, lr), lr / 1e4, 1e-18);
  EXPECT_NEAR(tr::one_cycle_lr(150, 1000, lr), lr / 25 + (lr - lr / 25) * 0.5, 1e-18);
  EXPECT_THROW(tr::one_cycle_lr(0, 0, lr), lf::ConfigError);
  EXPECT_THROW(tr::one_cycle_lr(5, 5, lr), lf::ConfigError);
}

TEST(OneCycle, RisesThenFalls) {
  double prev = 0;
  for (std::uint64_t s = 0; s < 300; ++s) {
    const double v = tr::one_cycle_lr(s, 1000, 1.0);
    EXPECT_GT(v, prev);
    prev = v;
  }
  prev = tr::one_cycle_lr(300, 1000, 1.0);
  for (std::uint64_t s = 301; s < 1000; ++s) {
    const double v = tr::one_cycle_lr(s, 1000, 1.0);
    EXPECT_LE(v, prev);
    prev = v;
  }
}

// ---------------------------------------------------------------------------
// Training stages
// ---------------------------------------------------------------------------

TEST(Pretrain, EpochMeanLossDecreasesAndScheduleIsExact) {
  const auto& d = domain();
  auto tcfg = quick(3);
  const auto r = tr::pretrain(d.train, &d.test, lf::testing::tiny_model(), tcfg);
  const std::size_t per_epoch = (d.train.size() + 15) / 16;
  ASSERT_EQ(r.log.steps.size(), per_epoch * 3);
  std::vector<double> means(3, 0.0);
  for (std::size_t i = 0; i < r.log.steps.size(); ++i) {
    const auto& s = r.log.steps[i];
    EXPECT_EQ(s.step, i + 1);
    EXPECT_EQ(s.lr, tr::one_cycle_lr(i, r.log.steps.size(), tcfg.max_lr));
    means[i / per_epoch] += s.train_loss / static_cast<double>(per_epoch);
    EXPECT_EQ(s.eval.has_value(), s.step % 10 == 0 || s.step == r.log.steps.size());
  }
  EXPECT_LT(means[1], means[0]);
  EXPECT_LT(means[2], means[1]);
  EXPECT_FALSE(r.params.has_adapters());
}

TEST(Pretrain, SameSeedSameBits) {
  const auto& d = domain();
  const auto a = tr::pretrain(d.train, nullptr, lf::testing::tiny_model(), quick(1));
  const auto b = tr::pretrain(d.train, nullptr, lf::testing::tiny_model(), quick(1));
  ASSERT_EQ(a.log.steps.size(), b.log.steps.size());
  for (std::size_t i = 0; i < a.log.steps.size(); ++i)
    EXPECT_EQ(a.log.steps[i].train_loss, b.log.steps[i].train_loss);
  for (const auto& e : a.params.entries()) EXPECT_TRUE(same_bits(a.params, b.params, e.name)) << e.name;
  auto other = quick(1);
  other.seed = 9;
  const auto c = tr::pretrain(d.train, nullptr, lf::testing::tiny_model(), other);
  EXPECT_NE(a.log.steps.back().train_loss, c.log.steps.back().train_loss);
}

TEST(Pretrain, RejectsEmptyAndSingleClassData) {
  const auto& d = domain();
  tr::Dataset<double> empty;
  EXPECT_THROW(tr::pretrain(empty, nullptr, lf::testing::tiny_model(), quick()), lf::DataError);
  tr::Dataset<double> normal_only;
  for (const auto& ex : d.train)
    if (ex.label == 0) normal_only.push_back(ex);
  EXPECT_THROW(tr::pretrain(normal_only, nullptr, lf::testing::tiny_model(), quick()), lf::DataError);
  auto bad = quick();
  bad.batch_size = 0;
  EXPECT_THROW(tr::pretrain(d.train, nullptr, lf::testing::tiny_model(), bad), lf::ConfigError);
}

TEST(Adapt, IdentityAtInitAndFrozenEncoder) {
  const auto& d = domain();
  const auto cfg = lf::testing::tiny_model();
  const auto pre = tr::pretrain(d.train, nullptr, cfg, quick(1));
  const auto before = tr::evaluate(pre.params, cfg, d.test);
  const auto fresh = tr::prepare_adapt(pre.params, cfg, tr::AdaptMode::kAdapter, 3);
  const auto at_init = tr::evaluate(fresh, cfg, d.test);
  EXPECT_EQ(before.logits, at_init.logits);
  EXPECT_EQ(before.loss, at_init.loss);

  const auto target = lf::testing::tiny_domain(6, 2000, 2);
  const auto r = tr::adapt(pre.params, target.train, &target.test, cfg, quick(2));
  for (const auto& e : pre.params.entries()) {
    if (md::is_classifier(e.name)) continue;
    EXPECT_TRUE(same_bits(pre.params, r.params, e.name)) << e.name;
  }
  EXPECT_TRUE(r.params.has_adapters());
  EXPECT_EQ(r.params.stage(), md::Stage::kAdapt);
  bool moved = false;
  for (const auto& e : r.params.entries())
    if (e.adapter && e.name.find("w_up") != std::string::npos)
      for (double v : e.tensor.data()) moved = moved || v != 0.0;
  EXPECT_TRUE(moved);
}

TEST(Adapt, FullTuneMakesEverythingTrainable) {
  const auto& d = domain();
  const auto cfg = lf::testing::tiny_model();
  const auto pre = tr::pretrain(d.train, nullptr, cfg, quick(1));
  const auto p = tr::prepare_adapt(pre.params, cfg, tr::AdaptMode::kFullTune, 1);
  EXPECT_FALSE(p.has_adapters());
  for (const auto& e : p.entries()) EXPECT_EQ(e.tensor.requires_grad(), !e.constant) << e.name;
  auto withadapt = tr::prepare_adapt(pre.params, cfg, tr::AdaptMode::kAdapter, 1);
  EXPECT_THROW(tr::prepare_adapt(withadapt, cfg, tr::AdaptMode::kAdapter, 1), lf::ConfigError);
  auto none = cfg;
  none.adapter_kind = md::AdapterKind::kNone;
  EXPECT_THROW(tr::prepare_adapt(pre.params, none, tr::AdaptMode::kAdapter, 1), lf::ConfigError);
}

TEST(Adapt, OptimizerHookSeesFrozenTensorsUnchangedEveryStep) {
  const auto& d = domain();
  const auto cfg = lf::testing::tiny_model();
  const auto pre = tr::pretrain(d.train, nullptr, cfg, quick(1));
  std::size_t checked = 0;
  tr::adapt(pre.params, d.train, nullptr, cfg, quick(1), tr::AdaptMode::kAdapter,
            tr::StepHook<double>([&](std::uint64_t, const md::ModelParams<double>& now) {
              for (const auto& e : pre.params.entries())
                if (!md::is_classifier(e.name)) {
                  ASSERT_TRUE(same_bits(pre.params, now, e.name));
                }
              ++checked;
            }));
  EXPECT_GT(checked, 0u);
}

// ---------------------------------------------------------------------------
// RunLog
// ---------------------------------------------------------------------------

TEST(RunLogCsv, RoundTripAndQueries) {
  tr::RunLog log;
  log.steps.push_back({1, 1e-4, 0.7, std::nullopt});
  log.steps.push_back({2, 2e-4, 0.6, tr::EvalRecord{0.5, 0.8, 0.9, 0.847}});
  log.steps.push_back({3, 3e-4, 0.1 + 0.2, tr::EvalRecord{0.4, 1.0, 0.9, 0.947}});
  std::stringstream ss;
  tr::write_runlog_csv(ss, log);
  const auto back = tr::read_runlog_csv(ss);
  ASSERT_EQ(back.steps.size(), 3u);
  EXPECT_EQ(back.steps[2].train_loss, 0.1 + 0.2);  // shortest round-trip formatting
  EXPECT_FALSE(back.steps[0].eval.has_value());
  EXPECT_EQ(back.steps_to_f1(0.9), 3u);
  EXPECT_FALSE(back.steps_to_f1(0.99).has_value());
  EXPECT_EQ(back.last_eval()->f1, 0.947);
  std::stringstream curves;
  tr::write_runlog_csv(curves, log, true);
  EXPECT_EQ(tr::read_runlog_csv(curves).steps.size(), 2u);
}

TEST(RunLogCsv, RejectsNonIncreasingSteps) {
  std::stringstream ss(std::string(tr::kRunLogHeader) + "\n2,0.1,0.5,,,,\n2,0.1,0.5,,,,\n");
  EXPECT_THROW(tr::read_runlog_csv(ss), lf::DataError);
  std::stringstream no_header("1,0.1,0.5\n");
  EXPECT_THROW(tr::read_runlog_csv(no_header), lf::DataError);
}
