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
#include <sstream>
#include <string>
#include <vector>

#include "logformer/embedder.hpp"
#include "logformer/sequencer.hpp"

namespace lf = logformer;
namespace dr = logformer::drain;
namespace em = logformer::embed;
using Tokens = std::vector<std::string>;

namespace {

double norm(const em::Vector& v) {
  double s = 0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

em::EmbedderConfig cfg(std::uint64_t seed = 3) {
  em::EmbedderConfig c;
  c.seed = seed;
  return c;
}

std::vector<dr::Template> table(std::size_t k) {
  std::vector<dr::Template> out;
  for (std::size_t i = 0; i < k; ++i)
    out.push_back({static_cast<std::int64_t>(i), {"t" + std::to_string(i), "<*>"}, 1});
  return out;
}

}  // namespace

TEST(EmbedTemplate, DeterministicAndUnitNorm) {
  const Tokens t{"Receiving", "block", "<*>"};
  const auto a = em::embed_template(t, cfg()), b = em::embed_template(t, cfg());
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.size(), 64u);
  EXPECT_NEAR(norm(a), 1.0, 1e-12);
  EXPECT_NE(a, em::embed_template(t, cfg(4)));
}

TEST(EmbedTemplate, SingleTokenIsItsUnitFeature) {
  auto f = em::token_features("reboot", 64, 3);
  const double n = norm(f);
  const auto v = em::embed_template(Tokens{"reboot"}, cfg());
  for (std::size_t i = 0; i < 64; ++i) EXPECT_NEAR(v[i], f[i] / n, 1e-15);
}

TEST(EmbedTemplate, BagOfTokensIgnoresOrderAndWildcards) {
  EXPECT_EQ(em::embed_template(Tokens{"a", "b"}, cfg()), em::embed_template(Tokens{"b", "a"}, cfg()));
  EXPECT_EQ(em::embed_template(Tokens{"a", "<*>", "b"}, cfg()),
            em::embed_template(Tokens{"a", "b"}, cfg()));
  EXPECT_NEAR(norm(em::embed_template(Tokens{"<*>", "<*>"}, cfg())), 1.0, 1e-12);
  EXPECT_THROW(em::embed_template(Tokens{}, cfg()), lf::DataError);
}

TEST(EmbedTemplate, FeaturesDependOnlyOnTokenAndSeed) {
  // A token's features do not depend on the template it appears in.
  const auto ab = em::embed_template(Tokens{"a", "b"}, cfg());
  const auto fa = em::token_features("a", 64, 3), fb = em::token_features("b", 64, 3);
  em::Vector mean(64);
  for (std::size_t i = 0; i < 64; ++i) mean[i] = (fa[i] + fb[i]) / 2;
  const double n = norm(mean);
  for (std::size_t i = 0; i < 64; ++i) EXPECT_NEAR(ab[i], mean[i] / n, 1e-15);
}

TEST(ParamChars, Examples) {
  const auto zero = em::embed_params_chars(Tokens{}, cfg());
  EXPECT_EQ(zero, em::Vector(16, 0.0));
  EXPECT_EQ(em::embed_params_chars(Tokens{"0x10001"}, cfg()),
            em::embed_params_chars(Tokens{"0x10001"}, cfg()));
  const auto ab = em::embed_params_chars(Tokens{"ab"}, cfg());
  const auto ba = em::embed_params_chars(Tokens{"ba"}, cfg());
  for (std::size_t i = 0; i < 16; ++i) EXPECT_NEAR(ab[i], ba[i], 1e-15);
  EXPECT_NE(em::embed_params_chars(Tokens{"134"}, cfg()), em::embed_params_chars(Tokens{"00"}, cfg()));
}

TEST(ParamChars, MeanOfCharacterRowsWithSeparator) {
  const em::CharTable chars(cfg());
  const auto v = em::embed_params_chars(Tokens{"x", "y"}, chars);
  for (std::size_t k = 0; k < 16; ++k) {
    const double want = (chars.row('x')[k] + chars.row(' ')[k] + chars.row('y')[k]) / 3.0;
    EXPECT_NEAR(v[k], want, 1e-15);
  }
}

TEST(Import, CompleteFile) {
  std::stringstream in("d=3\n0\t1,0,0\n1\t0,3,4\n");
  const auto tv = em::import_embeddings(in, table(2), 3);
  ASSERT_EQ(tv.size(), 2u);
  EXPECT_EQ(tv[0], (em::Vector{1, 0, 0}));
  EXPECT_NEAR(tv[1][1], 0.6, 1e-15);
  EXPECT_NEAR(tv[1][2], 0.8, 1e-15);
}

TEST(Import, MissingIdIsNamed) {
  std::stringstream in("d=2\n0\t1,0\n1\t0,1\n2\t1,1\n4\t1,2\n");
  try {
    em::import_embeddings(in, table(5), 2);
    FAIL() << "expected DataError";
  } catch (const lf::DataError& e) {
    EXPECT_NE(std::string(e.what()).find("3"), std::string::npos) << e.what();
  }
}

TEST(Import, DimensionErrors) {
  std::stringstream wrong_header("d=4\n0\t1,0\n");
  EXPECT_THROW(em::import_embeddings(wrong_header, table(1), 2), lf::DataError);
  std::stringstream wrong_row("d=2\n0\t1,0,5\n");
  EXPECT_THROW(em::import_embeddings(wrong_row, table(1), 2), lf::DataError);
  std::stringstream no_header("0\t1,0\n");
  EXPECT_THROW(em::import_embeddings(no_header, table(1), 2), lf::DataError);
  std::stringstream garbage("d=2\n0\tx,y\n");
  EXPECT_THROW(em::import_embeddings(garbage, table(1), 2), lf::DataError);
}

TEST(EmbedWindow, AllPaddingWindowIsZero) {
  lf::seq::Window w;
  w.events.resize(20);
  w.true_length = 0;
  const auto e = em::embed_window<double>(w, cfg(), {});
  for (double v : e.x.data()) EXPECT_EQ(v, 0.0);
  for (double v : e.p.data()) EXPECT_EQ(v, 0.0);
  EXPECT_EQ(e.mask, lf::Mask(20, 0));
}

TEST(EmbedWindow, ShapesNormsAndMask) {
  const auto tab = table(3);
  const auto tv = em::embed_templates(tab, cfg());
  std::vector<dr::ParsedEvent> ev(23);
  for (std::size_t i = 0; i < ev.size(); ++i) {
    ev[i].template_id = static_cast<std::int64_t>(i % 3);
    ev[i].order_index = i;
    ev[i].label = lf::Label::kNormal;
    if (i % 2) ev[i].params = {"v" + std::to_string(i)};
  }
  for (const auto& w : lf::seq::sliding_windows(ev, 20)) {
    const auto e = em::embed_window<double>(w, cfg(), tv);
    ASSERT_EQ(e.x.rows(), 20u);
    ASSERT_EQ(e.x.cols(), 64u);
    ASSERT_EQ(e.p.cols(), 16u);
    for (std::size_t i = 0; i < 20; ++i) {
      double n2 = 0, p2 = 0;
      for (std::size_t k = 0; k < 64; ++k) n2 += e.x(i, k) * e.x(i, k);
      for (std::size_t k = 0; k < 16; ++k) p2 += e.p(i, k) * e.p(i, k);
      EXPECT_EQ(e.mask[i], i < w.true_length ? 1 : 0);
      if (e.mask[i]) EXPECT_NEAR(std::sqrt(n2), 1.0, 1e-6);
      else EXPECT_EQ(n2, 0.0);
      const bool has_params = i < w.true_length && !w.events[i].params.empty();
      EXPECT_EQ(p2 > 0, has_params);
    }
    const auto t = e.trimmed();
    EXPECT_EQ(t.x.rows(), w.true_length);
  }
}

TEST(EmbedWindow, UnknownTemplateIsAnError) {
  std::vector<dr::ParsedEvent> ev(1);
  ev[0].template_id = 7;
  ev[0].label = lf::Label::kNormal;
  const auto w = lf::seq::sliding_windows(ev, 4);
  EXPECT_THROW(em::embed_window<double>(w[0], cfg(), em::embed_templates(table(2), cfg())),
               lf::DataError);
}

TEST(EmbedWindow, SinglePrecisionMatchesDoubleAfterRounding) {
  const auto tv = em::embed_templates(table(2), cfg());
  std::vector<dr::ParsedEvent> ev(2);
  ev[1].template_id = 1;
  ev[0].template_id = 0;
  ev[0].params = {"abc"};
  for (auto& e : ev) e.label = lf::Label::kNormal;
  const auto w = lf::seq::sliding_windows(ev, 4)[0];
  const auto d = em::embed_window<double>(w, cfg(), tv);
  const auto f = em::embed_window<float>(w, cfg(), tv);
  for (std::size_t i = 0; i < d.x.size(); ++i) EXPECT_EQ(f.x.data()[i], static_cast<float>(d.x.data()[i]));
}

TEST(EmbedderConfig, Validation) {
  auto c = cfg();
  c.d = 0;
  EXPECT_THROW(c.validate(), lf::ConfigError);
  c = cfg();
  c.c = 0;
  EXPECT_THROW(c.validate(), lf::ConfigError);
}
