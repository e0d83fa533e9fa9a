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

#include <cmath>
#include <cstdint>
#include <fstream>
#include <span>
#include <string>

#include "json.hpp"
#include "logformer/error.hpp"

namespace logformer::eval {

struct ConfusionCounts {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t tn = 0;
  std::uint64_t fn = 0;

  std::uint64_t total() const noexcept { return tp + fp + tn + fn; }
  friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

struct Metrics {
  double precision = 0;
  double recall = 0;
  double f1 = 0;
};

inline double sigmoid(double z) {
  return z >= 0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
}

/// Predicted anomalous iff sigmoid(logit) >= threshold.
inline ConfusionCounts confusion(std::span<const double> logits, std::span<const int> labels,
                                 double threshold = 0.5) {
  if (logits.size() != labels.size())
    throw DataError("confusion: " + std::to_string(logits.size()) + " logits vs " +
                    std::to_string(labels.size()) + " labels");
  if (logits.empty()) throw DataError("confusion: empty input");
  ConfusionCounts c;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    const bool pred = sigmoid(logits[i]) >= threshold;
    const bool truth = labels[i] != 0;
    if (pred && truth) ++c.tp;
    else if (pred) ++c.fp;
    else if (truth) ++c.fn;
    else ++c.tn;
  }
  return c;
}

/// Zero-denominator convention: each undefined ratio is 0.
inline Metrics precision_recall_f1(double precision, double recall) {
  Metrics m{precision, recall, 0.0};
  if (precision + recall > 0) m.f1 = 2 * precision * recall / (precision + recall);
  return m;
}

inline Metrics precision_recall_f1(const ConfusionCounts& c) {
  const double p = c.tp + c.fp == 0 ? 0.0 : static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
  const double r = c.tp + c.fn == 0 ? 0.0 : static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
  return precision_recall_f1(p, r);
}

}  // namespace logformer::eval
