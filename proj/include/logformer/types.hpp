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

#include <cstdint>
#include <string>
#include <string_view>

#include "logformer/error.hpp"

namespace logformer {

enum class Label : std::uint8_t { kNormal, kAnomalous, kUnlabeled };

inline std::string_view to_string(Label l) {
  switch (l) {
    case Label::kNormal:
      return "normal";
    case Label::kAnomalous:
      return "anomalous";
    case Label::kUnlabeled:
      return "unlabeled";
  }
  return "unlabeled";
}

inline Label label_from_string(std::string_view s) {
  if (s == "normal") return Label::kNormal;
  if (s == "anomalous") return Label::kAnomalous;
  if (s == "unlabeled") return Label::kUnlabeled;
  throw DataError("unknown label '" + std::string(s) + "'");
}

/// Sidecar convention borrowed from BGL alert tags: "-" or "normal" marks a
/// normal line, any other non-empty tag marks an anomalous one.
inline Label label_from_tag(std::string_view tag) {
  if (tag.empty()) return Label::kUnlabeled;
  if (tag == "-" || tag == "normal") return Label::kNormal;
  return Label::kAnomalous;
}

}  // namespace logformer
