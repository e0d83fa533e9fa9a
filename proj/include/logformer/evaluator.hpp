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

// Evaluation reports: metrics.json and curves.csv in one directory.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>

#include "json.hpp"
#include "logformer/error.hpp"
#include "logformer/metrics.hpp"
#include "logformer/runlog.hpp"

namespace logformer::eval {

struct Report {
  ConfusionCounts counts;
  Metrics metrics;
  std::string config_fingerprint;
  std::uint64_t seed = 0;
  double threshold = 0.5;
  train::RunLog curves;  // evaluation rows only
};

inline nlohmann::json to_json(const Report& r) {
  return {{"precision", r.metrics.precision},
          {"recall", r.metrics.recall},
          {"f1", r.metrics.f1},
          {"counts", {{"tp", r.counts.tp}, {"fp", r.counts.fp}, {"tn", r.counts.tn}, {"fn", r.counts.fn}}},
          {"threshold", r.threshold},
          {"config_fingerprint", r.config_fingerprint},
          {"seed", r.seed}};
}

/// Writes <dir>/metrics.json and <dir>/curves.csv (one row per evaluation
/// of the run log, in the run-log CSV schema).
inline void emit_report(const Report& r, const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw RuntimeError("cannot create report directory '" + dir + "': " + ec.message());
  std::ofstream m(dir + "/metrics.json");
  std::ofstream c(dir + "/curves.csv");
  if (!m || !c) throw RuntimeError("cannot write report files in '" + dir + "'");
  m << to_json(r).dump(2) << '\n';
  train::write_runlog_csv(c, r.curves, /*evals_only=*/true);
  if (!m || !c) throw RuntimeError("failed writing report files in '" + dir + "'");
}

inline Report read_report(const std::string& dir) {
  std::ifstream m(dir + "/metrics.json");
  std::ifstream c(dir + "/curves.csv");
  if (!m || !c) throw DataError("report files missing in '" + dir + "'");
  Report r;
  try {
    const auto j = nlohmann::json::parse(m);
    r.metrics = {j.at("precision").get<double>(), j.at("recall").get<double>(),
                 j.at("f1").get<double>()};
    const auto& k = j.at("counts");
    r.counts = {k.at("tp").get<std::uint64_t>(), k.at("fp").get<std::uint64_t>(),
                k.at("tn").get<std::uint64_t>(), k.at("fn").get<std::uint64_t>()};
    r.threshold = j.at("threshold").get<double>();
    r.config_fingerprint = j.at("config_fingerprint").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw DataError("malformed metrics.json in '" + dir + "': " + e.what());
  }
  r.curves = train::read_runlog_csv(c);
  return r;
}

}  // namespace logformer::eval
