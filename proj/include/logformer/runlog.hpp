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

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "logformer/error.hpp"

namespace logformer::train {

struct EvalRecord {
  double test_loss = 0;
  double precision = 0;
  double recall = 0;
  double f1 = 0;
};

struct StepRecord {
  std::uint64_t step = 0;
  double lr = 0;
  double train_loss = 0;
  std::optional<EvalRecord> eval;
};

/// Per-step training trace with held-out metrics at evaluation steps.
struct RunLog {
  std::vector<StepRecord> steps;

  std::vector<StepRecord> evals() const {
    std::vector<StepRecord> out;
    for (const auto& s : steps)
      if (s.eval) out.push_back(s);
    return out;
  }

  /// First evaluated step with F1 >= threshold.
  std::optional<std::uint64_t> steps_to_f1(double threshold) const {
    for (const auto& s : steps)
      if (s.eval && s.eval->f1 >= threshold) return s.step;
    return std::nullopt;
  }

  std::optional<EvalRecord> last_eval() const {
    for (auto it = steps.rbegin(); it != steps.rend(); ++it)
      if (it->eval) return it->eval;
    return std::nullopt;
  }
};

namespace detail {

inline std::string fmt_double(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, r.ptr);
}

inline double parse_double(const std::string& s) {
  double v = 0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size())
    throw DataError("malformed number '" + s + "' in run log");
  return v;
}

}  // namespace detail

inline constexpr const char* kRunLogHeader = "step,lr,train_loss,test_loss,precision,recall,f1";

/// CSV with one row per optimizer step; evaluation columns are empty on
/// steps without an evaluation. When `evals_only` is set only evaluation
/// rows are written (the curve file).
inline void write_runlog_csv(std::ostream& out, const RunLog& log, bool evals_only = false) {
  using detail::fmt_double;
  out << kRunLogHeader << '\n';
  for (const auto& s : log.steps) {
    if (evals_only && !s.eval) continue;
    out << s.step << ',' << fmt_double(s.lr) << ',' << fmt_double(s.train_loss);
    if (s.eval) {
      out << ',' << fmt_double(s.eval->test_loss) << ',' << fmt_double(s.eval->precision) << ','
          << fmt_double(s.eval->recall) << ',' << fmt_double(s.eval->f1);
    } else {
      out << ",,,,";
    }
    out << '\n';
  }
}

inline RunLog read_runlog_csv(std::istream& in) {
  RunLog log;
  std::string line;
  if (!std::getline(in, line) || line != kRunLogHeader) throw DataError("run log header missing");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    while (cells.size() < 7) cells.emplace_back();
    StepRecord s;
    s.step = static_cast<std::uint64_t>(detail::parse_double(cells[0]));
    s.lr = detail::parse_double(cells[1]);
    s.train_loss = detail::parse_double(cells[2]);
    if (!cells[3].empty()) {
      s.eval = EvalRecord{detail::parse_double(cells[3]), detail::parse_double(cells[4]),
                          detail::parse_double(cells[5]), detail::parse_double(cells[6])};
    }
    if (!log.steps.empty() && s.step <= log.steps.back().step)
      throw DataError("run log steps are not strictly increasing");
    log.steps.push_back(s);
  }
  return log;
}

}  // namespace logformer::train
