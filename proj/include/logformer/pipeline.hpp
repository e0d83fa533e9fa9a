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

// Glue between stages: raw files to events, windows to model datasets.

#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "logformer/drain.hpp"
#include "logformer/embedder.hpp"
#include "logformer/error.hpp"
#include "logformer/sequencer.hpp"
#include "logformer/trainer.hpp"
#include "logformer/types.hpp"

namespace logformer::pipeline {

/// Per-line labels from a sidecar file. A ".csv" file holds
/// "line_no,label" rows (1-based, optional header; unlisted lines stay
/// unlabeled); anything else holds one tag per line.
inline std::vector<Label> read_labels(const std::string& path, std::size_t n_lines) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open label file '" + path + "'");
  std::vector<Label> out;
  std::string line;
  const bool csv = path.size() >= 4 && path.compare(path.size() - 4, 4, ".csv") == 0;
  if (!csv) {
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      const auto b = line.find_first_not_of(" \t");
      const auto e = line.find_last_not_of(" \t");
      out.push_back(label_from_tag(b == std::string::npos ? "" : line.substr(b, e - b + 1)));
    }
    if (out.size() != n_lines)
      throw DataError("label file '" + path + "' has " + std::to_string(out.size()) +
                      " lines, log has " + std::to_string(n_lines));
    return out;
  }
  out.assign(n_lines, Label::kUnlabeled);
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw DataError(path + ":" + std::to_string(row) + ": expected line_no,label");
    const std::string no = line.substr(0, comma);
    const std::string tag = line.substr(comma + 1);
    if (row == 1 && no == "line_no") continue;
    std::size_t idx = 0;
    try {
      idx = std::stoul(no);
    } catch (const std::exception&) {
      throw DataError(path + ":" + std::to_string(row) + ": bad line number '" + no + "'");
    }
    if (idx == 0 || idx > n_lines)
      throw DataError(path + ":" + std::to_string(row) + ": line number out of range");
    out[idx - 1] = label_from_tag(tag);
  }
  return out;
}

/// Raw logs in file order; order_index is the 0-based line number. Blank
/// lines are rejected.
inline std::vector<drain::RawLog> make_raw_logs(const std::vector<std::string>& lines,
                                                const std::vector<Label>& labels = {}) {
  if (!labels.empty() && labels.size() != lines.size())
    throw DataError("label count does not match line count");
  std::vector<drain::RawLog> out;
  out.reserve(lines.size());
  for (std::size_t i = 0; i < lines.size(); ++i)
    out.push_back({lines[i], i, labels.empty() ? Label::kUnlabeled : labels[i]});
  return out;
}

inline std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open log file '" + path + "'");
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    out.push_back(std::move(line));
  }
  return out;
}

enum class WindowMode { kSliding, kBlockId };

inline std::string to_string(WindowMode m) { return m == WindowMode::kSliding ? "sliding" : "block-id"; }

inline WindowMode window_mode_from_string(const std::string& s) {
  if (s == "sliding") return WindowMode::kSliding;
  if (s == "block-id") return WindowMode::kBlockId;
  throw ConfigError("unknown window mode '" + s + "' (expected sliding or block-id)");
}

struct SequencerConfig {
  std::size_t window_size = 20;
  WindowMode mode = WindowMode::kSliding;
  std::string id_regex = R"(blk_-?[0-9]+)";
  double split = 0.8;

  void validate() const {
    if (window_size == 0) throw ConfigError("sequencer.window_size must be >= 1");
    if (!(split >= 0.0 && split <= 1.0)) throw ConfigError("sequencer.split must be in [0, 1]");
  }
};

inline std::vector<seq::Window> make_windows(const std::vector<drain::ParsedEvent>& events,
                                             const SequencerConfig& cfg, const std::string& tag,
                                             bool supervised, seq::SessionStats* stats = nullptr) {
  cfg.validate();
  if (cfg.mode == WindowMode::kSliding)
    return seq::sliding_windows(events, cfg.window_size, tag, supervised);
  return seq::sessions_by_block_id(events, cfg.id_regex, cfg.window_size, tag, stats, supervised);
}

template <class Real>
train::Dataset<Real> make_dataset(const std::vector<seq::Window>& windows,
                                  const embed::EmbedderConfig& cfg,
                                  const embed::TemplateVectors& templates) {
  embed::CharTable chars(cfg);
  train::Dataset<Real> out;
  out.reserve(windows.size());
  for (const auto& w : windows)
    out.push_back({embed::embed_window<Real>(w, cfg, templates, chars), static_cast<Real>(w.label)});
  return out;
}

/// In-memory run of parse, window, split and embed for one labelled corpus.
template <class Real>
struct PreparedDomain {
  std::vector<drain::Template> templates;
  std::vector<drain::ParsedEvent> events;
  seq::Split split;
  train::Dataset<Real> train;
  train::Dataset<Real> test;
};

template <class Real>
PreparedDomain<Real> prepare_domain(const std::vector<std::string>& lines,
                                    const std::vector<Label>& labels,
                                    const drain::ParserConfig& pcfg, const SequencerConfig& scfg,
                                    const embed::EmbedderConfig& ecfg, const std::string& tag) {
  PreparedDomain<Real> d;
  drain::Parser parser(pcfg);
  d.events = drain::parse_corpus(parser, make_raw_logs(lines, labels));
  d.templates = parser.templates();
  d.split = seq::chronological_split(make_windows(d.events, scfg, tag, true), scfg.split);
  const auto tv = embed::embed_templates(d.templates, ecfg);
  d.train = make_dataset<Real>(d.split.train, ecfg, tv);
  d.test = make_dataset<Real>(d.split.test, ecfg, tv);
  return d;
}

}  // namespace logformer::pipeline
