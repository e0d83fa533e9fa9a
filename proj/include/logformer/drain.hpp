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

// Fixed-depth prefix-tree template miner (Drain).
//
// Lines are pre-masked token by token: a token that fully matches one of the
// configured patterns becomes the wildcard "<*>" and its text is captured.
// Masked token lists are routed by (token count, leading tokens) to a leaf
// holding candidate templates; the most similar candidate absorbs the line if
// its similarity reaches the threshold, otherwise a new template is created.

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <fstream>
#include <map>
#include <memory>
#include <ostream>
#include <regex>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "json.hpp"

#include "logformer/error.hpp"
#include "logformer/types.hpp"

namespace logformer::drain {

inline constexpr std::string_view kWildcard = "<*>";

struct RawLog {
  std::string line;
  std::uint64_t order_index = 0;
  Label label = Label::kUnlabeled;
};

struct Template {
  std::int64_t id = 0;
  std::vector<std::string> tokens;
  std::uint64_t occurrence_count = 0;

  std::size_t wildcard_count() const {
    return static_cast<std::size_t>(std::count(tokens.begin(), tokens.end(), kWildcard));
  }
};

/// Template id reserved for padding events appended to short windows.
inline constexpr std::int64_t kPadTemplateId = -1;

struct ParsedEvent {
  std::int64_t template_id = kPadTemplateId;
  std::vector<std::string> params;
  Label label = Label::kUnlabeled;
  std::uint64_t order_index = 0;

  bool is_padding() const noexcept { return template_id == kPadTemplateId; }
};

struct TokenizedLine {
  std::vector<std::string> tokens;    // masked view
  std::vector<std::string> raw;       // original whitespace tokens
  std::vector<std::string> captured;  // text replaced by pre-masking, left to right
};

/// Default masking rules: hex literals, HDFS block ids, absolute paths and
/// standalone decimal runs of at least two digits.
inline std::vector<std::string> default_mask_patterns() {
  return {
      R"(0[xX][0-9a-fA-F]+)",
      R"(blk_-?[0-9]+)",
      R"(/\S*)",
      R"([-+]?[0-9]{2,}(\.[0-9]+)?)",
  };
}

/// One ECMAScript regex per line; blank lines and '#' comments are skipped.
inline std::vector<std::string> read_pattern_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open regex file '" + path + "'");
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t'))
      line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    out.push_back(line.substr(first));
  }
  return out;
}

class Masker {
 public:
  explicit Masker(std::vector<std::string> patterns = default_mask_patterns())
      : sources_(std::move(patterns)) {
    compiled_.reserve(sources_.size());
    for (const auto& p : sources_) {
      try {
        compiled_.emplace_back(p, std::regex::ECMAScript | std::regex::optimize);
      } catch (const std::regex_error& e) {
        throw ConfigError("invalid masking regex '" + p + "': " + e.what());
      }
    }
  }

  const std::vector<std::string>& patterns() const noexcept { return sources_; }

  bool masks(const std::string& token) const {
    if (auto it = cache_.find(token); it != cache_.end()) return it->second;
    bool hit = false;
    for (const auto& re : compiled_) {
      if (std::regex_match(token, re)) {
        hit = true;
        break;
      }
    }
    if (cache_.size() < kCacheLimit) cache_.emplace(token, hit);
    return hit;
  }

  /// Splits on whitespace runs and masks tokens. An all-whitespace line
  /// yields an empty token list; callers treat that as a rejected event.
  TokenizedLine tokenize(std::string_view line) const {
    TokenizedLine out;
    std::size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
      const std::size_t start = i;
      while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
      if (i > start) {
        std::string tok(line.substr(start, i - start));
        if (masks(tok)) {
          out.tokens.emplace_back(kWildcard);
          out.captured.push_back(tok);
        } else {
          out.tokens.push_back(tok);
        }
        out.raw.push_back(std::move(tok));
      }
    }
    return out;
  }

 private:
  static constexpr std::size_t kCacheLimit = 1 << 18;
  std::vector<std::string> sources_;
  std::vector<std::regex> compiled_;
  mutable std::unordered_map<std::string, bool> cache_;
};

/// Fraction of positions where the template token equals the line token or
/// is a wildcard. Lengths must match.
inline double similarity(std::span<const std::string> tokens,
                         std::span<const std::string> template_tokens) {
  if (tokens.size() != template_tokens.size()) {
    throw RuntimeError("similarity: length mismatch " + std::to_string(tokens.size()) + " vs " +
                       std::to_string(template_tokens.size()));
  }
  if (tokens.empty()) return 1.0;
  std::size_t same = 0;
  for (std::size_t i = 0; i < tokens.size(); ++i)
    if (template_tokens[i] == kWildcard || template_tokens[i] == tokens[i]) ++same;
  return static_cast<double>(same) / static_cast<double>(tokens.size());
}

inline double similarity(std::span<const std::string> tokens, const Template& t) {
  return similarity(tokens, std::span<const std::string>(t.tokens));
}

struct ParserConfig {
  /// Tree depth counted Drain-style: root and length layers included, so
  /// depth - 2 leading tokens are used for routing.
  int depth = 4;
  double similarity_threshold = 0.4;
  int max_children = 100;
  std::vector<std::string> mask_patterns = default_mask_patterns();

  void validate() const {
    if (depth < 2) throw ConfigError("parser.depth must be >= 2");
    if (!(similarity_threshold > 0.0 && similarity_threshold <= 1.0))
      throw ConfigError("parser.similarity_threshold must be in (0, 1]");
    if (max_children < 2) throw ConfigError("parser.max_children must be >= 2");
  }
};

/// Substitutes params into the template's wildcard slots, left to right.
inline std::vector<std::string> reconstruct(const ParsedEvent& event,
                                            std::span<const Template> templates) {
  if (event.template_id < 0 || static_cast<std::size_t>(event.template_id) >= templates.size())
    throw DataError("reconstruct: unknown template id " + std::to_string(event.template_id));
  const auto& t = templates[static_cast<std::size_t>(event.template_id)];
  if (t.wildcard_count() != event.params.size()) {
    throw DataError("reconstruct: template " + std::to_string(t.id) + " has " +
                    std::to_string(t.wildcard_count()) + " slots but event carries " +
                    std::to_string(event.params.size()) + " params");
  }
  std::vector<std::string> out;
  out.reserve(t.tokens.size());
  std::size_t next = 0;
  for (const auto& tok : t.tokens) out.push_back(tok == kWildcard ? event.params[next++] : tok);
  return out;
}

class Parser {
 public:
  explicit Parser(ParserConfig cfg = {}) : cfg_(std::move(cfg)), masker_(cfg_.mask_patterns) {
    cfg_.validate();
  }

  const ParserConfig& config() const noexcept { return cfg_; }
  const std::vector<Template>& templates() const noexcept { return templates_; }
  const Masker& masker() const noexcept { return masker_; }

  TokenizedLine tokenize(std::string_view line) const { return masker_.tokenize(line); }

  /// Mines one line. Params are taken against the template as it stands
  /// after this line; later merges can add slots, so corpora should go
  /// through parse_corpus() which re-extracts against the final templates.
  ParsedEvent parse(const RawLog& raw) {
    auto tl = tokenize(raw.line);
    const auto id = learn(tl.tokens);
    return extract(id, tl, raw.label, raw.order_index);
  }

  /// Routes a masked token list, merging or creating a template; returns its id.
  std::int64_t learn(const std::vector<std::string>& tokens) {
    if (tokens.empty()) throw DataError("rejected event: line is empty after trimming");
    TreeNode& leaf = descend(tokens);
    const auto best = best_match(leaf, tokens);
    if (best.id >= 0 && best.score >= cfg_.similarity_threshold) {
      auto& t = templates_[static_cast<std::size_t>(best.id)];
      for (std::size_t i = 0; i < tokens.size(); ++i)
        if (t.tokens[i] != tokens[i]) t.tokens[i] = std::string(kWildcard);
      ++t.occurrence_count;
      return best.id;
    }
    const auto id = static_cast<std::int64_t>(templates_.size());
    templates_.push_back(Template{id, tokens, 1});
    leaf.templates.push_back(id);
    return id;
  }

  /// Read-only lookup: the template a line would merge into, or -1.
  std::int64_t match(const std::vector<std::string>& tokens) const {
    if (tokens.empty()) return -1;
    const TreeNode* leaf = find(tokens);
    if (leaf == nullptr) return -1;
    const auto best = best_match(*leaf, tokens);
    return best.score >= cfg_.similarity_threshold ? best.id : -1;
  }

  /// Builds the event for a line already assigned to `template_id`: params
  /// are the raw tokens at the template's wildcard positions.
  ParsedEvent extract(std::int64_t template_id, const TokenizedLine& tl, Label label,
                      std::uint64_t order_index) const {
    const auto& t = templates_.at(static_cast<std::size_t>(template_id));
    if (t.tokens.size() != tl.raw.size())
      throw DataError("extract: token count differs from template " + std::to_string(template_id));
    ParsedEvent ev;
    ev.template_id = template_id;
    ev.label = label;
    ev.order_index = order_index;
    for (std::size_t i = 0; i < t.tokens.size(); ++i)
      if (t.tokens[i] == kWildcard) ev.params.push_back(tl.raw[i]);
    return ev;
  }

  /// Seeds the tree with an exported template table (ids must be dense).
  void load_templates(const std::vector<Template>& table) {
    if (!templates_.empty()) throw RuntimeError("load_templates: parser already holds templates");
    for (std::size_t i = 0; i < table.size(); ++i) {
      if (table[i].id != static_cast<std::int64_t>(i))
        throw DataError("template table ids are not dense from 0");
      if (table[i].tokens.empty()) throw DataError("template " + std::to_string(i) + " is empty");
      TreeNode& leaf = descend(table[i].tokens);
      templates_.push_back(table[i]);
      leaf.templates.push_back(table[i].id);
    }
  }

 private:
  struct TreeNode {
    std::unordered_map<std::string, std::unique_ptr<TreeNode>> children;
    std::vector<std::int64_t> templates;
  };

  struct Best {
    std::int64_t id = -1;
    double score = -1.0;
  };

  static bool has_digit(const std::string& s) {
    return std::any_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); });
  }

  std::size_t prefix_levels(std::size_t length) const {
    return std::min(length, static_cast<std::size_t>(cfg_.depth - 2));
  }

  TreeNode& descend(const std::vector<std::string>& tokens) {
    auto& by_len = roots_[tokens.size()];
    if (!by_len) by_len = std::make_unique<TreeNode>();
    TreeNode* node = by_len.get();
    const std::string wild(kWildcard);
    const auto max_children = static_cast<std::size_t>(cfg_.max_children);
    for (std::size_t i = 0; i < prefix_levels(tokens.size()); ++i) {
      const std::string& tok = tokens[i];
      if (auto it = node->children.find(tok); it != node->children.end()) {
        node = it->second.get();
        continue;
      }
      std::string key = wild;
      if (!has_digit(tok)) {
        const bool has_wild = node->children.count(wild) > 0;
        // Keep one slot free for the wildcard child.
        const std::size_t room = has_wild ? max_children : max_children - 1;
        if (node->children.size() < room) key = tok;
      }
      auto& child = node->children[key];
      if (!child) child = std::make_unique<TreeNode>();
      node = child.get();
    }
    return *node;
  }

  const TreeNode* find(const std::vector<std::string>& tokens) const {
    auto it = roots_.find(tokens.size());
    if (it == roots_.end()) return nullptr;
    const TreeNode* node = it->second.get();
    const std::string wild(kWildcard);
    for (std::size_t i = 0; i < prefix_levels(tokens.size()); ++i) {
      auto c = node->children.find(tokens[i]);
      if (c == node->children.end()) c = node->children.find(wild);
      if (c == node->children.end()) return nullptr;
      node = c->second.get();
    }
    return node;
  }

  Best best_match(const TreeNode& leaf, const std::vector<std::string>& tokens) const {
    Best best;
    // Leaf ids are ascending, so strict '>' keeps the lowest id on ties.
    for (auto id : leaf.templates) {
      const double s = similarity(tokens, templates_[static_cast<std::size_t>(id)]);
      if (s > best.score) best = {id, s};
    }
    return best;
  }

  ParserConfig cfg_;
  Masker masker_;
  std::vector<Template> templates_;
  std::map<std::size_t, std::unique_ptr<TreeNode>> roots_;
};

/// Two passes: mine every line, then extract params against the final
/// templates so that reconstruct() round-trips for every event.
inline std::vector<ParsedEvent> parse_corpus(Parser& parser, const std::vector<RawLog>& logs) {
  std::vector<TokenizedLine> lines;
  std::vector<std::int64_t> ids;
  lines.reserve(logs.size());
  ids.reserve(logs.size());
  for (const auto& raw : logs) {
    lines.push_back(parser.tokenize(raw.line));
    if (lines.back().tokens.empty())
      throw DataError("rejected event at order_index " + std::to_string(raw.order_index) +
                      ": line is empty after trimming");
    ids.push_back(parser.learn(lines.back().tokens));
  }
  std::vector<ParsedEvent> events;
  events.reserve(logs.size());
  for (std::size_t i = 0; i < logs.size(); ++i)
    events.push_back(parser.extract(ids[i], lines[i], logs[i].label, logs[i].order_index));
  return events;
}

// ---------------------------------------------------------------------------
// JSONL I/O
// ---------------------------------------------------------------------------

inline nlohmann::json to_json(const Template& t) {
  return {{"id", t.id}, {"tokens", t.tokens}, {"occurrence_count", t.occurrence_count}};
}

inline nlohmann::json to_json(const ParsedEvent& e) {
  return {{"template_id", e.template_id},
          {"params", e.params},
          {"label", std::string(to_string(e.label))},
          {"order_index", e.order_index}};
}

inline void write_templates(std::ostream& out, std::span<const Template> templates) {
  for (const auto& t : templates) out << to_json(t).dump() << '\n';
}

inline void write_events(std::ostream& out, std::span<const ParsedEvent> events) {
  for (const auto& e : events) out << to_json(e).dump() << '\n';
}

template <class F>
void for_each_jsonl(const std::string& path, F&& f) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      f(nlohmann::json::parse(line));
    } catch (const nlohmann::json::exception& e) {
      throw DataError(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
}

inline std::vector<Template> read_templates(const std::string& path) {
  std::vector<Template> out;
  for_each_jsonl(path, [&](const nlohmann::json& j) {
    out.push_back(Template{j.at("id").get<std::int64_t>(),
                           j.at("tokens").get<std::vector<std::string>>(),
                           j.at("occurrence_count").get<std::uint64_t>()});
  });
  for (std::size_t i = 0; i < out.size(); ++i)
    if (out[i].id != static_cast<std::int64_t>(i))
      throw DataError("template table '" + path + "' ids are not dense from 0");
  return out;
}

inline std::vector<ParsedEvent> read_events(const std::string& path) {
  std::vector<ParsedEvent> out;
  for_each_jsonl(path, [&](const nlohmann::json& j) {
    ParsedEvent e;
    e.template_id = j.at("template_id").get<std::int64_t>();
    e.params = j.at("params").get<std::vector<std::string>>();
    e.label = label_from_string(j.at("label").get<std::string>());
    e.order_index = j.at("order_index").get<std::uint64_t>();
    out.push_back(std::move(e));
  });
  return out;
}

}  // namespace logformer::drain
