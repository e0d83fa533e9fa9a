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

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <regex>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "json.hpp"
#include "logformer/drain.hpp"
#include "logformer/error.hpp"

namespace logformer::seq {

using drain::ParsedEvent;

/// A fixed-length run of events. Positions at or beyond true_length hold
/// padding events (template id -1, no params).
struct Window {
  std::vector<ParsedEvent> events;
  std::size_t true_length = 0;
  int label = 0;
  std::string domain_tag;

  std::uint64_t first_order() const { return events.front().order_index; }
  std::uint64_t last_order() const { return events[true_length - 1].order_index; }
};

/// 1 iff any real event is anomalous. In supervised mode an unlabeled event
/// is an error; otherwise it counts as normal.
inline int label_window(std::span<const ParsedEvent> events, bool supervised = true) {
  int label = 0;
  for (const auto& e : events) {
    if (e.is_padding()) continue;
    if (e.label == Label::kUnlabeled && supervised)
      throw DataError("unlabeled event at order_index " + std::to_string(e.order_index) +
                      " in supervised window");
    if (e.label == Label::kAnomalous) label = 1;
  }
  return label;
}

inline int label_window(const Window& w, bool supervised = true) {
  return label_window(std::span<const ParsedEvent>(w.events.data(), w.true_length), supervised);
}

namespace detail {

inline Window make_window(std::vector<ParsedEvent> events, std::size_t size,
                          const std::string& domain_tag, bool supervised) {
  Window w;
  w.true_length = events.size();
  w.domain_tag = domain_tag;
  w.events = std::move(events);
  w.label = label_window(w, supervised);
  const auto last = w.events.back().order_index;
  while (w.events.size() < size) {
    ParsedEvent pad;
    pad.label = Label::kNormal;
    pad.order_index = last;
    w.events.push_back(std::move(pad));
  }
  return w;
}

}  // namespace detail

/// Non-overlapping chunks of `size` events; the tail chunk is padded.
inline std::vector<Window> sliding_windows(std::span<const ParsedEvent> events, std::size_t size,
                                           const std::string& domain_tag = "",
                                           bool supervised = true) {
  if (size == 0) throw ConfigError("window size must be >= 1");
  std::vector<Window> out;
  for (std::size_t start = 0; start < events.size(); start += size) {
    const std::size_t n = std::min(size, events.size() - start);
    std::vector<ParsedEvent> chunk(events.begin() + static_cast<std::ptrdiff_t>(start),
                                   events.begin() + static_cast<std::ptrdiff_t>(start + n));
    out.push_back(detail::make_window(std::move(chunk), size, domain_tag, supervised));
  }
  return out;
}

struct SessionStats {
  std::size_t dropped_events = 0;     // events carrying no id
  std::size_t truncated_sessions = 0; // sessions longer than the window
};

/// Finds the session id among an event's params: the first capture group
/// when the regex has one, else the whole match.
inline std::optional<std::string> extract_id(const ParsedEvent& e, const std::regex& re) {
  std::optional<std::string> found;
  for (const auto& p : e.params) {
    std::smatch m;
    if (!std::regex_search(p, m, re)) continue;
    std::string id = m.size() > 1 && m[1].matched ? m[1].str() : m[0].str();
    if (found && *found != id)
      throw DataError("event at order_index " + std::to_string(e.order_index) +
                      " carries two session ids: " + *found + ", " + id);
    found = std::move(id);
  }
  return found;
}

/// Groups events by session id (ordered by first appearance), truncating
/// sessions to `size` events and padding shorter ones.
inline std::vector<Window> sessions_by_block_id(std::span<const ParsedEvent> events,
                                                const std::string& id_regex, std::size_t size,
                                                const std::string& domain_tag = "",
                                                SessionStats* stats = nullptr,
                                                bool supervised = true) {
  if (size == 0) throw ConfigError("window size must be >= 1");
  std::regex re;
  try {
    re = std::regex(id_regex, std::regex::ECMAScript);
  } catch (const std::regex_error& e) {
    throw ConfigError("invalid id regex '" + id_regex + "': " + e.what());
  }
  SessionStats local;
  std::unordered_map<std::string, std::size_t> index;
  std::vector<std::vector<ParsedEvent>> groups;
  for (const auto& e : events) {
    auto id = extract_id(e, re);
    if (!id) {
      ++local.dropped_events;
      continue;
    }
    auto [it, inserted] = index.emplace(*id, groups.size());
    if (inserted) groups.emplace_back();
    groups[it->second].push_back(e);
  }
  std::vector<Window> out;
  out.reserve(groups.size());
  for (auto& g : groups) {
    std::stable_sort(g.begin(), g.end(),
                     [](const auto& a, const auto& b) { return a.order_index < b.order_index; });
    if (g.size() > size) {
      ++local.truncated_sessions;
      g.resize(size);
    }
    out.push_back(detail::make_window(std::move(g), size, domain_tag, supervised));
  }
  if (stats) *stats = local;
  return out;
}

struct Split {
  std::vector<Window> train;
  std::vector<Window> test;
  bool degenerate = false;  // empty train or test side
};

/// Order-preserving split at floor(train_fraction * n).
inline Split chronological_split(std::vector<Window> windows, double train_fraction = 0.8) {
  if (windows.empty()) throw DataError("chronological_split: no windows");
  if (!(train_fraction >= 0.0 && train_fraction <= 1.0))
    throw ConfigError("split fraction must be in [0, 1]");
  const auto n_train =
      static_cast<std::size_t>(train_fraction * static_cast<double>(windows.size()) + 1e-9);
  Split s;
  s.train.assign(std::make_move_iterator(windows.begin()),
                 std::make_move_iterator(windows.begin() + static_cast<std::ptrdiff_t>(n_train)));
  s.test.assign(std::make_move_iterator(windows.begin() + static_cast<std::ptrdiff_t>(n_train)),
                std::make_move_iterator(windows.end()));
  s.degenerate = s.train.empty() || s.test.empty();
  return s;
}

// ---------------------------------------------------------------------------
// JSONL records: {domain_tag, label, true_length, event_refs}
// ---------------------------------------------------------------------------

inline nlohmann::json to_json(const Window& w) {
  std::vector<std::uint64_t> refs;
  refs.reserve(w.true_length);
  for (std::size_t i = 0; i < w.true_length; ++i) refs.push_back(w.events[i].order_index);
  return {{"domain_tag", w.domain_tag},
          {"label", w.label},
          {"true_length", w.true_length},
          {"event_refs", refs}};
}

inline void write_windows(std::ostream& out, std::span<const Window> windows) {
  for (const auto& w : windows) out << to_json(w).dump() << '\n';
}

/// Rebuilds windows from records, resolving event_refs against `events`.
inline std::vector<Window> read_windows(const std::string& path,
                                        std::span<const ParsedEvent> events, std::size_t size) {
  std::unordered_map<std::uint64_t, std::size_t> by_order;
  by_order.reserve(events.size());
  for (std::size_t i = 0; i < events.size(); ++i) by_order.emplace(events[i].order_index, i);
  std::vector<Window> out;
  drain::for_each_jsonl(path, [&](const nlohmann::json& j) {
    const auto refs = j.at("event_refs").get<std::vector<std::uint64_t>>();
    const auto true_length = j.at("true_length").get<std::size_t>();
    if (refs.empty() || refs.size() != true_length || true_length > size)
      throw DataError("window record in '" + path + "' has inconsistent true_length");
    std::vector<ParsedEvent> evs;
    evs.reserve(size);
    for (auto r : refs) {
      auto it = by_order.find(r);
      if (it == by_order.end())
        throw DataError("window in '" + path + "' refers to unknown event " + std::to_string(r));
      evs.push_back(events[it->second]);
    }
    Window w = detail::make_window(std::move(evs), size, j.at("domain_tag").get<std::string>(),
                                   /*supervised=*/false);
    w.label = j.at("label").get<int>();
    out.push_back(std::move(w));
  });
  return out;
}

}  // namespace logformer::seq
