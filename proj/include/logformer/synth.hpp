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

// Seeded multi-domain synthetic log corpora.
//
// A domain is a set of message skeletons grouped by role (session start,
// ordinary work, warnings, normal completion and the anomalous realizations
// of each anomaly type) written in a domain-private pseudo-word vocabulary.
// Only severity keywords are shared across domains, so two domains express
// the same anomaly semantics with disjoint content tokens. Every variable
// slot renders to a value the default masking rules capture, which keeps the
// mined template set equal to the skeleton set.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "logformer/error.hpp"
#include "logformer/rng.hpp"
#include "logformer/types.hpp"

namespace logformer::synth {

enum class AnomalyType { kUnusualEnd, kNotRunning, kErrorBurst };

inline std::string to_string(AnomalyType t) {
  switch (t) {
    case AnomalyType::kUnusualEnd:
      return "unusual_end_of_program";
    case AnomalyType::kNotRunning:
      return "program_not_running";
    case AnomalyType::kErrorBurst:
      return "error_burst";
  }
  return "";
}

inline AnomalyType anomaly_type_from_string(const std::string& s) {
  if (s == "unusual_end_of_program") return AnomalyType::kUnusualEnd;
  if (s == "program_not_running") return AnomalyType::kNotRunning;
  if (s == "error_burst") return AnomalyType::kErrorBurst;
  throw ConfigError("unknown anomaly type '" + s + "'");
}

inline std::vector<AnomalyType> all_anomaly_types() {
  return {AnomalyType::kUnusualEnd, AnomalyType::kNotRunning, AnomalyType::kErrorBurst};
}

enum class Role { kStart, kWork, kWarn, kEnd, kAbort, kDead, kError };

inline bool is_anomalous(Role r) {
  return r == Role::kAbort || r == Role::kDead || r == Role::kError;
}

/// Slot markers inside skeleton tokens.
inline constexpr const char* kSlotSession = "{sid}";
inline constexpr const char* kSlotNumber = "{num}";
inline constexpr const char* kSlotHex = "{hex}";
inline constexpr const char* kSlotPath = "{path}";
inline constexpr const char* kSlotCode = "{code}";

inline bool is_slot(const std::string& tok) { return tok.size() > 2 && tok.front() == '{'; }

struct Skeleton {
  Role role = Role::kWork;
  std::vector<std::string> tokens;
};

struct DomainSpec {
  std::string name;
  std::vector<Skeleton> skeletons;
  std::vector<AnomalyType> anomaly_types;
  double anomaly_rate = 0.05;
  std::vector<std::string> vocabulary;
  /// Anomalies change only the exit-code parameter of the completion event;
  /// templates are identical between normal and anomalous sessions.
  bool anomaly_in_params = false;
  bool session_ids = true;
  double mean_session_length = 12.0;
  std::size_t max_session_length = 40;
  std::size_t burst_length = 3;
  double warn_probability = 0.05;

  void validate() const {
    if (skeletons.empty()) throw ConfigError("domain '" + name + "' has no templates");
    if (!(anomaly_rate >= 0.0 && anomaly_rate < 1.0))
      throw ConfigError("anomaly_rate must be in [0, 1)");
    auto has = [&](Role r) {
      return std::any_of(skeletons.begin(), skeletons.end(),
                         [r](const Skeleton& s) { return s.role == r; });
    };
    for (Role r : {Role::kStart, Role::kWork, Role::kEnd})
      if (!has(r)) throw ConfigError("domain '" + name + "' lacks a required template role");
    for (auto t : anomaly_types) {
      const bool ok = anomaly_in_params ||
                      (t == AnomalyType::kUnusualEnd && has(Role::kAbort)) ||
                      (t == AnomalyType::kNotRunning && has(Role::kDead)) ||
                      (t == AnomalyType::kErrorBurst && has(Role::kError));
      if (!ok) throw ConfigError("domain '" + name + "' cannot realize " + to_string(t));
    }
    if (mean_session_length < 3.0 || max_session_length < 3)
      throw ConfigError("sessions must allow at least three events");
  }

  std::vector<std::size_t> of_role(Role r) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < skeletons.size(); ++i)
      if (skeletons[i].role == r) out.push_back(i);
    return out;
  }
};

/// Severity keywords are the only tokens domains share.
inline const std::set<std::string>& structural_tokens() {
  static const std::set<std::string> s{"INFO", "WARN", "ERROR", "FATAL"};
  return s;
}

/// Constant skeleton tokens excluding shared structural keywords.
inline std::set<std::string> content_tokens(const DomainSpec& spec) {
  std::set<std::string> out;
  for (const auto& sk : spec.skeletons)
    for (const auto& t : sk.tokens)
      if (!is_slot(t) && !structural_tokens().count(t)) out.insert(t);
  return out;
}

namespace detail {

inline std::string pseudo_word(Rng& rng) {
  static const char* kOnsets[] = {"b", "d", "f", "g", "k", "l", "m", "n", "p", "r",
                                  "s", "t", "v", "z", "br", "dr", "st", "tr", "pl", "sk"};
  static const char* kVowels[] = {"a", "e", "i", "o", "u", "ai", "ou", "ea"};
  static const char* kCodas[] = {"", "", "", "n", "r", "s", "l", "x", "m"};
  std::string w;
  const auto syllables = 2 + rng.below(2);
  for (std::uint64_t i = 0; i < syllables; ++i) {
    w += kOnsets[rng.below(std::size(kOnsets))];
    w += kVowels[rng.below(std::size(kVowels))];
  }
  w += kCodas[rng.below(std::size(kCodas))];
  return w;
}

class Lexicon {
 public:
  Lexicon(std::uint64_t seed, const std::set<std::string>& exclude)
      : rng_(seed), taken_(exclude) {}

  std::string fresh() {
    for (;;) {
      auto w = pseudo_word(rng_);
      if (taken_.insert(w).second) {
        used_.push_back(w);
        return w;
      }
    }
  }

  const std::vector<std::string>& used() const { return used_; }
  Rng& rng() { return rng_; }

 private:
  Rng rng_;
  std::set<std::string> taken_;
  std::vector<std::string> used_;
};

inline const char* severity(Role r) {
  switch (r) {
    case Role::kWarn:
      return "WARN";
    case Role::kAbort:
      return "FATAL";
    case Role::kDead:
    case Role::kError:
      return "ERROR";
    default:
      return "INFO";
  }
}

/// [severity, unique component word + ':', words and slots...]. The unique
/// second token gives every skeleton its own parse-tree leaf.
inline Skeleton make_skeleton(Role role, Lexicon& lex, bool session_ids,
                              std::optional<std::vector<std::string>> fixed = std::nullopt) {
  Skeleton s;
  s.role = role;
  s.tokens.push_back(severity(role));
  s.tokens.push_back(lex.fresh() + ":");
  auto& rng = lex.rng();
  const auto words = 2 + rng.below(3);
  std::vector<std::string> body;
  for (std::uint64_t i = 0; i < words; ++i) body.push_back(lex.fresh());
  std::vector<std::string> fixed_slots;
  if (fixed) {
    fixed_slots = *fixed;
  } else {
    static const char* kSlots[] = {kSlotNumber, kSlotHex, kSlotPath};
    const auto slots = 1 + rng.below(2);
    for (std::uint64_t i = 0; i < slots; ++i) fixed_slots.emplace_back(kSlots[rng.below(3)]);
  }
  // Interleave slots after random body words.
  for (auto& slot : fixed_slots) {
    const auto pos = 1 + rng.below(body.size());
    body.insert(body.begin() + static_cast<std::ptrdiff_t>(pos), slot);
  }
  if (session_ids) body.insert(body.begin() + 1, kSlotSession);
  s.tokens.insert(s.tokens.end(), body.begin(), body.end());
  return s;
}

}  // namespace detail

struct RoleCounts {
  std::size_t start = 2, work = 8, warn = 2, end = 2, abort = 3, dead = 3, error = 3;

  /// Wider template and error variety, used for pre-training sources.
  static RoleCounts rich() { return {3, 16, 3, 3, 10, 10, 10}; }
};

/// Builds a domain whose words avoid `exclude`.
inline DomainSpec make_domain(const std::string& name, std::vector<AnomalyType> types,
                              std::uint64_t seed, const std::set<std::string>& exclude = {},
                              RoleCounts counts = {}) {
  if (types.empty()) throw ConfigError("a domain needs at least one anomaly type");
  detail::Lexicon lex(derive_seed(seed, "lexicon:" + name), exclude);
  DomainSpec d;
  d.name = name;
  d.anomaly_types = std::move(types);
  auto add = [&](Role r, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) d.skeletons.push_back(detail::make_skeleton(r, lex, true));
  };
  auto wants = [&](AnomalyType t) {
    return std::find(d.anomaly_types.begin(), d.anomaly_types.end(), t) != d.anomaly_types.end();
  };
  add(Role::kStart, counts.start);
  add(Role::kWork, counts.work);
  add(Role::kWarn, counts.warn);
  add(Role::kEnd, counts.end);
  if (wants(AnomalyType::kUnusualEnd)) add(Role::kAbort, counts.abort);
  if (wants(AnomalyType::kNotRunning)) add(Role::kDead, counts.dead);
  if (wants(AnomalyType::kErrorBurst)) add(Role::kError, counts.error);
  d.vocabulary = lex.used();
  d.validate();
  return d;
}

/// Two domains sharing anomaly semantics with disjoint content vocabularies.
/// The source gets the richer template inventory by default.
inline std::pair<DomainSpec, DomainSpec> paired_domains(const std::vector<AnomalyType>& shared,
                                                        std::uint64_t seed_a,
                                                        std::uint64_t seed_b,
                                                        RoleCounts source_counts = RoleCounts::rich(),
                                                        RoleCounts target_counts = {}) {
  if (shared.empty()) throw ConfigError("paired_domains: shared anomaly types must be non-empty");
  auto a = make_domain("source", shared, seed_a, {}, source_counts);
  std::set<std::string> taken(a.vocabulary.begin(), a.vocabulary.end());
  auto b = make_domain("target", shared, seed_b, taken, target_counts);
  return {std::move(a), std::move(b)};
}

/// Single domain whose anomalies live only in a parameter: every session
/// ends with the same completion template carrying an exit status, where a
/// signal status (128 + signal) marks an abnormal exit and "00" a clean one.
/// Work events carry no parameters. Lines carry no session ids; windows are
/// cut by sliding.
inline DomainSpec parameter_domain(std::uint64_t seed) {
  detail::Lexicon lex(derive_seed(seed, "lexicon:params"), {});
  DomainSpec d;
  d.name = "params";
  d.anomaly_types = {AnomalyType::kUnusualEnd};
  d.anomaly_in_params = true;
  d.session_ids = false;
  d.anomaly_rate = 0.015;
  d.warn_probability = 0.0;
  for (int i = 0; i < 2; ++i)
    d.skeletons.push_back(
        detail::make_skeleton(Role::kStart, lex, false, std::vector<std::string>{kSlotPath}));
  for (int i = 0; i < 6; ++i)
    d.skeletons.push_back(detail::make_skeleton(Role::kWork, lex, false, std::vector<std::string>{}));
  d.skeletons.push_back(
      detail::make_skeleton(Role::kEnd, lex, false, std::vector<std::string>{kSlotCode}));
  d.vocabulary = lex.used();
  d.validate();
  return d;
}

struct GeneratedCorpus {
  std::vector<std::string> lines;
  std::vector<Label> labels;
  std::vector<std::size_t> template_ids;  // generating skeleton index (hidden oracle)
  std::vector<std::uint64_t> sessions;

  std::size_t size() const { return lines.size(); }
  double anomaly_fraction() const {
    if (labels.empty()) return 0.0;
    const auto n = std::count(labels.begin(), labels.end(), Label::kAnomalous);
    return static_cast<double>(n) / static_cast<double>(labels.size());
  }
};

namespace detail {

inline std::string render_slot(const std::string& slot, Rng& rng, const DomainSpec& spec,
                               const std::string& sid, bool abnormal) {
  if (slot == kSlotSession) return sid;
  if (slot == kSlotNumber) {
    const auto digits = 2 + rng.below(5);
    std::string s(1, static_cast<char>('1' + rng.below(9)));
    for (std::uint64_t i = 1; i < digits; ++i) s += static_cast<char>('0' + rng.below(10));
    return s;
  }
  if (slot == kSlotHex) {
    static const char* kHex = "0123456789abcdef";
    std::string s = "0x";
    const auto digits = 4 + rng.below(5);
    for (std::uint64_t i = 0; i < digits; ++i) s += kHex[rng.below(16)];
    return s;
  }
  if (slot == kSlotPath) {
    std::string s;
    const auto parts = 1 + rng.below(3);
    for (std::uint64_t i = 0; i < parts; ++i)
      s += "/" + spec.vocabulary[rng.below(spec.vocabulary.size())];
    return s;
  }
  if (slot == kSlotCode) {
    // Shell-style statuses: 128 + signal number for abnormal exits.
    static const char* kSignals[] = {"134", "137", "139", "143"};
    return abnormal ? std::string(kSignals[rng.below(4)]) : std::string("00");
  }
  throw ConfigError("unknown slot '" + slot + "'");
}

/// Picks from `pool` with Zipf-like weights 1/(rank+1).
inline std::size_t pick_weighted(const std::vector<std::size_t>& pool, Rng& rng) {
  double total = 0;
  for (std::size_t i = 0; i < pool.size(); ++i) total += 1.0 / static_cast<double>(i + 1);
  double u = rng.uniform() * total;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    u -= 1.0 / static_cast<double>(i + 1);
    if (u < 0) return pool[i];
  }
  return pool.back();
}

}  // namespace detail

/// Deterministic stream of exactly n_messages lines. Sessions have
/// geometric length (mean spec.mean_session_length, capped). A session is
/// made anomalous when the running anomalous-line fraction would otherwise
/// fall behind spec.anomaly_rate, with the anomaly type drawn uniformly.
inline GeneratedCorpus generate(const DomainSpec& spec, std::size_t n_messages,
                                std::uint64_t seed) {
  spec.validate();
  if (n_messages == 0) throw ConfigError("generate: n_messages must be >= 1");
  Rng rng(derive_seed(seed, "corpus:" + spec.name));
  const auto starts = spec.of_role(Role::kStart);
  const auto works = spec.of_role(Role::kWork);
  const auto warns = spec.of_role(Role::kWarn);
  const auto ends = spec.of_role(Role::kEnd);
  const auto aborts = spec.of_role(Role::kAbort);
  const auto deads = spec.of_role(Role::kDead);
  const auto errors = spec.of_role(Role::kError);

  GeneratedCorpus out;
  out.lines.reserve(n_messages);
  std::size_t anomalous_lines = 0;
  const double p_continue = 1.0 - 1.0 / (spec.mean_session_length - 1.0);
  for (std::uint64_t session = 0; out.lines.size() < n_messages; ++session) {
    // Length >= 3: start, at least one body event, end.
    std::size_t len = 2;
    do {
      ++len;
    } while (len < spec.max_session_length && rng.bernoulli(p_continue));

    struct Event {
      std::size_t skeleton;
      bool anomalous = false;
    };
    std::vector<Event> evs;
    evs.push_back({starts[rng.below(starts.size())]});
    for (std::size_t i = 0; i + 2 < len; ++i) {
      if (!warns.empty() && rng.bernoulli(spec.warn_probability))
        evs.push_back({warns[rng.below(warns.size())]});
      else
        evs.push_back({detail::pick_weighted(works, rng)});
    }
    evs.push_back({ends[rng.below(ends.size())]});

    const double type_u = rng.uniform();
    const auto type = spec.anomaly_types.empty()
                          ? AnomalyType::kUnusualEnd
                          : spec.anomaly_types[static_cast<std::size_t>(
                                type_u * static_cast<double>(spec.anomaly_types.size()))];
    std::size_t added = type == AnomalyType::kErrorBurst && !spec.anomaly_in_params
                            ? spec.burst_length
                            : 1;
    const double target =
        spec.anomaly_rate * static_cast<double>(out.lines.size() + evs.size());
    const bool inject = spec.anomaly_rate > 0 && !spec.anomaly_types.empty() &&
                        static_cast<double>(anomalous_lines + added) <= target + 0.5 * added &&
                        rng.bernoulli(0.9);
    if (inject) {
      if (spec.anomaly_in_params) {
        evs.back().anomalous = true;
      } else if (type == AnomalyType::kUnusualEnd) {
        evs.back() = {aborts[rng.below(aborts.size())], true};
      } else if (type == AnomalyType::kNotRunning) {
        const auto pos = 1 + rng.below(evs.size() - 2);
        evs[pos] = {deads[rng.below(deads.size())], true};
      } else {
        while (evs.size() < spec.burst_length + 2)
          evs.insert(evs.end() - 1, Event{detail::pick_weighted(works, rng)});
        const auto pos = 1 + rng.below(evs.size() - 1 - spec.burst_length);
        for (std::size_t k = 0; k < spec.burst_length; ++k)
          evs[pos + k] = {errors[rng.below(errors.size())], true};
      }
    }

    const std::string sid =
        "blk_" + std::string(rng.bernoulli(0.5) ? "-" : "") +
        std::to_string(1000000 + session * 1000 + rng.below(1000));
    for (const auto& ev : evs) {
      if (out.lines.size() == n_messages) break;
      const auto& sk = spec.skeletons[ev.skeleton];
      std::string line;
      for (const auto& tok : sk.tokens) {
        if (!line.empty()) line += ' ';
        line += is_slot(tok) ? detail::render_slot(tok, rng, spec, sid, ev.anomalous) : tok;
      }
      out.lines.push_back(std::move(line));
      out.labels.push_back(ev.anomalous ? Label::kAnomalous : Label::kNormal);
      out.template_ids.push_back(ev.skeleton);
      out.sessions.push_back(session);
      if (ev.anomalous) ++anomalous_lines;
    }
  }
  return out;
}

/// Writes <prefix>.log, <prefix>.labels (BGL-style tags) and
/// <prefix>.oracle.jsonl (generating skeleton and session per line).
inline void write_corpus(const GeneratedCorpus& c, const std::string& prefix) {
  std::ofstream log(prefix + ".log"), labels(prefix + ".labels"), oracle(prefix + ".oracle.jsonl");
  if (!log || !labels || !oracle) throw RuntimeError("cannot write corpus files at '" + prefix + "'");
  for (std::size_t i = 0; i < c.size(); ++i) {
    log << c.lines[i] << '\n';
    labels << (c.labels[i] == Label::kAnomalous ? "ALERT" : "-") << '\n';
    nlohmann::json j = {{"line_no", i + 1},
                        {"template", c.template_ids[i]},
                        {"session", c.sessions[i]},
                        {"label", std::string(logformer::to_string(c.labels[i]))}};
    oracle << j.dump() << '\n';
  }
}

}  // namespace logformer::synth
