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

// logformer: command-line front end for the whole pipeline.
//
// Stage directories hold the files one command produces for the next:
//   templates.jsonl, events.jsonl        (parse)
//   windows.train.jsonl, windows.test.jsonl  (windows)
//   embeddings.tsv                       (embed)

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "logformer/checkpoint.hpp"
#include "logformer/config.hpp"
#include "logformer/drain.hpp"
#include "logformer/embedder.hpp"
#include "logformer/error.hpp"
#include "logformer/evaluator.hpp"
#include "logformer/pipeline.hpp"
#include "logformer/sequencer.hpp"
#include "logformer/synth.hpp"
#include "logformer/trainer.hpp"

namespace fs = std::filesystem;
using namespace logformer;

namespace {

struct Common {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string precision;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config_path, "Pipeline config (JSON); defaults apply when omitted")
      ->check(CLI::ExistingFile);
  cmd->add_option("--seed", c.seed, "Root seed (overrides LOGFORMER_SEED and the config)");
  cmd->add_option("--precision", c.precision,
                  "double or single (overrides LOGFORMER_PRECISION and the config)");
}

std::uint64_t parse_seed(const std::string& s, const char* what) {
  std::uint64_t v = 0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size())
    throw ConfigError(std::string(what) + " must be a non-negative integer, got '" + s + "'");
  return v;
}

/// Config file, then environment, then flags.
config::PipelineConfig resolve(const Common& c) {
  auto cfg = c.config_path.empty() ? config::PipelineConfig{} : config::load(c.config_path);
  if (const char* s = std::getenv("LOGFORMER_SEED"); s && *s) cfg.seed = parse_seed(s, "LOGFORMER_SEED");
  if (const char* p = std::getenv("LOGFORMER_PRECISION"); p && *p)
    cfg.precision = config::precision_from_string(p);
  if (c.seed) cfg.seed = *c.seed;
  if (!c.precision.empty()) cfg.precision = config::precision_from_string(c.precision);
  cfg.validate();
  return cfg;
}

std::string stage_file(const std::string& dir, const char* name) { return (fs::path(dir) / name).string(); }

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw RuntimeError("cannot create directory '" + dir + "': " + ec.message());
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw RuntimeError("cannot write '" + path + "'");
  return out;
}

std::string fmt(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, r.ptr);
}

void write_embeddings(const std::string& path, const embed::TemplateVectors& tv, std::size_t d) {
  auto out = open_out(path);
  out << "d=" << d << '\n';
  for (std::size_t i = 0; i < tv.size(); ++i) {
    out << i << '\t';
    for (std::size_t k = 0; k < tv[i].size(); ++k) out << (k ? "," : "") << fmt(tv[i][k]);
    out << '\n';
  }
}

// ---------------------------------------------------------------------------
// Commands that do not touch the model
// ---------------------------------------------------------------------------

struct SynthArgs {
  std::string domain = "source";
  std::size_t messages = 20000;
  std::string out;
  std::uint64_t source_spec_seed = 11;
  std::uint64_t target_spec_seed = 22;
  std::optional<double> anomaly_rate;
};

int run_synth(const Common& common, const SynthArgs& a) {
  const auto cfg = resolve(common);
  synth::DomainSpec spec;
  if (a.domain == "params") {
    spec = synth::parameter_domain(a.source_spec_seed);
  } else {
    auto [src, tgt] = synth::paired_domains(synth::all_anomaly_types(), a.source_spec_seed,
                                            a.target_spec_seed);
    if (a.domain == "source") spec = std::move(src);
    else if (a.domain == "target") spec = std::move(tgt);
    else throw ConfigError("--domain must be source, target or params");
  }
  if (a.anomaly_rate) spec.anomaly_rate = *a.anomaly_rate;
  const auto corpus = synth::generate(spec, a.messages, derive_seed(cfg.seed, "synth:" + a.domain));
  const auto parent = fs::path(a.out).parent_path();
  if (!parent.empty()) ensure_dir(parent.string());
  synth::write_corpus(corpus, a.out);
  std::cout << "wrote " << corpus.size() << " lines (" << fmt(corpus.anomaly_fraction())
            << " anomalous) to " << a.out << ".log\n";
  return 0;
}

struct ParseArgs {
  std::string log;
  std::string labels;
  std::string out_dir;
  std::string regex_file;
  std::optional<std::size_t> depth;
  std::optional<double> sim_threshold;
  std::optional<std::size_t> max_children;
};

int run_parse(const Common& common, const ParseArgs& a) {
  auto cfg = resolve(common);
  if (!a.regex_file.empty()) cfg.parser.mask_patterns = drain::read_pattern_file(a.regex_file);
  if (a.depth) cfg.parser.depth = *a.depth;
  if (a.sim_threshold) cfg.parser.similarity_threshold = *a.sim_threshold;
  if (a.max_children) cfg.parser.max_children = *a.max_children;
  cfg.validate();
  const auto lines = pipeline::read_lines(a.log);
  const auto labels = a.labels.empty() ? std::vector<Label>{} : pipeline::read_labels(a.labels, lines.size());
  drain::Parser parser(cfg.parser);
  const auto events = drain::parse_corpus(parser, pipeline::make_raw_logs(lines, labels));
  ensure_dir(a.out_dir);
  auto t = open_out(stage_file(a.out_dir, "templates.jsonl"));
  drain::write_templates(t, parser.templates());
  auto e = open_out(stage_file(a.out_dir, "events.jsonl"));
  drain::write_events(e, events);
  std::cout << "parsed " << events.size() << " events into " << parser.templates().size()
            << " templates\n";
  return 0;
}

struct WindowArgs {
  std::string data;
  std::string tag;
  std::optional<std::size_t> window_size;
  std::string mode;
  std::string id_regex;
  std::optional<double> split;
};

int run_windows(const Common& common, const WindowArgs& a) {
  auto cfg = resolve(common);
  if (a.window_size) cfg.sequencer.window_size = *a.window_size;
  if (!a.mode.empty()) cfg.sequencer.mode = pipeline::window_mode_from_string(a.mode);
  if (!a.id_regex.empty()) cfg.sequencer.id_regex = a.id_regex;
  if (a.split) cfg.sequencer.split = *a.split;
  cfg.validate();
  const auto events = drain::read_events(stage_file(a.data, "events.jsonl"));
  seq::SessionStats stats;
  auto windows = pipeline::make_windows(events, cfg.sequencer, a.tag.empty() ? a.data : a.tag,
                                        /*supervised=*/false, &stats);
  if (windows.empty()) throw DataError("no windows could be formed from '" + a.data + "'");
  const auto split = seq::chronological_split(std::move(windows), cfg.sequencer.split);
  if (split.degenerate) std::cerr << "warning: degenerate split (one side is empty)\n";
  if (stats.dropped_events)
    std::cerr << "warning: dropped " << stats.dropped_events << " events without a session id\n";
  if (stats.truncated_sessions)
    std::cerr << "warning: truncated " << stats.truncated_sessions << " sessions to "
              << cfg.sequencer.window_size << " events\n";
  auto tr = open_out(stage_file(a.data, "windows.train.jsonl"));
  seq::write_windows(tr, split.train);
  auto te = open_out(stage_file(a.data, "windows.test.jsonl"));
  seq::write_windows(te, split.test);
  std::cout << "windows: " << split.train.size() << " train, " << split.test.size() << " test\n";
  return 0;
}

struct EmbedArgs {
  std::string data;
  std::string import_file;
};

int run_embed(const Common& common, const EmbedArgs& a) {
  const auto cfg = resolve(common);
  const auto table = drain::read_templates(stage_file(a.data, "templates.jsonl"));
  std::string source = a.import_file;
  if (source.empty() && cfg.embedder.mode == embed::Mode::kImportFile) source = cfg.embedder.import_file;
  const auto tv = source.empty() ? embed::embed_templates(table, cfg.embedder_config())
                                 : embed::import_embeddings(source, table, cfg.embedder.d);
  write_embeddings(stage_file(a.data, "embeddings.tsv"), tv, cfg.embedder.d);
  std::cout << "embedded " << tv.size() << " templates (d=" << cfg.embedder.d << ")\n";
  return 0;
}

// ---------------------------------------------------------------------------
// Model commands, instantiated per precision
// ---------------------------------------------------------------------------

struct StageData {
  std::vector<drain::Template> templates;
  std::vector<drain::ParsedEvent> events;
  embed::TemplateVectors vectors;
};

StageData load_stage(const std::string& dir, const config::PipelineConfig& cfg) {
  StageData s;
  s.templates = drain::read_templates(stage_file(dir, "templates.jsonl"));
  s.events = drain::read_events(stage_file(dir, "events.jsonl"));
  s.vectors = embed::import_embeddings(stage_file(dir, "embeddings.tsv"), s.templates, cfg.embedder.d);
  return s;
}

template <class Real>
train::Dataset<Real> load_split(const StageData& s, const std::string& dir, const char* split,
                                const config::PipelineConfig& cfg) {
  const auto windows =
      seq::read_windows(stage_file(dir, split), s.events, cfg.sequencer.window_size);
  return pipeline::make_dataset<Real>(windows, cfg.embedder_config(), s.vectors);
}

ckpt::Meta make_meta(const config::PipelineConfig& cfg) {
  return {config::fingerprint(cfg), config::model_fingerprint(cfg), cfg.seed, cfg.model_config().to_json()};
}

template <class Real>
ckpt::Checkpoint<Real> load_checked(const std::string& path, const config::PipelineConfig& cfg) {
  auto ck = ckpt::load<Real>(path);
  if (ck.meta.model_fingerprint != config::model_fingerprint(cfg))
    throw ConfigError("checkpoint '" + path +
                      "' was produced under a different model configuration (fingerprint mismatch)");
  return ck;
}

void write_runlog(const std::string& path, const train::RunLog& log) {
  auto out = open_out(path);
  train::write_runlog_csv(out, log);
}

struct TrainArgs {
  std::string data;
  std::string out;
  std::string runlog;
  std::string checkpoint;     // adapt only
  std::string mode = "adapter";  // adapt only
  std::optional<std::size_t> epochs;
  std::optional<double> max_lr;
  bool no_eval = false;
};

enum class TrainKind { kPretrain, kAdapt, kScratch };

template <class Real>
int run_train(const config::PipelineConfig& cfg0, const TrainArgs& a, TrainKind kind) {
  auto cfg = cfg0;
  auto train_stage = config::TrainStage::kPretrain;
  train::AdaptMode mode = train::AdaptMode::kAdapter;
  if (kind == TrainKind::kAdapt) {
    if (a.mode == "adapter") {
      train_stage = config::TrainStage::kAdapter;
    } else if (a.mode == "full") {
      train_stage = config::TrainStage::kFullTune;
      mode = train::AdaptMode::kFullTune;
    } else {
      throw ConfigError("--mode must be adapter or full");
    }
  }
  if (a.epochs) cfg.train.base.epochs = *a.epochs;
  if (a.max_lr)
    (train_stage == config::TrainStage::kAdapter ? cfg.train.adapt_max_lr : cfg.train.base.max_lr) = *a.max_lr;
  cfg.validate();
  const auto mcfg = cfg.model_config();
  const auto tcfg = cfg.train_config(train_stage);
  const auto stage = load_stage(a.data, cfg);
  const auto train_set = load_split<Real>(stage, a.data, "windows.train.jsonl", cfg);
  std::optional<train::Dataset<Real>> test;
  if (!a.no_eval) {
    test = load_split<Real>(stage, a.data, "windows.test.jsonl", cfg);
    if (test->empty()) test.reset();
  }
  const train::Dataset<Real>* held_out = test ? &*test : nullptr;
  train::TrainResult<Real> r;
  if (kind == TrainKind::kAdapt) {
    if (a.checkpoint.empty()) throw ConfigError("adapt requires --checkpoint");
    const auto ck = load_checked<Real>(a.checkpoint, cfg);
    r = train::adapt(ck.params, train_set, held_out, mcfg, tcfg, mode);
  } else {
    r = train::pretrain(train_set, held_out, mcfg, tcfg);
  }
  ckpt::save(r.params, make_meta(cfg), a.out);
  write_runlog(a.runlog.empty() ? a.out + ".runlog.csv" : a.runlog, r.log);
  std::cout << "trained " << r.log.steps.size() << " steps, "
            << model::count_params(r.params, true) << " trainable of "
            << model::count_params(r.params, false) << " parameters";
  if (auto ev = r.log.last_eval()) std::cout << "; held-out F1 " << fmt(ev->f1);
  std::cout << "\n";
  return 0;
}

struct EvalArgs {
  std::string checkpoint;
  std::string data;
  std::string split = "test";
  std::string report_dir;
  std::string runlog;
};

template <class Real>
int run_eval(const config::PipelineConfig& cfg, const EvalArgs& a) {
  const auto ck = load_checked<Real>(a.checkpoint, cfg);
  const auto stage = load_stage(a.data, cfg);
  if (a.split != "test" && a.split != "train") throw ConfigError("--split must be test or train");
  const auto ds = load_split<Real>(stage, a.data,
                                   a.split == "test" ? "windows.test.jsonl" : "windows.train.jsonl", cfg);
  const auto ev = train::evaluate(ck.params, cfg.model_config(), ds, cfg.eval_threshold);
  eval::Report rep;
  rep.counts = ev.counts;
  rep.metrics = ev.metrics;
  rep.config_fingerprint = config::fingerprint(cfg);
  rep.seed = cfg.seed;
  rep.threshold = cfg.eval_threshold;
  if (!a.runlog.empty()) {
    std::ifstream in(a.runlog);
    if (!in) throw DataError("cannot open run log '" + a.runlog + "'");
    rep.curves = train::read_runlog_csv(in);
  }
  eval::emit_report(rep, a.report_dir);
  std::cout << "precision " << fmt(rep.metrics.precision) << " recall " << fmt(rep.metrics.recall)
            << " f1 " << fmt(rep.metrics.f1) << "\n";
  return 0;
}

struct DetectArgs {
  std::string checkpoint;
  std::string data;
  std::string log;
  std::string out;
};

template <class Real>
int run_detect(const config::PipelineConfig& cfg, const DetectArgs& a) {
  const auto ck = load_checked<Real>(a.checkpoint, cfg);
  const auto table = drain::read_templates(stage_file(a.data, "templates.jsonl"));
  auto vectors = embed::import_embeddings(stage_file(a.data, "embeddings.tsv"), table, cfg.embedder.d);
  drain::Parser parser(cfg.parser);
  parser.load_templates(table);
  const auto events = drain::parse_corpus(parser, pipeline::make_raw_logs(pipeline::read_lines(a.log)));
  // Templates first seen here get built-in features when no import file is configured.
  for (std::size_t i = table.size(); i < parser.templates().size(); ++i) {
    if (cfg.embedder.mode == embed::Mode::kImportFile)
      throw DataError("line of unseen template " + std::to_string(i) +
                      " has no imported embedding");
    vectors.push_back(embed::embed_template(parser.templates()[i].tokens, cfg.embedder_config()));
  }
  const auto windows = pipeline::make_windows(events, cfg.sequencer, a.log, /*supervised=*/false);
  const auto ds = pipeline::make_dataset<Real>(windows, cfg.embedder_config(), vectors);
  const auto logits = train::predict_logits(ck.params, cfg.model_config(), ds);
  auto out = open_out(a.out);
  std::size_t flagged = 0;
  for (std::size_t i = 0; i < windows.size(); ++i) {
    const double score = eval::sigmoid(logits[i]);
    const bool anomalous = score >= cfg.eval_threshold;
    flagged += anomalous;
    auto j = seq::to_json(windows[i]);
    j.erase("label");
    j["window"] = i;
    j["score"] = score;
    j["verdict"] = anomalous ? "anomalous" : "normal";
    out << j.dump() << '\n';
  }
  std::cout << flagged << " of " << windows.size() << " windows flagged anomalous\n";
  return 0;
}

template <template <class> class F, class... Args>
int dispatch(const config::PipelineConfig& cfg, Args&&... args) {
  if (cfg.precision == config::Precision::kSingle) return F<float>::run(cfg, args...);
  return F<double>::run(cfg, args...);
}

template <class Real>
struct TrainCmd {
  static int run(const config::PipelineConfig& c, const TrainArgs& a, TrainKind k) {
    return run_train<Real>(c, a, k);
  }
};
template <class Real>
struct EvalCmd {
  static int run(const config::PipelineConfig& c, const EvalArgs& a) { return run_eval<Real>(c, a); }
};
template <class Real>
struct DetectCmd {
  static int run(const config::PipelineConfig& c, const DetectArgs& a) { return run_detect<Real>(c, a); }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"LogFormer log anomaly detection pipeline"};
  app.require_subcommand(1);
  Common common;

  SynthArgs sa;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a labelled synthetic log corpus");
  add_common(synth_cmd, common);
  synth_cmd->add_option("--domain", sa.domain, "source, target or params")->capture_default_str();
  synth_cmd->add_option("--messages", sa.messages, "Number of log lines")->capture_default_str();
  synth_cmd->add_option("--out", sa.out, "Output prefix (.log, .labels, .oracle.jsonl)")->required();
  synth_cmd->add_option("--source-spec-seed", sa.source_spec_seed, "Seed of the source domain vocabulary")
      ->capture_default_str();
  synth_cmd->add_option("--target-spec-seed", sa.target_spec_seed, "Seed of the target domain vocabulary")
      ->capture_default_str();
  synth_cmd->add_option("--anomaly-rate", sa.anomaly_rate, "Fraction of anomalous lines");

  ParseArgs pa;
  auto* parse_cmd = app.add_subcommand("parse", "Mine templates and extract parameters");
  add_common(parse_cmd, common);
  parse_cmd->add_option("--log", pa.log, "Raw log file, one message per line")->required()->check(CLI::ExistingFile);
  parse_cmd->add_option("--labels", pa.labels, "Label sidecar (tags per line, or .csv line_no,label)")
      ->check(CLI::ExistingFile);
  parse_cmd->add_option("--out-dir", pa.out_dir, "Stage directory to write")->required();
  parse_cmd->add_option("--regex-file", pa.regex_file, "Masking regexes, one per line")->check(CLI::ExistingFile);
  parse_cmd->add_option("--depth", pa.depth, "Parse tree depth");
  parse_cmd->add_option("--sim-threshold", pa.sim_threshold, "Similarity threshold in (0, 1]");
  parse_cmd->add_option("--max-children", pa.max_children, "Maximum children per tree node");

  WindowArgs wa;
  auto* win_cmd = app.add_subcommand("windows", "Cut events into labelled windows and split 80/20");
  add_common(win_cmd, common);
  win_cmd->add_option("--data", wa.data, "Stage directory from parse")->required()->check(CLI::ExistingDirectory);
  win_cmd->add_option("--tag", wa.tag, "Domain tag recorded on each window");
  win_cmd->add_option("--window-size", wa.window_size, "Events per window");
  win_cmd->add_option("--mode", wa.mode, "sliding or block-id");
  win_cmd->add_option("--id-regex", wa.id_regex, "Session id regex for block-id mode");
  win_cmd->add_option("--split", wa.split, "Chronological train fraction");

  EmbedArgs ea;
  auto* embed_cmd = app.add_subcommand("embed", "Compute template feature vectors");
  add_common(embed_cmd, common);
  embed_cmd->add_option("--data", ea.data, "Stage directory from parse")->required()->check(CLI::ExistingDirectory);
  embed_cmd->add_option("--import", ea.import_file, "Precomputed vectors (d=<int> header, id<TAB>v1,...)")
      ->check(CLI::ExistingFile);

  TrainArgs pre_a, ada_a, scr_a;
  auto add_train = [&](const char* name, const char* help, TrainArgs& t) {
    auto* cmd = app.add_subcommand(name, help);
    add_common(cmd, common);
    cmd->add_option("--data", t.data, "Stage directory with windows and embeddings")
        ->required()
        ->check(CLI::ExistingDirectory);
    cmd->add_option("--out", t.out, "Checkpoint to write")->required();
    cmd->add_option("--runlog", t.runlog, "Run log CSV (default <out>.runlog.csv)");
    cmd->add_option("--epochs", t.epochs, "Override train.epochs");
    cmd->add_option("--max-lr", t.max_lr, "Override the stage's maximum learning rate");
    cmd->add_flag("--no-eval", t.no_eval, "Skip held-out evaluation during training");
    return cmd;
  };
  auto* pre_cmd = add_train("pretrain", "Stage one: train the encoder on a source domain", pre_a);
  auto* ada_cmd = add_train("adapt", "Stage two: tune adapters (or everything) on a target domain", ada_a);
  ada_cmd->add_option("--checkpoint", ada_a.checkpoint, "Pre-trained checkpoint")->required()->check(CLI::ExistingFile);
  ada_cmd->add_option("--mode", ada_a.mode, "adapter (uses train.adapt_max_lr) or full (uses train.max_lr)")->capture_default_str();
  auto* scr_cmd = add_train("train-scratch", "Baseline: train from scratch on a target domain", scr_a);

  EvalArgs va;
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a checkpoint and write metrics.json and curves.csv");
  add_common(eval_cmd, common);
  eval_cmd->add_option("--checkpoint", va.checkpoint, "Checkpoint to evaluate")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--data", va.data, "Stage directory")->required()->check(CLI::ExistingDirectory);
  eval_cmd->add_option("--split", va.split, "test or train")->capture_default_str();
  eval_cmd->add_option("--report-dir", va.report_dir, "Directory for metrics.json and curves.csv")->required();
  eval_cmd->add_option("--runlog", va.runlog, "Run log CSV whose evaluation rows become curves.csv")
      ->check(CLI::ExistingFile);

  DetectArgs da;
  auto* det_cmd = app.add_subcommand("detect", "Flag anomalous windows in a raw log file");
  add_common(det_cmd, common);
  det_cmd->add_option("--checkpoint", da.checkpoint, "Trained checkpoint")->required()->check(CLI::ExistingFile);
  det_cmd->add_option("--data", da.data, "Stage directory whose templates and embeddings to reuse")
      ->required()
      ->check(CLI::ExistingDirectory);
  det_cmd->add_option("--log", da.log, "Raw log file")->required()->check(CLI::ExistingFile);
  det_cmd->add_option("--out", da.out, "Verdicts JSONL to write")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : static_cast<int>(ExitCode::kConfig);
  }

  try {
    if (*synth_cmd) return run_synth(common, sa);
    if (*parse_cmd) return run_parse(common, pa);
    if (*win_cmd) return run_windows(common, wa);
    if (*embed_cmd) return run_embed(common, ea);
    const auto cfg = resolve(common);
    if (*pre_cmd) return dispatch<TrainCmd>(cfg, pre_a, TrainKind::kPretrain);
    if (*ada_cmd) return dispatch<TrainCmd>(cfg, ada_a, TrainKind::kAdapt);
    if (*scr_cmd) return dispatch<TrainCmd>(cfg, scr_a, TrainKind::kScratch);
    if (*eval_cmd) return dispatch<EvalCmd>(cfg, va);
    if (*det_cmd) return dispatch<DetectCmd>(cfg, da);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return static_cast<int>(ExitCode::kConfig);
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return static_cast<int>(ExitCode::kData);
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << "\n";
    return static_cast<int>(ExitCode::kRuntime);
  }
  return static_cast<int>(ExitCode::kOk);
}
