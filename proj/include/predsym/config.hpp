#pragma once

#include <map>
#include <string>

#include "predsym/diag.hpp"
#include "predsym/eval.hpp"
#include "predsym/text.hpp"

namespace predsym {

// Minimal INI: [section] headers, key = value, '#'/';' comments.
struct Ini {
  std::map<std::string, std::map<std::string, std::string>> sections;

  bool has(const std::string &sec, const std::string &key) const {
    auto s = sections.find(sec);
    return s != sections.end() && s->second.count(key);
  }
  std::string get(const std::string &sec, const std::string &key,
                  const std::string &fallback = "") const {
    auto s = sections.find(sec);
    if (s == sections.end()) return fallback;
    auto k = s->second.find(key);
    return k == s->second.end() ? fallback : k->second;
  }
};

inline Ini parse_ini(const std::string &path) {
  Ini ini;
  std::string section;
  auto lines = read_lines(path);
  for (std::size_t li = 0; li < lines.size(); ++li) {
    std::string line = trim(lines[li]);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    std::string ctx = path + ":" + std::to_string(li + 1);
    if (line.front() == '[') {
      if (line.back() != ']') fail(Code::BadConfig, "unterminated section at ", ctx);
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos) fail(Code::BadConfig, "expected key = value at ", ctx);
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    if (key.empty()) fail(Code::BadConfig, "empty key at ", ctx);
    ini.sections[section][key] = val;
  }
  return ini;
}

struct RunConfig {
  // data paths; relative entries resolve against the config file's directory
  std::string corpus_path;
  std::string conllu_path;
  std::string annotations_path;
  std::string ngrams_path;
  std::string static_embeddings_path;
  std::string contextual_path;
  std::string verb_scores_path;
  std::string gold_features_path;
  std::string out_dir = "out";

  std::string family = "feature";
  std::uint64_t seed = 7;
  double alpha = 1.0;
  int hidden_dim = 256;
  int stage1_epochs = 200;
  int stage2_epochs = 200;
  double learning_rate = 1e-4;
  int batch_size = 32;
  int np_threshold = 3;
  int clause_threshold = 2;
  double error_threshold = 1.0;
  double sd_factor = 0.1;
  std::string sd_mode = "relative";  // or "absolute"
  double pred_gap = 1.0;
  int min_group = 2;
  int importance_repeats = 10;
  bool lenient = false;
  bool freeze_adapter = false;
  std::string loss = "bce";  // or "eq4-literal"
  bool clip_reporting = true;
  int jobs = 1;

  TrainSettings train() const {
    TrainSettings t;
    t.alpha = alpha;
    t.hidden_dim = hidden_dim;
    t.stage1_epochs = stage1_epochs;
    t.stage2_epochs = stage2_epochs;
    t.learning_rate = learning_rate;
    t.batch_size = batch_size;
    t.freeze_adapter = freeze_adapter;
    t.loss = loss == "eq4-literal" ? ClfLossVariant::eq4_literal : ClfLossVariant::bce;
    t.error_threshold = error_threshold;
    t.jobs = jobs;
    return t;
  }
  BinarizeThresholds thresholds() const { return {np_threshold, clause_threshold}; }
  SdMode sd_mode_enum() const {
    if (sd_mode == "relative") return SdMode::relative;
    if (sd_mode == "absolute") return SdMode::absolute;
    fail(Code::BadConfig, "sd_mode must be relative or absolute, got '", sd_mode, "'");
  }
};

namespace detail {

inline std::string join_path(const std::string &base, const std::string &rel) {
  if (rel.empty() || rel.front() == '/') return rel;
  if (base.empty()) return rel;
  return base.back() == '/' ? base + rel : base + "/" + rel;
}

inline std::string dir_of(const std::string &path) {
  auto pos = path.find_last_of('/');
  return pos == std::string::npos ? std::string() : path.substr(0, pos);
}

}  // namespace detail

inline RunConfig load_config(const std::string &path) {
  Ini ini = parse_ini(path);
  RunConfig cfg;
  std::string base = detail::dir_of(path);
  auto pathval = [&](const std::string &key, std::string &out) {
    if (ini.has("data", key)) out = detail::join_path(base, ini.get("data", key));
  };
  pathval("corpus", cfg.corpus_path);
  pathval("conllu", cfg.conllu_path);
  pathval("annotations", cfg.annotations_path);
  pathval("ngrams", cfg.ngrams_path);
  pathval("static_embeddings", cfg.static_embeddings_path);
  pathval("contextual", cfg.contextual_path);
  pathval("verb_scores", cfg.verb_scores_path);
  pathval("gold_features", cfg.gold_features_path);

  auto num = [&](const std::string &sec, const std::string &key, auto &out) {
    if (!ini.has(sec, key)) return;
    std::string v = ini.get(sec, key);
    double d;
    if (!parse_double(v, d))
      fail(Code::BadConfig, "bad number '", v, "' for ", sec, ".", key, " in ", path);
    out = static_cast<std::remove_reference_t<decltype(out)>>(d);
  };
  num("model", "alpha", cfg.alpha);
  num("model", "hidden", cfg.hidden_dim);
  num("model", "stage1_epochs", cfg.stage1_epochs);
  num("model", "stage2_epochs", cfg.stage2_epochs);
  num("model", "learning_rate", cfg.learning_rate);
  num("model", "batch_size", cfg.batch_size);
  num("eval", "error_threshold", cfg.error_threshold);
  num("eval", "sd_factor", cfg.sd_factor);
  num("eval", "pred_gap", cfg.pred_gap);
  num("eval", "min_group", cfg.min_group);
  num("eval", "importance_repeats", cfg.importance_repeats);
  num("features", "np_threshold", cfg.np_threshold);
  num("features", "clause_threshold", cfg.clause_threshold);
  if (ini.has("eval", "sd_mode")) cfg.sd_mode = ini.get("eval", "sd_mode");
  if (ini.has("model", "loss")) cfg.loss = ini.get("model", "loss");
  return cfg;
}

// Canonical snapshot written into every output dir; also the hash input.
inline std::string config_snapshot(const RunConfig &c) {
  std::ostringstream os;
  os << "[data]\n"
     << "corpus = " << c.corpus_path << "\n"
     << "conllu = " << c.conllu_path << "\n"
     << "annotations = " << c.annotations_path << "\n"
     << "ngrams = " << c.ngrams_path << "\n"
     << "static_embeddings = " << c.static_embeddings_path << "\n"
     << "contextual = " << c.contextual_path << "\n"
     << "verb_scores = " << c.verb_scores_path << "\n"
     << "gold_features = " << c.gold_features_path << "\n"
     << "\n[model]\n"
     << "family = " << c.family << "\n"
     << "alpha = " << c.alpha << "\n"
     << "hidden = " << c.hidden_dim << "\n"
     << "stage1_epochs = " << c.stage1_epochs << "\n"
     << "stage2_epochs = " << c.stage2_epochs << "\n"
     << "learning_rate = " << c.learning_rate << "\n"
     << "batch_size = " << c.batch_size << "\n"
     << "loss = " << c.loss << "\n"
     << "freeze_adapter = " << (c.freeze_adapter ? "true" : "false") << "\n"
     << "\n[features]\n"
     << "np_threshold = " << c.np_threshold << "\n"
     << "clause_threshold = " << c.clause_threshold << "\n"
     << "\n[eval]\n"
     << "error_threshold = " << c.error_threshold << "\n"
     << "sd_factor = " << c.sd_factor << "\n"
     << "sd_mode = " << c.sd_mode << "\n"
     << "pred_gap = " << c.pred_gap << "\n"
     << "min_group = " << c.min_group << "\n"
     << "importance_repeats = " << c.importance_repeats << "\n"
     << "\n[run]\n"
     << "seed = " << c.seed << "\n"
     << "lenient = " << (c.lenient ? "true" : "false") << "\n"
     << "clip_reporting = " << (c.clip_reporting ? "true" : "false") << "\n";
  return os.str();
}

}  // namespace predsym
