#pragma once

#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "predsym/config.hpp"
#include "predsym/conllu.hpp"
#include "predsym/corpus.hpp"
#include "predsym/diag.hpp"
#include "predsym/embeddings.hpp"
#include "predsym/eval.hpp"
#include "predsym/features.hpp"

namespace predsym {

// Loaded bundle with sentences aligned to corpus record order.
struct Bundle {
  SisCorpus corpus;
  std::vector<DepSentence> sents;
  NgramTable ngrams;
  std::vector<FeatureVector> features;  // raw values, corpus order
  EvalResources res;
};

inline std::map<std::string, FeatureVector> load_gold_features(const std::string &path) {
  auto lines = read_lines(path);
  if (lines.empty()) fail(Code::EmptyFile, path);
  auto header = split(lines[0], '\t');
  if (header.empty() || header[0] != "sentence_id")
    fail(Code::MissingColumn, "sentence_id in ", path);
  std::vector<int> order;
  for (std::size_t c = 1; c < header.size(); ++c)
    order.push_back(feature_index(trim(header[c])));
  if (static_cast<int>(order.size()) != kNumFeatures)
    fail(Code::MissingColumn, "expected ", kNumFeatures, " feature columns in ", path);
  std::map<std::string, FeatureVector> out;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    if (trim(lines[li]).empty()) continue;
    std::string ctx = path + ":" + std::to_string(li + 1);
    auto f = split(lines[li], '\t');
    if (f.size() != header.size())
      fail(Code::MalformedLine, "field count at ", ctx);
    FeatureVector fv{};
    for (std::size_t c = 1; c < f.size(); ++c)
      fv[static_cast<std::size_t>(order[c - 1])] = require_double(f[c], ctx);
    if (out.count(f[0])) fail(Code::DuplicateSentId, f[0], " at ", ctx);
    out[f[0]] = fv;
  }
  return out;
}

// Loads whatever the config points at; resource flags track availability so
// run_lopo can complain per family.
inline Bundle load_bundle(const RunConfig &cfg, Diagnostics *diag = nullptr) {
  Bundle b;
  if (cfg.corpus_path.empty()) fail(Code::MissingResource, "corpus path not configured");
  CorpusSchema schema;
  schema.lenient = cfg.lenient;
  b.corpus = load_corpus(cfg.corpus_path, schema, diag);
  const int n = static_cast<int>(b.corpus.records.size());

  if (!cfg.conllu_path.empty()) {
    auto parsed = parse_conllu(cfg.conllu_path, diag);
    if (!cfg.annotations_path.empty()) attach_annotations(parsed, cfg.annotations_path);
    std::unordered_map<std::string, DepSentence *> by_id;
    for (auto &s : parsed) by_id[s.sent_id] = &s;
    b.sents.reserve(static_cast<std::size_t>(n));
    for (const auto &rec : b.corpus.records) {
      auto it = by_id.find(rec.sentence_id);
      if (it == by_id.end())
        fail(Code::UnknownSentence, rec.sentence_id, " has no parse in ", cfg.conllu_path);
      DepSentence sent = *it->second;
      find_target(sent, rec.verb);
      b.sents.push_back(std::move(sent));
    }
  }

  if (!cfg.ngrams_path.empty()) b.ngrams = load_ngrams(cfg.ngrams_path);

  if (!b.sents.empty() && !cfg.ngrams_path.empty()) {
    b.features.reserve(static_cast<std::size_t>(n));
    b.res.Xf.resize(n, kNumFeatures);
    b.res.Phi.resize(n, kNumFeatures);
    BinarizeThresholds th = cfg.thresholds();
    for (int i = 0; i < n; ++i) {
      FeatureVector fv = extract_features(b.sents[static_cast<std::size_t>(i)], b.ngrams, diag);
      FeatureVector bv = binarize(fv, th);
      for (int j = 0; j < kNumFeatures; ++j) {
        b.res.Xf(i, j) = fv[static_cast<std::size_t>(j)];
        b.res.Phi(i, j) = bv[static_cast<std::size_t>(j)];
      }
      b.features.push_back(fv);
    }
    b.res.has_features = true;
  }

  if (!b.sents.empty() && !cfg.static_embeddings_path.empty()) {
    EmbeddingTable table = load_embedding_table(cfg.static_embeddings_path,
                                                EmbeddingFormat::headerless, diag);
    b.res.Xs.resize(n, table.dimension);
    for (int i = 0; i < n; ++i) {
      Representation rep = mean_pool(b.sents[static_cast<std::size_t>(i)], table);
      if (rep.all_oov)
        warn_or_drop(diag, Code::AllTokensOov,
                     b.corpus.records[static_cast<std::size_t>(i)].sentence_id);
      b.res.Xs.row(i) = rep.vector.transpose();
    }
    b.res.has_static = true;
  }

  if (!cfg.contextual_path.empty()) {
    auto ctx = load_contextual(cfg.contextual_path);
    int dim = static_cast<int>(ctx.begin()->second.vector.size());
    b.res.Xc.resize(n, dim);
    for (int i = 0; i < n; ++i) {
      const auto &sid = b.corpus.records[static_cast<std::size_t>(i)].sentence_id;
      auto it = ctx.find(sid);
      if (it == ctx.end())
        fail(Code::UnknownSentence, sid, " missing from ", cfg.contextual_path);
      b.res.Xc.row(i) = it->second.vector.transpose();
    }
    b.res.has_contextual = true;
  }
  return b;
}

// Per-feature exact-match rate of extracted features against a reference.
inline std::vector<double> feature_agreement(const Bundle &b,
                                             const std::map<std::string, FeatureVector> &gold) {
  std::vector<double> rates(kNumFeatures, 0.0);
  int n = 0;
  for (std::size_t i = 0; i < b.corpus.records.size(); ++i) {
    auto it = gold.find(b.corpus.records[i].sentence_id);
    if (it == gold.end()) continue;
    ++n;
    for (int j = 0; j < kNumFeatures; ++j)
      if (b.features[i][static_cast<std::size_t>(j)] == it->second[static_cast<std::size_t>(j)])
        rates[static_cast<std::size_t>(j)] += 1.0;
  }
  if (n == 0) fail(Code::EmptyFile, "no overlapping ids with the reference features");
  for (auto &r : rates) r /= n;
  return rates;
}

inline std::string features_tsv(const Bundle &b) {
  std::string out = "sentence_id";
  for (const auto &name : feature_names()) out += "\t" + name;
  out += "\n";
  for (std::size_t i = 0; i < b.corpus.records.size(); ++i) {
    out += b.corpus.records[i].sentence_id;
    for (int j = 0; j < kNumFeatures; ++j) {
      double v = b.features[i][static_cast<std::size_t>(j)];
      out += "\t" + std::to_string(static_cast<long long>(v));
    }
    out += "\n";
  }
  return out;
}

}  // namespace predsym
