#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>
#include <unordered_map>

#include "predsym/conllu.hpp"
#include "predsym/diag.hpp"
#include "predsym/text.hpp"

namespace predsym {

enum class EmbeddingFormat { with_header, headerless };
enum class ReprSource { feature, static_mean, contextual, adapter };

struct EmbeddingTable {
  int dimension = 0;
  std::unordered_map<std::string, Eigen::VectorXd> vocab;
};

struct Representation {
  std::string sentence_id;
  Eigen::VectorXd vector;
  ReprSource source = ReprSource::static_mean;
  bool all_oov = false;
};

inline EmbeddingTable load_embedding_table(const std::string &path, EmbeddingFormat format,
                                           Diagnostics *diag = nullptr) {
  auto lines = read_lines(path);
  EmbeddingTable table;
  std::size_t li = 0;
  long long declared_vocab = -1;
  if (format == EmbeddingFormat::with_header) {
    while (li < lines.size() && trim(lines[li]).empty()) ++li;
    if (li >= lines.size()) fail(Code::EmptyFile, path);
    auto h = split_ws(lines[li]);
    std::string ctx = path + ":" + std::to_string(li + 1);
    if (h.size() != 2) fail(Code::MalformedLine, "expected 'vocab_size dimension' at ", ctx);
    declared_vocab = require_long(h[0], ctx);
    table.dimension = static_cast<int>(require_long(h[1], ctx));
    if (table.dimension <= 0) fail(Code::MalformedLine, "non-positive dimension at ", ctx);
    ++li;
  }
  for (; li < lines.size(); ++li) {
    if (trim(lines[li]).empty()) continue;
    std::string ctx = path + ":" + std::to_string(li + 1);
    auto f = split_ws(lines[li]);
    if (f.size() < 2) fail(Code::MalformedLine, "expected 'word v1 ...' at ", ctx);
    int dim = static_cast<int>(f.size()) - 1;
    if (table.dimension == 0)
      table.dimension = dim;
    else if (dim != table.dimension)
      fail(Code::DimensionMismatch, "got ", dim, " values, expected ", table.dimension,
           " at ", ctx);
    if (table.vocab.count(f[0])) {
      warn_or_drop(diag, Code::DuplicateKey, "duplicate word '" + f[0] + "', keeping first",
                   ctx);
      continue;
    }
    Eigen::VectorXd v(dim);
    for (int i = 0; i < dim; ++i)
      v[i] = require_double(f[static_cast<std::size_t>(i) + 1], ctx);
    table.vocab.emplace(f[0], std::move(v));
  }
  if (table.vocab.empty()) fail(Code::EmptyFile, path);
  if (declared_vocab >= 0 && declared_vocab != static_cast<long long>(table.vocab.size()))
    warn_or_drop(diag, Code::CountMismatch,
                 "header declares " + std::to_string(declared_vocab) + " words, found " +
                     std::to_string(table.vocab.size()),
                 path);
  return table;
}

// Mean of the vectors of all in-vocabulary tokens (lowercased forms); OOV
// tokens are skipped and the divisor shrinks accordingly.
inline Representation mean_pool(const DepSentence &sent, const EmbeddingTable &table) {
  Representation rep;
  rep.sentence_id = sent.sent_id;
  rep.source = ReprSource::static_mean;
  rep.vector = Eigen::VectorXd::Zero(table.dimension);
  int found = 0;
  for (const auto &t : sent.tokens) {
    auto it = table.vocab.find(lower(t.form));
    if (it == table.vocab.end()) continue;
    rep.vector += it->second;
    ++found;
  }
  if (found > 0)
    rep.vector /= static_cast<double>(found);
  else
    rep.all_oov = true;
  return rep;
}

inline std::map<std::string, Representation> load_contextual(const std::string &path) {
  auto lines = read_lines(path);
  std::size_t li = 0;
  while (li < lines.size() && trim(lines[li]).empty()) ++li;
  if (li >= lines.size()) fail(Code::EmptyFile, path);
  auto h = split_ws(lines[li]);
  std::string hctx = path + ":" + std::to_string(li + 1);
  if (h.size() != 2 || h[0] != "dim")
    fail(Code::MalformedLine, "expected 'dim N' header at ", hctx);
  int dim = static_cast<int>(require_long(h[1], hctx));
  if (dim <= 0) fail(Code::MalformedLine, "non-positive dim at ", hctx);
  ++li;

  std::map<std::string, Representation> out;
  for (; li < lines.size(); ++li) {
    if (trim(lines[li]).empty()) continue;
    std::string ctx = path + ":" + std::to_string(li + 1);
    auto f = split(lines[li], '\t');
    if (f.size() != 2) fail(Code::MalformedLine, "expected 'id<TAB>values' at ", ctx);
    if (out.count(f[0])) fail(Code::DuplicateSentId, f[0], " at ", ctx);
    auto vals = split_ws(f[1]);
    if (static_cast<int>(vals.size()) != dim)
      fail(Code::DimensionMismatch, "got ", vals.size(), " values, expected ", dim, " at ",
           ctx);
    Representation rep;
    rep.sentence_id = f[0];
    rep.source = ReprSource::contextual;
    rep.vector.resize(dim);
    for (int i = 0; i < dim; ++i) rep.vector[i] = require_double(vals[static_cast<std::size_t>(i)], ctx);
    out.emplace(f[0], std::move(rep));
  }
  if (out.empty()) fail(Code::EmptyFile, path + " has no vector rows");
  return out;
}

}  // namespace predsym
