#pragma once

#include <array>
#include <cmath>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "predsym/diag.hpp"
#include "predsym/text.hpp"

namespace predsym {

enum class VerbGroup { symmetric, asymmetric };

inline const char *group_name(VerbGroup g) {
  return g == VerbGroup::symmetric ? "symmetric" : "asymmetric";
}

struct SisRecord {
  std::string sentence_id;
  std::string verb;
  VerbGroup group = VerbGroup::symmetric;
  std::string text;
  std::string reversed_text;
  std::array<double, 7> ratings{};
  double mean_rating = 0.0;
  double rating_sd = 0.0;  // sample SD over the 7 ratings
};

struct VerbEntry {
  std::string verb;
  VerbGroup group = VerbGroup::symmetric;
  std::vector<std::string> sentence_ids;
};

struct SisCorpus {
  std::vector<SisRecord> records;
  std::map<std::string, VerbEntry> verbs;       // keyed by verb
  std::unordered_map<std::string, int> id_index;  // sentence_id -> records index

  const SisRecord &by_id(const std::string &sid) const {
    auto it = id_index.find(sid);
    if (it == id_index.end()) fail(Code::UnknownSentence, sid);
    return records[static_cast<std::size_t>(it->second)];
  }
};

struct CorpusSchema {
  int expected_verbs = 40;
  int sentences_per_verb = 10;
  bool lenient = false;  // downgrade count mismatches to warnings
};

inline double invert_rating(double r) {
  if (r < 1.0 || r > 5.0) fail(Code::RatingOutOfRange, "rating ", r, " outside [1,5]");
  return 6.0 - r;
}

inline VerbGroup verb_group(const std::string &verb, const SisCorpus &corpus) {
  auto it = corpus.verbs.find(verb);
  if (it == corpus.verbs.end()) fail(Code::UnknownVerb, verb);
  return it->second.group;
}

inline SisCorpus load_corpus(const std::string &path, const CorpusSchema &schema = {},
                             Diagnostics *diag = nullptr) {
  auto lines = read_lines(path);
  if (lines.empty()) fail(Code::EmptyFile, path);

  auto header = split(lines[0], '\t');
  std::unordered_map<std::string, int> col;
  for (std::size_t i = 0; i < header.size(); ++i) col[trim(header[i])] = static_cast<int>(i);
  std::vector<std::string> required = {"sentence_id", "verb", "group", "text",
                                       "reversed_text"};
  for (int i = 1; i <= 7; ++i) required.push_back("r" + std::to_string(i));
  for (const auto &name : required)
    if (!col.count(name)) fail(Code::MissingColumn, name, " in ", path);

  SisCorpus corpus;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    if (trim(lines[li]).empty()) continue;
    auto f = split(lines[li], '\t');
    std::string ctx = path + ":" + std::to_string(li + 1);
    if (f.size() < header.size()) {
      if (schema.lenient) {
        warn_or_drop(diag, Code::MalformedLine, "field count " + std::to_string(f.size()),
                     ctx);
        continue;
      }
      fail(Code::MalformedLine, "expected ", header.size(), " fields, got ", f.size(),
           " at ", ctx);
    }
    SisRecord rec;
    rec.sentence_id = f[static_cast<std::size_t>(col["sentence_id"])];
    rec.verb = f[static_cast<std::size_t>(col["verb"])];
    std::string g = f[static_cast<std::size_t>(col["group"])];
    if (g == "symmetric")
      rec.group = VerbGroup::symmetric;
    else if (g == "asymmetric")
      rec.group = VerbGroup::asymmetric;
    else
      fail(Code::MalformedLine, "unknown group '", g, "' at ", ctx);
    rec.text = f[static_cast<std::size_t>(col["text"])];
    rec.reversed_text = f[static_cast<std::size_t>(col["reversed_text"])];
    double sum = 0.0;
    for (int i = 0; i < 7; ++i) {
      double r = require_double(f[static_cast<std::size_t>(col["r" + std::to_string(i + 1)])],
                                ctx);
      if (r < 1.0 || r > 5.0)
        fail(Code::RatingOutOfRange, "r", i + 1, "=", r, " at ", ctx);
      rec.ratings[static_cast<std::size_t>(i)] = r;
      sum += r;
    }
    rec.mean_rating = sum / 7.0;
    double ss = 0.0;
    for (double r : rec.ratings) ss += (r - rec.mean_rating) * (r - rec.mean_rating);
    rec.rating_sd = std::sqrt(ss / 6.0);

    if (corpus.id_index.count(rec.sentence_id))
      fail(Code::DuplicateSentId, rec.sentence_id, " at ", ctx);
    corpus.id_index[rec.sentence_id] = static_cast<int>(corpus.records.size());
    auto &entry = corpus.verbs[rec.verb];
    if (entry.sentence_ids.empty()) {
      entry.verb = rec.verb;
      entry.group = rec.group;
    } else if (entry.group != rec.group) {
      fail(Code::MalformedLine, "verb '", rec.verb, "' listed in both groups at ", ctx);
    }
    entry.sentence_ids.push_back(rec.sentence_id);
    corpus.records.push_back(std::move(rec));
  }
  if (corpus.records.empty()) fail(Code::EmptyFile, path + " has no data rows");

  auto count_issue = [&](const std::string &msg) {
    if (schema.lenient)
      warn_or_drop(diag, Code::CountMismatch, msg, path);
    else
      fail(Code::CountMismatch, msg, " in ", path);
  };
  if (static_cast<int>(corpus.verbs.size()) != schema.expected_verbs)
    count_issue("expected " + std::to_string(schema.expected_verbs) + " verbs, got " +
                std::to_string(corpus.verbs.size()));
  for (const auto &[verb, entry] : corpus.verbs)
    if (static_cast<int>(entry.sentence_ids.size()) != schema.sentences_per_verb)
      count_issue("verb '" + verb + "' has " + std::to_string(entry.sentence_ids.size()) +
                  " sentences, expected " + std::to_string(schema.sentences_per_verb));
  return corpus;
}

}  // namespace predsym
