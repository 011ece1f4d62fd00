#pragma once

#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "predsym/diag.hpp"
#include "predsym/text.hpp"

namespace predsym {

// FEATS keys serialize in case-insensitive order; ties broken byte-wise so
// distinct keys never collapse.
struct FeatKeyLess {
  bool operator()(const std::string &a, const std::string &b) const {
    std::string la = lower(a), lb = lower(b);
    return la != lb ? la < lb : a < b;
  }
};
using FeatMap = std::map<std::string, std::string, FeatKeyLess>;

struct Token {
  int id = 0;  // 1-based position
  std::string form;
  std::string lemma;
  std::string upos;
  std::string xpos;
  FeatMap feats;
  int head = 0;  // 0 = root
  std::string deprel;
  std::string deps;
  std::string misc;
  std::string entity;  // from MISC Entity= or the annotation TSV; empty = none

  std::string feat(const std::string &key) const {
    auto it = feats.find(key);
    return it == feats.end() ? std::string() : it->second;
  }
};

struct DepSentence {
  std::string sent_id;
  std::string text;
  std::vector<Token> tokens;
  int target = 0;  // 1-based index of the target verb once found; 0 = unset
};

// Legacy Stanford-style labels folded into UD names at parse time.
inline const std::unordered_map<std::string, std::string> &deprel_aliases() {
  static const std::unordered_map<std::string, std::string> table = {
      {"dobj", "obj"},         {"nsubjpass", "nsubj:pass"},
      {"csubjpass", "csubj:pass"}, {"auxpass", "aux:pass"},
      {"rcmod", "acl:relcl"},  {"poss", "nmod:poss"},
      {"neg", "advmod"},
  };
  return table;
}

inline std::string normalize_deprel(const std::string &rel) {
  auto it = deprel_aliases().find(rel);
  return it == deprel_aliases().end() ? rel : it->second;
}

inline FeatMap parse_feats(const std::string &s, const std::string &ctx) {
  FeatMap out;
  if (s == "_" || s.empty()) return out;
  for (const auto &kv : split(s, '|')) {
    auto eq = kv.find('=');
    if (eq == std::string::npos)
      fail(Code::MalformedLine, "bad FEATS entry '", kv, "' at ", ctx);
    out[kv.substr(0, eq)] = kv.substr(eq + 1);
  }
  return out;
}

inline std::string feats_to_string(const FeatMap &feats) {
  if (feats.empty()) return "_";
  std::string out;
  for (const auto &[k, v] : feats) {
    if (!out.empty()) out += "|";
    out += k + "=" + v;
  }
  return out;
}

inline void validate_tree(const DepSentence &sent, const std::string &ctx) {
  int n = static_cast<int>(sent.tokens.size());
  int roots = 0;
  for (const auto &t : sent.tokens) {
    if (t.head < 0 || t.head > n)
      fail(Code::TokenIndexOutOfRange, "head ", t.head, " of token ", t.id, " at ", ctx);
    if (t.head == t.id)
      fail(Code::CycleDetected, "token ", t.id, " is its own head at ", ctx);
    if (t.head == 0) ++roots;
  }
  if (roots == 0) fail(Code::NoRoot, ctx);
  if (roots > 1) fail(Code::MultipleRoots, std::to_string(roots) + " roots at " + ctx);
  // every token must reach the root by following heads
  for (const auto &t : sent.tokens) {
    int cur = t.id;
    for (int steps = 0; cur != 0; ++steps) {
      if (steps > n) fail(Code::CycleDetected, "token ", t.id, " at ", ctx);
      cur = sent.tokens[static_cast<std::size_t>(cur - 1)].head;
    }
  }
}

inline std::vector<DepSentence> parse_conllu(const std::string &path,
                                             Diagnostics *diag = nullptr) {
  auto lines = read_lines(path);
  std::vector<DepSentence> out;
  DepSentence cur;
  bool in_block = false;
  int next_id = 1;

  auto flush = [&](std::size_t lineno) {
    if (!in_block) return;
    std::string ctx = path + ":" + std::to_string(lineno);
    if (cur.tokens.empty())
      fail(Code::MalformedLine, "sentence block without tokens at ", ctx);
    validate_tree(cur, cur.sent_id.empty() ? ctx : cur.sent_id);
    out.push_back(std::move(cur));
    cur = DepSentence{};
    in_block = false;
    next_id = 1;
  };

  for (std::size_t li = 0; li < lines.size(); ++li) {
    const std::string &line = lines[li];
    std::string ctx = path + ":" + std::to_string(li + 1);
    if (trim(line).empty()) {
      flush(li + 1);
      continue;
    }
    if (line[0] == '#') {
      in_block = true;
      auto eq = line.find('=');
      if (eq != std::string::npos) {
        std::string key = trim(line.substr(1, eq - 1));
        std::string val = trim(line.substr(eq + 1));
        if (key == "sent_id") cur.sent_id = val;
        if (key == "text") cur.text = val;
      }
      continue;
    }
    auto f = split(line, '\t');
    if (f.size() != 10)
      fail(Code::MalformedLine, "expected 10 columns, got ", f.size(), " at ", ctx);
    in_block = true;
    if (f[0].find('-') != std::string::npos) {
      warn_or_drop(diag, Code::MalformedLine, "skipping multiword range " + f[0], ctx);
      continue;
    }
    if (f[0].find('.') != std::string::npos) {
      warn_or_drop(diag, Code::MalformedLine, "skipping empty node " + f[0], ctx);
      continue;
    }
    Token t;
    t.id = static_cast<int>(require_long(f[0], ctx));
    if (t.id != next_id)
      fail(Code::MalformedLine, "token id ", t.id, " out of sequence at ", ctx);
    ++next_id;
    t.form = f[1];
    t.lemma = f[2];
    t.upos = f[3];
    t.xpos = f[4];
    t.feats = parse_feats(f[5], ctx);
    t.head = static_cast<int>(require_long(f[6], ctx));
    t.deprel = normalize_deprel(f[7]);
    t.deps = f[8];
    t.misc = f[9];
    if (t.misc != "_") {
      for (const auto &kv : split(t.misc, '|')) {
        if (kv.rfind("Entity=", 0) == 0) t.entity = kv.substr(7);
      }
    }
    cur.tokens.push_back(std::move(t));
  }
  flush(lines.size());
  if (out.empty()) fail(Code::EmptyFile, path);
  return out;
}

inline std::string serialize_conllu(const DepSentence &sent) {
  std::string out;
  if (!sent.sent_id.empty()) out += "# sent_id = " + sent.sent_id + "\n";
  if (!sent.text.empty()) out += "# text = " + sent.text + "\n";
  for (const auto &t : sent.tokens) {
    out += std::to_string(t.id) + "\t" + t.form + "\t" + t.lemma + "\t" + t.upos + "\t" +
           t.xpos + "\t" + feats_to_string(t.feats) + "\t" + std::to_string(t.head) +
           "\t" + t.deprel + "\t" + t.deps + "\t" + t.misc + "\n";
  }
  out += "\n";
  return out;
}

// Entity tags arrive either inline via MISC or through this side-channel TSV:
// sentence_id <TAB> token_index <TAB> tag.
inline void attach_annotations(std::vector<DepSentence> &sents, const std::string &path) {
  std::unordered_map<std::string, DepSentence *> by_id;
  for (auto &s : sents) by_id[s.sent_id] = &s;
  auto lines = read_lines(path);
  for (std::size_t li = 0; li < lines.size(); ++li) {
    if (trim(lines[li]).empty()) continue;
    std::string ctx = path + ":" + std::to_string(li + 1);
    auto f = split(lines[li], '\t');
    if (f.size() != 3) fail(Code::MalformedLine, "expected 3 fields at ", ctx);
    auto it = by_id.find(f[0]);
    if (it == by_id.end()) fail(Code::UnknownSentence, f[0], " at ", ctx);
    int idx = static_cast<int>(require_long(f[1], ctx));
    auto &toks = it->second->tokens;
    if (idx < 1 || idx > static_cast<int>(toks.size()))
      fail(Code::TokenIndexOutOfRange, "index ", idx, " in ", f[0], " at ", ctx);
    toks[static_cast<std::size_t>(idx - 1)].entity = f[2];
  }
}

// First token whose lemma matches (case-insensitive) with a verbal POS.
inline int find_target(DepSentence &sent, const std::string &verb_lemma) {
  std::string want = lower(verb_lemma);
  for (const auto &t : sent.tokens) {
    if ((t.upos == "VERB" || t.upos == "AUX") && lower(t.lemma) == want) {
      sent.target = t.id;
      return t.id;
    }
  }
  fail(Code::TargetNotFound, "lemma '", verb_lemma, "' in ",
       sent.sent_id.empty() ? sent.text : sent.sent_id);
}

}  // namespace predsym
