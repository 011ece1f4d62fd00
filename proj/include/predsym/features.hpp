#pragma once

#include <array>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "predsym/conllu.hpp"
#include "predsym/diag.hpp"
#include "predsym/text.hpp"

namespace predsym {

constexpr int kNumFeatures = 18;

inline const std::array<std::string, kNumFeatures> &feature_names() {
  static const std::array<std::string, kNumFeatures> names = {
      "trans",     "trans_mod", "v_tense",  "v_act",     "modal",      "neg",
      "is_root",   "direction", "sing_sub", "sing_obj",  "conj_sub",   "conj_obj",
      "rcp_phrase", "ani_sub",  "ani_match", "sub_more_freq", "num_np", "num_clauses"};
  return names;
}

inline int feature_index(const std::string &name) {
  const auto &names = feature_names();
  for (int i = 0; i < kNumFeatures; ++i)
    if (names[static_cast<std::size_t>(i)] == name) return i;
  fail(Code::BadConfig, "unknown feature '", name, "'");
}

using FeatureVector = std::array<double, kNumFeatures>;

struct NgramTable {
  std::unordered_map<std::string, long long> entries;
  long long count(const std::string &bigram) const {
    auto it = entries.find(bigram);
    return it == entries.end() ? 0 : it->second;
  }
};

inline NgramTable load_ngrams(const std::string &path) {
  NgramTable table;
  auto lines = read_lines(path);
  for (std::size_t li = 0; li < lines.size(); ++li) {
    if (trim(lines[li]).empty()) continue;
    std::string ctx = path + ":" + std::to_string(li + 1);
    auto f = split(lines[li], '\t');
    if (f.size() != 2) fail(Code::MalformedLine, "expected 2 fields at ", ctx);
    long long n = require_long(f[1], ctx);
    if (n < 0) fail(Code::MalformedLine, "negative count at ", ctx);
    table.entries[f[0]] += n;  // summed on repeated keys
  }
  return table;
}

inline int sub_more_freq(const std::string &subject_lemma, const std::string &object_lemma,
                         const std::string &verb_lemma, const NgramTable &ngrams) {
  long long fs = ngrams.count(lower(subject_lemma) + " " + lower(verb_lemma));
  long long fo = object_lemma.empty()
                     ? 0
                     : ngrams.count(lower(object_lemma) + " " + lower(verb_lemma));
  return fs > fo ? 1 : 0;  // ties favour the object reading
}

namespace detail {

inline const std::set<std::string> &modal_lemmas() {
  static const std::set<std::string> s = {"can", "could", "may", "might", "would", "should"};
  return s;
}
inline const std::set<std::string> &neg_lemmas() {
  static const std::set<std::string> s = {"not", "n't", "never"};
  return s;
}
inline const std::set<std::string> &clausal_rels() {
  static const std::set<std::string> s = {"conj",  "advcl", "ccomp",
                                          "xcomp", "parataxis", "acl", "acl:relcl"};
  return s;
}
inline bool nominal(const std::string &upos) {
  return upos == "NOUN" || upos == "PROPN" || upos == "PRON";
}

inline std::vector<const Token *> children(const DepSentence &sent, int idx) {
  std::vector<const Token *> out;
  for (const auto &t : sent.tokens)
    if (t.head == idx) out.push_back(&t);
  return out;
}

// 1-based indices covered by "each other" / "one another" bigrams
inline std::set<int> rcp_indices(const DepSentence &sent) {
  std::set<int> out;
  for (std::size_t i = 0; i + 1 < sent.tokens.size(); ++i) {
    std::string a = lower(sent.tokens[i].form);
    std::string b = lower(sent.tokens[i + 1].form);
    if ((a == "each" && b == "other") || (a == "one" && b == "another")) {
      out.insert(static_cast<int>(i) + 1);
      out.insert(static_cast<int>(i) + 2);
    }
  }
  return out;
}

inline std::vector<const Token *> subtree(const DepSentence &sent, int idx) {
  std::set<int> ids = {idx};
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto &t : sent.tokens) {
      if (ids.count(t.head) && !ids.count(t.id)) {
        ids.insert(t.id);
        changed = true;
      }
    }
  }
  std::vector<const Token *> out;
  for (const auto &t : sent.tokens)
    if (ids.count(t.id)) out.push_back(&t);
  return out;
}

// Subject of the target; conjoined verbs inherit the subject of their head.
inline const Token *find_subject(const DepSentence &sent, int t_idx) {
  for (const auto &t : sent.tokens)
    if (t.head == t_idx && (t.deprel == "nsubj" || t.deprel == "nsubj:pass")) return &t;
  const Token &v = sent.tokens[static_cast<std::size_t>(t_idx - 1)];
  if (v.deprel == "conj" && v.head > 0) {
    for (const auto &t : sent.tokens)
      if (t.head == v.head && (t.deprel == "nsubj" || t.deprel == "nsubj:pass")) return &t;
  }
  return nullptr;
}

// Direct object if present, else the nearest oblique nominal; reciprocal
// pronouns refer back to the subject and never count as an entity.
inline const Token *entity_object(const DepSentence &sent, int t_idx,
                                  const std::set<int> &rcp) {
  for (const auto &t : sent.tokens)
    if (t.head == t_idx && t.deprel == "obj" && !rcp.count(t.id)) return &t;
  const Token *best = nullptr;
  int best_dist = 0;
  for (const auto &t : sent.tokens) {
    if (t.head != t_idx || (t.deprel != "iobj" && t.deprel != "obl")) continue;
    if (rcp.count(t.id) || !nominal(t.upos)) continue;
    bool by_agent = false;
    for (const Token *c : children(sent, t.id))
      if (c->deprel == "case" && c->lemma == "by") by_agent = true;
    if (by_agent) continue;
    int dist = t.id > t_idx ? t.id - t_idx : t_idx - t.id;
    if (!best || dist < best_dist) {
      best = &t;
      best_dist = dist;
    }
  }
  return best;
}

inline bool animate(const Token &t) {
  if (t.entity == "PERSON" || t.entity == "ORGANIZATION" || t.entity == "ANIMATE")
    return true;
  return t.upos == "PRON" && t.entity != "INANIMATE";
}

}  // namespace detail

struct BinarizeThresholds {
  int np_threshold = 3;
  int clause_threshold = 2;
};

inline FeatureVector extract_features(const DepSentence &sent, const NgramTable &ngrams,
                                      Diagnostics *diag = nullptr) {
  using namespace detail;
  if (sent.target < 1 || sent.target > static_cast<int>(sent.tokens.size()))
    fail(Code::TargetNotFound, "target index unset for ",
         sent.sent_id.empty() ? sent.text : sent.sent_id);
  int t_idx = sent.target;
  const Token &target = sent.tokens[static_cast<std::size_t>(t_idx - 1)];
  auto rcp = rcp_indices(sent);
  auto kids = children(sent, t_idx);

  FeatureVector fv{};
  auto set = [&](const char *name, double v) { fv[static_cast<std::size_t>(feature_index(name))] = v; };

  bool trans = false;
  for (const Token *k : kids)
    if (k->deprel == "obj") trans = true;
  set("trans", trans ? 1 : 0);

  int tm = 0;
  for (const Token *k : kids) {
    if (k->deprel == "obl") {
      auto cs = children(sent, k->id);
      bool any_case = false, any_by = false;
      for (const Token *c : cs)
        if (c->deprel == "case") {
          any_case = true;
          if (c->lemma == "by") any_by = true;
        }
      if (any_case && !any_by) tm = 1;
    }
    if (k->deprel == "prep") tm = 1;  // legacy label, kept as a modifier signal
  }
  set("trans_mod", tm);

  bool vt = target.feat("Tense") == "Pres";
  for (const Token *k : kids)
    if ((k->deprel == "aux" || k->deprel == "aux:pass") && k->feat("Tense") == "Pres")
      vt = true;
  set("v_tense", vt ? 1 : 0);

  bool passive = target.feat("Voice") == "Pass";
  for (const Token *k : kids)
    if (k->deprel == "aux:pass" || k->deprel == "nsubj:pass") passive = true;
  set("v_act", passive ? 0 : 1);

  bool modal = false;
  for (const Token *k : kids)
    if (k->deprel == "aux" && modal_lemmas().count(lower(k->lemma))) modal = true;
  set("modal", modal ? 1 : 0);

  bool neg = target.feat("Polarity") == "Neg";
  for (const Token *k : kids)
    if (k->deprel == "advmod" && neg_lemmas().count(lower(k->lemma))) neg = true;
  set("neg", neg ? 1 : 0);

  set("is_root", target.deprel == "root" ? 1 : 0);
  set("rcp_phrase", rcp.empty() ? 0 : 1);

  const Token *subj = find_subject(sent, t_idx);
  const Token *obj = entity_object(sent, t_idx, rcp);
  if (!subj)
    warn_or_drop(diag, Code::NoSubjectFound, "subject-dependent features default to 0",
                 sent.sent_id);

  int conj_sub = 0;
  if (subj) {
    if (subj->deprel == "conj") conj_sub = 1;
    for (const Token *c : children(sent, subj->id))
      if (c->deprel == "conj") conj_sub = 1;
  }
  set("conj_sub", conj_sub);

  int direction = 0;
  if (subj) {
    for (const Token *k : kids) {
      if ((k->deprel == "obj" || k->deprel == "iobj" || k->deprel == "obl") &&
          k->id > t_idx) {
        for (const Token *x : subtree(sent, k->id)) {
          if (nominal(x->upos) && !rcp.count(x->id) && x->feat("Reflex") != "Yes")
            direction = 1;
        }
      }
    }
    if (conj_sub && !trans) direction = 0;  // conjoined intransitive reads as collective
  }
  set("direction", direction);

  if (subj) {
    set("sing_sub", (subj->feat("Number") == "Sing" && !conj_sub) ? 1 : 0);
    set("ani_sub", animate(*subj) ? 1 : 0);
  }
  if (obj) {
    int conj_obj = obj->deprel == "conj" ? 1 : 0;
    for (const Token *c : children(sent, obj->id))
      if (c->deprel == "conj") conj_obj = 1;
    set("conj_obj", conj_obj);
    set("sing_obj", (obj->feat("Number") == "Sing" && !conj_obj) ? 1 : 0);
  }
  if (subj) {
    set("ani_match", !obj ? 1 : (animate(*subj) == animate(*obj) ? 1 : 0));
    set("sub_more_freq",
        sub_more_freq(subj->lemma, obj ? obj->lemma : std::string(), target.lemma, ngrams));
  }

  int num_np = 0;
  for (const auto &t : sent.tokens)
    if (nominal(t.upos) && t.deprel != "nmod:poss") ++num_np;
  set("num_np", num_np);

  int num_clauses = 1;
  for (const auto &t : sent.tokens)
    if (t.upos == "VERB" && clausal_rels().count(t.deprel)) ++num_clauses;
  set("num_clauses", num_clauses);

  return fv;
}

inline FeatureVector binarize(const FeatureVector &fv, const BinarizeThresholds &th = {}) {
  FeatureVector out = fv;
  int inp = feature_index("num_np");
  int icl = feature_index("num_clauses");
  out[static_cast<std::size_t>(inp)] = fv[static_cast<std::size_t>(inp)] >= th.np_threshold ? 1.0 : 0.0;
  out[static_cast<std::size_t>(icl)] = fv[static_cast<std::size_t>(icl)] >= th.clause_threshold ? 1.0 : 0.0;
  return out;
}

}  // namespace predsym
