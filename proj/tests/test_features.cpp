#include <catch2/catch_amalgamated.hpp>

#include "predsym/conllu.hpp"
#include "predsym/corpus.hpp"
#include "predsym/features.hpp"

#include <unordered_map>

#include "helpers.hpp"

using namespace predsym;
using testutil::TmpDir;
using testutil::repo_path;

namespace {

Token tok(int id, const std::string &form, const std::string &lemma,
          const std::string &upos, const std::string &feats, int head,
          const std::string &deprel, const std::string &entity = "") {
  Token t;
  t.id = id;
  t.form = form;
  t.lemma = lemma;
  t.upos = upos;
  t.feats = parse_feats(feats, "toy");
  t.head = head;
  t.deprel = deprel;
  t.entity = entity;
  return t;
}

DepSentence sent(std::vector<Token> toks, int target) {
  DepSentence s;
  s.sent_id = "toy";
  s.tokens = std::move(toks);
  s.target = target;
  return s;
}

double feat_of(const FeatureVector &fv, const std::string &name) {
  return fv[static_cast<std::size_t>(feature_index(name))];
}

}  // namespace

TEST_CASE("extraction reproduces the shipped gold table on every sentence") {
  auto corpus = load_corpus(repo_path("data/sis.tsv"));
  auto sents = parse_conllu(repo_path("data/sis.conllu"));
  attach_annotations(sents, repo_path("data/annotations.tsv"));
  auto ngrams = load_ngrams(repo_path("data/ngrams.tsv"));

  std::unordered_map<std::string, DepSentence *> by_id;
  for (auto &s : sents) by_id[s.sent_id] = &s;

  // gold rows keyed by sentence id, columns in canonical order
  auto lines = read_lines(repo_path("data/gold_features.tsv"));
  auto header = split(lines[0], '\t');
  REQUIRE(header.size() == 19);
  for (int j = 0; j < kNumFeatures; ++j)
    REQUIRE(header[static_cast<std::size_t>(j + 1)] == feature_names()[static_cast<std::size_t>(j)]);

  int rows = 0;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    if (trim(lines[li]).empty()) continue;
    auto f = split(lines[li], '\t');
    REQUIRE(f.size() == 19);
    const auto &rec = corpus.by_id(f[0]);
    DepSentence *ds = by_id.at(f[0]);
    find_target(*ds, rec.verb);
    auto fv = extract_features(*ds, ngrams);
    for (int j = 0; j < kNumFeatures; ++j) {
      CAPTURE(f[0], feature_names()[static_cast<std::size_t>(j)]);
      CHECK(fv[static_cast<std::size_t>(j)] ==
            static_cast<double>(require_long(f[static_cast<std::size_t>(j + 1)], "gold")));
    }
    ++rows;
  }
  CHECK(rows == 400);
}

TEST_CASE("worked example sentence yields the expected row") {
  auto sents = parse_conllu(repo_path("tests/data/worked_example.conllu"));
  auto ngrams = load_ngrams(repo_path("data/ngrams.tsv"));
  REQUIRE(ngrams.count("i push") == 420);
  REQUIRE(ngrams.count("friend push") == 35);

  auto &s = sents[0];
  find_target(s, "push");
  auto fv = extract_features(s, ngrams);

  const double expected[kNumFeatures] = {1, 0, 0, 1, 0, 0, 1, 1, 1,
                                         0, 0, 0, 0, 1, 1, 1, 4, 2};
  for (int j = 0; j < kNumFeatures; ++j) {
    CAPTURE(feature_names()[static_cast<std::size_t>(j)]);
    CHECK(fv[static_cast<std::size_t>(j)] == expected[j]);
  }
}

TEST_CASE("counts binarize at the documented thresholds") {
  FeatureVector fv{};
  fv[static_cast<std::size_t>(feature_index("num_np"))] = 2;
  fv[static_cast<std::size_t>(feature_index("num_clauses"))] = 1;
  auto b = binarize(fv);
  CHECK(feat_of(b, "num_np") == 0.0);
  CHECK(feat_of(b, "num_clauses") == 0.0);

  fv[static_cast<std::size_t>(feature_index("num_np"))] = 3;
  fv[static_cast<std::size_t>(feature_index("num_clauses"))] = 2;
  b = binarize(fv);
  CHECK(feat_of(b, "num_np") == 1.0);
  CHECK(feat_of(b, "num_clauses") == 1.0);

  BinarizeThresholds th;
  th.np_threshold = 4;
  th.clause_threshold = 3;
  b = binarize(fv, th);
  CHECK(feat_of(b, "num_np") == 0.0);
  CHECK(feat_of(b, "num_clauses") == 0.0);

  // other columns pass through untouched
  fv[static_cast<std::size_t>(feature_index("trans"))] = 1;
  CHECK(feat_of(binarize(fv), "trans") == 1.0);
}

TEST_CASE("subject frequency comparison and its tie rule") {
  NgramTable t;
  t.entries["dog chase"] = 10;
  t.entries["cat chase"] = 10;
  t.entries["man chase"] = 30;
  CHECK(sub_more_freq("man", "dog", "chase", t) == 1);
  CHECK(sub_more_freq("dog", "man", "chase", t) == 0);
  CHECK(sub_more_freq("dog", "cat", "chase", t) == 0);  // tie
  CHECK(sub_more_freq("yeti", "dog", "chase", t) == 0);
  CHECK(sub_more_freq("yeti", "gnome", "chase", t) == 0);  // both absent
  CHECK(sub_more_freq("Man", "DOG", "CHASE", t) == 1);     // lowercased lookups
  CHECK(sub_more_freq("man", "", "chase", t) == 1);        // no object entity
  CHECK(sub_more_freq("yeti", "", "chase", t) == 0);
}

TEST_CASE("frequency table loader sums duplicates and rejects junk") {
  TmpDir tmp("features");
  auto path = tmp.write("ng.tsv", "a b\t3\nc d\t5\na b\t4\n");
  auto t = load_ngrams(path);
  CHECK(t.count("a b") == 7);
  CHECK(t.count("c d") == 5);
  CHECK(t.count("z z") == 0);

  CHECK_THROWS_AS(load_ngrams(tmp.write("neg.tsv", "a b\t-1\n")), Error);
  CHECK_THROWS_AS(load_ngrams(tmp.write("wide.tsv", "a b\t1\t2\n")), Error);
  CHECK_THROWS_AS(load_ngrams(tmp.write("nan.tsv", "a b\tmany\n")), Error);
}

TEST_CASE("reciprocal pronouns are flagged but never count as objects") {
  NgramTable ng;
  auto s = sent({tok(1, "They", "they", "PRON", "Number=Plur", 2, "nsubj"),
                 tok(2, "hugged", "hug", "VERB", "Tense=Past", 0, "root"),
                 tok(3, "each", "each", "DET", "_", 4, "det"),
                 tok(4, "other", "other", "PRON", "_", 2, "obj")},
                2);
  auto fv = extract_features(s, ng);
  CHECK(feat_of(fv, "rcp_phrase") == 1.0);
  CHECK(feat_of(fv, "trans") == 1.0);      // the obj relation itself still counts
  CHECK(feat_of(fv, "direction") == 0.0);  // but points at no independent entity
  CHECK(feat_of(fv, "sing_obj") == 0.0);
  CHECK(feat_of(fv, "conj_obj") == 0.0);
  CHECK(feat_of(fv, "ani_match") == 1.0);  // objectless sentences match by default
}

TEST_CASE("reflexive objects do not establish direction") {
  NgramTable ng;
  auto s = sent({tok(1, "John", "John", "PROPN", "Number=Sing", 2, "nsubj"),
                 tok(2, "hit", "hit", "VERB", "Tense=Past", 0, "root"),
                 tok(3, "himself", "himself", "PRON", "Number=Sing|Reflex=Yes", 2, "obj")},
                2);
  auto fv = extract_features(s, ng);
  CHECK(feat_of(fv, "trans") == 1.0);
  CHECK(feat_of(fv, "direction") == 0.0);
  CHECK(feat_of(fv, "sing_obj") == 1.0);
  // untagged proper noun reads inanimate, pronoun reads animate
  CHECK(feat_of(fv, "ani_sub") == 0.0);
  CHECK(feat_of(fv, "ani_match") == 0.0);
}

TEST_CASE("passive with by-agent: voice off, agent excluded from objecthood") {
  NgramTable ng;
  auto s = sent({tok(1, "John", "John", "PROPN", "Number=Sing", 3, "nsubj:pass"),
                 tok(2, "was", "be", "AUX", "Tense=Past", 3, "aux:pass"),
                 tok(3, "pushed", "push", "VERB", "Tense=Past|Voice=Pass", 0, "root"),
                 tok(4, "by", "by", "ADP", "_", 5, "case"),
                 tok(5, "Mary", "Mary", "PROPN", "Number=Sing", 3, "obl")},
                3);
  auto fv = extract_features(s, ng);
  CHECK(feat_of(fv, "v_act") == 0.0);
  CHECK(feat_of(fv, "trans") == 0.0);
  CHECK(feat_of(fv, "trans_mod") == 0.0);  // by-phrases are not true modifiers
  CHECK(feat_of(fv, "sing_sub") == 1.0);   // passive subject still a subject
  CHECK(feat_of(fv, "ani_match") == 1.0);  // agent is not an entity object
  CHECK(feat_of(fv, "direction") == 1.0);  // post-verbal nominal exists regardless
}

TEST_CASE("conjoined subjects suppress singularity and collective direction") {
  NgramTable ng;
  auto s = sent({tok(1, "The", "the", "DET", "_", 2, "det"),
                 tok(2, "man", "man", "NOUN", "Number=Sing", 6, "nsubj"),
                 tok(3, "and", "and", "CCONJ", "_", 5, "cc"),
                 tok(4, "the", "the", "DET", "_", 5, "det"),
                 tok(5, "woman", "woman", "NOUN", "Number=Sing", 2, "conj"),
                 tok(6, "met", "meet", "VERB", "Tense=Past", 0, "root")},
                6);
  auto fv = extract_features(s, ng);
  CHECK(feat_of(fv, "conj_sub") == 1.0);
  CHECK(feat_of(fv, "sing_sub") == 0.0);
  CHECK(feat_of(fv, "direction") == 0.0);
  CHECK(feat_of(fv, "num_np") == 2.0);
  CHECK(feat_of(fv, "num_clauses") == 1.0);
}

TEST_CASE("conjoined verb inherits the subject of its head") {
  NgramTable ng;
  auto s = sent({tok(1, "John", "John", "PROPN", "Number=Sing", 2, "nsubj"),
                 tok(2, "ate", "eat", "VERB", "Tense=Past", 0, "root"),
                 tok(3, "and", "and", "CCONJ", "_", 4, "cc"),
                 tok(4, "slept", "sleep", "VERB", "Tense=Past", 2, "conj")},
                4);
  Diagnostics diag;
  auto fv = extract_features(s, ng, &diag);
  CHECK(diag.count(Code::NoSubjectFound) == 0);
  CHECK(feat_of(fv, "sing_sub") == 1.0);
  CHECK(feat_of(fv, "is_root") == 0.0);
  CHECK(feat_of(fv, "num_clauses") == 2.0);
}

TEST_CASE("subjectless sentence warns and zeroes dependent features") {
  NgramTable ng;
  auto s = sent({tok(1, "Run", "run", "VERB", "Mood=Imp", 0, "root")}, 1);
  Diagnostics diag;
  auto fv = extract_features(s, ng, &diag);
  CHECK(diag.count(Code::NoSubjectFound) == 1);
  CHECK(feat_of(fv, "sing_sub") == 0.0);
  CHECK(feat_of(fv, "ani_sub") == 0.0);
  CHECK(feat_of(fv, "ani_match") == 0.0);
  CHECK(feat_of(fv, "sub_more_freq") == 0.0);
  CHECK(feat_of(fv, "is_root") == 1.0);
}

TEST_CASE("unset target index is an error") {
  NgramTable ng;
  auto s = sent({tok(1, "Run", "run", "VERB", "_", 0, "root")}, 0);
  try {
    extract_features(s, ng);
    FAIL("expected throw");
  } catch (const Error &e) {
    CHECK(e.code() == Code::TargetNotFound);
  }
}

TEST_CASE("modality, negation and tense come from the right dependents") {
  NgramTable ng;
  auto s = sent({tok(1, "They", "they", "PRON", "Number=Plur", 4, "nsubj"),
                 tok(2, "could", "can", "AUX", "Tense=Past", 4, "aux"),
                 tok(3, "not", "not", "PART", "Polarity=Neg", 4, "advmod"),
                 tok(4, "meet", "meet", "VERB", "VerbForm=Inf", 0, "root")},
                4);
  auto fv = extract_features(s, ng);
  CHECK(feat_of(fv, "modal") == 1.0);
  CHECK(feat_of(fv, "neg") == 1.0);
  CHECK(feat_of(fv, "v_tense") == 0.0);

  auto s2 = sent({tok(1, "They", "they", "PRON", "Number=Plur", 3, "nsubj"),
                  tok(2, "can", "can", "AUX", "Tense=Pres", 3, "aux"),
                  tok(3, "meet", "meet", "VERB", "VerbForm=Inf", 0, "root")},
                 3);
  auto fv2 = extract_features(s2, ng);
  CHECK(feat_of(fv2, "v_tense") == 1.0);
  CHECK(feat_of(fv2, "modal") == 1.0);

  // negation marked on the verb itself
  auto s3 = sent({tok(1, "They", "they", "PRON", "Number=Plur", 2, "nsubj"),
                  tok(2, "met", "meet", "VERB", "Polarity=Neg|Tense=Past", 0, "root")},
                 2);
  CHECK(feat_of(extract_features(s3, ng), "neg") == 1.0);
}

TEST_CASE("modifier flag: cased obliques yes, bare or by-cased no") {
  NgramTable ng;
  auto cased = sent({tok(1, "They", "they", "PRON", "Number=Plur", 2, "nsubj"),
                     tok(2, "argued", "argue", "VERB", "Tense=Past", 0, "root"),
                     tok(3, "with", "with", "ADP", "_", 4, "case"),
                     tok(4, "Mary", "Mary", "PROPN", "Number=Sing", 2, "obl")},
                    2);
  CHECK(feat_of(extract_features(cased, ng), "trans_mod") == 1.0);

  auto bare = sent({tok(1, "They", "they", "PRON", "Number=Plur", 2, "nsubj"),
                    tok(2, "argued", "argue", "VERB", "Tense=Past", 0, "root"),
                    tok(3, "yesterday", "yesterday", "NOUN", "_", 2, "obl")},
                   2);
  CHECK(feat_of(extract_features(bare, ng), "trans_mod") == 0.0);

  // legacy attachment style straight under the verb
  auto legacy = sent({tok(1, "They", "they", "PRON", "Number=Plur", 2, "nsubj"),
                      tok(2, "argued", "argue", "VERB", "Tense=Past", 0, "root"),
                      tok(3, "with", "with", "ADP", "_", 2, "prep")},
                     2);
  CHECK(feat_of(extract_features(legacy, ng), "trans_mod") == 1.0);
}

TEST_CASE("clause counting only looks at verbal tokens") {
  NgramTable ng;
  auto s = sent({tok(1, "left", "leave", "VERB", "Tense=Past", 0, "root"),
                 tok(2, "because", "because", "SCONJ", "_", 3, "mark"),
                 tok(3, "was", "be", "AUX", "Tense=Past", 1, "advcl")},
                1);
  Diagnostics diag;
  auto fv = extract_features(s, ng, &diag);
  CHECK(feat_of(fv, "num_clauses") == 1.0);

  auto s2 = sent({tok(1, "left", "leave", "VERB", "Tense=Past", 0, "root"),
                  tok(2, "because", "because", "SCONJ", "_", 3, "mark"),
                  tok(3, "rained", "rain", "VERB", "Tense=Past", 1, "advcl")},
                 1);
  CHECK(feat_of(extract_features(s2, ng, &diag), "num_clauses") == 2.0);
}
