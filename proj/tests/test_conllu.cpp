#include <catch2/catch_amalgamated.hpp>

#include "predsym/conllu.hpp"

#include "helpers.hpp"

using namespace predsym;
using testutil::TmpDir;
using testutil::repo_path;
using testutil::slurp;

namespace {

Token make_tok(int id, int head, const std::string &deprel = "dep") {
  Token t;
  t.id = id;
  t.form = "w" + std::to_string(id);
  t.lemma = t.form;
  t.upos = "NOUN";
  t.head = head;
  t.deprel = deprel;
  return t;
}

}  // namespace

TEST_CASE("bundled treebank parses and serializes back to the same bytes") {
  Diagnostics diag;
  auto sents = parse_conllu(repo_path("data/sis.conllu"), &diag);
  REQUIRE(sents.size() == 400);
  CHECK(diag.empty());

  const auto &s = sents[0];
  CHECK(s.sent_id == "s001");
  CHECK(s.text == "The children and John married.");
  REQUIRE(s.tokens.size() == 6);
  CHECK(s.tokens[1].form == "children");
  CHECK(s.tokens[1].lemma == "child");
  CHECK(s.tokens[1].upos == "NOUN");
  CHECK(s.tokens[1].head == 5);
  CHECK(s.tokens[1].deprel == "nsubj");
  CHECK(s.tokens[1].feat("Number") == "Plur");
  CHECK(s.tokens[4].feat("Tense") == "Past");
  CHECK(s.tokens[4].feat("Missing") == "");

  std::string rebuilt;
  for (const auto &sent : sents) rebuilt += serialize_conllu(sent);
  CHECK(rebuilt == slurp(repo_path("data/sis.conllu")));
}

TEST_CASE("legacy dependency labels are folded into current names") {
  TmpDir tmp("conllu");
  std::string block =
      "# sent_id = x1\n"
      "1\tJohn\tJohn\tPROPN\t_\t_\t3\tnsubjpass\t_\t_\n"
      "2\twas\tbe\tAUX\t_\t_\t3\tauxpass\t_\t_\n"
      "3\tseen\tsee\tVERB\t_\t_\t0\troot\t_\t_\n"
      "4\tnot\tnot\tPART\t_\t_\t3\tneg\t_\t_\n"
      "5\tdog\tdog\tNOUN\t_\t_\t3\tdobj\t_\t_\n"
      "6\this\this\tPRON\t_\t_\t5\tposs\t_\t_\n"
      "7\tran\trun\tVERB\t_\t_\t5\trcmod\t_\t_\n\n";
  auto sents = parse_conllu(tmp.write("legacy.conllu", block));
  REQUIRE(sents.size() == 1);
  const auto &t = sents[0].tokens;
  CHECK(t[0].deprel == "nsubj:pass");
  CHECK(t[1].deprel == "aux:pass");
  CHECK(t[3].deprel == "advmod");
  CHECK(t[4].deprel == "obj");
  CHECK(t[5].deprel == "nmod:poss");
  CHECK(t[6].deprel == "acl:relcl");
}

TEST_CASE("multiword ranges and empty nodes are skipped with warnings") {
  TmpDir tmp("conllu");
  std::string block =
      "# sent_id = x1\n"
      "1-2\tdon't\t_\t_\t_\t_\t_\t_\t_\t_\n"
      "1\tdo\tdo\tAUX\t_\t_\t3\taux\t_\t_\n"
      "2\tnot\tnot\tPART\t_\t_\t3\tadvmod\t_\t_\n"
      "3\tgo\tgo\tVERB\t_\t_\t0\troot\t_\t_\n"
      "3.1\telided\t_\t_\t_\t_\t_\t_\t_\t_\n\n";
  Diagnostics diag;
  auto sents = parse_conllu(tmp.write("ranges.conllu", block), &diag);
  REQUIRE(sents.size() == 1);
  CHECK(sents[0].tokens.size() == 3);
  CHECK(diag.count(Code::MalformedLine) == 2);
}

TEST_CASE("tree validation rejects broken head structures") {
  auto sent_with = [](std::vector<Token> toks) {
    DepSentence s;
    s.sent_id = "toy";
    s.tokens = std::move(toks);
    return s;
  };
  auto code_of = [](const DepSentence &s) {
    try {
      validate_tree(s, "toy");
      return Code::Ok;
    } catch (const Error &e) {
      return e.code();
    }
  };

  CHECK(code_of(sent_with({make_tok(1, 0, "root"), make_tok(2, 1)})) == Code::Ok);
  CHECK(code_of(sent_with({make_tok(1, 9, "root")})) == Code::TokenIndexOutOfRange);
  CHECK(code_of(sent_with({make_tok(1, -1, "root")})) == Code::TokenIndexOutOfRange);
  CHECK(code_of(sent_with({make_tok(1, 1, "root")})) == Code::CycleDetected);
  CHECK(code_of(sent_with({make_tok(1, 2), make_tok(2, 1)})) == Code::NoRoot);
  CHECK(code_of(sent_with({make_tok(1, 0, "root"), make_tok(2, 0, "root")})) ==
        Code::MultipleRoots);
  // root exists but 2 and 3 point at each other
  CHECK(code_of(sent_with({make_tok(1, 0, "root"), make_tok(2, 3), make_tok(3, 2)})) ==
        Code::CycleDetected);
}

TEST_CASE("token ids must be sequential and rows must have ten columns") {
  TmpDir tmp("conllu");
  std::string gap =
      "1\ta\ta\tNOUN\t_\t_\t0\troot\t_\t_\n"
      "3\tb\tb\tNOUN\t_\t_\t1\tdep\t_\t_\n\n";
  try {
    parse_conllu(tmp.write("gap.conllu", gap));
    FAIL("expected throw");
  } catch (const Error &e) {
    CHECK(e.code() == Code::MalformedLine);
  }

  std::string narrow = "1\ta\ta\tNOUN\t_\t_\t0\troot\t_\n\n";
  CHECK_THROWS_AS(parse_conllu(tmp.write("narrow.conllu", narrow)), Error);
}

TEST_CASE("entity tags attach from the side-channel table") {
  auto sents = parse_conllu(repo_path("data/sis.conllu"));
  attach_annotations(sents, repo_path("data/annotations.tsv"));
  const auto &s = sents[0];
  CHECK(s.tokens[1].entity == "ANIMATE");  // children
  CHECK(s.tokens[3].entity == "PERSON");   // John
  CHECK(s.tokens[0].entity == "");
}

TEST_CASE("annotation errors carry the right codes") {
  TmpDir tmp("conllu");
  std::string block = "1\ta\ta\tNOUN\t_\t_\t0\troot\t_\t_\n\n";
  auto make = [&] {
    auto sents = parse_conllu(tmp.write("one.conllu", "# sent_id = x1\n" + block));
    return sents;
  };

  auto code_of = [&](const std::string &tsv) {
    auto sents = make();
    try {
      attach_annotations(sents, tmp.write("ann.tsv", tsv));
      return Code::Ok;
    } catch (const Error &e) {
      return e.code();
    }
  };

  CHECK(code_of("x1\t1\tPERSON\n") == Code::Ok);
  CHECK(code_of("zz\t1\tPERSON\n") == Code::UnknownSentence);
  CHECK(code_of("x1\t9\tPERSON\n") == Code::TokenIndexOutOfRange);
  CHECK(code_of("x1\t0\tPERSON\n") == Code::TokenIndexOutOfRange);
  CHECK(code_of("x1\t1\n") == Code::MalformedLine);
}

TEST_CASE("inline MISC entity carrier is honored") {
  auto sents = parse_conllu(repo_path("tests/data/worked_example.conllu"));
  REQUIRE(sents.size() == 1);
  CHECK(sents[0].tokens[3].entity == "PERSON");
  CHECK(sents[0].tokens[0].entity == "");
}

TEST_CASE("target search takes the first verbal match, case-insensitive") {
  auto sents = parse_conllu(repo_path("tests/data/worked_example.conllu"));
  auto &s = sents[0];
  CHECK(find_target(s, "push") == 2);  // not the conjoined second "pushed"
  CHECK(s.target == 2);
  CHECK(find_target(s, "PUSH") == 2);
  CHECK_THROWS_AS(find_target(s, "dance"), Error);

  // a nominal homograph before the verb must not match
  TmpDir tmp("conllu");
  std::string block =
      "# sent_id = x1\n"
      "1\tmarch\tmarch\tNOUN\t_\t_\t3\tnsubj\t_\t_\n"
      "2\twill\twill\tAUX\t_\t_\t3\taux\t_\t_\n"
      "3\tmarch\tmarch\tVERB\t_\t_\t0\troot\t_\t_\n\n";
  auto homog = parse_conllu(tmp.write("homog.conllu", block));
  CHECK(find_target(homog[0], "march") == 3);
  CHECK(find_target(homog[0], "will") == 2);  // AUX is acceptable
}

TEST_CASE("morphology keys serialize in case-insensitive order") {
  auto feats = parse_feats("NumType=Card|Number=Sing", "toy");
  CHECK(feats_to_string(feats) == "Number=Sing|NumType=Card");
  CHECK(feats_to_string({}) == "_");
  CHECK(parse_feats("_", "toy").empty());
  CHECK_THROWS_AS(parse_feats("NoEquals", "toy"), Error);
}

TEST_CASE("empty treebank file is rejected") {
  TmpDir tmp("conllu");
  CHECK_THROWS_AS(parse_conllu(tmp.write("empty.conllu", "")), Error);
  CHECK_THROWS_AS(parse_conllu(tmp.write("blank.conllu", "\n\n")), Error);
}
