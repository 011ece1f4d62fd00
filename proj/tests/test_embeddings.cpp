#include <catch2/catch_amalgamated.hpp>

#include "predsym/embeddings.hpp"

#include <algorithm>

#include "helpers.hpp"

using namespace predsym;
using testutil::TmpDir;
using testutil::repo_path;

namespace {

DepSentence words(const std::vector<std::string> &forms) {
  DepSentence s;
  s.sent_id = "toy";
  int id = 1;
  for (const auto &f : forms) {
    Token t;
    t.id = id++;
    t.form = f;
    t.lemma = f;
    t.upos = "NOUN";
    t.head = t.id == 1 ? 0 : 1;
    t.deprel = t.id == 1 ? "root" : "dep";
    s.tokens.push_back(t);
  }
  return s;
}

}  // namespace

TEST_CASE("headerless table infers the dimension from the first row") {
  TmpDir tmp("emb");
  auto path = tmp.write("v.txt", "cat 1.0 0.0\ndog 0.0 1.0\n");
  auto t = load_embedding_table(path, EmbeddingFormat::headerless);
  CHECK(t.dimension == 2);
  CHECK(t.vocab.size() == 2);
  CHECK(t.vocab.at("cat")[0] == 1.0);
  CHECK(t.vocab.at("dog")[1] == 1.0);
}

TEST_CASE("headered table reads the declared dimension") {
  TmpDir tmp("emb");
  auto path = tmp.write("v.txt", "2 3\ncat 1 2 3\ndog 4 5 6\n");
  Diagnostics diag;
  auto t = load_embedding_table(path, EmbeddingFormat::with_header, &diag);
  CHECK(t.dimension == 3);
  CHECK(t.vocab.size() == 2);
  CHECK(diag.empty());

  // wrong declared count is only a warning
  auto path2 = tmp.write("v2.txt", "5 3\ncat 1 2 3\ndog 4 5 6\n");
  Diagnostics diag2;
  auto t2 = load_embedding_table(path2, EmbeddingFormat::with_header, &diag2);
  CHECK(t2.vocab.size() == 2);
  CHECK(diag2.count(Code::CountMismatch) == 1);
}

TEST_CASE("ragged embedding rows are fatal") {
  TmpDir tmp("emb");
  auto path = tmp.write("v.txt", "cat 1 2\ndog 1 2 3\n");
  try {
    load_embedding_table(path, EmbeddingFormat::headerless);
    FAIL("expected throw");
  } catch (const Error &e) {
    CHECK(e.code() == Code::DimensionMismatch);
  }
}

TEST_CASE("duplicate words keep the first vector and warn") {
  TmpDir tmp("emb");
  auto path = tmp.write("v.txt", "cat 1 2\ncat 9 9\n");
  Diagnostics diag;
  auto t = load_embedding_table(path, EmbeddingFormat::headerless, &diag);
  CHECK(t.vocab.size() == 1);
  CHECK(t.vocab.at("cat")[0] == 1.0);
  CHECK(diag.count(Code::DuplicateKey) == 1);
}

TEST_CASE("empty embedding files are rejected") {
  TmpDir tmp("emb");
  CHECK_THROWS_AS(load_embedding_table(tmp.write("e.txt", ""), EmbeddingFormat::headerless),
                  Error);
  CHECK_THROWS_AS(
      load_embedding_table(tmp.write("h.txt", "0 5\n"), EmbeddingFormat::with_header),
      Error);
}

TEST_CASE("mean pooling: hand values, OOV skipping, invariances") {
  TmpDir tmp("emb");
  auto t = load_embedding_table(
      tmp.write("v.txt", "cat 1.0 0.0\ndog 0.0 1.0\nbird 4.0 4.0\n"),
      EmbeddingFormat::headerless);

  auto rep = mean_pool(words({"cat", "dog"}), t);
  CHECK(rep.vector[0] == 0.5);
  CHECK(rep.vector[1] == 0.5);
  CHECK_FALSE(rep.all_oov);

  // single known token is the identity
  auto one = mean_pool(words({"cat"}), t);
  CHECK(one.vector[0] == 1.0);
  CHECK(one.vector[1] == 0.0);

  // unknown tokens shrink the divisor instead of polluting the sum
  auto oov = mean_pool(words({"cat", "dog", "qwerty"}), t);
  CHECK(oov.vector[0] == 0.5);
  CHECK(oov.vector[1] == 0.5);

  // uppercase forms hit the lowercased vocabulary
  auto upper = mean_pool(words({"CAT", "Dog"}), t);
  CHECK(upper.vector[0] == 0.5);

  // order of tokens cannot matter
  auto fwd = mean_pool(words({"cat", "dog", "bird"}), t);
  auto rev = mean_pool(words({"bird", "dog", "cat"}), t);
  CHECK((fwd.vector.array() == rev.vector.array()).all());

  // scaling every vector scales the pooled mean
  EmbeddingTable scaled = t;
  for (auto &[w, v] : scaled.vocab) v *= 3.0;
  auto big = mean_pool(words({"cat", "dog", "bird"}), scaled);
  CHECK((big.vector - 3.0 * fwd.vector).norm() < 1e-12);

  // nothing known: zero vector plus a flag
  auto none = mean_pool(words({"qwerty", "azerty"}), t);
  CHECK(none.all_oov);
  CHECK(none.vector.norm() == 0.0);
}

TEST_CASE("precomputed sentence vectors load with their header") {
  TmpDir tmp("emb");
  auto path = tmp.write("c.tsv", "dim\t3\ns1\t1 2 3\ns2\t0 0 0\n");
  auto reps = load_contextual(path);
  REQUIRE(reps.size() == 2);
  CHECK(reps.at("s1").vector[2] == 3.0);
  CHECK(reps.at("s2").vector.norm() == 0.0);
  CHECK(reps.at("s1").source == ReprSource::contextual);
}

TEST_CASE("precomputed vectors reject duplicates and ragged rows") {
  TmpDir tmp("emb");
  try {
    load_contextual(tmp.write("d.tsv", "dim\t2\ns1\t1 2\ns1\t3 4\n"));
    FAIL("expected throw");
  } catch (const Error &e) {
    CHECK(e.code() == Code::DuplicateSentId);
  }
  try {
    load_contextual(tmp.write("r.tsv", "dim\t2\ns1\t1 2 3\n"));
    FAIL("expected throw");
  } catch (const Error &e) {
    CHECK(e.code() == Code::DimensionMismatch);
  }
  CHECK_THROWS_AS(load_contextual(tmp.write("h.tsv", "wrong\t2\ns1\t1 2\n")), Error);
  CHECK_THROWS_AS(load_contextual(tmp.write("e.tsv", "")), Error);
}

TEST_CASE("bundled vector files load at full size") {
  auto stat = load_embedding_table(repo_path("data/embeddings_static.txt"),
                                   EmbeddingFormat::headerless);
  CHECK(stat.dimension == 50);
  CHECK(stat.vocab.size() == 238);
  CHECK(stat.vocab.count("about") == 1);

  auto ctx = load_contextual(repo_path("data/contextual.tsv"));
  CHECK(ctx.size() == 400);
  CHECK(ctx.at("s001").vector.size() == 64);
  CHECK(ctx.at("s001").vector[0] == Catch::Approx(0.759049).margin(1e-9));
}
