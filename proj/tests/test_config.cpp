#include <catch2/catch_amalgamated.hpp>

#include <cctype>
#include <cmath>

#include "predsym/config.hpp"
#include "predsym/persist.hpp"

#include "helpers.hpp"

using namespace predsym;
using testutil::TmpDir;
using testutil::repo_path;

namespace {

template <typename Fn>
Code code_of(Fn &&fn) {
  try {
    fn();
  } catch (const Error &e) {
    return e.code();
  }
  return Code::Ok;
}

}  // namespace

TEST_CASE("ini parser handles sections, comments and whitespace") {
  TmpDir tmp("ini");
  auto path = tmp.write("a.ini",
                        "top = 1\n"
                        "# comment\n"
                        "; also a comment\n"
                        "[model]\n"
                        "  hidden =  64  \n"
                        "note = a=b\n"
                        "\n"
                        "[ empty ]\n");
  Ini ini = parse_ini(path);
  CHECK(ini.get("", "top") == "1");
  CHECK(ini.get("model", "hidden") == "64");
  CHECK(ini.get("model", "note") == "a=b");  // first '=' splits
  CHECK(ini.has("empty", "anything") == false);
  CHECK(ini.get("model", "missing", "fallback") == "fallback");
  CHECK(ini.get("nope", "missing") == "");
  CHECK(ini.has("model", "hidden"));
  CHECK_FALSE(ini.has("model", "missing"));
}

TEST_CASE("ini parser rejects malformed lines") {
  TmpDir tmp("ini");
  CHECK(code_of([&] { parse_ini(tmp.write("a.ini", "[model\nk = v\n")); }) ==
        Code::BadConfig);
  CHECK(code_of([&] { parse_ini(tmp.write("b.ini", "just words\n")); }) ==
        Code::BadConfig);
  CHECK(code_of([&] { parse_ini(tmp.write("c.ini", "= value\n")); }) == Code::BadConfig);
  CHECK(code_of([&] { parse_ini(tmp.path("missing.ini")); }) == Code::IoError);
}

TEST_CASE("bundled run config resolves paths against its own directory") {
  RunConfig cfg = load_config(repo_path("data/sis.ini"));
  CHECK(cfg.corpus_path == repo_path("data/sis.tsv"));
  CHECK(cfg.conllu_path == repo_path("data/sis.conllu"));
  CHECK(cfg.annotations_path == repo_path("data/annotations.tsv"));
  CHECK(cfg.ngrams_path == repo_path("data/ngrams.tsv"));
  CHECK(cfg.static_embeddings_path == repo_path("data/embeddings_static.txt"));
  CHECK(cfg.contextual_path == repo_path("data/contextual.tsv"));
  CHECK(cfg.verb_scores_path == repo_path("data/verb_scores.tsv"));
  CHECK(cfg.gold_features_path == repo_path("data/gold_features.tsv"));

  CHECK(cfg.alpha == 1.0);
  CHECK(cfg.hidden_dim == 128);
  CHECK(cfg.stage1_epochs == 120);
  CHECK(cfg.stage2_epochs == 60);
  CHECK(cfg.learning_rate == 0.001);
  CHECK(cfg.batch_size == 32);
  CHECK(cfg.error_threshold == 1.0);
  CHECK(cfg.sd_factor == 0.1);
  CHECK(cfg.pred_gap == 1.0);
  CHECK(cfg.min_group == 2);
  CHECK(cfg.importance_repeats == 10);

  // untouched defaults
  CHECK(cfg.family == "feature");
  CHECK(cfg.seed == 7);
  CHECK(cfg.loss == "bce");
  CHECK(cfg.sd_mode == "relative");
  CHECK(cfg.np_threshold == 3);
  CHECK(cfg.clause_threshold == 2);
  CHECK(cfg.jobs == 1);
  CHECK_FALSE(cfg.lenient);
  CHECK_FALSE(cfg.freeze_adapter);
}

TEST_CASE("config defaults survive a minimal file and absolute paths pass through") {
  TmpDir tmp("cfg");
  auto path = tmp.write("mini.ini",
                        "[data]\n"
                        "corpus = /abs/path.tsv\n");
  RunConfig cfg = load_config(path);
  CHECK(cfg.corpus_path == "/abs/path.tsv");
  CHECK(cfg.conllu_path.empty());
  CHECK(cfg.hidden_dim == 256);
  CHECK(cfg.stage1_epochs == 200);
  CHECK(cfg.stage2_epochs == 200);
  CHECK(cfg.learning_rate == 1e-4);
  CHECK(cfg.batch_size == 32);
  CHECK(cfg.out_dir == "out");
}

TEST_CASE("config numbers and modes are validated") {
  TmpDir tmp("cfg");
  auto bad = tmp.write("bad.ini", "[model]\nhidden = many\n");
  CHECK(code_of([&] { load_config(bad); }) == Code::BadConfig);

  auto modes = tmp.write("modes.ini",
                         "[model]\nloss = eq4-literal\n"
                         "[eval]\nsd_mode = absolute\n"
                         "[features]\nnp_threshold = 4\nclause_threshold = 3\n");
  RunConfig cfg = load_config(modes);
  CHECK(cfg.loss == "eq4-literal");
  CHECK(cfg.train().loss == ClfLossVariant::eq4_literal);
  CHECK(cfg.sd_mode_enum() == SdMode::absolute);
  CHECK(cfg.thresholds().np_threshold == 4);
  CHECK(cfg.thresholds().clause_threshold == 3);

  cfg.sd_mode = "sideways";
  CHECK(code_of([&] { cfg.sd_mode_enum(); }) == Code::BadConfig);
}

TEST_CASE("train settings mirror the config") {
  RunConfig cfg = load_config(repo_path("data/sis.ini"));
  cfg.freeze_adapter = true;
  cfg.jobs = 4;
  TrainSettings t = cfg.train();
  CHECK(t.alpha == 1.0);
  CHECK(t.hidden_dim == 128);
  CHECK(t.stage1_epochs == 120);
  CHECK(t.stage2_epochs == 60);
  CHECK(t.learning_rate == 0.001);
  CHECK(t.batch_size == 32);
  CHECK(t.freeze_adapter);
  CHECK(t.loss == ClfLossVariant::bce);
  CHECK(t.error_threshold == 1.0);
  CHECK(t.jobs == 4);
}

TEST_CASE("config snapshot is stable, seed bearing and silent about jobs") {
  RunConfig cfg = load_config(repo_path("data/sis.ini"));
  std::string snap = config_snapshot(cfg);
  CHECK(snap == config_snapshot(cfg));
  CHECK(snap.find("seed = 7") != std::string::npos);
  CHECK(snap.find("family = feature") != std::string::npos);
  CHECK(snap.find("hidden = 128") != std::string::npos);
  CHECK(snap.find("jobs") == std::string::npos);

  RunConfig other = cfg;
  other.seed = 8;
  CHECK(config_snapshot(other) != snap);
  other = cfg;
  other.jobs = 16;  // worker count must not disturb provenance
  CHECK(config_snapshot(other) == snap);
}

TEST_CASE("fixed point formatting and content hashing") {
  CHECK(fmt_double(1.0) == "1.000000");
  CHECK(fmt_double(-0.5) == "-0.500000");
  CHECK(fmt_double(2.0 / 3.0) == "0.666667");
  CHECK(fmt_double(1.25, 2) == "1.25");

  CHECK(hash_hex("abc") == hash_hex("abc"));
  CHECK(hash_hex("abc") != hash_hex("abd"));
  CHECK(hash_hex("").size() == 16);
  for (char c : hash_hex("xyz")) CHECK(std::isxdigit(static_cast<unsigned char>(c)));

  TmpDir tmp("hash");
  auto p = tmp.write("f.txt", "abc");
  CHECK(digest_hex(p) == hash_hex("abc"));
  CHECK(code_of([&] { digest_hex(tmp.path("missing.txt")); }) == Code::IoError);
}

TEST_CASE("report json and tsv round trip") {
  EvalReport rep;
  rep.model_name = "feature";
  rep.ids = {"s1", "s2", "s3"};
  rep.predictions = {1.5, 5.75, 2.0};
  rep.human = {1.0, 5.0, 2.25};
  rep.r_defined = true;
  rep.pearson_r = 0.25;
  rep.p_value = 0.5;
  rep.mse_value = 0.125;
  rep.error_threshold = 0.5;
  rep.error_ids = {"s2"};

  json j = report_to_json(rep);
  CHECK(j.at("model") == "feature");
  CHECK(j.at("n") == 3);
  CHECK(j.at("n_errors") == 1);

  std::string tsv = report_predictions_tsv(rep);
  CHECK(tsv.find("prediction_clipped") != std::string::npos);
  CHECK(tsv.find("s2\t5.750000\t5.000000\t0.750000\t5.000000") != std::string::npos);
  std::string bare = report_predictions_tsv(rep, false);
  CHECK(bare.find("prediction_clipped") == std::string::npos);

  TmpDir tmp("rep");
  auto jp = tmp.write("report.json", j.dump(2));
  auto tp = tmp.write("predictions.tsv", tsv);
  EvalReport back = report_from_files(jp, tp);
  CHECK(back.model_name == rep.model_name);
  CHECK(back.ids == rep.ids);
  CHECK(back.error_ids == rep.error_ids);
  CHECK(back.pearson_r == rep.pearson_r);
  CHECK(back.mse_value == rep.mse_value);
  CHECK(back.error_threshold == rep.error_threshold);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(back.predictions[i] == Catch::Approx(rep.predictions[i]).margin(1e-6));
    CHECK(back.human[i] == Catch::Approx(rep.human[i]).margin(1e-6));
  }

  CHECK(code_of([&] { report_from_files(tmp.path("nope.json"), tp); }) ==
        Code::MissingReport);
}

TEST_CASE("undefined correlation serializes as null and reads back") {
  EvalReport rep;
  rep.model_name = "feature";
  rep.ids = {"s1", "s2", "s3"};
  rep.predictions = {1.0, 1.0, 1.0};
  rep.human = {2.0, 2.0, 2.0};
  rep.r_defined = false;
  rep.mse_value = 1.0;

  json j = report_to_json(rep);
  CHECK(j.at("pearson_r").is_null());
  CHECK(j.at("p_value").is_null());

  TmpDir tmp("rep");
  auto jp = tmp.write("report.json", j.dump());
  auto tp = tmp.write("predictions.tsv", report_predictions_tsv(rep));
  EvalReport back = report_from_files(jp, tp);
  CHECK_FALSE(back.r_defined);
  CHECK(std::isnan(back.pearson_r));
}

TEST_CASE("manifest records config hash, inputs and artifacts") {
  TmpDir tmp("man");
  auto in_path = tmp.write("input.tsv", "x\t1\n");
  tmp.write("out/report.json", "{}");

  RunConfig cfg;
  cfg.corpus_path = in_path;
  cfg.seed = 42;
  json m = make_manifest(cfg, {in_path, tmp.path("absent.tsv"), ""},
                         {"report.json", "absent.json"}, tmp.path("out"));
  CHECK(m.at("seed") == 42);
  CHECK(m.at("config_hash") == hash_hex(config_snapshot(cfg)));
  CHECK(m.at("inputs").size() == 1);
  CHECK(m.at("inputs").at(in_path) == digest_hex(in_path));
  CHECK(m.at("artifacts").size() == 1);
  CHECK(m.at("artifacts").at("report.json") == digest_hex(tmp.path("out/report.json")));
}
