// Command line front end: validate / features / eval / report over an SIS-style
// bundle described by an INI config.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "predsym/predsym.hpp"

namespace {

using namespace predsym;

void emit_diag_line(const char *level, const std::string &code, const std::string &msg,
                    const std::string &ctx) {
  json j;
  j["level"] = level;
  j["code"] = code;
  j["message"] = msg;
  if (!ctx.empty()) j["context"] = ctx;
  std::cerr << j.dump() << "\n";
}

void flush_warnings(Diagnostics &diag) {
  for (const auto &d : diag.items)
    emit_diag_line("warning", code_name(d.code), d.message, d.context);
  diag.items.clear();
}

int exit_code_for(const Error &e) {
  return e.code() == Code::NonFiniteLoss ? 2 : 1;
}

struct CommonFlags {
  std::string config_path;
  std::string out_dir;
  std::string family;
  std::string loss;
  std::uint64_t seed = 0;
  int jobs = 0;
  bool lenient = false;
  bool freeze_adapter = false;
  bool got_seed = false, got_jobs = false, got_out = false, got_family = false,
       got_loss = false;
};

void add_common(CLI::App *cmd, CommonFlags &f) {
  cmd->add_option("--config", f.config_path, "INI config file")->required();
  cmd->add_option("--seed", f.seed, "run seed")->each([&](const std::string &) {
    f.got_seed = true;
  });
  cmd->add_option("--jobs", f.jobs, "fold-level parallelism (1 = reference mode)")
      ->each([&](const std::string &) { f.got_jobs = true; });
  cmd->add_option("--out", f.out_dir, "output directory")->each([&](const std::string &) {
    f.got_out = true;
  });
  cmd->add_flag("--lenient", f.lenient, "downgrade count mismatches to warnings");
  cmd->add_option("--family", f.family, "feature|static|contextual|hybrid")
      ->each([&](const std::string &) { f.got_family = true; });
  cmd->add_flag("--freeze-adapter", f.freeze_adapter,
                "keep the adapter fixed in stage 2");
  cmd->add_option("--loss", f.loss, "bce|eq4-literal (stage-1 objective)")
      ->each([&](const std::string &) { f.got_loss = true; });
}

RunConfig resolve_config(const CommonFlags &f) {
  RunConfig cfg = load_config(f.config_path);
  if (f.got_seed) cfg.seed = f.seed;
  if (f.got_jobs) cfg.jobs = f.jobs;
  if (f.got_out) cfg.out_dir = f.out_dir;
  if (f.got_family) cfg.family = f.family;
  if (f.got_loss) cfg.loss = f.loss;
  if (f.lenient) cfg.lenient = true;
  if (f.freeze_adapter) cfg.freeze_adapter = true;
  if (cfg.loss != "bce" && cfg.loss != "eq4-literal")
    fail(Code::BadConfig, "loss must be bce or eq4-literal, got '", cfg.loss, "'");
  return cfg;
}

std::vector<std::string> input_paths(const RunConfig &cfg) {
  return {cfg.corpus_path,  cfg.conllu_path,           cfg.annotations_path,
          cfg.ngrams_path,  cfg.static_embeddings_path, cfg.contextual_path,
          cfg.verb_scores_path, cfg.gold_features_path};
}

void write_manifest(const RunConfig &cfg, const std::vector<std::string> &artifacts) {
  json manifest = make_manifest(cfg, input_paths(cfg), artifacts, cfg.out_dir);
  write_text(cfg.out_dir + "/manifest.json", manifest.dump(2) + "\n");
}

void require_file(const std::string &path, const std::string &what) {
  if (path.empty()) fail(Code::MissingResource, what, " not configured");
  if (!file_exists(path)) fail(Code::MissingResource, what, " missing: ", path);
}

int cmd_validate(const CommonFlags &flags) {
  RunConfig cfg = resolve_config(flags);
  Diagnostics diag;
  Bundle b = load_bundle(cfg, &diag);
  flush_warnings(diag);
  std::printf("corpus: %zu sentences, %zu verbs\n", b.corpus.records.size(),
              b.corpus.verbs.size());
  if (!b.sents.empty()) {
    std::printf("parses: %zu sentences, targets resolved\n", b.sents.size());
    int tagged = 0;
    for (const auto &s : b.sents)
      for (const auto &t : s.tokens)
        if (!t.entity.empty()) ++tagged;
    std::printf("entity tags: %d tokens\n", tagged);
  }
  if (b.res.has_features) std::printf("features: %ld rows\n", b.res.Xf.rows());
  if (b.res.has_static) std::printf("static vectors: dim %ld\n", b.res.Xs.cols());
  if (b.res.has_contextual) std::printf("contextual vectors: dim %ld\n", b.res.Xc.cols());
  return 0;
}

int cmd_features(const CommonFlags &flags) {
  RunConfig cfg = resolve_config(flags);
  require_file(cfg.conllu_path, "conllu");
  require_file(cfg.ngrams_path, "ngrams");
  Diagnostics diag;
  Bundle b = load_bundle(cfg, &diag);
  flush_warnings(diag);
  if (!b.res.has_features) fail(Code::MissingResource, "feature extraction inputs");
  std::vector<std::string> artifacts;
  write_text(cfg.out_dir + "/features.tsv", features_tsv(b));
  artifacts.push_back("features.tsv");
  if (!cfg.gold_features_path.empty()) {
    auto gold = load_gold_features(cfg.gold_features_path);
    auto rates = feature_agreement(b, gold);
    std::string csv = "feature,exact_match_rate\n";
    double worst = 1.0;
    for (int j = 0; j < kNumFeatures; ++j) {
      csv += feature_names()[static_cast<std::size_t>(j)] + "," +
             fmt_double(rates[static_cast<std::size_t>(j)], 4) + "\n";
      worst = std::min(worst, rates[static_cast<std::size_t>(j)]);
    }
    write_text(cfg.out_dir + "/agreement.csv", csv);
    artifacts.push_back("agreement.csv");
    std::printf("feature agreement: worst per-feature rate %.4f\n", worst);
  }
  write_text(cfg.out_dir + "/config.ini", config_snapshot(cfg));
  artifacts.push_back("config.ini");
  write_manifest(cfg, artifacts);
  std::printf("wrote %s/features.tsv (%zu rows)\n", cfg.out_dir.c_str(),
              b.corpus.records.size());
  return 0;
}

int cmd_eval(const CommonFlags &flags) {
  RunConfig cfg = resolve_config(flags);
  ModelFamily family = parse_family(cfg.family);
  require_file(cfg.corpus_path, "corpus");
  if (family == ModelFamily::feature || family == ModelFamily::hybrid) {
    require_file(cfg.conllu_path, "conllu");
    require_file(cfg.ngrams_path, "ngrams");
  }
  if (family == ModelFamily::static_) {
    require_file(cfg.conllu_path, "conllu");
    require_file(cfg.static_embeddings_path, "static_embeddings");
  }
  if (family == ModelFamily::contextual || family == ModelFamily::hybrid)
    require_file(cfg.contextual_path, "contextual");

  Diagnostics diag;
  Bundle b = load_bundle(cfg, &diag);
  FoldModels models;
  EvalReport report = run_lopo(family, b.corpus, b.res, cfg.train(), cfg.seed, &models,
                               &diag);
  flush_warnings(diag);

  std::vector<std::string> artifacts;
  std::string stem = report.model_name;
  write_text(cfg.out_dir + "/" + stem + "_report.json", report_to_json(report).dump(2) + "\n");
  artifacts.push_back(stem + "_report.json");
  write_text(cfg.out_dir + "/" + stem + "_predictions.tsv",
             report_predictions_tsv(report, cfg.clip_reporting));
  artifacts.push_back(stem + "_predictions.tsv");

  FoldPlan plan = make_fold_plan(b.corpus);
  json jmodels = json::object();
  for (std::size_t f = 0; f < plan.folds.size(); ++f) {
    const std::string &verb = plan.folds[f].held_out_verb;
    jmodels[verb] = family == ModelFamily::hybrid ? hybrid_to_json(models.hybrid[f])
                                                  : ridge_to_json(models.ridge[f]);
  }
  json jm;
  jm["family"] = stem;
  jm["seed"] = cfg.seed;
  jm["config_hash"] = hash_hex(config_snapshot(cfg));
  jm["folds"] = jmodels;
  write_text(cfg.out_dir + "/" + stem + "_models.json", jm.dump() + "\n");
  artifacts.push_back(stem + "_models.json");

  write_text(cfg.out_dir + "/config.ini", config_snapshot(cfg));
  artifacts.push_back("config.ini");
  write_manifest(cfg, artifacts);

  if (report.r_defined)
    std::printf("%-11s r=%.3f  p=%.3g  mse=%.3f  errors=%zu\n", stem.c_str(),
                report.pearson_r, report.p_value, report.mse_value,
                report.error_ids.size());
  else
    std::printf("%-11s r=undefined  mse=%.3f  errors=%zu\n", stem.c_str(),
                report.mse_value, report.error_ids.size());
  return 0;
}

EvalReport load_report(const RunConfig &cfg, const std::string &family) {
  return report_from_files(cfg.out_dir + "/" + family + "_report.json",
                           cfg.out_dir + "/" + family + "_predictions.tsv");
}

int cmd_report(const CommonFlags &flags, const std::string &which) {
  RunConfig cfg = resolve_config(flags);
  std::vector<std::string> artifacts;
  if (which == "errors") {
    std::string csv = "model,sentence_id,prediction,human_mean,gap\n";
    for (const std::string fam : {"feature", "static", "contextual", "hybrid"}) {
      std::string p = cfg.out_dir + "/" + fam + "_report.json";
      if (!file_exists(p)) continue;
      EvalReport rep = load_report(cfg, fam);
      for (std::size_t i = 0; i < rep.ids.size(); ++i) {
        if (!rep.error_ids.count(rep.ids[i])) continue;
        double gap = rep.predictions[i] - rep.human[i];
        csv += rep.model_name + "," + rep.ids[i] + "," + fmt_double(rep.predictions[i]) +
               "," + fmt_double(rep.human[i]) + "," + fmt_double(gap) + "\n";
      }
    }
    write_text(cfg.out_dir + "/errors.csv", csv);
    artifacts.push_back("errors.csv");
    std::printf("wrote %s/errors.csv\n", cfg.out_dir.c_str());
  } else if (which == "venn") {
    EvalReport a = load_report(cfg, "feature");
    EvalReport b = load_report(cfg, "contextual");
    EvalReport c = load_report(cfg, "hybrid");
    VennCounts venn = error_venn({&a, &b, &c});
    std::string csv = "region,count\n";
    csv += std::string("feature_only,") + std::to_string(venn.region[1]) + "\n";
    csv += std::string("contextual_only,") + std::to_string(venn.region[2]) + "\n";
    csv += std::string("feature_contextual,") + std::to_string(venn.region[3]) + "\n";
    csv += std::string("hybrid_only,") + std::to_string(venn.region[4]) + "\n";
    csv += std::string("feature_hybrid,") + std::to_string(venn.region[5]) + "\n";
    csv += std::string("contextual_hybrid,") + std::to_string(venn.region[6]) + "\n";
    csv += std::string("all_three,") + std::to_string(venn.region[7]) + "\n";
    csv += std::string("outside,") + std::to_string(venn.region[0]) + "\n";
    csv += std::string("union,") + std::to_string(venn.union_size) + "\n";
    csv += "feature_unique_pct," + fmt_double(venn.unique_pct[0], 2) + "\n";
    csv += "contextual_unique_pct," + fmt_double(venn.unique_pct[1], 2) + "\n";
    csv += "hybrid_unique_pct," + fmt_double(venn.unique_pct[2], 2) + "\n";
    write_text(cfg.out_dir + "/venn.csv", csv);
    artifacts.push_back("venn.csv");
    std::printf("venn union=%d outside=%d\n", venn.union_size, venn.region[0]);
  } else if (which == "importance") {
    Diagnostics diag;
    Bundle b = load_bundle(cfg, &diag);
    flush_warnings(diag);
    if (!b.res.has_features) fail(Code::MissingResource, "feature matrix");
    FoldModels models;
    TrainSettings ts = cfg.train();
    EvalReport rep = run_lopo(ModelFamily::feature, b.corpus, b.res, ts, cfg.seed,
                              &models);
    Eigen::VectorXd y(b.corpus.records.size());
    for (std::size_t i = 0; i < b.corpus.records.size(); ++i)
      y[static_cast<long>(i)] = b.corpus.records[i].mean_rating;
    FoldPlan plan = make_fold_plan(b.corpus);
    auto imps = permutation_importance(plan, models.ridge, b.res.Xf, y,
                                       cfg.importance_repeats, cfg.seed + 999);
    std::vector<int> order(imps.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int l, int r) { return imps[static_cast<std::size_t>(l)] >
                                                imps[static_cast<std::size_t>(r)]; });
    std::string csv = "feature,importance\n";
    for (int j : order)
      csv += feature_names()[static_cast<std::size_t>(j)] + "," +
             fmt_double(imps[static_cast<std::size_t>(j)], 6) + "\n";
    write_text(cfg.out_dir + "/importance.csv", csv);
    artifacts.push_back("importance.csv");
    std::printf("top feature: %s (%.4f)\n",
                feature_names()[static_cast<std::size_t>(order[0])].c_str(),
                imps[static_cast<std::size_t>(order[0])]);
  } else if (which == "systematicity") {
    Diagnostics diag;
    Bundle b = load_bundle(cfg, &diag);
    flush_warnings(diag);
    if (!b.res.has_features) fail(Code::MissingResource, "feature signatures");
    EvalReport fa = load_report(cfg, "feature");
    EvalReport co = load_report(cfg, "contextual");
    EvalReport hy = load_report(cfg, "hybrid");
    std::vector<const EvalReport *> reps = {&fa, &co, &hy};
    CtrlResult ctrl = controlled_subset(b.corpus, b.res.Phi, reps, cfg.sd_factor,
                                        cfg.pred_gap, cfg.min_group, cfg.sd_mode_enum(),
                                        nullptr, &diag);
    flush_warnings(diag);
    std::string csv = "model,ctrl_mse,raw_mse\n";
    for (const auto *rep : reps) {
      std::string ctrl_cell =
          ctrl.empty ? "" : fmt_double(ctrl.ctrl_mse.at(rep->model_name), 4);
      csv += rep->model_name + "," + ctrl_cell + "," + fmt_double(rep->mse_value, 4) + "\n";
    }
    write_text(cfg.out_dir + "/systematicity.csv", csv);
    artifacts.push_back("systematicity.csv");
    std::string groups_csv = "sentence_id,group\n";
    for (const auto &sid : ctrl.ids)
      groups_csv += sid + "," + std::to_string(ctrl.group_of.at(sid)) + "\n";
    write_text(cfg.out_dir + "/ctrl_groups.csv", groups_csv);
    artifacts.push_back("ctrl_groups.csv");
    std::printf("controlled subset: %zu sentences in %d groups\n", ctrl.ids.size(),
                ctrl.n_groups);
  } else if (which == "verb-replication") {
    require_file(cfg.verb_scores_path, "verb_scores");
    Diagnostics diag;
    RunConfig corpus_only = cfg;
    corpus_only.conllu_path.clear();
    corpus_only.static_embeddings_path.clear();
    corpus_only.contextual_path.clear();
    corpus_only.ngrams_path.clear();
    Bundle b = load_bundle(corpus_only, &diag);
    flush_warnings(diag);
    ReplicationResult res = verb_level_replication(b.corpus, cfg.verb_scores_path);
    auto external = load_verb_scores(cfg.verb_scores_path);
    std::string csv = "verb,sis_inverted_mean,external_score\n";
    for (const auto &verb : res.verbs) {
      const auto &entry = b.corpus.verbs.at(verb);
      double m = 0.0;
      for (const auto &sid : entry.sentence_ids) m += b.corpus.by_id(sid).mean_rating;
      m /= static_cast<double>(entry.sentence_ids.size());
      csv += verb + "," + fmt_double(invert_rating(m), 4) + "," +
             fmt_double(external.at(verb), 4) + "\n";
    }
    write_text(cfg.out_dir + "/verb_replication.csv", csv);
    artifacts.push_back("verb_replication.csv");
    std::printf("verb replication: r=%.3f p=%.3g over %zu verbs\n", res.r, res.p,
                res.verbs.size());
  } else {
    fail(Code::BadConfig, "unknown report '", which, "'");
  }
  write_manifest(cfg, artifacts);
  return 0;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"symmetry inference toolkit"};
  app.require_subcommand(1);

  CommonFlags fv, ff, fe, fr;
  auto *validate = app.add_subcommand("validate", "check bundle integrity");
  add_common(validate, fv);
  auto *features = app.add_subcommand("features", "extract the 18 features");
  add_common(features, ff);
  auto *eval = app.add_subcommand("eval", "leave-one-predicate-out evaluation");
  add_common(eval, fe);
  auto *report = app.add_subcommand("report", "derived analyses over saved reports");
  add_common(report, fr);
  std::string which;
  report->add_option("kind", which,
                     "errors|venn|importance|systematicity|verb-replication")
      ->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (validate->parsed()) return cmd_validate(fv);
    if (features->parsed()) return cmd_features(ff);
    if (eval->parsed()) return cmd_eval(fe);
    if (report->parsed()) return cmd_report(fr, which);
  } catch (const predsym::Error &e) {
    emit_diag_line("error", predsym::code_name(e.code()), e.message(), "");
    return exit_code_for(e);
  } catch (const std::exception &e) {
    emit_diag_line("error", "Unhandled", e.what(), "");
    return 1;
  }
  return 1;
}
