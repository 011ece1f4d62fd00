#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "predsym/corpus.hpp"
#include "predsym/diag.hpp"
#include "predsym/embeddings.hpp"
#include "predsym/features.hpp"
#include "predsym/hybrid.hpp"
#include "predsym/metrics.hpp"
#include "predsym/optim.hpp"
#include "predsym/ridge.hpp"

namespace predsym {

enum class ModelFamily { feature, static_, contextual, hybrid };

inline const char *family_name(ModelFamily f) {
  switch (f) {
    case ModelFamily::feature: return "feature";
    case ModelFamily::static_: return "static";
    case ModelFamily::contextual: return "contextual";
    case ModelFamily::hybrid: return "hybrid";
  }
  return "?";
}

inline ModelFamily parse_family(const std::string &s) {
  if (s == "feature") return ModelFamily::feature;
  if (s == "static") return ModelFamily::static_;
  if (s == "contextual") return ModelFamily::contextual;
  if (s == "hybrid") return ModelFamily::hybrid;
  fail(Code::BadConfig, "unknown model family '", s, "'");
}

struct Fold {
  std::string held_out_verb;
  std::vector<int> train_idx;
  std::vector<int> test_idx;
};

struct FoldPlan {
  std::vector<Fold> folds;
};

// One fold per verb, folds ordered by verb name; the verb's sentences are the
// test set, everything else trains.
inline FoldPlan make_fold_plan(const SisCorpus &corpus) {
  FoldPlan plan;
  for (const auto &[verb, entry] : corpus.verbs) {
    Fold fold;
    fold.held_out_verb = verb;
    for (int i = 0; i < static_cast<int>(corpus.records.size()); ++i) {
      if (corpus.records[static_cast<std::size_t>(i)].verb == verb)
        fold.test_idx.push_back(i);
      else
        fold.train_idx.push_back(i);
    }
    plan.folds.push_back(std::move(fold));
  }
  return plan;
}

struct EvalReport {
  std::string model_name;
  std::vector<std::string> ids;      // corpus order
  std::vector<double> predictions;   // raw (unclipped)
  std::vector<double> human;         // mean ratings
  bool r_defined = false;
  double pearson_r = std::numeric_limits<double>::quiet_NaN();
  double p_value = std::numeric_limits<double>::quiet_NaN();
  double mse_value = std::numeric_limits<double>::quiet_NaN();
  double error_threshold = 1.0;
  std::set<std::string> error_ids;
};

// Everything a family might need, assembled once from the loaded bundle.
struct EvalResources {
  Eigen::MatrixXd Xf;   // raw 18-feature rows
  Eigen::MatrixXd Phi;  // binarized 18-feature rows (stage-1 targets)
  Eigen::MatrixXd Xs;   // mean-pooled static vectors
  Eigen::MatrixXd Xc;   // contextual vectors
  bool has_features = false;
  bool has_static = false;
  bool has_contextual = false;
};

struct TrainSettings {
  double alpha = 1.0;
  int hidden_dim = 256;
  int stage1_epochs = 200;
  int stage2_epochs = 200;
  double learning_rate = 1e-4;
  int batch_size = 32;
  bool freeze_adapter = false;
  ClfLossVariant loss = ClfLossVariant::bce;
  Activation activation = Activation::relu;
  double error_threshold = 1.0;
  int jobs = 1;
};

struct FoldModels {
  std::vector<RidgeModel> ridge;    // by fold, ridge families
  std::vector<HybridModel> hybrid;  // by fold, hybrid family
};

namespace detail {

// Correlation without the ConstantInput throw: a constant vector scores 0,
// matching how permutation importance treats degenerate predictions.
inline double r_or_zero(const Eigen::VectorXd &a, const Eigen::VectorXd &b) {
  double ma = a.mean(), mb = b.mean();
  Eigen::ArrayXd da = a.array() - ma, db = b.array() - mb;
  double den = std::sqrt((da * da).sum() * (db * db).sum());
  return den > 0.0 ? (da * db).sum() / den : 0.0;
}

inline Eigen::MatrixXd take_rows(const Eigen::MatrixXd &X, const std::vector<int> &idx) {
  Eigen::MatrixXd out(static_cast<long>(idx.size()), X.cols());
  for (std::size_t i = 0; i < idx.size(); ++i) out.row(static_cast<long>(i)) = X.row(idx[i]);
  return out;
}

inline Eigen::VectorXd take(const Eigen::VectorXd &v, const std::vector<int> &idx) {
  Eigen::VectorXd out(static_cast<long>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) out[static_cast<long>(i)] = v[idx[i]];
  return out;
}

template <typename Fn>
inline void run_folds(int n_folds, int jobs, Fn &&body) {
  if (jobs <= 1) {
    for (int f = 0; f < n_folds; ++f) body(f);
    return;
  }
  std::exception_ptr first_error = nullptr;
  std::mutex err_mu;
  std::atomic<int> next{0};
  auto worker = [&]() {
    while (true) {
      int f = next.fetch_add(1);
      if (f >= n_folds) break;
      try {
        body(f);
      } catch (...) {
        std::lock_guard<std::mutex> lk(err_mu);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
  for (auto &th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace detail

inline EvalReport run_lopo(ModelFamily family, const SisCorpus &corpus,
                           const EvalResources &res, const TrainSettings &cfg,
                           std::uint64_t seed, FoldModels *out_models = nullptr,
                           Diagnostics *diag = nullptr) {
  const int n = static_cast<int>(corpus.records.size());
  const Eigen::MatrixXd *X = nullptr;
  switch (family) {
    case ModelFamily::feature:
      if (!res.has_features) fail(Code::MissingResource, "feature matrix");
      X = &res.Xf;
      break;
    case ModelFamily::static_:
      if (!res.has_static) fail(Code::MissingResource, "static embedding matrix");
      X = &res.Xs;
      break;
    case ModelFamily::contextual:
      if (!res.has_contextual) fail(Code::MissingResource, "contextual vectors");
      X = &res.Xc;
      break;
    case ModelFamily::hybrid:
      if (!res.has_contextual) fail(Code::MissingResource, "contextual vectors");
      if (!res.has_features) fail(Code::MissingResource, "feature targets");
      X = &res.Xc;
      break;
  }
  if (X->rows() != n) fail(Code::LengthMismatch, "design rows ", X->rows(), " vs ", n);

  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) y[i] = corpus.records[static_cast<std::size_t>(i)].mean_rating;

  FoldPlan plan = make_fold_plan(corpus);
  const int nf = static_cast<int>(plan.folds.size());
  Eigen::VectorXd preds(n);
  FoldModels models;
  if (family == ModelFamily::hybrid)
    models.hybrid.resize(static_cast<std::size_t>(nf));
  else
    models.ridge.resize(static_cast<std::size_t>(nf));

  detail::run_folds(nf, cfg.jobs, [&](int f) {
    const Fold &fold = plan.folds[static_cast<std::size_t>(f)];
    Eigen::MatrixXd Xtr = detail::take_rows(*X, fold.train_idx);
    Eigen::VectorXd ytr = detail::take(y, fold.train_idx);
    Eigen::MatrixXd Xte = detail::take_rows(*X, fold.test_idx);
    if (family == ModelFamily::hybrid) {
      // stage 1 must never see the held-out predicate
      for (int i : fold.train_idx)
        if (corpus.records[static_cast<std::size_t>(i)].verb == fold.held_out_verb)
          fail(Code::CountMismatch, "held-out verb leaked into fold ", fold.held_out_verb);
      Rng rng(fold_seed(seed, fold.held_out_verb));
      HybridModel m = init_hybrid(static_cast<int>(X->cols()), cfg.hidden_dim, rng,
                                  cfg.activation);
      OptimizerState opt;
      opt.learning_rate = cfg.learning_rate;
      opt.batch_size = cfg.batch_size;
      Eigen::MatrixXd Ttr = detail::take_rows(res.Phi, fold.train_idx);
      train_hybrid_stage1(m, Xtr, Ttr, opt, cfg.stage1_epochs, rng, cfg.loss);
      train_hybrid_stage2(m, Xtr, ytr, opt, cfg.stage2_epochs, rng, cfg.alpha,
                          cfg.freeze_adapter);
      Eigen::VectorXd p = predict_hybrid(m, Xte);
      for (std::size_t i = 0; i < fold.test_idx.size(); ++i)
        preds[fold.test_idx[i]] = p[static_cast<long>(i)];
      models.hybrid[static_cast<std::size_t>(f)] = std::move(m);
    } else {
      RidgeModel m = fit_ridge_closed_form(Xtr, ytr, cfg.alpha, true, diag);
      Eigen::VectorXd p = predict_all(m, Xte);
      for (std::size_t i = 0; i < fold.test_idx.size(); ++i)
        preds[fold.test_idx[i]] = p[static_cast<long>(i)];
      models.ridge[static_cast<std::size_t>(f)] = std::move(m);
    }
  });

  EvalReport report;
  report.model_name = family_name(family);
  report.error_threshold = cfg.error_threshold;
  report.ids.reserve(static_cast<std::size_t>(n));
  report.predictions.reserve(static_cast<std::size_t>(n));
  report.human.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const auto &rec = corpus.records[static_cast<std::size_t>(i)];
    report.ids.push_back(rec.sentence_id);
    report.predictions.push_back(preds[i]);
    report.human.push_back(y[i]);
    if (std::fabs(preds[i] - y[i]) > cfg.error_threshold)
      report.error_ids.insert(rec.sentence_id);
  }
  report.mse_value = mse(report.predictions, report.human);
  try {
    PearsonResult pr = pearson(report.predictions, report.human);
    report.pearson_r = pr.r;
    report.p_value = pr.p;
    report.r_defined = true;
  } catch (const Error &e) {
    if (e.code() != Code::ConstantInput) throw;
    warn_or_drop(diag, Code::ConstantInput, "correlation undefined, MSE still reported",
                 report.model_name);
  }
  if (out_models) *out_models = std::move(models);
  return report;
}

// Drop in pooled held-out r^2 when one column is shuffled; fold models are
// reused, never refit. One shared generator, features outer, repeats inner.
inline std::vector<double> permutation_importance(const FoldPlan &plan,
                                                  const std::vector<RidgeModel> &fold_models,
                                                  const Eigen::MatrixXd &X,
                                                  const Eigen::VectorXd &y,
                                                  int n_repeats, std::uint64_t seed) {
  if (plan.folds.size() != fold_models.size())
    fail(Code::LengthMismatch, plan.folds.size(), " folds vs ", fold_models.size(),
         " models");
  const long n = X.rows();
  auto pooled = [&](const Eigen::MatrixXd &Xin) {
    Eigen::VectorXd preds(n);
    for (std::size_t f = 0; f < plan.folds.size(); ++f) {
      for (int i : plan.folds[f].test_idx)
        preds[i] = fold_models[f].w_reg.dot(Xin.row(i)) + fold_models[f].b_reg;
    }
    return preds;
  };
  double r_base = detail::r_or_zero(pooled(X), y);
  double r2_base = r_base * r_base;

  Rng rng(seed);
  std::vector<double> importance(static_cast<std::size_t>(X.cols()), 0.0);
  Eigen::MatrixXd Xp = X;
  for (long j = 0; j < X.cols(); ++j) {
    double acc = 0.0;
    for (int rep = 0; rep < n_repeats; ++rep) {
      auto perm = rng.permutation(static_cast<std::size_t>(n));
      for (long i = 0; i < n; ++i) Xp(i, j) = X(perm[static_cast<std::size_t>(i)], j);
      double r = detail::r_or_zero(pooled(Xp), y);
      acc += r2_base - r * r;
    }
    Xp.col(j) = X.col(j);
    importance[static_cast<std::size_t>(j)] = acc / n_repeats;
  }
  return importance;
}

struct VennCounts {
  // region[mask] with bit 0 = in A, bit 1 = in B, bit 2 = in C; region[0] is
  // the non-error remainder of the universe
  std::array<int, 8> region{};
  std::array<double, 3> unique_pct{};  // share of a model's errors no one else makes
  int union_size = 0;
};

inline VennCounts error_venn(const std::array<const EvalReport *, 3> &reports) {
  std::set<std::string> universe(reports[0]->ids.begin(), reports[0]->ids.end());
  for (int m = 1; m < 3; ++m) {
    std::set<std::string> u(reports[m]->ids.begin(), reports[m]->ids.end());
    if (u != universe) fail(Code::UniverseMismatch, "report ", m, " covers different ids");
  }
  VennCounts out;
  for (const auto &sid : universe) {
    int mask = 0;
    for (int m = 0; m < 3; ++m)
      if (reports[m]->error_ids.count(sid)) mask |= 1 << m;
    out.region[static_cast<std::size_t>(mask)] += 1;
    if (mask) ++out.union_size;
  }
  for (int m = 0; m < 3; ++m) {
    auto total = reports[m]->error_ids.size();
    int unique = out.region[static_cast<std::size_t>(1 << m)];
    out.unique_pct[static_cast<std::size_t>(m)] =
        total ? 100.0 * unique / static_cast<double>(total) : 0.0;
  }
  return out;
}

struct ReplicationResult {
  double r = 0.0;
  double p = 1.0;
  std::vector<std::string> verbs;  // intersection actually used
};

inline std::map<std::string, double> load_verb_scores(const std::string &path) {
  std::map<std::string, double> scores;
  auto lines = read_lines(path);
  for (std::size_t li = 0; li < lines.size(); ++li) {
    if (trim(lines[li]).empty()) continue;
    std::string ctx = path + ":" + std::to_string(li + 1);
    auto f = split(lines[li], '\t');
    if (f.size() != 2) fail(Code::MalformedLine, "expected 'verb<TAB>score' at ", ctx);
    scores[f[0]] = require_double(f[1], ctx);
  }
  if (scores.empty()) fail(Code::EmptyFile, path);
  return scores;
}

// Mean SIS rating per verb, inverted so high = asymmetric, correlated with
// the external per-verb scores over the verb intersection.
inline ReplicationResult verb_level_replication(const SisCorpus &corpus,
                                                const std::string &scores_path) {
  auto external = load_verb_scores(scores_path);
  std::vector<double> ours, theirs;
  ReplicationResult res;
  for (const auto &[verb, score] : external) {
    auto it = corpus.verbs.find(verb);
    if (it == corpus.verbs.end()) continue;
    double m = 0.0;
    for (const auto &sid : it->second.sentence_ids) m += corpus.by_id(sid).mean_rating;
    m /= static_cast<double>(it->second.sentence_ids.size());
    ours.push_back(invert_rating(m));
    theirs.push_back(score);
    res.verbs.push_back(verb);
  }
  if (res.verbs.size() < 3)
    fail(Code::TooFewVerbs, "only ", res.verbs.size(), " verbs overlap ", scores_path);
  PearsonResult pr = pearson(ours, theirs);
  res.r = pr.r;
  res.p = pr.p;
  return res;
}

enum class SdMode { relative, absolute };

struct CtrlResult {
  std::vector<std::string> ids;
  std::map<std::string, int> group_of;
  int n_groups = 0;
  std::map<std::string, double> ctrl_mse;  // model name -> MSE on the subset
  bool empty = false;
};

// Low inter-rater SD rows whose signature group repeats and that every
// reference model predicts within pred_gap.
inline CtrlResult controlled_subset(const SisCorpus &corpus, const Eigen::MatrixXd &Phi,
                                    const std::vector<const EvalReport *> &reports,
                                    double sd_factor = 0.1, double pred_gap = 1.0,
                                    int min_group = 2, SdMode mode = SdMode::relative,
                                    const std::vector<int> *signature_cols = nullptr,
                                    Diagnostics *diag = nullptr) {
  if (reports.empty()) fail(Code::MissingReport, "controlled subset needs model reports");
  const int n = static_cast<int>(corpus.records.size());
  if (Phi.rows() != n) fail(Code::LengthMismatch, "Phi rows ", Phi.rows(), " vs ", n);
  for (const auto *rep : reports) {
    if (static_cast<int>(rep->ids.size()) != n)
      fail(Code::UniverseMismatch, rep->model_name, " covers ", rep->ids.size(), " ids");
    for (int i = 0; i < n; ++i)
      if (rep->ids[static_cast<std::size_t>(i)] !=
          corpus.records[static_cast<std::size_t>(i)].sentence_id)
        fail(Code::UniverseMismatch, rep->model_name, " id order differs at row ", i);
  }

  double mean_y = 0.0;
  for (const auto &rec : corpus.records) mean_y += rec.mean_rating;
  mean_y /= n;
  double ss = 0.0;
  for (const auto &rec : corpus.records)
    ss += (rec.mean_rating - mean_y) * (rec.mean_rating - mean_y);
  double sd_all = std::sqrt(ss / (n - 1));
  double sd_cut = mode == SdMode::relative ? sd_factor * sd_all : sd_factor;

  std::vector<int> cols;
  if (signature_cols) {
    cols = *signature_cols;
  } else {
    cols.resize(kNumFeatures);
    for (int j = 0; j < kNumFeatures; ++j) cols[static_cast<std::size_t>(j)] = j;
  }

  std::map<std::string, std::vector<int>> groups;  // signature -> row indices
  std::vector<std::string> sig_order;
  for (int i = 0; i < n; ++i) {
    const auto &rec = corpus.records[static_cast<std::size_t>(i)];
    if (rec.rating_sd > sd_cut) continue;
    bool ok = true;
    for (const auto *rep : reports) {
      if (std::fabs(rep->predictions[static_cast<std::size_t>(i)] - rec.mean_rating) >=
          pred_gap) {
        ok = false;
        break;
      }
    }
    if (!ok) continue;
    std::string sig;
    sig.reserve(cols.size());
    for (int j : cols) sig += Phi(i, j) != 0.0 ? '1' : '0';
    if (!groups.count(sig)) sig_order.push_back(sig);
    groups[sig].push_back(i);
  }

  CtrlResult res;
  std::vector<int> kept_rows;
  for (const auto &sig : sig_order) {
    const auto &rows = groups[sig];
    if (static_cast<int>(rows.size()) < min_group) continue;
    int gid = res.n_groups++;
    for (int i : rows) {
      const auto &sid = corpus.records[static_cast<std::size_t>(i)].sentence_id;
      res.ids.push_back(sid);
      res.group_of[sid] = gid;
      kept_rows.push_back(i);
    }
  }
  if (kept_rows.empty()) {
    res.empty = true;
    warn_or_drop(diag, Code::EmptySubset, "no sentences survive the controlled filters");
    return res;
  }
  for (const auto *rep : reports) {
    double acc = 0.0;
    for (int i : kept_rows) {
      double d = rep->predictions[static_cast<std::size_t>(i)] -
                 corpus.records[static_cast<std::size_t>(i)].mean_rating;
      acc += d * d;
    }
    res.ctrl_mse[rep->model_name] = acc / static_cast<double>(kept_rows.size());
  }
  return res;
}

}  // namespace predsym
