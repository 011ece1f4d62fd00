#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "predsym/config.hpp"
#include "predsym/eval.hpp"
#include "predsym/hybrid.hpp"
#include "predsym/ridge.hpp"
#include "predsym/rng.hpp"

namespace predsym {

using json = nlohmann::ordered_json;

inline std::string fmt_double(double v, int prec = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", prec, v);
  return buf;
}

inline void write_text(const std::string &path, const std::string &content) {
  auto dir = std::filesystem::path(path).parent_path();
  if (!dir.empty()) std::filesystem::create_directories(dir);
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(Code::IoError, "cannot write ", path);
  out << content;
}

inline std::string digest_hex(const std::string &path) {
  std::string body = read_file(path);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(body)));
  return buf;
}

inline std::string hash_hex(const std::string &content) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(content)));
  return buf;
}

inline json matrix_json(const Eigen::MatrixXd &M) {
  std::vector<double> flat;
  flat.reserve(static_cast<std::size_t>(M.size()));
  for (long i = 0; i < M.rows(); ++i)
    for (long j = 0; j < M.cols(); ++j) flat.push_back(M(i, j));
  return json(flat);
}

inline json vector_json(const Eigen::VectorXd &v) {
  return json(std::vector<double>(v.data(), v.data() + v.size()));
}

inline Eigen::MatrixXd matrix_from_json(const json &arr, long rows, long cols) {
  if (static_cast<long>(arr.size()) != rows * cols)
    fail(Code::DimensionMismatch, "array size ", arr.size(), " vs ", rows, "x", cols);
  Eigen::MatrixXd M(rows, cols);
  std::size_t k = 0;
  for (long i = 0; i < rows; ++i)
    for (long j = 0; j < cols; ++j) M(i, j) = arr[k++].get<double>();
  return M;
}

inline Eigen::VectorXd vector_from_json(const json &arr) {
  Eigen::VectorXd v(static_cast<long>(arr.size()));
  for (long i = 0; i < v.size(); ++i) v[i] = arr[static_cast<std::size_t>(i)].get<double>();
  return v;
}

inline json ridge_to_json(const RidgeModel &m) {
  json j;
  j["type"] = "ridge";
  j["alpha"] = m.alpha;
  j["dim"] = m.w_reg.size();
  j["w_reg"] = vector_json(m.w_reg);
  j["b_reg"] = m.b_reg;
  return j;
}

inline RidgeModel ridge_from_json(const json &j) {
  RidgeModel m;
  m.alpha = j.at("alpha").get<double>();
  m.w_reg = vector_from_json(j.at("w_reg"));
  if (m.w_reg.size() != j.at("dim").get<long>())
    fail(Code::DimensionMismatch, "w_reg length vs declared dim");
  m.b_reg = j.at("b_reg").get<double>();
  return m;
}

inline json hybrid_to_json(const HybridModel &m) {
  json j;
  j["type"] = "hybrid";
  j["input_dim"] = m.adapter_W1.cols();
  j["hidden_dim"] = m.hidden_dim;
  j["activation"] = m.activation == Activation::relu ? "relu" : "tanh";
  j["adapter_W1"] = matrix_json(m.adapter_W1);
  j["adapter_b1"] = vector_json(m.adapter_b1);
  j["W_clf"] = matrix_json(m.W_clf);
  j["b_clf"] = vector_json(m.b_clf);
  j["w_reg"] = vector_json(m.w_reg);
  j["b_reg"] = m.b_reg;
  return j;
}

inline HybridModel hybrid_from_json(const json &j) {
  HybridModel m;
  long din = j.at("input_dim").get<long>();
  m.hidden_dim = j.at("hidden_dim").get<int>();
  m.activation = j.at("activation").get<std::string>() == "tanh" ? Activation::tanh_
                                                                 : Activation::relu;
  m.adapter_W1 = matrix_from_json(j.at("adapter_W1"), m.hidden_dim, din);
  m.adapter_b1 = vector_from_json(j.at("adapter_b1"));
  m.W_clf = matrix_from_json(j.at("W_clf"), kNumFeatures, m.hidden_dim);
  m.b_clf = vector_from_json(j.at("b_clf"));
  m.w_reg = vector_from_json(j.at("w_reg"));
  m.b_reg = j.at("b_reg").get<double>();
  return m;
}

inline json report_to_json(const EvalReport &rep) {
  json j;
  j["model"] = rep.model_name;
  j["n"] = rep.ids.size();
  j["r_defined"] = rep.r_defined;
  if (rep.r_defined) {
    j["pearson_r"] = rep.pearson_r;
    j["p_value"] = rep.p_value;
  } else {
    j["pearson_r"] = nullptr;
    j["p_value"] = nullptr;
  }
  j["mse"] = rep.mse_value;
  j["error_threshold"] = rep.error_threshold;
  j["n_errors"] = rep.error_ids.size();
  j["error_ids"] = std::vector<std::string>(rep.error_ids.begin(), rep.error_ids.end());
  return j;
}

inline std::string report_predictions_tsv(const EvalReport &rep, bool clip_column = true) {
  std::string out = "sentence_id\tprediction\thuman_mean\tabs_gap";
  if (clip_column) out += "\tprediction_clipped";
  out += "\n";
  for (std::size_t i = 0; i < rep.ids.size(); ++i) {
    double p = rep.predictions[i];
    double h = rep.human[i];
    out += rep.ids[i] + "\t" + fmt_double(p) + "\t" + fmt_double(h) + "\t" +
           fmt_double(std::fabs(p - h));
    if (clip_column) out += "\t" + fmt_double(std::clamp(p, 1.0, 5.0));
    out += "\n";
  }
  return out;
}

inline EvalReport report_from_files(const std::string &json_path,
                                    const std::string &tsv_path) {
  if (!file_exists(json_path) || !file_exists(tsv_path))
    fail(Code::MissingReport, json_path, " / ", tsv_path);
  json j = json::parse(read_file(json_path));
  EvalReport rep;
  rep.model_name = j.at("model").get<std::string>();
  rep.r_defined = j.at("r_defined").get<bool>();
  if (rep.r_defined) {
    rep.pearson_r = j.at("pearson_r").get<double>();
    rep.p_value = j.at("p_value").get<double>();
  }
  rep.mse_value = j.at("mse").get<double>();
  rep.error_threshold = j.at("error_threshold").get<double>();
  for (const auto &sid : j.at("error_ids")) rep.error_ids.insert(sid.get<std::string>());
  auto lines = read_lines(tsv_path);
  for (std::size_t li = 1; li < lines.size(); ++li) {
    if (trim(lines[li]).empty()) continue;
    auto f = split(lines[li], '\t');
    if (f.size() < 4) fail(Code::MalformedLine, tsv_path, ":", li + 1);
    rep.ids.push_back(f[0]);
    rep.predictions.push_back(require_double(f[1], tsv_path));
    rep.human.push_back(require_double(f[2], tsv_path));
  }
  return rep;
}

// manifest.json: provenance for every artifact in an output dir
inline json make_manifest(const RunConfig &cfg,
                          const std::vector<std::string> &input_paths,
                          const std::vector<std::string> &artifact_paths,
                          const std::string &out_dir) {
  json j;
  j["config_hash"] = hash_hex(config_snapshot(cfg));
  j["seed"] = cfg.seed;
  json inputs = json::object();
  for (const auto &p : input_paths)
    if (!p.empty() && file_exists(p)) inputs[p] = digest_hex(p);
  j["inputs"] = inputs;
  json artifacts = json::object();
  for (const auto &p : artifact_paths) {
    std::string full = out_dir + "/" + p;
    if (file_exists(full)) artifacts[p] = digest_hex(full);
  }
  j["artifacts"] = artifacts;
  return j;
}

}  // namespace predsym
