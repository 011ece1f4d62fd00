#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "predsym/diag.hpp"
#include "predsym/features.hpp"
#include "predsym/optim.hpp"
#include "predsym/rng.hpp"

namespace predsym {

enum class Activation { relu, tanh_ };
enum class ClfLossVariant { bce, eq4_literal };

constexpr double kProbClamp = 1e-7;

struct HybridModel {
  Eigen::MatrixXd adapter_W1;  // hidden_dim x input_dim
  Eigen::VectorXd adapter_b1;  // hidden_dim
  Eigen::MatrixXd W_clf;       // K x hidden_dim
  Eigen::VectorXd b_clf;       // K
  Eigen::VectorXd w_reg;       // hidden_dim; empty until stage 2
  double b_reg = 0.0;
  int hidden_dim = 256;
  Activation activation = Activation::relu;
};

inline HybridModel init_hybrid(int input_dim, int hidden_dim, Rng &rng,
                               Activation act = Activation::relu) {
  HybridModel m;
  m.hidden_dim = hidden_dim;
  m.activation = act;
  m.adapter_W1.resize(hidden_dim, input_dim);
  double s_in = 1.0 / std::sqrt(static_cast<double>(input_dim));
  for (int i = 0; i < hidden_dim; ++i)
    for (int j = 0; j < input_dim; ++j) m.adapter_W1(i, j) = rng.uniform(-1.0, 1.0) * s_in;
  m.adapter_b1 = Eigen::VectorXd::Zero(hidden_dim);
  m.W_clf.resize(kNumFeatures, hidden_dim);
  double s_h = 1.0 / std::sqrt(static_cast<double>(hidden_dim));
  for (int i = 0; i < kNumFeatures; ++i)
    for (int j = 0; j < hidden_dim; ++j) m.W_clf(i, j) = rng.uniform(-1.0, 1.0) * s_h;
  m.b_clf = Eigen::VectorXd::Zero(kNumFeatures);
  return m;
}

inline Eigen::MatrixXd adapter_forward(const HybridModel &m, const Eigen::MatrixXd &X) {
  if (X.cols() != m.adapter_W1.cols())
    fail(Code::DimensionMismatch, "input dim ", X.cols(), " vs adapter ",
         m.adapter_W1.cols());
  Eigen::MatrixXd H = (X * m.adapter_W1.transpose()).rowwise() + m.adapter_b1.transpose();
  if (m.activation == Activation::relu)
    H = H.cwiseMax(0.0);
  else
    H = H.array().tanh().matrix();
  return H;
}

inline Eigen::MatrixXd clf_probs_from_hidden(const HybridModel &m, const Eigen::MatrixXd &H) {
  Eigen::MatrixXd Z = (H * m.W_clf.transpose()).rowwise() + m.b_clf.transpose();
  return (1.0 / (1.0 + (-Z.array()).exp())).matrix();
}

inline Eigen::MatrixXd clamp_probs(Eigen::MatrixXd P) {
  return P.cwiseMax(kProbClamp).cwiseMin(1.0 - kProbClamp);
}

// Mean-per-example loss, summed over the K feature bits.
inline double clf_loss(const HybridModel &m, const Eigen::MatrixXd &X,
                       const Eigen::MatrixXd &T,
                       ClfLossVariant variant = ClfLossVariant::bce) {
  if (T.rows() != X.rows() || T.cols() != kNumFeatures)
    fail(Code::DimensionMismatch, "targets ", T.rows(), "x", T.cols());
  Eigen::MatrixXd P = clamp_probs(clf_probs_from_hidden(m, adapter_forward(m, X)));
  double total = 0.0;
  if (variant == ClfLossVariant::bce) {
    total = -(T.array() * P.array().log() +
              (1.0 - T.array()) * (1.0 - P.array()).log())
                 .sum();
  } else {
    total = -(T.array() * P.array().log()).sum();
  }
  return total / static_cast<double>(X.rows());
}

struct Stage1Grads {
  double loss = 0.0;
  Eigen::MatrixXd gW1;
  Eigen::VectorXd gb1;
  Eigen::MatrixXd gWc;
  Eigen::VectorXd gbc;
};

inline Stage1Grads stage1_grads(const HybridModel &m, const Eigen::MatrixXd &X,
                                const Eigen::MatrixXd &T,
                                ClfLossVariant variant = ClfLossVariant::bce) {
  const double n = static_cast<double>(X.rows());
  Eigen::MatrixXd H = adapter_forward(m, X);
  Eigen::MatrixXd P = clamp_probs(clf_probs_from_hidden(m, H));
  Stage1Grads g;
  if (variant == ClfLossVariant::bce) {
    g.loss = -(T.array() * P.array().log() +
               (1.0 - T.array()) * (1.0 - P.array()).log())
                  .sum() /
             n;
  } else {
    g.loss = -(T.array() * P.array().log()).sum() / n;
  }
  Eigen::MatrixXd dZ;
  if (variant == ClfLossVariant::bce)
    dZ = (P - T) / n;
  else
    dZ = (-(T.array() * (1.0 - P.array())) / n).matrix();
  g.gWc = dZ.transpose() * H;
  g.gbc = dZ.colwise().sum();
  Eigen::MatrixXd dH = dZ * m.W_clf;
  if (m.activation == Activation::relu)
    dH = (H.array() > 0.0).select(dH, 0.0);
  else
    dH = (dH.array() * (1.0 - H.array().square())).matrix();
  g.gW1 = dH.transpose() * X;
  g.gb1 = dH.colwise().sum();
  return g;
}

struct Stage2Grads {
  double loss = 0.0;  // batch squared error plus the scaled head penalty
  Eigen::VectorXd gw;
  double gb = 0.0;
  Eigen::MatrixXd gW1;
  Eigen::VectorXd gb1;
};

// reg_frac is |B|/n: summing batch objectives over an epoch then reproduces
// the full penalty once. Head weights are penalized, the adapter is not.
inline Stage2Grads stage2_grads(const HybridModel &m, const Eigen::MatrixXd &X,
                                const Eigen::VectorXd &y, double alpha, double reg_frac,
                                bool freeze_adapter) {
  Eigen::MatrixXd H = adapter_forward(m, X);
  Eigen::VectorXd r = (H * m.w_reg).array() + m.b_reg - y.array();
  Stage2Grads g;
  g.loss = r.squaredNorm() + 0.5 * alpha * reg_frac * m.w_reg.squaredNorm();
  g.gw = 2.0 * (H.transpose() * r) + alpha * reg_frac * m.w_reg;
  g.gb = 2.0 * r.sum();
  if (!freeze_adapter) {
    Eigen::MatrixXd dH = 2.0 * (r * m.w_reg.transpose());
    if (m.activation == Activation::relu)
      dH = (H.array() > 0.0).select(dH, 0.0);
    else
      dH = (dH.array() * (1.0 - H.array().square())).matrix();
    g.gW1 = dH.transpose() * X;
    g.gb1 = dH.colwise().sum();
  }
  return g;
}

inline Eigen::VectorXd predict_hybrid(const HybridModel &m, const Eigen::MatrixXd &X) {
  if (m.w_reg.size() == 0) fail(Code::DimensionMismatch, "regression head not trained");
  return (adapter_forward(m, X) * m.w_reg).array() + m.b_reg;
}

// Stage 1: adapter plus classification head on the binarized feature targets.
inline void train_hybrid_stage1(HybridModel &m, const Eigen::MatrixXd &X,
                                const Eigen::MatrixXd &T, OptimizerState opt,
                                int max_epochs, Rng &rng,
                                ClfLossVariant variant = ClfLossVariant::bce,
                                std::vector<EpochRecord> *curve = nullptr) {
  if (X.rows() != T.rows())
    fail(Code::LengthMismatch, X.rows(), " reps vs ", T.rows(), " target rows");
  const long n = X.rows();
  opt.reset({m.adapter_W1.size(), m.adapter_b1.size(), m.W_clf.size(), m.b_clf.size()});
  StopRule stop;
  for (int ep = 0; ep < max_epochs; ++ep) {
    auto order = rng.permutation(static_cast<std::size_t>(n));
    for (long s0 = 0; s0 < n; s0 += opt.batch_size) {
      long bs = std::min<long>(opt.batch_size, n - s0);
      Eigen::MatrixXd Xb(bs, X.cols());
      Eigen::MatrixXd Tb(bs, T.cols());
      for (long i = 0; i < bs; ++i) {
        Xb.row(i) = X.row(order[static_cast<std::size_t>(s0 + i)]);
        Tb.row(i) = T.row(order[static_cast<std::size_t>(s0 + i)]);
      }
      Stage1Grads g = stage1_grads(m, Xb, Tb, variant);
      opt.step({{m.adapter_W1.data(), g.gW1.data(), m.adapter_W1.size()},
                {m.adapter_b1.data(), g.gb1.data(), m.adapter_b1.size()},
                {m.W_clf.data(), g.gWc.data(), m.W_clf.size()},
                {m.b_clf.data(), g.gbc.data(), m.b_clf.size()}});
    }
    double loss = clf_loss(m, X, T, variant);
    if (!std::isfinite(loss)) fail(Code::NonFiniteLoss, "stage 1 epoch ", ep);
    if (curve) curve->push_back({ep, loss});
    if (stop.update(loss)) break;
  }
}

// Stage 2: regression head over adapter outputs; fine-tunes the adapter too
// unless frozen. The classifier head from stage 1 is left untouched.
inline void train_hybrid_stage2(HybridModel &m, const Eigen::MatrixXd &X,
                                const Eigen::VectorXd &y, OptimizerState opt,
                                int max_epochs, Rng &rng, double alpha,
                                bool freeze_adapter = false,
                                std::vector<EpochRecord> *curve = nullptr) {
  if (X.rows() != y.size())
    fail(Code::LengthMismatch, X.rows(), " reps vs ", y.size(), " targets");
  const long n = X.rows();
  if (m.w_reg.size() == 0) {
    m.w_reg.resize(m.hidden_dim);
    double s_h = 1.0 / std::sqrt(static_cast<double>(m.hidden_dim));
    for (int j = 0; j < m.hidden_dim; ++j) m.w_reg[j] = rng.uniform(-1.0, 1.0) * s_h;
    m.b_reg = 0.0;
  }
  opt.reset({m.w_reg.size(), 1, m.adapter_W1.size(), m.adapter_b1.size()});
  StopRule stop;
  for (int ep = 0; ep < max_epochs; ++ep) {
    auto order = rng.permutation(static_cast<std::size_t>(n));
    for (long s0 = 0; s0 < n; s0 += opt.batch_size) {
      long bs = std::min<long>(opt.batch_size, n - s0);
      Eigen::MatrixXd Xb(bs, X.cols());
      Eigen::VectorXd yb(bs);
      for (long i = 0; i < bs; ++i) {
        Xb.row(i) = X.row(order[static_cast<std::size_t>(s0 + i)]);
        yb[i] = y[order[static_cast<std::size_t>(s0 + i)]];
      }
      double frac = static_cast<double>(bs) / static_cast<double>(n);
      Stage2Grads g = stage2_grads(m, Xb, yb, alpha, frac, freeze_adapter);
      if (freeze_adapter) {
        opt.step({{m.w_reg.data(), g.gw.data(), m.w_reg.size()}, {&m.b_reg, &g.gb, 1}});
      } else {
        opt.step({{m.w_reg.data(), g.gw.data(), m.w_reg.size()},
                  {&m.b_reg, &g.gb, 1},
                  {m.adapter_W1.data(), g.gW1.data(), m.adapter_W1.size()},
                  {m.adapter_b1.data(), g.gb1.data(), m.adapter_b1.size()}});
      }
    }
    Eigen::VectorXd r = predict_hybrid(m, X) - y;
    double loss = r.squaredNorm() + 0.5 * alpha * m.w_reg.squaredNorm();
    if (!std::isfinite(loss)) fail(Code::NonFiniteLoss, "stage 2 epoch ", ep);
    if (curve) curve->push_back({ep, loss});
    if (stop.update(loss)) break;
  }
}

// Seed-taking wrappers for callers that do not manage an engine themselves.
inline void train_hybrid_stage1(HybridModel &m, const Eigen::MatrixXd &X,
                                const Eigen::MatrixXd &T, OptimizerState opt,
                                int max_epochs, std::uint64_t seed,
                                ClfLossVariant variant = ClfLossVariant::bce) {
  Rng rng(seed);
  train_hybrid_stage1(m, X, T, opt, max_epochs, rng, variant);
}

inline void train_hybrid_stage2(HybridModel &m, const Eigen::MatrixXd &X,
                                const Eigen::VectorXd &y, OptimizerState opt,
                                int max_epochs, std::uint64_t seed, double alpha,
                                bool freeze_adapter = false) {
  Rng rng(seed);
  train_hybrid_stage2(m, X, y, opt, max_epochs, rng, alpha, freeze_adapter);
}

}  // namespace predsym
