#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <vector>

#include "predsym/diag.hpp"
#include "predsym/ridge.hpp"
#include "predsym/rng.hpp"

namespace predsym {

struct EpochRecord {
  int epoch = 0;
  double loss = 0.0;
};

// Adam with one shared step counter across all registered parameters.
struct OptimizerState {
  double learning_rate = 1e-4;
  int batch_size = 32;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  std::vector<Eigen::ArrayXd> m, v;
  long t = 0;

  struct Slot {
    double *param;
    const double *grad;
    long size;
  };

  void reset(const std::vector<long> &sizes) {
    m.clear();
    v.clear();
    for (long s : sizes) {
      m.push_back(Eigen::ArrayXd::Zero(s));
      v.push_back(Eigen::ArrayXd::Zero(s));
    }
    t = 0;
  }

  void step(const std::vector<Slot> &slots) {
    if (slots.size() > m.size())
      fail(Code::DimensionMismatch, "optimizer has ", m.size(), " slots, got ",
           slots.size());
    ++t;
    double c1 = 1.0 - std::pow(beta1, static_cast<double>(t));
    double c2 = 1.0 - std::pow(beta2, static_cast<double>(t));
    for (std::size_t i = 0; i < slots.size(); ++i) {
      const Slot &s = slots[i];
      if (s.size != m[i].size())
        fail(Code::DimensionMismatch, "slot ", i, " size ", s.size, " vs ", m[i].size());
      for (long j = 0; j < s.size; ++j) {
        double g = s.grad[j];
        m[i][j] = beta1 * m[i][j] + (1.0 - beta1) * g;
        v[i][j] = beta2 * v[i][j] + (1.0 - beta2) * g * g;
        double mh = m[i][j] / c1;
        double vh = v[i][j] / c2;
        s.param[j] -= learning_rate * mh / (std::sqrt(vh) + epsilon);
      }
    }
  }
};

// Stop once the epoch loss has failed to improve by a relative 1e-7 for this
// many consecutive epochs.
struct StopRule {
  double rel_tol = 1e-7;
  int patience = 10;
  double best = std::numeric_limits<double>::infinity();
  int stall = 0;

  bool update(double loss) {
    if (loss < best * (1.0 - rel_tol)) {
      best = loss;
      stall = 0;
      return false;
    }
    return ++stall >= patience;
  }
};

// Mini-batch Adam on the ridge objective; per batch the regularizer is scaled
// by |B|/n so the summed batch losses reproduce the full objective.
inline RidgeModel fit_ridge_gd(const Eigen::MatrixXd &X, const Eigen::VectorXd &y,
                               double alpha, OptimizerState opt, int max_epochs,
                               std::uint64_t seed, bool fit_bias = true,
                               std::vector<EpochRecord> *curve = nullptr) {
  if (X.rows() != y.size())
    fail(Code::LengthMismatch, X.rows(), " rows vs ", y.size(), " targets");
  const long n = X.rows();
  const long d = X.cols();
  Rng rng(seed);
  Eigen::VectorXd w(d);
  double scale = 1.0 / std::sqrt(static_cast<double>(d));
  for (long j = 0; j < d; ++j) w[j] = rng.uniform(-1.0, 1.0) * scale;
  double b = 0.0;

  opt.reset({d, 1});
  Eigen::VectorXd gw(d);
  double gb = 0.0;
  StopRule stop;
  for (int ep = 0; ep < max_epochs; ++ep) {
    auto order = rng.permutation(static_cast<std::size_t>(n));
    for (long s0 = 0; s0 < n; s0 += opt.batch_size) {
      long bs = std::min<long>(opt.batch_size, n - s0);
      Eigen::MatrixXd Xb(bs, d);
      Eigen::VectorXd yb(bs);
      for (long i = 0; i < bs; ++i) {
        Xb.row(i) = X.row(order[static_cast<std::size_t>(s0 + i)]);
        yb[i] = y[order[static_cast<std::size_t>(s0 + i)]];
      }
      Eigen::VectorXd e = (Xb * w).array() + b - yb.array();
      gw = 2.0 * (Xb.transpose() * e) +
           alpha * (static_cast<double>(bs) / static_cast<double>(n)) * w;
      gb = 2.0 * e.sum();
      if (fit_bias)
        opt.step({{w.data(), gw.data(), d}, {&b, &gb, 1}});
      else
        opt.step({{w.data(), gw.data(), d}});
    }
    double loss = ridge_loss(X, y, w, b, alpha);
    if (!std::isfinite(loss))
      fail(Code::NonFiniteLoss, "epoch ", ep, " loss diverged");
    if (curve) curve->push_back({ep, loss});
    if (stop.update(loss)) break;
  }
  RidgeModel model;
  model.alpha = alpha;
  model.w_reg = std::move(w);
  model.b_reg = b;
  return model;
}

}  // namespace predsym
