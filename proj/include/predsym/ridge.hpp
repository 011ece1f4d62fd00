#pragma once

#include <Eigen/Dense>
#include <cmath>

#include "predsym/diag.hpp"

namespace predsym {

struct RidgeModel {
  Eigen::VectorXd w_reg;
  double b_reg = 0.0;
  double alpha = 1.0;
};

inline double predict(const RidgeModel &model, const Eigen::VectorXd &h) {
  if (h.size() != model.w_reg.size())
    fail(Code::DimensionMismatch, "representation dim ", h.size(), " vs model dim ",
         model.w_reg.size());
  return model.w_reg.dot(h) + model.b_reg;
}

inline Eigen::VectorXd predict_all(const RidgeModel &model, const Eigen::MatrixXd &X) {
  if (X.cols() != model.w_reg.size())
    fail(Code::DimensionMismatch, "X cols ", X.cols(), " vs model dim ", model.w_reg.size());
  return (X * model.w_reg).array() + model.b_reg;
}

// L = sum_i (y_i - w.x_i - b)^2 + (alpha/2) w.w, bias unregularized
inline double ridge_loss(const Eigen::MatrixXd &X, const Eigen::VectorXd &y,
                         const Eigen::VectorXd &w, double b, double alpha) {
  Eigen::VectorXd e = (X * w).array() + b - y.array();
  return e.squaredNorm() + 0.5 * alpha * w.squaredNorm();
}

// Normal equations with the bias appended as an unpenalized column.
inline RidgeModel fit_ridge_closed_form(const Eigen::MatrixXd &X, const Eigen::VectorXd &y,
                                        double alpha, bool fit_bias = true,
                                        Diagnostics *diag = nullptr) {
  if (X.rows() != y.size())
    fail(Code::LengthMismatch, X.rows(), " rows vs ", y.size(), " targets");
  if (X.rows() < 1) fail(Code::LengthMismatch, "empty design matrix");
  const long d = X.cols();
  const long m = fit_bias ? d + 1 : d;
  Eigen::MatrixXd A(m, m);
  Eigen::VectorXd rhs(m);
  A.topLeftCorner(d, d) = X.transpose() * X +
                          (alpha / 2.0) * Eigen::MatrixXd::Identity(d, d);
  rhs.head(d) = X.transpose() * y;
  if (fit_bias) {
    Eigen::VectorXd colsum = X.colwise().sum();
    A.block(0, d, d, 1) = colsum;
    A.block(d, 0, 1, d) = colsum.transpose();
    A(d, d) = static_cast<double>(X.rows());
    rhs(d) = y.sum();
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
  Eigen::VectorXd z;
  if (lu.isInvertible()) {
    z = lu.solve(rhs);
  } else {
    warn_or_drop(diag, Code::SingularSystem,
                 "normal equations singular, using pseudo-inverse");
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(A);
    z = cod.solve(rhs);
  }
  RidgeModel model;
  model.alpha = alpha;
  model.w_reg = z.head(d);
  model.b_reg = fit_bias ? z(d) : 0.0;
  return model;
}

}  // namespace predsym
