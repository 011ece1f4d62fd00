#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "predsym/diag.hpp"

namespace predsym {

struct ParamView {
  double *data;
  long size;
};

// Central differences against the supplied analytic gradients; returns the
// max over all scalars of |fd - analytic| / max(|fd| + |analytic|, 1e-8).
inline double gradients_finite_difference_check(const std::function<double()> &loss_fn,
                                                const std::vector<ParamView> &params,
                                                const std::vector<const double *> &analytic,
                                                double epsilon = 1e-5) {
  if (params.size() != analytic.size())
    fail(Code::LengthMismatch, params.size(), " params vs ", analytic.size(), " grads");
  double worst = 0.0;
  for (std::size_t k = 0; k < params.size(); ++k) {
    for (long j = 0; j < params[k].size; ++j) {
      double &p = params[k].data[j];
      double saved = p;
      p = saved + epsilon;
      double up = loss_fn();
      p = saved - epsilon;
      double down = loss_fn();
      p = saved;
      double fd = (up - down) / (2.0 * epsilon);
      double an = analytic[k][j];
      double rel = std::fabs(fd - an) / std::max(std::fabs(fd) + std::fabs(an), 1e-8);
      worst = std::max(worst, rel);
    }
  }
  return worst;
}

}  // namespace predsym
