#pragma once

#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "predsym/diag.hpp"

namespace predsym {

// Regularized incomplete beta I_x(a,b) via the continued fraction, modified
// Lentz method. Good to ~1e-10, which covers the 1e-8 accuracy target.
namespace detail {

inline double betacf(double a, double b, double x) {
  const double tiny = 1e-30;
  const double eps = 3e-12;
  double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 300; ++m) {
    double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < eps) break;
  }
  return h;
}

}  // namespace detail

inline double betainc_reg(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                    a * std::log(x) + b * std::log1p(-x);
  double front = std::exp(ln_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * detail::betacf(a, b, x) / a;
  return 1.0 - front * detail::betacf(b, a, 1.0 - x) / b;
}

// Two-sided p for a t statistic with df degrees of freedom.
inline double t_two_sided_p(double t, double df) {
  if (!std::isfinite(t)) return 0.0;
  return betainc_reg(df / 2.0, 0.5, df / (df + t * t));
}

struct PearsonResult {
  double r = 0.0;
  double p = 1.0;
  int n = 0;
};

inline PearsonResult pearson(const std::vector<double> &a, const std::vector<double> &b) {
  if (a.size() != b.size())
    fail(Code::LengthMismatch, a.size(), " vs ", b.size());
  int n = static_cast<int>(a.size());
  if (n < 3) fail(Code::LengthMismatch, "need at least 3 pairs, got ", n);
  double ma = 0.0, mb = 0.0;
  for (int i = 0; i < n; ++i) {
    ma += a[static_cast<std::size_t>(i)];
    mb += b[static_cast<std::size_t>(i)];
  }
  ma /= n;
  mb /= n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (int i = 0; i < n; ++i) {
    double da = a[static_cast<std::size_t>(i)] - ma;
    double db = b[static_cast<std::size_t>(i)] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa == 0.0 || sbb == 0.0) fail(Code::ConstantInput, "constant vector in correlation");
  PearsonResult res;
  res.n = n;
  res.r = sab / std::sqrt(saa * sbb);
  if (res.r > 1.0) res.r = 1.0;
  if (res.r < -1.0) res.r = -1.0;
  double df = n - 2;
  double denom = 1.0 - res.r * res.r;
  if (denom <= 0.0) {
    res.p = 0.0;
  } else {
    double t = res.r * std::sqrt(df / denom);
    res.p = t_two_sided_p(t, df);
  }
  return res;
}

inline double mse(const std::vector<double> &pred, const std::vector<double> &truth) {
  if (pred.size() != truth.size())
    fail(Code::LengthMismatch, pred.size(), " vs ", truth.size());
  if (pred.empty()) fail(Code::LengthMismatch, "empty vectors");
  double s = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    double d = pred[i] - truth[i];
    s += d * d;
  }
  return s / static_cast<double>(pred.size());
}

template <typename T>
inline double cohens_kappa(const std::vector<T> &labels_a, const std::vector<T> &labels_b) {
  if (labels_a.size() != labels_b.size())
    fail(Code::LengthMismatch, labels_a.size(), " vs ", labels_b.size());
  if (labels_a.empty()) fail(Code::LengthMismatch, "empty label vectors");
  double n = static_cast<double>(labels_a.size());
  std::map<T, double> ca, cb;
  double agree = 0.0;
  for (std::size_t i = 0; i < labels_a.size(); ++i) {
    ca[labels_a[i]] += 1.0;
    cb[labels_b[i]] += 1.0;
    if (labels_a[i] == labels_b[i]) agree += 1.0;
  }
  double po = agree / n;
  double pe = 0.0;
  for (const auto &[cat, cnt] : ca) {
    auto it = cb.find(cat);
    if (it != cb.end()) pe += (cnt / n) * (it->second / n);
  }
  if (pe >= 1.0) return 1.0;  // both raters constant on the same category
  return (po - pe) / (1.0 - pe);
}

}  // namespace predsym
