// Independent reference computations used only by the tests. Nothing here
// calls into the library code paths it is used to check.
#ifndef LWA_TESTS_ORACLES_HPP
#define LWA_TESTS_ORACLES_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>
#include <utility>
#include <vector>

namespace oracle {

/// Surrogate written out directly from its definition.
inline double surrogate(int y, double h, double r, double c) {
  const double beta = 1.0 / (1.0 - 2.0 * c);
  return std::max({0.0, 1.0 + 0.5 * (r - y * h), c * (1.0 - beta * r)});
}

/// Single-example objective in flat parameters theta = (w, u, b, b').
inline double single_objective(const std::vector<double>& theta, const std::vector<double>& x, int y, double lw,
                               double lu, double c) {
  const std::size_t d = x.size();
  double h = theta[2 * d], r = theta[2 * d + 1], reg_w = 0.0, reg_u = 0.0;
  for (std::size_t k = 0; k < d; ++k) {
    h += theta[k] * x[k];
    r += theta[d + k] * x[k];
    reg_w += theta[k] * theta[k];
    reg_u += theta[d + k] * theta[d + k];
  }
  reg_w += theta[2 * d] * theta[2 * d];
  reg_u += theta[2 * d + 1] * theta[2 * d + 1];
  return 0.5 * lw * reg_w + 0.5 * lu * reg_u + surrogate(y, h, r, c);
}

/// Central finite-difference gradient of f at theta.
inline std::vector<double> central_difference(const std::function<double(const std::vector<double>&)>& f,
                                              std::vector<double> theta, double step) {
  std::vector<double> grad(theta.size());
  for (std::size_t k = 0; k < theta.size(); ++k) {
    const double saved = theta[k];
    theta[k] = saved + step;
    const double up = f(theta);
    theta[k] = saved - step;
    const double down = f(theta);
    theta[k] = saved;
    grad[k] = (up - down) / (2.0 * step);
  }
  return grad;
}

/// AUC as the fraction of (positive, negative) pairs ranked correctly, ties counting one half.
inline double pairwise_auc(const std::vector<int>& labels, const std::vector<double>& scores) {
  double wins = 0.0;
  double pairs = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] != 1) continue;
    for (std::size_t j = 0; j < labels.size(); ++j) {
      if (labels[j] != -1) continue;
      pairs += 1.0;
      if (scores[i] > scores[j]) wins += 1.0;
      if (scores[i] == scores[j]) wins += 0.5;
    }
  }
  return wins / pairs;
}

/// Area under the ROC polyline traced by sweeping the threshold through every score (trapezoid rule).
inline double trapezoid_auc(const std::vector<int>& labels, const std::vector<double>& scores) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  const double n_pos = static_cast<double>(std::count(labels.begin(), labels.end(), 1));
  const double n_neg = static_cast<double>(labels.size()) - n_pos;
  double tp = 0.0, fp = 0.0, prev_tpr = 0.0, prev_fpr = 0.0, area = 0.0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    (labels[order[i]] == 1 ? tp : fp) += 1.0;
    if (i + 1 < order.size() && scores[order[i + 1]] == scores[order[i]]) continue;
    const double tpr = tp / n_pos, fpr = fp / n_neg;
    area += (fpr - prev_fpr) * (tpr + prev_tpr) / 2.0;
    prev_tpr = tpr;
    prev_fpr = fpr;
  }
  return area;
}

inline std::vector<double> average_ranks(const std::vector<double>& v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && v[order[j]] == v[order[i]]) ++j;
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = 0.5 * static_cast<double>(i + 1 + j);
    i = j;
  }
  return ranks;
}

/// Spearman rank correlation (Pearson correlation of average ranks).
inline double spearman(const std::vector<double>& a, const std::vector<double>& b) {
  const std::vector<double> ra = average_ranks(a), rb = average_ranks(b);
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / n;
  const double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / n;
  double cov = 0.0, va = 0.0, vb = 0.0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    cov += (ra[i] - ma) * (rb[i] - mb);
    va += (ra[i] - ma) * (ra[i] - ma);
    vb += (rb[i] - mb) * (rb[i] - mb);
  }
  return cov / std::sqrt(va * vb);
}

}  // namespace oracle

#endif  // LWA_TESTS_ORACLES_HPP
