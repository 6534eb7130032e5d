#pragma once

// Straight-line reference implementations used only by tests. None of these
// call into the library's numerical routines.

#include <algorithm>
#include <cmath>
#include <vector>

namespace oracle {

using Points = std::vector<std::vector<double>>;

inline double dist(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

inline double kernel(const std::vector<double>& a, const std::vector<double>& b, double tau) {
  return std::exp(-dist(a, b) / tau);
}

/// E[k(x,y) y] / E[k(x,y)] with plain exponentials, no max shift.
inline std::vector<double> kernel_mean(const std::vector<double>& x, const Points& ys, double tau,
                                       bool skip_self = false) {
  std::vector<double> num(x.size(), 0.0);
  double den = 0.0;
  for (const auto& y : ys) {
    if (skip_self && y == x) continue;
    const double k = kernel(x, y, tau);
    for (std::size_t c = 0; c < x.size(); ++c) num[c] += k * y[c];
    den += k;
  }
  for (auto& v : num) v /= den;
  return num;
}

/// V+_p(x) - V-_q(x) written out from the attraction/repulsion definitions.
inline std::vector<double> drift(const std::vector<double>& x, const Points& pos,
                                 const Points& neg, double tau, bool include_self = true) {
  const auto mp = kernel_mean(x, pos, tau);
  const auto mn = kernel_mean(x, neg, tau, !include_self);
  std::vector<double> v(x.size());
  for (std::size_t c = 0; c < x.size(); ++c) v[c] = (mp[c] - x[c]) - (mn[c] - x[c]);
  return v;
}

/// Lookahead target: push the whole batch k+1 times, accumulate weighted drifts.
inline Points lookahead_target(const Points& outputs, const Points& pos, int k,
                               const std::vector<double>& weights, double tau) {
  Points batch = outputs;
  Points target = outputs;
  for (int i = 0; i <= k; ++i) {
    Points next = batch;
    for (std::size_t r = 0; r < batch.size(); ++r) {
      const auto v = drift(batch[r], pos, batch, tau);
      for (std::size_t c = 0; c < v.size(); ++c) {
        target[r][c] += weights[static_cast<std::size_t>(i)] * v[c];
        next[r][c] += v[c];
      }
    }
    batch = std::move(next);
  }
  return target;
}

/// Energy distance with the same estimator conventions, as a plain triple loop.
inline double energy_distance(const Points& a, const Points& b) {
  const double n = static_cast<double>(a.size()), m = static_cast<double>(b.size());
  const bool paired = a.size() == b.size();
  double cross = 0.0, wa = 0.0, wb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j)
      if (!(paired && i == j)) cross += dist(a[i], b[j]);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a.size(); ++j)
      if (i != j) wa += dist(a[i], a[j]);
  for (std::size_t i = 0; i < b.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j)
      if (i != j) wb += dist(b[i], b[j]);
  cross /= paired ? n * (n - 1) : n * m;
  return 2 * cross - wa / (n * (n - 1)) - wb / (m * (m - 1));
}

inline double w1_1d(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return s / static_cast<double>(a.size());
}

/// Forward pass of an MLP given per-layer (out x in) weights and biases.
template <class Act>
Points mlp_forward(const Points& input, const std::vector<Points>& weights,
                   const Points& biases, Act act) {
  Points h = input;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    Points next(h.size(), std::vector<double>(weights[l].size(), 0.0));
    for (std::size_t r = 0; r < h.size(); ++r) {
      for (std::size_t o = 0; o < weights[l].size(); ++o) {
        double z = biases[l][o];
        for (std::size_t i = 0; i < h[r].size(); ++i) z += weights[l][o][i] * h[r][i];
        next[r][o] = l + 1 < weights.size() ? act(z) : z;
      }
    }
    h = std::move(next);
  }
  return h;
}

struct ScalarAdam {
  double lr, b1, b2, eps;
  double m = 0.0, v = 0.0;
  int t = 0;
  double step(double p, double g) {
    ++t;
    m = b1 * m + (1 - b1) * g;
    v = b2 * v + (1 - b2) * g * g;
    const double mh = m / (1 - std::pow(b1, t));
    const double vh = v / (1 - std::pow(b2, t));
    return p - lr * mh / (std::sqrt(vh) + eps);
  }
};

}  // namespace oracle
