#include "lookdrift/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "lookdrift/errors.hpp"

namespace lookdrift {
namespace {

// Sum of |x_i - y_j| over all (i, j), optionally skipping i == j. Row sums
// first, then the total.
double pair_distance_sum(const Matrix& x, const Matrix& y, bool skip_diagonal) {
  const Eigen::Index d = x.cols();
  const Eigen::Index m = y.rows();
  const Matrix yt = y.transpose();
  Eigen::ArrayXd sq(m);
  double total = 0.0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    sq.setZero();
    for (Eigen::Index c = 0; c < d; ++c) {
      sq += (yt.row(c).array().transpose() - x(i, c)).square();
    }
    if (skip_diagonal && i < m) sq[i] = 0.0;
    total += sq.sqrt().sum();
  }
  return total;
}

// Same as pair_distance_sum(x, x, true), visiting each unordered pair once.
double within_distance_sum(const Matrix& x) {
  const Eigen::Index d = x.cols();
  const Eigen::Index n = x.rows();
  const Matrix xt = x.transpose();
  Eigen::ArrayXd sq(n);
  double total = 0.0;
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    const Eigen::Index len = n - i - 1;
    auto seg = sq.head(len);
    seg.setZero();
    for (Eigen::Index c = 0; c < d; ++c) {
      seg += (xt.row(c).segment(i + 1, len).array().transpose() - x(i, c)).square();
    }
    total += seg.sqrt().sum();
  }
  return 2.0 * total;
}

double w1_sorted(std::vector<double>& pa, std::vector<double>& pb) {
  std::sort(pa.begin(), pa.end());
  std::sort(pb.begin(), pb.end());
  double s = 0.0;
  for (std::size_t i = 0; i < pa.size(); ++i) s += std::abs(pa[i] - pb[i]);
  return s / static_cast<double>(pa.size());
}

}  // namespace

double energy_distance(const SampleBatch& a, const SampleBatch& b) {
  if (a.dim() != b.dim()) throw InvalidInput("energy_distance: dimension mismatch");
  if (a.size() < 2 || b.size() < 2) {
    throw InvalidInput("energy_distance: each sample needs at least 2 points");
  }
  const double n = static_cast<double>(a.size());
  const double m = static_cast<double>(b.size());
  const bool paired = a.size() == b.size();

  const double cross = pair_distance_sum(a.matrix(), b.matrix(), paired) /
                       (paired ? n * (n - 1.0) : n * m);
  const double within_a = within_distance_sum(a.matrix()) / (n * (n - 1.0));
  const double within_b = within_distance_sum(b.matrix()) / (m * (m - 1.0));
  return 2.0 * cross - within_a - within_b;
}

Matrix random_directions(Eigen::Index dim, int projections, Rng& rng) {
  if (projections < 1) throw InvalidInput("sliced_w1: projections must be >= 1");
  if (dim < 1) throw InvalidInput("sliced_w1: dimension must be >= 1");
  Matrix dirs(projections, dim);
  for (int p = 0; p < projections; ++p) {
    double norm = 0.0;
    while (norm == 0.0) {
      rng.fill_normal(std::span<double>(dirs.row(p).data(), static_cast<std::size_t>(dim)));
      norm = dirs.row(p).norm();
    }
    dirs.row(p) /= norm;
  }
  return dirs;
}

double sliced_w1(const SampleBatch& a, const SampleBatch& b, const Matrix& directions) {
  if (a.dim() != b.dim() || directions.cols() != a.dim()) {
    throw InvalidInput("sliced_w1: dimension mismatch");
  }
  if (directions.rows() < 1) throw InvalidInput("sliced_w1: projections must be >= 1");
  const Eigen::Index n = std::min(a.size(), b.size());
  std::vector<double> pa(static_cast<std::size_t>(n)), pb(static_cast<std::size_t>(n));
  double total = 0.0;
  for (Eigen::Index p = 0; p < directions.rows(); ++p) {
    const RowVector dir = directions.row(p);
    for (Eigen::Index i = 0; i < n; ++i) {
      pa[static_cast<std::size_t>(i)] = a.row(i).dot(dir);
      pb[static_cast<std::size_t>(i)] = b.row(i).dot(dir);
    }
    total += w1_sorted(pa, pb);
  }
  return total / static_cast<double>(directions.rows());
}

double sliced_w1(const SampleBatch& a, const SampleBatch& b, int projections, Rng& rng) {
  return sliced_w1(a, b, random_directions(a.dim(), projections, rng));
}

MetricReport evaluate_metrics(const SampleBatch& a, const SampleBatch& b, int projections,
                              Rng& rng) {
  MetricReport r;
  r.energy_distance = energy_distance(a, b);
  r.sliced_w1 = sliced_w1(a, b, projections, rng);
  r.projections = projections;
  r.size_a = a.size();
  r.size_b = b.size();
  return r;
}

}  // namespace lookdrift
