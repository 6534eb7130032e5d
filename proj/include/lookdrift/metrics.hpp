#pragma once

#include "lookdrift/rng.hpp"
#include "lookdrift/sample_batch.hpp"

namespace lookdrift {

struct MetricReport {
  double energy_distance = 0.0;  ///< raw estimator value, may dip below 0
  double sliced_w1 = 0.0;
  int projections = 0;
  Eigen::Index size_a = 0;
  Eigen::Index size_b = 0;
};

/// Energy distance 2 E|a-b| - E|a-a'| - E|b-b'| with within-sample means over
/// i != i'. For equal sizes the cross mean also skips the paired terms i == j,
/// giving the paired U-statistic, which is 0 up to rounding for a == b. For unequal
/// sizes the cross mean runs over all pairs.
double energy_distance(const SampleBatch& a, const SampleBatch& b);

/// Mean over the rows of `directions` (unit vectors) of the 1D Wasserstein-1
/// distance between the projected samples. Unequal sizes use the first
/// min(|a|, |b|) rows of each batch.
double sliced_w1(const SampleBatch& a, const SampleBatch& b, const Matrix& directions);

/// Draws `projections` directions uniformly on the unit sphere (normalized
/// Gaussians from `rng`) and calls the overload above.
double sliced_w1(const SampleBatch& a, const SampleBatch& b, int projections, Rng& rng);

Matrix random_directions(Eigen::Index dim, int projections, Rng& rng);

MetricReport evaluate_metrics(const SampleBatch& a, const SampleBatch& b, int projections,
                              Rng& rng);

}  // namespace lookdrift
