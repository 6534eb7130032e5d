#pragma once

#include <vector>

#include "lookdrift/sample_batch.hpp"

namespace lookdrift {

/// Sign of the Laplace-kernel exponent: `decaying` is exp(-|x-y|/tau),
/// `growing` is exp(+|x-y|/tau).
enum class KernelSign { decaying, growing };

struct DriftConfig {
  /// Temperatures; with more than one, per-temperature drift fields are
  /// averaged with uniform weights.
  std::vector<double> taus{1.0};
  /// Whether negatives bitwise equal to the query contribute to repulsion.
  bool include_self = true;
  /// Subtract the max log-weight before exponentiating.
  bool stab_shift = true;
  KernelSign sign = KernelSign::decaying;

  void validate() const;
};

/// One drift vector per query row.
class DriftField {
 public:
  explicit DriftField(Matrix vectors);

  Eigen::Index size() const { return vectors_.rows(); }
  Eigen::Index dim() const { return vectors_.cols(); }
  const Matrix& matrix() const { return vectors_; }
  auto row(Eigen::Index i) const { return vectors_.row(i); }

  /// Batch mean of the per-row Euclidean norms.
  double mean_norm() const;

 private:
  Matrix vectors_;
};

double laplace_kernel(PointRef x, PointRef y, double tau,
                      KernelSign sign = KernelSign::decaying);

/// sum_i softmax_i(-|query - y_i| / tau) * y_i over the rows of `batch`.
RowVector weighted_mean(PointRef query, const SampleBatch& batch, double tau,
                        bool stab_shift = true, KernelSign sign = KernelSign::decaying);

/// V+_p(x): kernel-weighted mean of the positives minus the query.
RowVector attraction(PointRef query, const SampleBatch& positives, const DriftConfig& cfg);

/// V-_q(x): kernel-weighted mean of the negatives minus the query, honoring
/// cfg.include_self.
RowVector repulsion(PointRef query, const SampleBatch& negatives, const DriftConfig& cfg);

/// V_{p,q}(x) = V+_p(x) - V-_q(x) for every row x of `queries`.
DriftField drift(const SampleBatch& queries, const SampleBatch& positives,
                 const SampleBatch& negatives, const DriftConfig& cfg);

}  // namespace lookdrift
