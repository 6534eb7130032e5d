#pragma once

#include <Eigen/Core>

namespace lookdrift {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowVector = Eigen::RowVectorXd;
using PointRef = Eigen::Ref<const RowVector>;

/// A B x d matrix of points, one per row. Stands in for an empirical
/// distribution (data, model output, or a drifted intermediate).
///
/// Construction rejects empty shapes and non-finite entries.
class SampleBatch {
 public:
  explicit SampleBatch(Matrix data);

  Eigen::Index size() const { return data_.rows(); }
  Eigen::Index dim() const { return data_.cols(); }

  const Matrix& matrix() const { return data_; }
  auto row(Eigen::Index i) const { return data_.row(i); }

  friend bool operator==(const SampleBatch& a, const SampleBatch& b);

 private:
  Matrix data_;
};

/// Throws InvalidInput unless every entry is finite.
void require_finite(const Eigen::Ref<const Matrix>& m, const char* what);

}  // namespace lookdrift
