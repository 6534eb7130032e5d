#include "lookdrift/sample_batch.hpp"

#include <string>

#include "lookdrift/errors.hpp"

namespace lookdrift {

void require_finite(const Eigen::Ref<const Matrix>& m, const char* what) {
  if (!m.allFinite()) {
    throw InvalidInput(std::string(what) + ": non-finite entry");
  }
}

SampleBatch::SampleBatch(Matrix data) : data_(std::move(data)) {
  if (data_.rows() < 1 || data_.cols() < 1) {
    throw InvalidInput("SampleBatch: shape must be at least 1x1, got " +
                       std::to_string(data_.rows()) + "x" + std::to_string(data_.cols()));
  }
  require_finite(data_, "SampleBatch");
}

bool operator==(const SampleBatch& a, const SampleBatch& b) {
  return a.data_.rows() == b.data_.rows() && a.data_.cols() == b.data_.cols() &&
         a.data_ == b.data_;
}

}  // namespace lookdrift
