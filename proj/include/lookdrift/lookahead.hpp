#pragma once

#include <vector>

#include "lookdrift/kernel_drift.hpp"
#include "lookdrift/sample_batch.hpp"

namespace lookdrift {

/// Depth k and the per-stage weights w_0..w_k of the lookahead target.
struct LookaheadPlan {
  int k = 0;
  std::vector<double> weights{1.0};

  /// k+1 unit weights, which reproduces the unweighted sum.
  static LookaheadPlan uniform(int k);
  void validate() const;
};

struct LookaheadStage {
  int index = 0;
  SampleBatch negatives;  ///< the drifted batch standing in for q_i
  DriftField drift;       ///< V_{p,q_i} at every row of `negatives`
};

struct LookaheadTrace {
  std::vector<LookaheadStage> stages;
  SampleBatch target;
};

/// Drifts the whole output batch k+1 times. Stage i uses the stage-i batch as
/// both queries and negatives; stage i+1 is the stage-i batch plus its drift.
/// The target is outputs + sum_i w_i * drift_i; positives never change.
LookaheadTrace lookahead_trace(const SampleBatch& outputs, const SampleBatch& positives,
                               const LookaheadPlan& plan, const DriftConfig& cfg);

/// The regression target of lookahead_trace. Callers treat it as a constant.
SampleBatch lookahead_target(const SampleBatch& outputs, const SampleBatch& positives,
                             const LookaheadPlan& plan, const DriftConfig& cfg);

}  // namespace lookdrift
