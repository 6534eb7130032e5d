#include "lookdrift/lookahead.hpp"

#include <cmath>
#include <string>

#include "lookdrift/errors.hpp"

namespace lookdrift {

LookaheadPlan LookaheadPlan::uniform(int k) {
  if (k < 0) throw InvalidInput("LookaheadPlan: k must be >= 0");
  return LookaheadPlan{k, std::vector<double>(static_cast<std::size_t>(k) + 1, 1.0)};
}

void LookaheadPlan::validate() const {
  if (k < 0) throw InvalidInput("LookaheadPlan: k must be >= 0, got " + std::to_string(k));
  if (weights.size() != static_cast<std::size_t>(k) + 1) {
    throw InvalidInput("LookaheadPlan: expected " + std::to_string(k + 1) + " weights, got " +
                       std::to_string(weights.size()));
  }
  for (double w : weights) {
    if (!std::isfinite(w) || w < 0.0) {
      throw InvalidInput("LookaheadPlan: weights must be finite and >= 0");
    }
  }
}

LookaheadTrace lookahead_trace(const SampleBatch& outputs, const SampleBatch& positives,
                               const LookaheadPlan& plan, const DriftConfig& cfg) {
  plan.validate();
  cfg.validate();
  if (outputs.dim() != positives.dim()) {
    throw InvalidInput("lookahead: outputs and positives differ in dimension");
  }

  std::vector<LookaheadStage> stages;
  stages.reserve(static_cast<std::size_t>(plan.k) + 1);
  // Unit weights: target stays bitwise equal to the drifted batch.
  Matrix target = outputs.matrix();
  SampleBatch current = outputs;
  for (int i = 0; i <= plan.k; ++i) {
    DriftField field = drift(current, positives, current, cfg);
    const double w = plan.weights[static_cast<std::size_t>(i)];
    if (w == 1.0) {
      target += field.matrix();
    } else if (w != 0.0) {
      target += w * field.matrix();
    }
    SampleBatch next(current.matrix() + field.matrix());
    stages.push_back(LookaheadStage{i, std::move(current), std::move(field)});
    current = std::move(next);
  }
  return LookaheadTrace{std::move(stages), SampleBatch(std::move(target))};
}

SampleBatch lookahead_target(const SampleBatch& outputs, const SampleBatch& positives,
                             const LookaheadPlan& plan, const DriftConfig& cfg) {
  return lookahead_trace(outputs, positives, plan, cfg).target;
}

}  // namespace lookdrift
