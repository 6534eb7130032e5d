#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lookdrift/kernel_drift.hpp"
#include "lookdrift/sample_batch.hpp"

namespace lookdrift {

/// Stage-1 drift at one query, computed two ways, plus its decomposition.
///
/// `rewritten` evaluates the stage-1 drift directly from the raw batches: the
/// positives' weighted mean at f1 minus the weighted mean of the pushed-forward
/// negatives y + V+(y) - V-(y). The pushed-forward repulsion splits into a
/// position part (weights at the pushed location, values y) and the extra
/// term (same weights, values V+(y) - V-(y)), so
///
///   rewritten == attraction_part - position_part - extra_term.
struct DecompositionReport {
  RowVector direct;          ///< drift() at the drifted query vs the drifted batch
  RowVector rewritten;       ///< inline kernel sums, never calls drift()
  RowVector extra_term;
  RowVector attraction_part;
  RowVector position_part;
  RowVector baseline_drift;  ///< stage-0 drift at the raw query
  double max_abs_gap = 0.0;  ///< |direct - rewritten|_inf
};

DecompositionReport verify_rewrite(Eigen::Index query_index, const SampleBatch& outputs,
                                   const SampleBatch& positives, const DriftConfig& cfg);

/// |rewritten - (attraction_part - position_part - extra_term)|_inf
double extra_term_gap(const DecompositionReport& r);

/// max over queries of |V_{p,q1}(f1) - V_{p,q}(f)|_2.
double drift_divergence(const SampleBatch& outputs, const SampleBatch& positives,
                        const DriftConfig& cfg);

struct BatteryOptions {
  std::uint64_t seed = 0;
  std::vector<Eigen::Index> sizes{1, 4, 64, 256};
  std::vector<Eigen::Index> dims{1, 2, 8};
  std::vector<double> taus{0.1, 1.0, 10.0};
  int instances = 100;  ///< seeded instances for the anti-symmetry sweep
  KernelSign sign = KernelSign::decaying;
};

struct CheckResult {
  std::string name;
  int instances = 0;
  double max_gap = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

/// anti_symmetry, fixed_point, rewrite_identity, extra_term, k0_reduction and
/// locality over seeded random instances.
std::vector<CheckResult> run_battery(const BatteryOptions& opts);

/// Random instance used by the battery: queries, positives and negatives
/// drawn from differently shifted Gaussians.
struct DriftInstance {
  SampleBatch queries, positives, negatives;
};
DriftInstance make_instance(std::uint64_t seed, int index, Eigen::Index size, Eigen::Index dim);

}  // namespace lookdrift
