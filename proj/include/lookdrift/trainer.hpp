#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "lookdrift/generator.hpp"
#include "lookdrift/metrics.hpp"
#include "lookdrift/rng.hpp"
#include "lookdrift/run_config.hpp"

namespace lookdrift {

struct TrainState {
  GeneratorParams params;
  OptimizerState optimizer;
  EmaParams ema;
  std::uint64_t step = 0;
  Rng noise_rng;
  Rng data_rng;
  Rng metrics_rng;

  /// Fresh state: parameters from the `init` stream of config.seed.
  static TrainState initial(const RunConfig& config);

  /// Bitwise equality of every parameter, moment, counter and RNG word.
  bool identical_to(const TrainState& other) const;
};

struct StepRecord {
  std::uint64_t step = 0;
  double loss = 0.0;
  std::vector<double> drift_norms;  ///< batch-mean |V_{p,q_i}|_2, i = 0..k
};

/// One training iteration. Either completes and advances every part of the
/// state, or throws TrainingDiverged and leaves the state untouched.
StepRecord train_step(TrainState& state, const RunConfig& config);

/// Fresh generated-vs-data metrics from the metrics stream.
MetricReport evaluate(TrainState& state, const RunConfig& config);

/// EMA or live parameters, per config.eval.use_ema.
const GeneratorParams& eval_params(const TrainState& state, const RunConfig& config);

/// Standalone evaluation used by `lookdrift eval`: `samples` generated points
/// (noise from the `noise` stream of `seed`) against `samples` data points
/// (`data` stream), projections from the `metrics` stream.
MetricReport evaluate_generator(const GeneratorParams& params, const ToySpec& dataset,
                                int samples, int projections, std::uint64_t seed);

/// `count` generated points, noise from the `noise` stream of `seed`.
SampleBatch generate_samples(const GeneratorParams& params, int count, std::uint64_t seed);

/// Checkpoint bytes: the config (as JSON text) plus the full train state.
std::string serialize_checkpoint(const TrainState& state, const RunConfig& config);

struct LoadedCheckpoint {
  RunConfig config;
  TrainState state;
};
LoadedCheckpoint load_checkpoint(const std::filesystem::path& path);
LoadedCheckpoint parse_checkpoint(std::string_view bytes);

/// One line of metrics.jsonl.
nlohmann::json log_record(const StepRecord& step, const MetricReport& metrics, double wallclock);

struct RunResult {
  TrainState state;
  std::vector<nlohmann::json> log;
};

/// Runs config.steps iterations under config.output_dir:
///   metrics.jsonl                   one record per evaluation (every eval.every steps)
///   checkpoints/ckpt_<step>.bin     every checkpoint_every steps and at the last step
///   config.json                     the resolved configuration
/// With `resume_from`, continues from that checkpoint; log records past its
/// step are discarded, so the result matches an uninterrupted run.
/// On divergence the last good state is checkpointed, a {"diverged": ...}
/// record is logged, and TrainingDiverged is rethrown.
RunResult train_run(const RunConfig& config,
                    const std::optional<std::filesystem::path>& resume_from = std::nullopt);

std::filesystem::path checkpoint_path(const std::filesystem::path& output_dir,
                                      std::uint64_t step);

}  // namespace lookdrift
