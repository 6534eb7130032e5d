#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "lookdrift/datasets.hpp"
#include "lookdrift/generator.hpp"
#include "lookdrift/kernel_drift.hpp"
#include "lookdrift/lookahead.hpp"

namespace lookdrift {

/// `lookahead` builds the target through lookahead_target; `drifting` is the
/// single-drift baseline, x + V_{p,q}(x), computed without the lookahead code.
enum class Method { lookahead, drifting };

struct EvalConfig {
  int every = 1000;
  int samples = 4096;
  int projections = 128;
  bool use_ema = true;
};

/// Everything that determines a training run.
///
/// JSON schema (every key optional, unknown keys rejected):
///
///   dataset    {kind, modes, radius, noise, arms, turns, extent, cells}
///   model      {noise_dim, data_dim, hidden: [int...], activation}
///   method     "lookahead" | "drifting"
///   plan       {k, weights: [k+1 reals]}   weights default to all ones
///   drift      {tau: real | [real...], include_self, stab_shift,
///               kernel_sign: "negative" | "positive"}
///   optimizer  {lr, beta1, beta2, eps, ema_decay}
///   eval       {every, samples, projections, use_ema}
///   batch_size_model, batch_size_data, steps, checkpoint_every, seed,
///   output_dir
struct RunConfig {
  ToySpec dataset;
  int noise_dim = 2;
  int data_dim = 2;
  std::vector<int> hidden{256, 256, 256};
  Activation activation = Activation::silu;
  Method method = Method::lookahead;
  LookaheadPlan plan;
  DriftConfig drift;
  AdamConfig optimizer;
  double ema_decay = 0.999;
  EvalConfig eval;
  int batch_size_model = 256;
  int batch_size_data = 256;
  std::int64_t steps = 20000;
  int checkpoint_every = 1000;
  std::uint64_t seed = 0;
  std::string output_dir = "runs/default";

  std::vector<int> layer_sizes() const;
  void validate() const;
};

nlohmann::json to_json(const RunConfig& c);
/// Strict parse; throws ConfigError naming the offending dotted key.
RunConfig run_config_from_json(const nlohmann::json& j);
RunConfig load_run_config(const std::string& path);

/// Applies `dotted.key=value` to a JSON config. The value is parsed as JSON
/// when possible (numbers, booleans, arrays), otherwise taken as a string.
void apply_override(nlohmann::json& j, const std::string& assignment);

}  // namespace lookdrift
