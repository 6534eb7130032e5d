#include "lookdrift/trainer.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <optional>
#include <sstream>

#include "lookdrift/checkpoint.hpp"
#include "lookdrift/datasets.hpp"
#include "lookdrift/errors.hpp"
#include "lookdrift/io.hpp"
#include "lookdrift/kernel_drift.hpp"
#include "lookdrift/lookahead.hpp"

namespace lookdrift {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::vector<std::uint64_t> rng_words(const Rng& r) { return {r.state().begin(), r.state().end()}; }

Rng rng_from(const CheckpointReader& in, const std::string& name) {
  const auto w = in.u64(name);
  if (w.size() != 4) throw CheckpointError("field '" + name + "': expected 4 words");
  return Rng::from_state({w[0], w[1], w[2], w[3]});
}

Eigen::VectorXd vec_from(const CheckpointReader& in, const std::string& name,
                         Eigen::Index expected) {
  const auto v = in.f64(name);
  if (static_cast<Eigen::Index>(v.size()) != expected) {
    throw CheckpointError("field '" + name + "': expected " + std::to_string(expected) +
                          " values, found " + std::to_string(v.size()));
  }
  return Eigen::Map<const Eigen::VectorXd>(v.data(), expected);
}

std::span<const double> span_of(const Eigen::VectorXd& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

bool same_bits(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return a.size() == b.size() &&
         std::memcmp(a.data(), b.data(), static_cast<std::size_t>(a.size()) * sizeof(double)) == 0;
}

std::vector<json> read_log(const fs::path& path, std::uint64_t up_to_step) {
  std::vector<json> out;
  if (!fs::exists(path)) return out;
  std::istringstream in(read_file(path));
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json rec = json::parse(line);
    if (rec.value("step", std::uint64_t{0}) <= up_to_step && !rec.contains("diverged")) {
      out.push_back(std::move(rec));
    }
  }
  return out;
}

void write_log(const fs::path& path, const std::vector<json>& log) {
  std::string text;
  for (const auto& rec : log) text += rec.dump() + "\n";
  atomic_write(path, text);
}

}  // namespace

TrainState TrainState::initial(const RunConfig& config) {
  config.validate();
  Rng init = make_rng(config.seed, Stream::init);
  GeneratorParams params =
      GeneratorParams::initialize(config.layer_sizes(), config.activation, init);
  OptimizerState opt = OptimizerState::for_params(params, config.optimizer);
  EmaParams ema(params, config.ema_decay);
  return TrainState{std::move(params),
                    std::move(opt),
                    std::move(ema),
                    0,
                    make_rng(config.seed, Stream::noise),
                    make_rng(config.seed, Stream::data),
                    make_rng(config.seed, Stream::metrics)};
}

bool TrainState::identical_to(const TrainState& o) const {
  return params.same_shape(o.params) && same_bits(params.values(), o.params.values()) &&
         same_bits(optimizer.m, o.optimizer.m) && same_bits(optimizer.v, o.optimizer.v) &&
         optimizer.step == o.optimizer.step &&
         same_bits(ema.shadow().values(), o.ema.shadow().values()) && step == o.step &&
         noise_rng.state() == o.noise_rng.state() && data_rng.state() == o.data_rng.state() &&
         metrics_rng.state() == o.metrics_rng.state();
}

StepRecord train_step(TrainState& state, const RunConfig& config) {
  Rng noise_rng = state.noise_rng;
  Rng data_rng = state.data_rng;

  const SampleBatch noise = sample_noise(config.noise_dim, config.batch_size_model, noise_rng);
  const ForwardCache cache = forward_cached(state.params, noise);
  if (!cache.output.allFinite()) throw TrainingDiverged("generator produced non-finite outputs");
  const SampleBatch outputs(cache.output);
  const SampleBatch positives = sample_data(config.dataset, config.batch_size_data, data_rng);

  StepRecord rec;
  rec.step = state.step + 1;
  std::optional<SampleBatch> target;
  try {
    if (config.method == Method::drifting) {
      const DriftField field = drift(outputs, positives, outputs, config.drift);
      target.emplace(outputs.matrix() + field.matrix());
      rec.drift_norms.push_back(field.mean_norm());
    } else {
      LookaheadTrace trace = lookahead_trace(outputs, positives, config.plan, config.drift);
      for (const auto& stage : trace.stages) rec.drift_norms.push_back(stage.drift.mean_norm());
      target.emplace(std::move(trace.target));
    }
  } catch (const InvalidInput& e) {
    throw TrainingDiverged(std::string("drift estimation failed: ") + e.what());
  }

  const LossAndGrad lg = backward(state.params, cache, *target);
  if (!std::isfinite(lg.loss)) throw TrainingDiverged("non-finite loss");
  rec.loss = lg.loss;

  adam_step(state.params, lg.grad, state.optimizer);
  ema_update(state.ema, state.params);
  state.noise_rng = noise_rng;
  state.data_rng = data_rng;
  state.step += 1;
  return rec;
}

const GeneratorParams& eval_params(const TrainState& state, const RunConfig& config) {
  return config.eval.use_ema ? state.ema.shadow() : state.params;
}

MetricReport evaluate(TrainState& state, const RunConfig& config) {
  Rng& rng = state.metrics_rng;
  const SampleBatch noise = sample_noise(config.noise_dim, config.eval.samples, rng);
  const SampleBatch generated = forward(eval_params(state, config), noise);
  const SampleBatch data = sample_data(config.dataset, config.eval.samples, rng);
  return evaluate_metrics(generated, data, config.eval.projections, rng);
}

MetricReport evaluate_generator(const GeneratorParams& params, const ToySpec& dataset,
                                int samples, int projections, std::uint64_t seed) {
  const SampleBatch generated = generate_samples(params, samples, seed);
  Rng data_rng = make_rng(seed, Stream::data);
  const SampleBatch data = sample_data(dataset, samples, data_rng);
  Rng metrics_rng = make_rng(seed, Stream::metrics);
  return evaluate_metrics(generated, data, projections, metrics_rng);
}

SampleBatch generate_samples(const GeneratorParams& params, int count, std::uint64_t seed) {
  if (count < 1) throw InvalidInput("sample count must be >= 1");
  Rng noise_rng = make_rng(seed, Stream::noise);
  return forward(params, sample_noise(params.input_dim(), count, noise_rng));
}

std::string serialize_checkpoint(const TrainState& s, const RunConfig& config) {
  CheckpointWriter w;
  w.add_text("config", to_json(config).dump());
  std::vector<std::uint64_t> sizes(s.params.layer_sizes().begin(), s.params.layer_sizes().end());
  w.add("model.layer_sizes", sizes);
  w.add_text("model.activation", to_string(s.params.activation()));
  w.add("model.params", span_of(s.params.values()));
  const AdamConfig& a = s.optimizer.config;
  const double adam_cfg[] = {a.lr, a.beta1, a.beta2, a.eps};
  w.add("adam.config", adam_cfg);
  w.add("adam.m", span_of(s.optimizer.m));
  w.add("adam.v", span_of(s.optimizer.v));
  const std::uint64_t adam_step_count[] = {s.optimizer.step};
  w.add("adam.step", adam_step_count);
  const double decay[] = {s.ema.decay()};
  w.add("ema.decay", decay);
  w.add("ema.params", span_of(s.ema.shadow().values()));
  const std::uint64_t step[] = {s.step};
  w.add("step", step);
  const std::uint64_t seed[] = {config.seed};
  w.add("seed", seed);
  w.add("rng.noise", rng_words(s.noise_rng));
  w.add("rng.data", rng_words(s.data_rng));
  w.add("rng.metrics", rng_words(s.metrics_rng));
  return w.bytes();
}

LoadedCheckpoint parse_checkpoint(std::string_view bytes) {
  const CheckpointReader in(bytes);
  RunConfig config;
  try {
    config = run_config_from_json(json::parse(in.text("config")));
  } catch (const json::exception& e) {
    throw CheckpointError(std::string("field 'config': ") + e.what());
  } catch (const ConfigError& e) {
    throw CheckpointError(std::string("field 'config': ") + e.what());
  }

  const auto sizes_u = in.u64("model.layer_sizes");
  std::vector<int> sizes(sizes_u.begin(), sizes_u.end());
  if (sizes != config.layer_sizes()) {
    throw CheckpointError("field 'model.layer_sizes': does not match stored config");
  }
  Activation act;
  try {
    act = activation_from_string(in.text("model.activation"));
  } catch (const InvalidInput& e) {
    throw CheckpointError(std::string("field 'model.activation': ") + e.what());
  }
  GeneratorParams params(sizes, act);
  const Eigen::Index n = params.values().size();
  params.values() = vec_from(in, "model.params", n);

  const auto adam_cfg = in.f64("adam.config");
  if (adam_cfg.size() != 4) throw CheckpointError("field 'adam.config': expected 4 values");
  OptimizerState opt{AdamConfig{adam_cfg[0], adam_cfg[1], adam_cfg[2], adam_cfg[3]},
                     vec_from(in, "adam.m", n), vec_from(in, "adam.v", n), 0};
  const auto adam_steps = in.u64("adam.step");
  if (adam_steps.size() != 1) throw CheckpointError("field 'adam.step': expected 1 value");
  opt.step = adam_steps[0];

  const auto decay = in.f64("ema.decay");
  if (decay.size() != 1) throw CheckpointError("field 'ema.decay': expected 1 value");
  GeneratorParams shadow(sizes, act);
  shadow.values() = vec_from(in, "ema.params", n);
  std::optional<EmaParams> ema;
  try {
    ema.emplace(std::move(shadow), decay[0]);
  } catch (const InvalidInput& e) {
    throw CheckpointError(std::string("field 'ema.decay': ") + e.what());
  }

  const auto step = in.u64("step");
  if (step.size() != 1) throw CheckpointError("field 'step': expected 1 value");

  return LoadedCheckpoint{config,
                          TrainState{std::move(params), std::move(opt), std::move(*ema), step[0],
                                     rng_from(in, "rng.noise"), rng_from(in, "rng.data"),
                                     rng_from(in, "rng.metrics")}};
}

LoadedCheckpoint load_checkpoint(const fs::path& path) {
  if (!fs::exists(path)) throw IoError("checkpoint not found: " + path.string());
  try {
    return parse_checkpoint(read_file(path));
  } catch (const CheckpointError& e) {
    throw CheckpointError(path.string() + ": " + e.what());
  }
}

json log_record(const StepRecord& step, const MetricReport& metrics, double wallclock) {
  return json{{"step", step.step},
              {"loss", step.loss},
              {"drift_norms", step.drift_norms},
              {"energy_distance", metrics.energy_distance},
              {"sliced_w1", metrics.sliced_w1},
              {"wallclock", wallclock}};
}

fs::path checkpoint_path(const fs::path& output_dir, std::uint64_t step) {
  char name[40];
  std::snprintf(name, sizeof name, "ckpt_%08llu.bin", static_cast<unsigned long long>(step));
  return output_dir / "checkpoints" / name;
}

RunResult train_run(const RunConfig& config, const std::optional<fs::path>& resume_from) {
  config.validate();
  const fs::path out_dir(config.output_dir);
  std::error_code ec;
  fs::create_directories(out_dir / "checkpoints", ec);
  if (ec) throw IoError("cannot create '" + (out_dir / "checkpoints").string() + "': " + ec.message());
  atomic_write(out_dir / "config.json", to_json(config).dump(2) + "\n");

  const fs::path log_path = out_dir / "metrics.jsonl";
  std::optional<TrainState> state;
  std::vector<json> log;
  if (resume_from) {
    LoadedCheckpoint loaded = load_checkpoint(*resume_from);
    if (loaded.config.layer_sizes() != config.layer_sizes() ||
        loaded.config.activation != config.activation) {
      throw ConfigError("resume: checkpoint architecture differs from config");
    }
    state.emplace(std::move(loaded.state));
    log = read_log(log_path, state->step);
  } else {
    state.emplace(TrainState::initial(config));
  }

  const auto started = std::chrono::steady_clock::now();
  const auto total = static_cast<std::uint64_t>(config.steps);
  while (state->step < total) {
    StepRecord rec;
    try {
      rec = train_step(*state, config);
    } catch (const TrainingDiverged& e) {
      atomic_write(checkpoint_path(out_dir, state->step), serialize_checkpoint(*state, config));
      log.push_back(json{{"step", state->step + 1}, {"diverged", true}, {"message", e.what()}});
      write_log(log_path, log);
      throw;
    }
    if (state->step % static_cast<std::uint64_t>(config.eval.every) == 0) {
      const MetricReport m = evaluate(*state, config);
      const double wall =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
      log.push_back(log_record(rec, m, wall));
      write_log(log_path, log);
    }
    if (state->step % static_cast<std::uint64_t>(config.checkpoint_every) == 0 ||
        state->step == total) {
      atomic_write(checkpoint_path(out_dir, state->step), serialize_checkpoint(*state, config));
    }
  }
  if (!fs::exists(log_path)) write_log(log_path, log);
  return RunResult{std::move(*state), std::move(log)};
}

}  // namespace lookdrift
