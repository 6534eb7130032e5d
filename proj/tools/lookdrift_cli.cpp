// lookdrift: train, evaluate, sample, check and render lookahead drifting
// generators on 2D toy data.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lookdrift/datasets.hpp"
#include "lookdrift/diagnostics.hpp"
#include "lookdrift/errors.hpp"
#include "lookdrift/io.hpp"
#include "lookdrift/render.hpp"
#include "lookdrift/run_config.hpp"
#include "lookdrift/trainer.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace lookdrift;

namespace {

enum Exit { kOk = 0, kFailure = 1, kConfig = 2, kDiverged = 3 };

struct TrainArgs {
  std::string config;
  std::vector<std::string> overrides;
  std::string resume;
};

struct EvalArgs {
  std::string checkpoint;
  std::string dataset;
  int n = 4096;
  int projections = 128;
  std::uint64_t seed = 0;
  bool live = false;
};

struct SampleArgs {
  std::string checkpoint;
  int count = 0;
  std::uint64_t seed = 0;
  std::string out;
  bool live = false;
};

struct DiagArgs {
  std::uint64_t seed = 0;
  std::vector<long> sizes{1, 4, 64, 256};
  int instances = 100;
  bool wrong_sign = false;
};

struct RenderArgs {
  std::string samples;
  std::string checkpoint;
  std::string data;
  std::string out;
  std::vector<double> bounds{-4.0, 4.0, -4.0, 4.0};
  int resolution = 256;
  int count = 2000;
  std::uint64_t seed = 0;
};

const GeneratorParams& pick(const LoadedCheckpoint& ck, bool live) {
  return live ? ck.state.params : ck.state.ema.shadow();
}

int cmd_train(const TrainArgs& a) {
  if (!fs::exists(a.config)) throw ConfigError("config not found: " + a.config);
  json j;
  try {
    j = json::parse(read_file(a.config));
  } catch (const json::parse_error& e) {
    throw ConfigError(a.config + ": invalid JSON: " + e.what());
  }
  bool sets_k = false, sets_weights = false;
  for (const auto& o : a.overrides) {
    apply_override(j, o);
    sets_k = sets_k || o.rfind("plan.k=", 0) == 0;
    sets_weights = sets_weights || o.rfind("plan.weights=", 0) == 0;
  }
  // Changing the depth alone resets the weights to the unweighted sum.
  if (sets_k && !sets_weights && j.contains("plan") && j["plan"].is_object()) {
    j["plan"].erase("weights");
  }
  const RunConfig config = run_config_from_json(j);

  std::optional<fs::path> resume;
  if (!a.resume.empty()) resume = a.resume;
  const RunResult result = train_run(config, resume);
  std::cout << config.output_dir << "\n";
  std::cerr << "finished at step " << result.state.step << "\n";
  return kOk;
}

int cmd_eval(const EvalArgs& a) {
  const LoadedCheckpoint ck = load_checkpoint(a.checkpoint);
  ToySpec dataset = ck.config.dataset;
  if (!a.dataset.empty()) dataset.kind = toy_kind_from_string(a.dataset);
  const MetricReport m = evaluate_generator(pick(ck, a.live), dataset, a.n, a.projections, a.seed);
  const json rec{{"step", ck.state.step},
                 {"dataset", to_string(dataset.kind)},
                 {"params", a.live ? "live" : "ema"},
                 {"n", a.n},
                 {"projections", m.projections},
                 {"seed", a.seed},
                 {"energy_distance", m.energy_distance},
                 {"sliced_w1", m.sliced_w1}};
  std::cout << rec.dump() << "\n";
  return kOk;
}

int cmd_sample(const SampleArgs& a) {
  if (a.count < 1) throw InvalidInput("--count must be >= 1");
  const LoadedCheckpoint ck = load_checkpoint(a.checkpoint);
  const SampleBatch pts = generate_samples(pick(ck, a.live), a.count, a.seed);
  atomic_write(a.out, to_csv(pts.matrix()));
  return kOk;
}

int cmd_diag(const DiagArgs& a) {
  BatteryOptions opts;
  opts.seed = a.seed;
  opts.sizes.assign(a.sizes.begin(), a.sizes.end());
  for (auto s : opts.sizes) {
    if (s < 1) throw InvalidInput("--sizes entries must be >= 1");
  }
  opts.instances = a.instances;
  opts.sign = a.wrong_sign ? KernelSign::growing : KernelSign::decaying;

  bool all_pass = true;
  for (const CheckResult& c : run_battery(opts)) {
    std::cout << json{{"check", c.name},
                      {"instances", c.instances},
                      {"max_gap", c.max_gap},
                      {"tolerance", c.tolerance},
                      {"pass", c.pass}}
                     .dump()
              << "\n";
    if (!c.pass) {
      all_pass = false;
      std::cerr << "FAILED " << c.name << ": gap " << format_double(c.max_gap)
                << " exceeds tolerance " << format_double(c.tolerance) << "\n";
    }
  }
  return all_pass ? kOk : kFailure;
}

int cmd_render(const RenderArgs& a) {
  if (a.bounds.size() != 4) throw InvalidInput("--bounds expects xmin,xmax,ymin,ymax");
  const Bounds bounds{a.bounds[0], a.bounds[1], a.bounds[2], a.bounds[3]};
  bounds.validate();

  Matrix generated(0, 2), data(0, 2);
  if (!a.samples.empty()) {
    generated = parse_csv(read_file(a.samples), a.samples);
  } else {
    const LoadedCheckpoint ck = load_checkpoint(a.checkpoint);
    generated = generate_samples(ck.state.ema.shadow(), a.count, a.seed).matrix();
    if (a.data.empty()) {
      Rng rng = make_rng(a.seed, Stream::data);
      data = sample_data(ck.config.dataset, a.count, rng).matrix();
    }
  }
  if (!a.data.empty()) data = parse_csv(read_file(a.data), a.data);

  const Raster r = render_scatter(data, generated, bounds, a.resolution);
  atomic_write(a.out, r.ppm);
  std::cout << json{{"out", a.out},
                    {"resolution", a.resolution},
                    {"generated", generated.rows()},
                    {"data", data.rows()},
                    {"clipped", r.clipped}}
                   .dump()
            << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lookahead drifting models on 2D toy distributions"};
  app.require_subcommand(1);

  TrainArgs train_args;
  auto* train = app.add_subcommand("train", "Run (or resume) a training run");
  train->add_option("--config", train_args.config, "Run configuration (JSON)")->required();
  train->add_option("--set", train_args.overrides, "Override a config key: dotted.key=value");
  train->add_option("--resume", train_args.resume, "Continue from this checkpoint");

  EvalArgs eval_args;
  auto* eval = app.add_subcommand("eval", "Print one metric record for a checkpoint");
  eval->add_option("--checkpoint", eval_args.checkpoint, "Checkpoint file")->required();
  eval->add_option("--dataset", eval_args.dataset, "Dataset kind (default: from checkpoint)");
  eval->add_option("--n", eval_args.n, "Samples per side")->check(CLI::Range(2, 1 << 24));
  eval->add_option("--projections", eval_args.projections, "Sliced-W1 projections")
      ->check(CLI::Range(1, 1 << 20));
  eval->add_option("--seed", eval_args.seed, "Evaluation seed");
  eval->add_flag("--live", eval_args.live, "Use live parameters instead of the EMA");

  SampleArgs sample_args;
  auto* sample = app.add_subcommand("sample", "Write generated points as CSV");
  sample->add_option("--checkpoint", sample_args.checkpoint, "Checkpoint file")->required();
  sample->add_option("--count", sample_args.count, "Number of points (>= 1)")->required();
  sample->add_option("--seed", sample_args.seed, "Noise seed");
  sample->add_option("--out", sample_args.out, "Output CSV path")->required();
  sample->add_flag("--live", sample_args.live, "Use live parameters instead of the EMA");

  DiagArgs diag_args;
  auto* diag = app.add_subcommand("diag", "Run the drift identity checks");
  diag->add_option("--seed", diag_args.seed, "Instance seed");
  diag->add_option("--sizes", diag_args.sizes, "Batch sizes, comma separated")->delimiter(',');
  diag->add_option("--instances", diag_args.instances, "Anti-symmetry instances")
      ->check(CLI::PositiveNumber);
  diag->add_flag("--wrong-sign-kernel", diag_args.wrong_sign,
                 "Use exp(+|x-y|/tau) to show what the opposite exponent sign breaks");

  RenderArgs render_args;
  auto* render = app.add_subcommand("render", "Rasterize generated vs data points (PPM)");
  auto* samples_opt =
      render->add_option("--samples", render_args.samples, "Generated points CSV");
  auto* ckpt_opt =
      render->add_option("--checkpoint", render_args.checkpoint, "Generate from a checkpoint");
  samples_opt->excludes(ckpt_opt);
  render->add_option("--data", render_args.data, "Data points CSV");
  render->add_option("--out", render_args.out, "Output image (binary PPM)")->required();
  render->add_option("--bounds", render_args.bounds, "xmin,xmax,ymin,ymax")->delimiter(',');
  render->add_option("--resolution", render_args.resolution, "Pixels per side (>= 16)")
      ->check(CLI::Range(16, 8192));
  render->add_option("--count", render_args.count, "Points to generate with --checkpoint")
      ->check(CLI::PositiveNumber);
  render->add_option("--seed", render_args.seed, "Seed for --checkpoint generation");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train) return cmd_train(train_args);
    if (*eval) return cmd_eval(eval_args);
    if (*sample) return cmd_sample(sample_args);
    if (*diag) return cmd_diag(diag_args);
    if (*render) {
      if (render_args.samples.empty() && render_args.checkpoint.empty()) {
        std::cerr << "error: render needs --samples or --checkpoint\n";
        return kConfig;
      }
      return cmd_render(render_args);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const TrainingDiverged& e) {
    std::cerr << "training diverged: " << e.what() << "\n";
    return kDiverged;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailure;
  }
  return kFailure;
}
