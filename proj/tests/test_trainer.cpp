#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <limits>

#include "lookdrift/errors.hpp"
#include "lookdrift/io.hpp"
#include "lookdrift/trainer.hpp"
#include "test_util.hpp"

using namespace lookdrift;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

RunConfig small(const std::string& dir_name) {
  RunConfig c;
  c.hidden = {16, 16};
  c.batch_size_model = 32;
  c.batch_size_data = 32;
  c.steps = 6;
  c.eval.every = 2;
  c.eval.samples = 64;
  c.eval.projections = 8;
  c.checkpoint_every = 3;
  c.seed = 3;
  c.output_dir = (fs::temp_directory_path() / ("lookdrift_trainer_" + dir_name)).string();
  fs::remove_all(c.output_dir);
  return c;
}

json without_wallclock(json j) {
  j.erase("wallclock");
  return j;
}

}  // namespace

TEST_CASE("zero lookahead weights leave the parameters alone") {
  RunConfig c = small("zero");
  c.plan = LookaheadPlan{1, {0.0, 0.0}};
  TrainState s = TrainState::initial(c);
  const Eigen::VectorXd before = s.params.values();
  const StepRecord r = train_step(s, c);
  CHECK(r.loss == 0.0);
  CHECK(r.drift_norms.size() == 2);
  CHECK(s.params.values() == before);
  CHECK(s.step == 1);
}

TEST_CASE("k = 0 lookahead reproduces the drifting baseline exactly") {
  RunConfig a = small("k0");
  RunConfig b = a;
  b.method = Method::drifting;
  TrainState sa = TrainState::initial(a);
  TrainState sb = TrainState::initial(b);
  for (int i = 0; i < 50; ++i) {
    const StepRecord ra = train_step(sa, a);
    const StepRecord rb = train_step(sb, b);
    REQUIRE(ra.loss == rb.loss);
    REQUIRE(ra.drift_norms == rb.drift_norms);
  }
  CHECK(sa.identical_to(sb));
}

TEST_CASE("first-step loss matches a hand-rolled forward pass and drift") {
  for (int k : {0, 1}) {
    RunConfig c = small("oracle");
    c.hidden = {6};
    c.batch_size_model = 8;
    c.batch_size_data = 12;
    c.plan = LookaheadPlan::uniform(k);
    c.drift.taus = {0.7};
    TrainState s = TrainState::initial(c);

    Rng noise_rng = s.noise_rng, data_rng = s.data_rng;
    const auto noise = testutil::points(sample_noise(2, 8, noise_rng).matrix());
    const auto pos = testutil::points(sample_data(c.dataset, 12, data_rng).matrix());
    std::vector<oracle::Points> w;
    oracle::Points b;
    for (int l = 0; l < s.params.num_layers(); ++l) {
      w.push_back(testutil::points(s.params.weight(l)));
      b.emplace_back(s.params.bias(l).data(), s.params.bias(l).data() + s.params.bias(l).size());
    }
    const auto out =
        oracle::mlp_forward(noise, w, b, [](double z) { return z / (1.0 + std::exp(-z)); });
    const auto target = oracle::lookahead_target(out, pos, k, c.plan.weights, 0.7);
    double loss = 0.0;
    for (std::size_t r = 0; r < out.size(); ++r)
      for (std::size_t d = 0; d < 2; ++d) loss += (out[r][d] - target[r][d]) * (out[r][d] - target[r][d]);
    loss /= static_cast<double>(out.size());

    CHECK(std::abs(train_step(s, c).loss - loss) <= 1e-10);
  }
}

TEST_CASE("a failed step leaves the state untouched") {
  const RunConfig c = small("diverge");
  TrainState s = TrainState::initial(c);
  s.params.values()[0] = std::numeric_limits<double>::quiet_NaN();
  const TrainState before = s;
  CHECK_THROWS_AS(train_step(s, c), TrainingDiverged);
  CHECK(s.step == 0);
  CHECK(s.noise_rng.state() == before.noise_rng.state());
  CHECK(s.data_rng.state() == before.data_rng.state());
  CHECK(s.optimizer.step == 0);
}

TEST_CASE("one step with eval every step writes one record and one checkpoint") {
  RunConfig c = small("single");
  c.steps = 1;
  c.eval.every = 1;
  c.checkpoint_every = 1000;
  const RunResult r = train_run(c);
  REQUIRE(r.log.size() == 1);
  CHECK(r.log[0]["step"] == 1);
  for (const char* key : {"loss", "drift_norms", "energy_distance", "sliced_w1", "wallclock"})
    CHECK(r.log[0].contains(key));

  const std::string text = read_file(fs::path(c.output_dir) / "metrics.jsonl");
  CHECK(std::count(text.begin(), text.end(), '\n') == 1);
  int ckpts = 0;
  for (const auto& e : fs::directory_iterator(fs::path(c.output_dir) / "checkpoints")) {
    (void)e;
    ++ckpts;
  }
  CHECK(ckpts == 1);
  CHECK(fs::exists(checkpoint_path(c.output_dir, 1)));
  CHECK(fs::exists(fs::path(c.output_dir) / "config.json"));
}

TEST_CASE("resuming matches the uninterrupted run") {
  const RunConfig c = small("full");
  const RunResult full = train_run(c);
  CHECK(full.log.size() == 3);

  RunConfig d = small("resumed");
  d.steps = 3;
  train_run(d);
  d.steps = 6;
  const RunResult resumed = train_run(d, checkpoint_path(d.output_dir, 3));
  CHECK(resumed.state.identical_to(full.state));
  REQUIRE(resumed.log.size() == full.log.size());
  for (std::size_t i = 0; i < full.log.size(); ++i)
    CHECK(without_wallclock(resumed.log[i]) == without_wallclock(full.log[i]));

  const LoadedCheckpoint last = load_checkpoint(checkpoint_path(c.output_dir, 6));
  CHECK(last.state.identical_to(full.state));
}

TEST_CASE("evaluation helpers are deterministic in the seed") {
  const RunConfig c = small("eval");
  const TrainState s = TrainState::initial(c);
  const MetricReport a = evaluate_generator(s.params, c.dataset, 128, 8, 11);
  const MetricReport b = evaluate_generator(s.params, c.dataset, 128, 8, 11);
  CHECK(a.energy_distance == b.energy_distance);
  CHECK(a.sliced_w1 == b.sliced_w1);
  CHECK(generate_samples(s.params, 5, 2) == generate_samples(s.params, 5, 2));
  CHECK_FALSE(generate_samples(s.params, 5, 2) == generate_samples(s.params, 5, 3));
}
