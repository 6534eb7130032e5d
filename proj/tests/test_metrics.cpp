#include <doctest.h>

#include "lookdrift/errors.hpp"
#include "lookdrift/metrics.hpp"
#include "test_util.hpp"

using namespace lookdrift;
using testutil::batch;

TEST_CASE("energy distance closed forms") {
  Rng rng(1, 0);
  const SampleBatch a = testutil::gaussian(rng, 50, 2);
  CHECK(std::abs(energy_distance(a, a)) <= 1e-12);

  const SampleBatch zeros(Matrix::Zero(10, 1));
  const SampleBatch twos(Matrix::Constant(10, 1, 2.0));
  CHECK(energy_distance(zeros, twos) == doctest::Approx(4.0).epsilon(1e-15));
  const SampleBatch more_twos(Matrix::Constant(7, 1, 2.0));
  CHECK(energy_distance(zeros, more_twos) == doctest::Approx(4.0).epsilon(1e-15));

  CHECK_THROWS_AS(energy_distance(batch({{0.0}}), twos), InvalidInput);
  CHECK_THROWS_AS(energy_distance(a, zeros), InvalidInput);
}

TEST_CASE("energy distance matches the quadratic-loop oracle") {
  Rng rng(4096, 0);
  const SampleBatch a = testutil::gaussian(rng, 4096, 1);
  const SampleBatch b = testutil::gaussian(rng, 4096, 1, 1.0, 1.0);
  const double ed = energy_distance(a, b);
  CHECK(ed > 0.0);
  CHECK(std::abs(ed - oracle::energy_distance(testutil::points(a.matrix()),
                                              testutil::points(b.matrix()))) <= 1e-12);
  CHECK(std::abs(ed - energy_distance(b, a)) <= 1e-12);

  const SampleBatch c = testutil::gaussian(rng, 300, 2);
  const SampleBatch d = testutil::gaussian(rng, 200, 2, 1.0, 0.3);
  CHECK(std::abs(energy_distance(c, d) - oracle::energy_distance(testutil::points(c.matrix()),
                                                                 testutil::points(d.matrix()))) <=
        1e-12);
}

TEST_CASE("sliced W1 closed forms") {
  Rng rng(1, 0);
  const SampleBatch a = testutil::gaussian(rng, 40, 2);
  CHECK(sliced_w1(a, a, 16, rng) == 0.0);
  // 1D: every unit direction is +-1, sorted pairing gives |0-2| and |1-3|
  CHECK(sliced_w1(batch({{0.0}, {1.0}}), batch({{2.0}, {3.0}}), 8, rng) ==
        doctest::Approx(2.0).epsilon(1e-15));
  CHECK_THROWS_AS(sliced_w1(a, a, 0, rng), InvalidInput);
}

TEST_CASE("sliced W1 matches an explicit per-projection sort") {
  Rng rng(64, 0);
  const SampleBatch a = testutil::gaussian(rng, 500, 2);
  const SampleBatch b = testutil::gaussian(rng, 500, 2, 1.3, 0.4);
  Rng dir_rng(5, 3);
  const Matrix dirs = random_directions(2, 64, dir_rng);
  for (Eigen::Index p = 0; p < dirs.rows(); ++p) CHECK(dirs.row(p).norm() == doctest::Approx(1.0));

  double ref = 0.0;
  for (Eigen::Index p = 0; p < dirs.rows(); ++p) {
    std::vector<double> pa, pb;
    for (Eigen::Index i = 0; i < a.size(); ++i) {
      pa.push_back(a.matrix()(i, 0) * dirs(p, 0) + a.matrix()(i, 1) * dirs(p, 1));
      pb.push_back(b.matrix()(i, 0) * dirs(p, 0) + b.matrix()(i, 1) * dirs(p, 1));
    }
    ref += oracle::w1_1d(pa, pb);
  }
  ref /= 64.0;
  CHECK(std::abs(sliced_w1(a, b, dirs) - ref) <= 1e-12);
  CHECK(std::abs(sliced_w1(b, a, dirs) - ref) <= 1e-12);

  Rng again(5, 3);
  CHECK(sliced_w1(a, b, 64, again) == sliced_w1(a, b, dirs));
}

TEST_CASE("both metrics grow with the mean shift") {
  double prev_ed = -1.0, prev_sw = -1.0;
  for (double mu : {0.5, 1.0, 2.0}) {
    Rng rng(17, 0);
    const SampleBatch a = testutil::gaussian(rng, 4096, 1);
    const SampleBatch b = testutil::gaussian(rng, 4096, 1, 1.0, mu);
    Rng dirs(3, 3);
    const MetricReport r = evaluate_metrics(a, b, 32, dirs);
    CHECK(r.energy_distance > prev_ed);
    CHECK(r.sliced_w1 > prev_sw);
    CHECK(r.projections == 32);
    CHECK(r.size_a == 4096);
    prev_ed = r.energy_distance;
    prev_sw = r.sliced_w1;
  }
}

TEST_CASE("unequal sizes use the leading rows for sliced W1") {
  const SampleBatch a = batch({{0.0}, {1.0}, {50.0}});
  const SampleBatch b = batch({{2.0}, {3.0}});
  Rng rng(1, 0);
  CHECK(sliced_w1(a, b, 4, rng) == doctest::Approx(2.0));
}
