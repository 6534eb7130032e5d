#pragma once

#include <string>

#include "lookdrift/rng.hpp"
#include "lookdrift/sample_batch.hpp"

namespace lookdrift {

enum class ToyKind { ring, two_moons, spiral, checkerboard };

std::string to_string(ToyKind k);
/// Accepts "ring" (alias "gaussian-mixture-ring"), "two-moons", "spiral",
/// "checkerboard". Throws ConfigError otherwise.
ToyKind toy_kind_from_string(const std::string& name);

/// 2D toy target distributions.
///
///   ring          `modes` Gaussians of std `noise` centred at
///                 radius * (cos 2πj/modes, sin 2πj/modes)
///   two-moons     the interleaved half circles, centred and scaled by
///                 `radius`, plus Gaussian noise of std `noise`
///   spiral        `arms` arms r = radius*t, angle = 2π(turns*t + a/arms),
///                 t ~ U(0,1), plus Gaussian noise of std `noise`
///   checkerboard  uniform over the even cells ((ix+iy) % 2 == 0) of a
///                 cells x cells grid on [-extent, extent]^2
struct ToySpec {
  ToyKind kind = ToyKind::ring;
  int modes = 8;
  double radius = 2.0;
  double noise = 0.1;
  int arms = 2;
  double turns = 1.0;
  double extent = 4.0;
  int cells = 8;

  void validate() const;
};

SampleBatch sample_data(const ToySpec& spec, Eigen::Index count, Rng& rng);

/// count x dim i.i.d. standard normals, filled row-major.
SampleBatch sample_noise(Eigen::Index dim, Eigen::Index count, Rng& rng);

}  // namespace lookdrift
