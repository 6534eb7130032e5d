#include "lookdrift/datasets.hpp"

#include <cmath>
#include <numbers>
#include <span>

#include "lookdrift/errors.hpp"

namespace lookdrift {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void sample_ring(const ToySpec& s, Matrix& out, Rng& rng) {
  double eps[2];
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    const auto j = static_cast<double>(rng.index(static_cast<std::uint64_t>(s.modes)));
    rng.fill_normal(eps);
    const double angle = kTwoPi * j / s.modes;
    out(i, 0) = s.radius * std::cos(angle) + s.noise * eps[0];
    out(i, 1) = s.radius * std::sin(angle) + s.noise * eps[1];
  }
}

void sample_moons(const ToySpec& s, Matrix& out, Rng& rng) {
  double eps[2];
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    const bool inner = rng.index(2) == 1;
    const double theta = std::numbers::pi * rng.uniform();
    rng.fill_normal(eps);
    double x = std::cos(theta), y = std::sin(theta);
    if (inner) {
      x = 1.0 - x;
      y = 0.5 - y;
    }
    out(i, 0) = s.radius * (x - 0.5) + s.noise * eps[0];
    out(i, 1) = s.radius * (y - 0.25) + s.noise * eps[1];
  }
}

void sample_spiral(const ToySpec& s, Matrix& out, Rng& rng) {
  double eps[2];
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    const auto arm = static_cast<double>(rng.index(static_cast<std::uint64_t>(s.arms)));
    const double t = rng.uniform();
    rng.fill_normal(eps);
    const double angle = kTwoPi * (s.turns * t + arm / s.arms);
    out(i, 0) = s.radius * t * std::cos(angle) + s.noise * eps[0];
    out(i, 1) = s.radius * t * std::sin(angle) + s.noise * eps[1];
  }
}

void sample_checkerboard(const ToySpec& s, Matrix& out, Rng& rng) {
  const double cell = 2.0 * s.extent / s.cells;
  const auto n = static_cast<std::uint64_t>(s.cells);
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    std::uint64_t ix = 0, iy = 0;
    do {
      ix = rng.index(n);
      iy = rng.index(n);
    } while ((ix + iy) % 2 != 0);
    out(i, 0) = std::min(-s.extent + (static_cast<double>(ix) + rng.uniform()) * cell, s.extent);
    out(i, 1) = std::min(-s.extent + (static_cast<double>(iy) + rng.uniform()) * cell, s.extent);
  }
}

}  // namespace

std::string to_string(ToyKind k) {
  switch (k) {
    case ToyKind::ring:
      return "ring";
    case ToyKind::two_moons:
      return "two-moons";
    case ToyKind::spiral:
      return "spiral";
    case ToyKind::checkerboard:
      return "checkerboard";
  }
  return "?";
}

ToyKind toy_kind_from_string(const std::string& name) {
  if (name == "ring" || name == "gaussian-mixture-ring") return ToyKind::ring;
  if (name == "two-moons") return ToyKind::two_moons;
  if (name == "spiral") return ToyKind::spiral;
  if (name == "checkerboard") return ToyKind::checkerboard;
  throw ConfigError("dataset.kind: unknown dataset kind '" + name + "'");
}

void ToySpec::validate() const {
  if (modes < 1) throw ConfigError("dataset.modes must be >= 1");
  if (!(radius > 0.0) || !std::isfinite(radius)) throw ConfigError("dataset.radius must be > 0");
  if (!(noise >= 0.0) || !std::isfinite(noise)) throw ConfigError("dataset.noise must be >= 0");
  if (arms < 1) throw ConfigError("dataset.arms must be >= 1");
  if (!(turns > 0.0) || !std::isfinite(turns)) throw ConfigError("dataset.turns must be > 0");
  if (!(extent > 0.0) || !std::isfinite(extent)) throw ConfigError("dataset.extent must be > 0");
  if (cells < 1) throw ConfigError("dataset.cells must be >= 1");
}

SampleBatch sample_data(const ToySpec& spec, Eigen::Index count, Rng& rng) {
  spec.validate();
  if (count < 1) throw InvalidInput("sample_data: count must be >= 1");
  Matrix out(count, 2);
  switch (spec.kind) {
    case ToyKind::ring:
      sample_ring(spec, out, rng);
      break;
    case ToyKind::two_moons:
      sample_moons(spec, out, rng);
      break;
    case ToyKind::spiral:
      sample_spiral(spec, out, rng);
      break;
    case ToyKind::checkerboard:
      sample_checkerboard(spec, out, rng);
      break;
  }
  return SampleBatch(std::move(out));
}

SampleBatch sample_noise(Eigen::Index dim, Eigen::Index count, Rng& rng) {
  if (dim < 1 || count < 1) throw InvalidInput("sample_noise: dim and count must be >= 1");
  Matrix out(count, dim);
  rng.fill_normal(std::span<double>(out.data(), static_cast<std::size_t>(out.size())));
  return SampleBatch(std::move(out));
}

}  // namespace lookdrift
