#include "lookdrift/render.hpp"

#include <cmath>

#include "lookdrift/errors.hpp"

namespace lookdrift {
namespace {

struct Rgb {
  unsigned char r, g, b;
};

constexpr Rgb kBackground{255, 255, 255};
constexpr Rgb kData{0, 114, 178};
constexpr Rgb kGenerated{230, 159, 0};

}  // namespace

void Bounds::validate() const {
  if (!(std::isfinite(xmin) && std::isfinite(xmax) && std::isfinite(ymin) &&
        std::isfinite(ymax)) ||
      !(xmin < xmax) || !(ymin < ymax)) {
    throw InvalidInput("render: bounds must be finite with min < max");
  }
}

Raster render_scatter(const Matrix& data, const Matrix& generated, const Bounds& bounds,
                      int resolution) {
  bounds.validate();
  if (resolution < 16) throw InvalidInput("render: resolution must be >= 16");
  for (const Matrix* m : {&data, &generated}) {
    if (m->rows() > 0 && m->cols() != 2) throw InvalidInput("render: points must be 2D");
  }

  const auto res = static_cast<std::size_t>(resolution);
  std::string pixels(res * res * 3, '\0');
  for (std::size_t i = 0; i < res * res; ++i) {
    pixels[3 * i] = static_cast<char>(kBackground.r);
    pixels[3 * i + 1] = static_cast<char>(kBackground.g);
    pixels[3 * i + 2] = static_cast<char>(kBackground.b);
  }

  std::size_t clipped = 0;
  auto plot = [&](const Matrix& pts, Rgb color) {
    for (Eigen::Index i = 0; i < pts.rows(); ++i) {
      const double x = pts(i, 0), y = pts(i, 1);
      if (!(x >= bounds.xmin && x <= bounds.xmax && y >= bounds.ymin && y <= bounds.ymax)) {
        ++clipped;
        continue;
      }
      const double fx = (x - bounds.xmin) / (bounds.xmax - bounds.xmin);
      const double fy = (bounds.ymax - y) / (bounds.ymax - bounds.ymin);
      const auto col = std::min(static_cast<std::size_t>(fx * resolution), res - 1);
      const auto row = std::min(static_cast<std::size_t>(fy * resolution), res - 1);
      const std::size_t at = 3 * (row * res + col);
      pixels[at] = static_cast<char>(color.r);
      pixels[at + 1] = static_cast<char>(color.g);
      pixels[at + 2] = static_cast<char>(color.b);
    }
  };
  plot(data, kData);
  plot(generated, kGenerated);

  Raster out;
  out.ppm = "P6\n" + std::to_string(res) + " " + std::to_string(res) + "\n255\n" + pixels;
  out.clipped = clipped;
  return out;
}

}  // namespace lookdrift
