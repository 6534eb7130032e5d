#pragma once

#include <cstddef>
#include <string>

#include "lookdrift/sample_batch.hpp"

namespace lookdrift {

struct Bounds {
  double xmin = -4.0, xmax = 4.0, ymin = -4.0, ymax = 4.0;
  void validate() const;
};

struct Raster {
  std::string ppm;            ///< binary PPM (P6), RGB channel order, top row first
  std::size_t clipped = 0;    ///< points outside the bounds, not drawn
};

/// Square scatter raster, `resolution` pixels per side, white background.
/// Data points are drawn first in blue (0,114,178), generated points on top
/// in orange (230,159,0); one pixel per point. Point (x, y) lands in column
/// floor((x - xmin) / (xmax - xmin) * res) and row counted from the top,
/// with the max edge folded into the last pixel.
Raster render_scatter(const Matrix& data, const Matrix& generated, const Bounds& bounds,
                      int resolution);

}  // namespace lookdrift
