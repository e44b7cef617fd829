#pragma once

#include "wayfind/environment.hpp"

#include <Eigen/Core>

namespace wayfind {

/// Image-shaped array, row index = image row (top first), column = image column.
template <typename Scalar>
using Raster = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Scalar field in [0,1] aligned with the view raster.
using AttentionMap = Raster<double>;

template <typename Scalar>
struct ColorRaster {
  Raster<Scalar> red;
  Raster<Scalar> green;
  Raster<Scalar> blue;

  ColorRaster() = default;
  ColorRaster(int width, int height, Scalar fill = Scalar(0))
      : red(Raster<Scalar>::Constant(height, width, fill)),
        green(Raster<Scalar>::Constant(height, width, fill)),
        blue(Raster<Scalar>::Constant(height, width, fill)) {}

  int width() const { return static_cast<int>(red.cols()); }
  int height() const { return static_cast<int>(red.rows()); }

  Point3<Scalar> pixel(int x, int y) const { return {red(y, x), green(y, x), blue(y, x)}; }
  void set(int x, int y, const Point3<Scalar>& c) {
    red(y, x) = c.x();
    green(y, x) = c.y();
    blue(y, x) = c.z();
  }
};

using ViewRaster = ColorRaster<double>;

/// Per-pixel sign id (0 = background) and hit distance in meters.
struct SignMask {
  Raster<SignId> ids;
  Raster<double> depth;

  int width() const { return static_cast<int>(ids.cols()); }
  int height() const { return static_cast<int>(ids.rows()); }
};

}  // namespace wayfind
