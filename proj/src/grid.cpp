#include "scout/grid.hpp"

#include <cmath>

namespace scout {

  void Grid2D::validate() const {
    if (nx < 16 || ny < 16) {
      throw ConfigError("grid needs at least 16 nodes per axis");
    }
    if (!(x_max > x_min) || !(y_max > y_min) || !std::isfinite(x_max - x_min) || !std::isfinite(y_max - y_min)) {
      throw ConfigError("grid ranges must be finite and non-empty");
    }
  }

  std::array<Index, 2> Grid2D::locate(double px, double py) const {
    double const fi = std::floor((px - x_min) / hx() + 0.5);
    double const fj = std::floor((py - y_min) / hy() + 0.5);
    if (!(fi >= 0 && fi < static_cast<double>(nx) && fj >= 0 && fj < static_cast<double>(ny))) {
      return {-1, -1};
    }
    return {static_cast<Index>(fi), static_cast<Index>(fj)};
  }

  Matrix GridField::magnitude() const {
    Matrix m = Matrix::Zero(grid.nx, grid.ny);
    for (auto const& c : comp) {
      m += c.cwiseAbs2();
    }
    return m.cwiseSqrt();
  }

}  // namespace scout
