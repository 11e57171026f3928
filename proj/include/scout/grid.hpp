#pragma once

#include <array>
#include <vector>

#include "scout/core.hpp"

namespace scout {

  /// Uniform 2D grid; node (i, j) sits at (x_min + i hx, y_min + j hy).
  struct Grid2D {
    double x_min = -1, x_max = 1;
    double y_min = -1, y_max = 1;
    Index nx = 64, ny = 64;

    /// Throws ConfigError unless nx, ny >= 16 and the ranges are non-empty.
    void validate() const;

    [[nodiscard]] double hx() const { return (x_max - x_min) / static_cast<double>(nx - 1); }
    [[nodiscard]] double hy() const { return (y_max - y_min) / static_cast<double>(ny - 1); }
    [[nodiscard]] double x(Index i) const { return x_min + static_cast<double>(i) * hx(); }
    [[nodiscard]] double y(Index j) const { return y_min + static_cast<double>(j) * hy(); }
    [[nodiscard]] double cell_area() const { return hx() * hy(); }

    /// Index of the node whose control cell contains p, or -1 components when outside.
    [[nodiscard]] std::array<Index, 2> locate(double px, double py) const;
  };

  /// Scalar (1 component) or vector (2 components) field sampled at grid nodes; value(c)(i, j).
  struct GridField {
    Grid2D grid;
    std::vector<Matrix> comp;

    GridField() = default;
    GridField(Grid2D g, int components) : grid(g), comp(static_cast<std::size_t>(components), Matrix::Zero(g.nx, g.ny)) {}

    [[nodiscard]] int components() const { return static_cast<int>(comp.size()); }
    [[nodiscard]] Matrix& operator[](int c) { return comp[static_cast<std::size_t>(c)]; }
    [[nodiscard]] Matrix const& operator[](int c) const { return comp[static_cast<std::size_t>(c)]; }

    /// Pointwise Euclidean norm across components.
    [[nodiscard]] Matrix magnitude() const;

    /// Sum over nodes times cell area, per component.
    [[nodiscard]] double integral(int c) const { return comp[static_cast<std::size_t>(c)].sum() * grid.cell_area(); }
  };

}  // namespace scout
