#pragma once

#include <vector>

#include "scout/core.hpp"
#include "scout/grid.hpp"
#include "scout/potentials.hpp"

/**
 * \file pde.hpp
 *
 * @brief Explicit finite differences for the Fokker-Planck equation and its analogue on 1-forms.
 *
 *   L* rho = div(rho grad V) + beta^-1 Laplacian(rho)
 *   (L~* phi)_i = L* phi_i - (Hess V phi)_i
 *
 * Centered second-order stencils, zero Dirichlet ghost values, forward Euler in time.
 */

namespace scout {

  /// V, its gradient and Hessian sampled at the grid nodes.
  struct PotentialOnGrid {
    Grid2D grid;
    Matrix v, gx, gy, hxx, hxy, hyy;
    double max_gradient = 0;
    /// Largest Hessian spectral radius over the nodes.
    double max_curvature = 0;
  };

  [[nodiscard]] PotentialOnGrid sample_potential(Potential const& pot, Grid2D const& grid);

  /// L* applied to one nodal array.
  [[nodiscard]] Matrix apply_L_star(PotentialOnGrid const& v, double beta, Matrix const& rho);

  /// L* on a scalar field.
  [[nodiscard]] GridField apply_L_star(PotentialOnGrid const& v, double beta, GridField const& rho);

  /// L~* on a two-component field; without coupling it is L* per component.
  [[nodiscard]] GridField apply_L_tilde_star(PotentialOnGrid const& v, double beta, GridField const& phi,
                                             bool hessian_coupling = true);

  /// 0.9 h^2 / (4 beta^-1 + max|grad V| h + max rho(Hess V) h^2) with h = min(hx, hy).
  [[nodiscard]] double stable_dt(PotentialOnGrid const& v, double beta);

  struct PdeOptions {
    double dt = 0;
    double t_end = 0;
    /// Requested snapshot times; each is taken at the nearest step.
    std::vector<double> snapshot_times;
    /// Only read by solve_witten.
    bool hessian_coupling = true;
  };

  struct PdeSnapshot {
    double t = 0;
    GridField field;
  };

  struct PdeRun {
    std::vector<PdeSnapshot> snapshots;
    GridField final;
    long steps = 0;
    /// Step actually used (t_end divided into whole steps).
    double dt = 0;
    /// Most negative nodal value seen in the final field (scalar runs).
    double min_value = 0;
    double initial_mass = 0;
    double final_mass = 0;
  };

  /// Integrate d rho / dt = L* rho; throws InstabilityError if dt exceeds the bound or the solution blows up.
  [[nodiscard]] PdeRun solve_fp(PotentialOnGrid const& v, double beta, GridField const& rho0, PdeOptions const& opts);

  /// Integrate d phi / dt = L~* phi.
  [[nodiscard]] PdeRun solve_witten(PotentialOnGrid const& v, double beta, GridField const& phi0,
                                    PdeOptions const& opts);

  /// exp(-|x - c|^2 / sigma0) in every component, scaled to unit integral per component.
  [[nodiscard]] GridField gaussian_bump(Grid2D const& grid, double cx, double cy, double sigma0, int components);

  /// count times from t_first to t_end, geometrically spaced.
  [[nodiscard]] std::vector<double> geometric_times(double t_first, double t_end, int count);

}  // namespace scout
