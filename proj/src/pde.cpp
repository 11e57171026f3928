#include "scout/pde.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "scout/parallel.hpp"

namespace scout {

  PotentialOnGrid sample_potential(Potential const& pot, Grid2D const& grid) {
    grid.validate();
    if (pot.dim() != 2) {
      throw ConfigError("grid solvers need a two-dimensional potential");
    }
    PotentialOnGrid s;
    s.grid = grid;
    for (Matrix* m : {&s.v, &s.gx, &s.gy, &s.hxx, &s.hxy, &s.hyy}) {
      m->resize(grid.nx, grid.ny);
    }
    Vector x(2), g(2);
    for (Index j = 0; j < grid.ny; ++j) {
      for (Index i = 0; i < grid.nx; ++i) {
        x << grid.x(i), grid.y(j);
        pot.gradient(x, g);
        Matrix const h = pot.hessian(x);
        s.v(i, j) = pot.value(x);
        s.gx(i, j) = g[0];
        s.gy(i, j) = g[1];
        s.hxx(i, j) = h(0, 0);
        s.hxy(i, j) = 0.5 * (h(0, 1) + h(1, 0));
        s.hyy(i, j) = h(1, 1);
        s.max_gradient = std::max(s.max_gradient, g.norm());
        // Spectral radius of a symmetric 2x2 matrix.
        double const mean = 0.5 * (h(0, 0) + h(1, 1));
        double const rad = std::hypot(0.5 * (h(0, 0) - h(1, 1)), s.hxy(i, j));
        s.max_curvature = std::max(s.max_curvature, std::abs(mean) + rad);
      }
    }
    return s;
  }

  Matrix apply_L_star(PotentialOnGrid const& v, double beta, Matrix const& rho) {
    Grid2D const& g = v.grid;
    Index const nx = g.nx;
    Index const ny = g.ny;
    if (rho.rows() != nx || rho.cols() != ny) {
      throw ConfigError("field shape does not match the grid");
    }
    double const ihx = 1 / g.hx();
    double const ihy = 1 / g.hy();
    double const dx = 0.5 * ihx;
    double const dy = 0.5 * ihy;
    double const kx = ihx * ihx / beta;
    double const ky = ihy * ihy / beta;

    Matrix out(nx, ny);
    parallel_for(ny, [&](Index j) {
      for (Index i = 0; i < nx; ++i) {
        double const c = rho(i, j);
        // Ghost nodes outside the box carry zero density.
        double const w = i > 0 ? rho(i - 1, j) : 0.0;
        double const e = i + 1 < nx ? rho(i + 1, j) : 0.0;
        double const s = j > 0 ? rho(i, j - 1) : 0.0;
        double const n = j + 1 < ny ? rho(i, j + 1) : 0.0;
        double const fw = i > 0 ? w * v.gx(i - 1, j) : 0.0;
        double const fe = i + 1 < nx ? e * v.gx(i + 1, j) : 0.0;
        double const fs = j > 0 ? s * v.gy(i, j - 1) : 0.0;
        double const fn = j + 1 < ny ? n * v.gy(i, j + 1) : 0.0;
        out(i, j) = (fe - fw) * dx + (fn - fs) * dy + (e - 2 * c + w) * kx + (n - 2 * c + s) * ky;
      }
    });
    return out;
  }

  GridField apply_L_star(PotentialOnGrid const& v, double beta, GridField const& rho) {
    if (rho.components() != 1) {
      throw ConfigError("L* acts on scalar fields");
    }
    GridField out(v.grid, 1);
    out[0] = apply_L_star(v, beta, rho[0]);
    return out;
  }

  namespace {

    /// Right-hand side of the 1-form equation.
    GridField witten_rhs(PotentialOnGrid const& v, double beta, GridField const& phi, bool coupling) {
      GridField out(v.grid, 2);
      out[0] = apply_L_star(v, beta, phi[0]);
      out[1] = apply_L_star(v, beta, phi[1]);
      if (coupling) {
        out[0].array() -= v.hxx.array() * phi[0].array() + v.hxy.array() * phi[1].array();
        out[1].array() -= v.hxy.array() * phi[0].array() + v.hyy.array() * phi[1].array();
      }
      return out;
    }

    template <typename Rhs>
    PdeRun integrate(PotentialOnGrid const& v, double beta, GridField const& init, PdeOptions const& opts, Rhs rhs) {
      if (!(beta > 0)) {
        throw ConfigError("beta must be positive");
      }
      if (!(opts.dt > 0) || !(opts.t_end >= 0)) {
        throw ConfigError("time step must be positive and the final time non-negative");
      }
      double const bound = stable_dt(v, beta);
      if (opts.dt > bound) {
        throw InstabilityError("time step " + std::to_string(opts.dt) + " exceeds the explicit stability bound "
                               + std::to_string(bound));
      }
      if (init.grid.nx != v.grid.nx || init.grid.ny != v.grid.ny) {
        throw ConfigError("initial field does not match the grid");
      }

      PdeRun run;
      run.steps = static_cast<long>(std::ceil(opts.t_end / opts.dt - 1e-12));
      run.dt = run.steps > 0 ? opts.t_end / static_cast<double>(run.steps) : opts.dt;
      run.initial_mass = init.integral(0);

      std::vector<long> snap_steps;
      for (double t : opts.snapshot_times) {
        snap_steps.push_back(std::clamp(std::lround(t / run.dt), 0L, run.steps));
      }

      GridField f = init;
      auto take_snapshots = [&](long k) {
        for (long s : snap_steps) {
          if (s == k) {
            run.snapshots.push_back({static_cast<double>(k) * run.dt, f});
          }
        }
      };

      take_snapshots(0);
      for (long k = 1; k <= run.steps; ++k) {
        GridField const d = rhs(f);
        for (int c = 0; c < f.components(); ++c) {
          f[c] += run.dt * d[c];
        }
        if (k % 64 == 0 || k == run.steps) {
          for (int c = 0; c < f.components(); ++c) {
            if (!f[c].allFinite()) {
              throw InstabilityError("non-finite field at step " + std::to_string(k));
            }
          }
        }
        take_snapshots(k);
      }

      run.final_mass = f.integral(0);
      run.min_value = f[0].minCoeff();
      run.final = std::move(f);
      return run;
    }

  }  // namespace

  GridField apply_L_tilde_star(PotentialOnGrid const& v, double beta, GridField const& phi, bool hessian_coupling) {
    if (phi.components() != 2) {
      throw ConfigError("L~* acts on two-component fields");
    }
    return witten_rhs(v, beta, phi, hessian_coupling);
  }

  double stable_dt(PotentialOnGrid const& v, double beta) {
    double const h = std::min(v.grid.hx(), v.grid.hy());
    return 0.9 * h * h / (4 / beta + v.max_gradient * h + v.max_curvature * h * h);
  }

  PdeRun solve_fp(PotentialOnGrid const& v, double beta, GridField const& rho0, PdeOptions const& opts) {
    if (rho0.components() != 1) {
      throw ConfigError("Fokker-Planck solver needs a scalar field");
    }
    return integrate(v, beta, rho0, opts, [&](GridField const& f) { return apply_L_star(v, beta, f); });
  }

  PdeRun solve_witten(PotentialOnGrid const& v, double beta, GridField const& phi0, PdeOptions const& opts) {
    if (phi0.components() != 2) {
      throw ConfigError("1-form solver needs a two-component field");
    }
    return integrate(v, beta, phi0, opts,
                     [&](GridField const& f) { return witten_rhs(v, beta, f, opts.hessian_coupling); });
  }

  GridField gaussian_bump(Grid2D const& grid, double cx, double cy, double sigma0, int components) {
    grid.validate();
    if (!(sigma0 > 0) || components < 1) {
      throw ConfigError("gaussian bump needs a positive width and at least one component");
    }
    Matrix m(grid.nx, grid.ny);
    for (Index j = 0; j < grid.ny; ++j) {
      for (Index i = 0; i < grid.nx; ++i) {
        double const dx = grid.x(i) - cx;
        double const dy = grid.y(j) - cy;
        m(i, j) = std::exp(-(dx * dx + dy * dy) / sigma0);
      }
    }
    double const mass = m.sum() * grid.cell_area();
    if (!(mass > 0)) {
      throw ConfigError("gaussian bump is narrower than the grid can resolve");
    }
    m /= mass;
    GridField f(grid, components);
    for (int c = 0; c < components; ++c) {
      f[c] = m;
    }
    return f;
  }

  std::vector<double> geometric_times(double t_first, double t_end, int count) {
    std::vector<double> t;
    if (count < 1 || !(t_first > 0) || !(t_end >= t_first)) {
      return t;
    }
    if (count == 1) {
      return {t_end};
    }
    double const ratio = std::pow(t_end / t_first, 1.0 / (count - 1));
    double cur = t_first;
    for (int i = 0; i < count; ++i) {
      t.push_back(i + 1 == count ? t_end : cur);
      cur *= ratio;
    }
    return t;
  }

}  // namespace scout
