#include <algorithm>
#include <cmath>
#include <numbers>
#include <tuple>

#include "scout/potentials.hpp"

namespace scout {

  namespace {

    // Radial terms of a pair energy phi(r), expressed through the displacement d = x_i - x_j:
    //   grad_i phi = alpha d,   Hess_ii phi = gamma d d^T + alpha I,
    // with alpha = phi'/r and gamma = (phi'' - phi'/r)/r^2.
    struct Radial {
      double phi;
      double alpha;
      double gamma;
    };

    struct MorsePair {
      MorseParams p;

      [[nodiscard]] Radial operator()(double r2) const {
        double const r = std::sqrt(r2);
        double const e1 = std::exp(-p.a * (r - p.r0));
        double const e2 = e1 * e1;
        double const d1 = 2 * p.a * p.D * (e1 - e2);
        double const d2 = 2 * p.a * p.a * p.D * (2 * e2 - e1);
        double const alpha = d1 / r;
        return {p.D * (e2 - 2 * e1), alpha, (d2 - alpha) / r2};
      }
    };

    struct LennardJonesPair {
      [[nodiscard]] Radial operator()(double r2) const {
        double const ir2 = 1.0 / r2;
        double const ir6 = ir2 * ir2 * ir2;
        double const ir12 = ir6 * ir6;
        return {4 * (ir12 - ir6), -24 * ir2 * (2 * ir12 - ir6), ir2 * ir2 * (672 * ir12 - 192 * ir6)};
      }
    };

    void reject_coincident(double r2) {
      if (!(r2 > 0)) {
        throw Error("coincident atoms: pair distance is zero");
      }
    }

    /**
     * Accumulate value / gradient / Hessian-vector product over all free-free and free-fixed pairs.
     * g and hy are zeroed here when requested.
     */
    template <bool kValue, bool kGrad, bool kHvp, typename Pair>
    double accumulate(Pair const& pair, Index n_free, Eigen::Matrix2Xd const* fixed, double const* x, double const* y,
                      double* g, double* hy) {
      double energy = 0;

      if constexpr (kGrad) {
        std::fill(g, g + 2 * n_free, 0.0);
      }
      if constexpr (kHvp) {
        std::fill(hy, hy + 2 * n_free, 0.0);
      }

      for (Index i = 0; i < n_free; ++i) {
        double const xi = x[2 * i], yi = x[2 * i + 1];
        double gx = 0, gy = 0, hx = 0, hyv = 0;

        for (Index j = i + 1; j < n_free; ++j) {
          double const dx = xi - x[2 * j];
          double const dy = yi - x[2 * j + 1];
          double const r2 = dx * dx + dy * dy;
          reject_coincident(r2);
          Radial const rad = pair(r2);

          if constexpr (kValue) {
            energy += rad.phi;
          }
          if constexpr (kGrad) {
            double const fx = rad.alpha * dx, fy = rad.alpha * dy;
            gx += fx;
            gy += fy;
            g[2 * j] -= fx;
            g[2 * j + 1] -= fy;
          }
          if constexpr (kHvp) {
            double const ux = y[2 * i] - y[2 * j];
            double const uy = y[2 * i + 1] - y[2 * j + 1];
            double const proj = rad.gamma * (dx * ux + dy * uy);
            double const ox = proj * dx + rad.alpha * ux;
            double const oy = proj * dy + rad.alpha * uy;
            hx += ox;
            hyv += oy;
            hy[2 * j] -= ox;
            hy[2 * j + 1] -= oy;
          }
        }

        if (fixed) {
          Index const n_fixed = fixed->cols();
          double const* f = fixed->data();
          for (Index j = 0; j < n_fixed; ++j) {
            double const dx = xi - f[2 * j];
            double const dy = yi - f[2 * j + 1];
            double const r2 = dx * dx + dy * dy;
            reject_coincident(r2);
            Radial const rad = pair(r2);

            if constexpr (kValue) {
              energy += rad.phi;
            }
            if constexpr (kGrad) {
              gx += rad.alpha * dx;
              gy += rad.alpha * dy;
            }
            if constexpr (kHvp) {
              double const ux = y[2 * i], uy = y[2 * i + 1];
              double const proj = rad.gamma * (dx * ux + dy * uy);
              hx += proj * dx + rad.alpha * ux;
              hyv += proj * dy + rad.alpha * uy;
            }
          }
        }

        if constexpr (kGrad) {
          g[2 * i] += gx;
          g[2 * i + 1] += gy;
        }
        if constexpr (kHvp) {
          hy[2 * i] += hx;
          hy[2 * i + 1] += hyv;
        }
      }
      return energy;
    }

    template <typename Pair>
    Matrix pair_hessian(Pair const& pair, Index n_free, Eigen::Matrix2Xd const* fixed, VectorCRef x) {
      Matrix h = Matrix::Zero(2 * n_free, 2 * n_free);

      auto block = [](Radial const& rad, double dx, double dy) {
        Eigen::Matrix2d b;
        b(0, 0) = rad.gamma * dx * dx + rad.alpha;
        b(0, 1) = rad.gamma * dx * dy;
        b(1, 0) = b(0, 1);
        b(1, 1) = rad.gamma * dy * dy + rad.alpha;
        return b;
      };

      for (Index i = 0; i < n_free; ++i) {
        for (Index j = i + 1; j < n_free; ++j) {
          double const dx = x[2 * i] - x[2 * j];
          double const dy = x[2 * i + 1] - x[2 * j + 1];
          double const r2 = dx * dx + dy * dy;
          reject_coincident(r2);
          Eigen::Matrix2d const b = block(pair(r2), dx, dy);
          h.block<2, 2>(2 * i, 2 * i) += b;
          h.block<2, 2>(2 * j, 2 * j) += b;
          h.block<2, 2>(2 * i, 2 * j) -= b;
          h.block<2, 2>(2 * j, 2 * i) -= b;
        }
        if (fixed) {
          for (Index j = 0; j < fixed->cols(); ++j) {
            double const dx = x[2 * i] - (*fixed)(0, j);
            double const dy = x[2 * i + 1] - (*fixed)(1, j);
            double const r2 = dx * dx + dy * dy;
            reject_coincident(r2);
            h.block<2, 2>(2 * i, 2 * i) += block(pair(r2), dx, dy);
          }
        }
      }
      return h;
    }

  }  // namespace

  // ------------------------------------------------------------------------------------------------- LatticeSpec

  void LatticeSpec::validate() const {
    if (free_atoms < 1) {
      throw ConfigError("lattice needs at least one free atom");
    }
    if (free_sites.cols() != free_atoms) {
      throw ConfigError("lattice free_sites must have one column per free atom");
    }
    if (!(spacing > 0) || !(morse.a > 0) || !(morse.D > 0)) {
      throw ConfigError("lattice spacing and Morse D, a must be positive");
    }

    Eigen::Matrix2Xd all(2, free_sites.cols() + fixed.cols() + 1);
    all << free_sites, fixed, vacancy_site;
    for (Index i = 0; i < all.cols(); ++i) {
      for (Index j = i + 1; j < all.cols(); ++j) {
        if ((all.col(i) - all.col(j)).norm() < 1e-12 * spacing) {
          throw ConfigError("lattice sites " + std::to_string(i) + " and " + std::to_string(j) + " coincide");
        }
      }
    }
  }

  LatticeSpec hex_vacancy_lattice(int radius, Index free_atoms, double spacing, MorseParams morse) {
    if (radius < 1) {
      throw ConfigError("lattice radius must be >= 1");
    }
    Eigen::Vector2d const a1{spacing, 0.0};
    Eigen::Vector2d const a2{0.5 * spacing, 0.5 * std::sqrt(3.0) * spacing};

    // (distance, angle, position) of every non-vacant site in the hexagon.
    std::vector<std::tuple<double, double, Eigen::Vector2d>> sites;
    for (int i = -radius; i <= radius; ++i) {
      for (int j = -radius; j <= radius; ++j) {
        if (std::abs(i + j) > radius || (i == 0 && j == 0)) {
          continue;
        }
        Eigen::Vector2d const p = i * a1 + j * a2;
        double angle = std::atan2(p.y(), p.x());
        if (angle < 0) {
          angle += 2 * std::numbers::pi;
        }
        // Round so that symmetry-equivalent distances tie exactly.
        double const dist = std::round(p.norm() * 1e9) / 1e9;
        sites.emplace_back(dist, std::round(angle * 1e9) / 1e9, p);
      }
    }

    if (free_atoms < 1 || free_atoms > static_cast<Index>(sites.size())) {
      throw ConfigError("free_atoms must be in [1, " + std::to_string(sites.size()) + "] for lattice radius "
                        + std::to_string(radius));
    }

    std::sort(sites.begin(), sites.end(), [](auto const& l, auto const& r) {
      return std::tie(std::get<0>(l), std::get<1>(l)) < std::tie(std::get<0>(r), std::get<1>(r));
    });

    LatticeSpec spec;
    spec.free_atoms = free_atoms;
    spec.spacing = spacing;
    spec.morse = morse;
    spec.free_sites.resize(2, free_atoms);
    spec.fixed.resize(2, static_cast<Index>(sites.size()) - free_atoms);
    for (std::size_t k = 0; k < sites.size(); ++k) {
      auto const& p = std::get<2>(sites[k]);
      auto const idx = static_cast<Index>(k);
      if (idx < free_atoms) {
        spec.free_sites.col(idx) = p;
      } else {
        spec.fixed.col(idx - free_atoms) = p;
      }
    }
    return spec;
  }

  // ------------------------------------------------------------------------------------------------ MorseVacancy

  MorseVacancy::MorseVacancy(LatticeSpec spec) : spec_(std::move(spec)) { spec_.validate(); }

  Vector MorseVacancy::ideal_configuration() const {
    return Eigen::Map<const Vector>(spec_.free_sites.data(), 2 * spec_.free_atoms);
  }

  double MorseVacancy::value(VectorCRef x) const {
    return accumulate<true, false, false>(MorsePair{spec_.morse}, spec_.free_atoms, &spec_.fixed, x.data(), nullptr,
                                          nullptr, nullptr);
  }

  void MorseVacancy::gradient(VectorCRef x, VectorRef g) const {
    accumulate<false, true, false>(MorsePair{spec_.morse}, spec_.free_atoms, &spec_.fixed, x.data(), nullptr, g.data(),
                                   nullptr);
  }

  void MorseVacancy::hvp(VectorCRef x, VectorCRef y, VectorRef out) const {
    accumulate<false, false, true>(MorsePair{spec_.morse}, spec_.free_atoms, &spec_.fixed, x.data(), y.data(), nullptr,
                                   out.data());
  }

  void MorseVacancy::gradient_hvp(VectorCRef x, VectorCRef y, VectorRef g, VectorRef hy) const {
    accumulate<false, true, true>(MorsePair{spec_.morse}, spec_.free_atoms, &spec_.fixed, x.data(), y.data(), g.data(),
                                  hy.data());
  }

  Matrix MorseVacancy::hessian(VectorCRef x) const {
    return pair_hessian(MorsePair{spec_.morse}, spec_.free_atoms, &spec_.fixed, x);
  }

  // ---------------------------------------------------------------------------------------------- LennardJones2D

  double LennardJones2D::value(VectorCRef x) const {
    return accumulate<true, false, false>(LennardJonesPair{}, atoms_, nullptr, x.data(), nullptr, nullptr, nullptr);
  }

  void LennardJones2D::gradient(VectorCRef x, VectorRef g) const {
    accumulate<false, true, false>(LennardJonesPair{}, atoms_, nullptr, x.data(), nullptr, g.data(), nullptr);
  }

  void LennardJones2D::hvp(VectorCRef x, VectorCRef y, VectorRef out) const {
    accumulate<false, false, true>(LennardJonesPair{}, atoms_, nullptr, x.data(), y.data(), nullptr, out.data());
  }

  void LennardJones2D::gradient_hvp(VectorCRef x, VectorCRef y, VectorRef g, VectorRef hy) const {
    accumulate<false, true, true>(LennardJonesPair{}, atoms_, nullptr, x.data(), y.data(), g.data(), hy.data());
  }

  Matrix LennardJones2D::hessian(VectorCRef x) const { return pair_hessian(LennardJonesPair{}, atoms_, nullptr, x); }

  std::vector<Vector> LennardJones2D::zero_mode_basis() const {
    Vector tx = Vector::Zero(dim());
    Vector ty = Vector::Zero(dim());
    for (Index i = 0; i < atoms_; ++i) {
      tx[2 * i] = 1;
      ty[2 * i + 1] = 1;
    }
    double const s = 1.0 / std::sqrt(static_cast<double>(atoms_));
    return {tx * s, ty * s};
  }

  std::vector<Vector> LennardJones2D::local_zero_modes(VectorCRef x) const {
    Eigen::Vector2d centroid = Eigen::Vector2d::Zero();
    for (Index i = 0; i < atoms_; ++i) {
      centroid += x.segment<2>(2 * i);
    }
    centroid /= static_cast<double>(atoms_);

    Vector rot(dim());
    for (Index i = 0; i < atoms_; ++i) {
      Eigen::Vector2d const p = x.segment<2>(2 * i) - centroid;
      rot[2 * i] = -p.y();
      rot[2 * i + 1] = p.x();
    }
    double const n = rot.norm();
    if (!(n > 0)) {
      return {};
    }
    return {rot / n};
  }

  Vector LennardJones2D::hexagon_configuration() {
    double const r = std::pow(2.0, 1.0 / 6.0);
    Vector x = Vector::Zero(14);
    for (int k = 0; k < 6; ++k) {
      double const t = k * std::numbers::pi / 3;
      x[2 * (k + 1)] = r * std::cos(t);
      x[2 * (k + 1) + 1] = r * std::sin(t);
    }
    return x;
  }

}  // namespace scout
