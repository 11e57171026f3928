#pragma once

#include <array>
#include <memory>
#include <string>
#include <vector>

#include "scout/core.hpp"

/**
 * \file potentials.hpp
 *
 * @brief Benchmark energy surfaces with analytic gradients and Hessian-vector products.
 */

namespace scout {

  /**
   * @brief Smooth energy surface V : R^dim -> R.
   *
   * Implementations are immutable after construction; every member is safe to call concurrently.
   */
  class Potential {
  public:
    virtual ~Potential() = default;

    [[nodiscard]] virtual std::string name() const = 0;

    [[nodiscard]] virtual Index dim() const = 0;

    [[nodiscard]] virtual double value(VectorCRef x) const = 0;

    virtual void gradient(VectorCRef x, VectorRef g) const = 0;

    /// out = Hess V(x) * y
    virtual void hvp(VectorCRef x, VectorCRef y, VectorRef out) const = 0;

    /// Fused gradient and Hessian-vector product, the inner kernel of the particle dynamics.
    virtual void gradient_hvp(VectorCRef x, VectorCRef y, VectorRef g, VectorRef hy) const {
      gradient(x, g);
      hvp(x, y, hy);
    }

    /// Dense Hessian, available for every potential with dim() <= 512.
    [[nodiscard]] virtual Matrix hessian(VectorCRef x) const = 0;

    [[nodiscard]] virtual bool has_hessian() const { return dim() <= 512; }

    /// Orthonormal directions that are exact Hessian null vectors at every point.
    [[nodiscard]] virtual std::vector<Vector> zero_mode_basis() const { return {}; }

    /**
     * @brief Symmetry generators at x that are not constant in space (e.g. rigid rotation of a free cluster).
     *
     * The gradient is orthogonal to these everywhere and they are Hessian null vectors at critical points.
     */
    [[nodiscard]] virtual std::vector<Vector> local_zero_modes(VectorCRef) const { return {}; }

    // Convenience wrappers.

    [[nodiscard]] Vector gradient(VectorCRef x) const {
      Vector g(dim());
      gradient(x, g);
      return g;
    }

    [[nodiscard]] Vector hvp(VectorCRef x, VectorCRef y) const {
      Vector out(dim());
      hvp(x, y, out);
      return out;
    }
  };

  /// E (C x^4 - x^2) + mu y^2: one saddle at the origin, minima at x = +-(2C)^(-1/2).
  class DoubleWellFlat final : public Potential {
  public:
    DoubleWellFlat(double E = 2e-4, double C = 0.045, double mu = 0.001) : E_(E), C_(C), mu_(mu) {}

    [[nodiscard]] std::string name() const override { return "double-well-flat"; }
    [[nodiscard]] Index dim() const override { return 2; }
    [[nodiscard]] double value(VectorCRef x) const override;
    using Potential::gradient;
    using Potential::hvp;
    void gradient(VectorCRef x, VectorRef g) const override;
    void hvp(VectorCRef x, VectorCRef y, VectorRef out) const override;
    [[nodiscard]] Matrix hessian(VectorCRef x) const override;

    /// Location of the positive minimum on the x-axis.
    [[nodiscard]] double minimum_x() const;

  private:
    double E_, C_, mu_;
  };

  /// (1 - x^2)^2 + 2 y^2: minima at (+-1, 0), saddle at the origin.
  class DoubleWellQuartic final : public Potential {
  public:
    [[nodiscard]] std::string name() const override { return "double-well-quartic"; }
    [[nodiscard]] Index dim() const override { return 2; }
    [[nodiscard]] double value(VectorCRef x) const override;
    using Potential::gradient;
    using Potential::hvp;
    void gradient(VectorCRef x, VectorRef g) const override;
    void hvp(VectorCRef x, VectorCRef y, VectorRef out) const override;
    [[nodiscard]] Matrix hessian(VectorCRef x) const override;
  };

  /// Four-Gaussian Mueller-Brown surface.
  class MuellerBrown final : public Potential {
  public:
    struct Params {
      std::array<double, 4> A{-200, -100, -170, 15};
      std::array<double, 4> a{-1, -1, -6.5, 0.7};
      std::array<double, 4> b{0, 0, 11, 0.6};
      std::array<double, 4> c{-10, -10, -6.5, 0.7};
      std::array<double, 4> x0{1, 0, -0.5, -1};
      std::array<double, 4> y0{0, 0.5, 1.5, 1};
    };

    MuellerBrown() = default;
    explicit MuellerBrown(Params p) : p_(p) {}

    [[nodiscard]] std::string name() const override { return "mueller-brown"; }
    [[nodiscard]] Index dim() const override { return 2; }
    [[nodiscard]] double value(VectorCRef x) const override;
    using Potential::gradient;
    using Potential::hvp;
    void gradient(VectorCRef x, VectorRef g) const override;
    void hvp(VectorCRef x, VectorCRef y, VectorRef out) const override;
    void gradient_hvp(VectorCRef x, VectorCRef y, VectorRef g, VectorRef hy) const override;
    [[nodiscard]] Matrix hessian(VectorCRef x) const override;

  private:
    void eval(VectorCRef x, double* v, double* g, double* h) const;

    Params p_;
  };

  /// V1/Z - exp(-|x - (5,5)|^2) with V1 = (x^2+y^2)^2 + x^2 - y^2 - x + y; two disjoint index-1 regions.
  class Challenge2D final : public Potential {
  public:
    explicit Challenge2D(double Z = 4e3) : Z_(Z) {}

    [[nodiscard]] std::string name() const override { return "challenge-2d"; }
    [[nodiscard]] Index dim() const override { return 2; }
    [[nodiscard]] double value(VectorCRef x) const override;
    using Potential::gradient;
    using Potential::hvp;
    void gradient(VectorCRef x, VectorRef g) const override;
    void hvp(VectorCRef x, VectorCRef y, VectorRef out) const override;
    [[nodiscard]] Matrix hessian(VectorCRef x) const override;

  private:
    double Z_;
  };

  // ---------------------------------------------------------------------------------------------------------------
  // Pairwise potentials of 2D atoms.

  /// Morse pair D (exp(-2a(r - r0)) - 2 exp(-a(r - r0))).
  struct MorseParams {
    double D = 1.0;
    double a = 4.4;
    double r0 = 1.0;
  };

  /// Free atoms interacting with each other and with a frozen environment.
  struct LatticeSpec {
    Index free_atoms = 23;
    /// 2 x n_fixed, one column per frozen atom.
    Eigen::Matrix2Xd fixed;
    /// 2 x free_atoms, the ideal (unrelaxed) free-atom sites.
    Eigen::Matrix2Xd free_sites;
    /// Position of the vacant site.
    Eigen::Vector2d vacancy_site = Eigen::Vector2d::Zero();
    double spacing = 1.0;
    MorseParams morse;

    /// Throws ConfigError when free + fixed + vacancy positions are not pairwise distinct or free_atoms < 1.
    void validate() const;
  };

  /**
   * @brief Hexagonal patch of a triangular lattice with a vacancy at the centre.
   *
   * The patch holds every site within `radius` hexagonal shells of the vacancy. The `free_atoms` sites closest to
   * the vacancy are free (ties broken by angle), the rest are fixed.
   */
  [[nodiscard]] LatticeSpec hex_vacancy_lattice(int radius, Index free_atoms, double spacing = 1.0,
                                                MorseParams morse = {});

  /// Sum of Morse energies over free-free and free-fixed pairs; x stacks free-atom coordinates.
  class MorseVacancy final : public Potential {
  public:
    explicit MorseVacancy(LatticeSpec spec);

    [[nodiscard]] std::string name() const override { return "morse-vacancy"; }
    [[nodiscard]] Index dim() const override { return 2 * spec_.free_atoms; }
    [[nodiscard]] double value(VectorCRef x) const override;
    using Potential::gradient;
    using Potential::hvp;
    void gradient(VectorCRef x, VectorRef g) const override;
    void hvp(VectorCRef x, VectorCRef y, VectorRef out) const override;
    void gradient_hvp(VectorCRef x, VectorCRef y, VectorRef g, VectorRef hy) const override;
    [[nodiscard]] Matrix hessian(VectorCRef x) const override;

    [[nodiscard]] const LatticeSpec& spec() const noexcept { return spec_; }

    /// Stacked ideal free-atom sites.
    [[nodiscard]] Vector ideal_configuration() const;

  private:
    LatticeSpec spec_;
  };

  /// 2D Lennard-Jones cluster with sigma = epsilon = 1 (7 atoms by default).
  class LennardJones2D final : public Potential {
  public:
    explicit LennardJones2D(Index atoms = 7) : atoms_(atoms) {}

    [[nodiscard]] std::string name() const override { return "lj7"; }
    [[nodiscard]] Index dim() const override { return 2 * atoms_; }
    [[nodiscard]] double value(VectorCRef x) const override;
    using Potential::gradient;
    using Potential::hvp;
    void gradient(VectorCRef x, VectorRef g) const override;
    void hvp(VectorCRef x, VectorCRef y, VectorRef out) const override;
    void gradient_hvp(VectorCRef x, VectorCRef y, VectorRef g, VectorRef hy) const override;
    [[nodiscard]] Matrix hessian(VectorCRef x) const override;

    /// The two uniform translations.
    [[nodiscard]] std::vector<Vector> zero_mode_basis() const override;

    /// Rigid rotation about the centroid.
    [[nodiscard]] std::vector<Vector> local_zero_modes(VectorCRef x) const override;

    /// Hexagon of spacing 2^(1/6) around a central atom (atom 0 at the centre).
    [[nodiscard]] static Vector hexagon_configuration();

  private:
    Index atoms_;
  };

  // ---------------------------------------------------------------------------------------------------------------
  // Registry.

  /// Names accepted by make_potential.
  [[nodiscard]] std::vector<std::string> potential_names();

  /// One-line description for `potentials info`.
  [[nodiscard]] std::string potential_description(const std::string& name);

  /// Construct a potential by registry name. The morse-vacancy entry uses the default lattice.
  [[nodiscard]] std::unique_ptr<Potential> make_potential(const std::string& name);

}  // namespace scout
