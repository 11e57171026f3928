#include <doctest.h>

#include <cmath>
#include <memory>
#include <numeric>
#include <random>

#include "oracles.hpp"
#include "scout/potentials.hpp"
#include "scout/search.hpp"
#include "scout/spectral.hpp"

using namespace scout;

namespace {

  Vector v2(double a, double b) { return Vector{{a, b}}; }

  struct Case {
    std::unique_ptr<Potential> pot;
    std::function<Vector(std::mt19937_64&)> sample;
  };

  std::vector<Case> all_potentials() {
    std::vector<Case> cases;
    auto box = [](double lo_x, double hi_x, double lo_y, double hi_y) {
      return [=](std::mt19937_64& g) {
        std::uniform_real_distribution<double> ux(lo_x, hi_x), uy(lo_y, hi_y);
        return v2(ux(g), uy(g));
      };
    };
    cases.push_back({std::make_unique<DoubleWellFlat>(), box(-6, 6, -6, 6)});
    cases.push_back({std::make_unique<DoubleWellQuartic>(), box(-2, 2, -2, 2)});
    cases.push_back({std::make_unique<MuellerBrown>(), box(-1.5, 1.0, -0.5, 2.0)});
    cases.push_back({std::make_unique<Challenge2D>(), box(-2, 6, -2, 6)});
    auto mv = std::make_unique<MorseVacancy>(hex_vacancy_lattice(4, 9));
    Vector const ideal = mv->ideal_configuration();
    cases.push_back({std::move(mv), [ideal](std::mt19937_64& g) {
                       std::normal_distribution<double> n(0, 0.05);
                       Vector x = ideal;
                       for (Index i = 0; i < x.size(); ++i) {
                         x[i] += n(g);
                       }
                       return x;
                     }});
    cases.push_back({std::make_unique<LennardJones2D>(), [](std::mt19937_64& g) {
                       std::normal_distribution<double> n(0, 0.1);
                       Vector x = LennardJones2D::hexagon_configuration();
                       for (Index i = 0; i < x.size(); ++i) {
                         x[i] += n(g);
                       }
                       return x;
                     }});
    return cases;
  }

  /// Relabel atoms of a stacked 2D configuration.
  Vector permute_atoms(Vector const& x, std::vector<Index> const& perm) {
    Vector y(x.size());
    for (std::size_t i = 0; i < perm.size(); ++i) {
      y.segment<2>(2 * static_cast<Index>(i)) = x.segment<2>(2 * perm[i]);
    }
    return y;
  }

}  // namespace

TEST_SUITE("potentials") {
  TEST_CASE("double-well-flat: origin is the index-1 saddle") {
    DoubleWellFlat const v;
    CHECK(v.value(v2(0, 0)) == 0.0);
    CHECK(v.gradient(v2(0, 0)).norm() == 0.0);
    Matrix const h = v.hessian(v2(0, 0));
    CHECK(h(0, 0) == doctest::Approx(-2 * 2e-4));
    CHECK(h(1, 1) == doctest::Approx(2 * 1e-3));
    CHECK(h(0, 1) == 0.0);
  }

  TEST_CASE("double-well-flat: minima at x = +-(2C)^(-1/2)") {
    DoubleWellFlat const v;
    double const xm = 1 / std::sqrt(2 * 0.045);
    CHECK(v.minimum_x() == doctest::Approx(xm).epsilon(1e-14));
    CHECK(xm == doctest::Approx(3.3333).epsilon(1e-4));
    for (double s : {-1.0, 1.0}) {
      CHECK(v.gradient(v2(s * xm, 0)).norm() < 1e-18);
      CHECK(oracle::fd_gradient4(v, v2(s * xm, 0)).norm() < 1e-12);
    }
  }

  TEST_CASE("double-well-quartic: minima, Hessian at the saddle, index-1 band") {
    DoubleWellQuartic const v;
    CHECK(v.value(v2(1, 0)) == 0.0);
    CHECK(v.value(v2(-1, 0)) == 0.0);
    Matrix const h = v.hessian(v2(0, 0));
    CHECK(h(0, 0) == doctest::Approx(-4));
    CHECK(h(1, 1) == doctest::Approx(4));
    CHECK(h(0, 1) == 0.0);
    // The x curvature 12x^2 - 4 changes sign at 1/sqrt(3).
    double const b = 1 / std::sqrt(3.0);
    CHECK(in_index1_region(v, v2(b - 1e-6, 0)));
    CHECK_FALSE(in_index1_region(v, v2(b + 1e-6, 0)));
    CHECK(in_index1_region(v, v2(-b + 1e-6, 0.7)));
  }

  TEST_CASE("mueller-brown: tabulated critical values") {
    MuellerBrown const v;
    struct Row {
      double x, y, e;
      int index;
    };
    // Coordinates are rounded to 3 decimals, so refine with an independent Newton solve before comparing.
    for (Row r : {Row{-0.558, 1.442, -146.700, 0}, Row{0.623, 0.028, -108.167, 0}, Row{-0.050, 0.467, -80.768, 0},
                  Row{0.212, 0.293, -72.249, 1}, Row{-0.822, 0.624, -40.665, 1}}) {
      CAPTURE(r.e);
      CHECK(v.value(v2(r.x, r.y)) == doctest::Approx(r.e).epsilon(1e-2 / 150));
      auto const c = oracle::newton_critical(v, v2(r.x, r.y));
      REQUIRE(c);
      CHECK((*c - v2(r.x, r.y)).norm() < 2e-3);
      CHECK(std::abs(v.value(*c) - r.e) < 1e-2);
      CHECK(v.gradient(*c).norm() < 1e-5);
      Vector const ev = oracle::eigenvalues(oracle::fd_hessian(v, *c));
      CHECK((ev[0] < 0) == (r.index == 1));
      CHECK(ev[1] > 0);
    }
  }

  TEST_CASE("challenge-2d: value at the added well and its critical points") {
    Challenge2D const v;
    double const x = 5, y = 5;
    double const v1 = std::pow(x * x + y * y, 2) + x * x - y * y - x + y;
    CHECK(v.value(v2(5, 5)) == doctest::Approx(v1 / 4e3 - 1).epsilon(1e-14));

    // Grid scan for small |grad V| then Newton refinement, all on finite differences.
    std::vector<Vector> found;
    for (double gx = -2; gx <= 6; gx += 0.25) {
      for (double gy = -2; gy <= 6; gy += 0.25) {
        auto c = oracle::newton_critical(v, v2(gx, gy), 60);
        if (!c || c->cwiseAbs().maxCoeff() > 8) {
          continue;
        }
        bool dup = false;
        for (auto const& f : found) {
          dup = dup || (f - *c).norm() < 1e-5;
        }
        if (!dup) {
          found.push_back(*c);
        }
      }
    }
    auto near = [&](Vector const& p, double tol) {
      for (auto const& f : found) {
        if ((f - p).norm() < tol) {
          return f;
        }
      }
      return Vector(Vector::Constant(2, NAN));
    };
    Vector const m2 = near(v2(4.879284, 4.881484), 1e-4);
    Vector const t1 = near(v2(3.723630, 3.752869), 1e-4);
    Vector const m1 = near(v2(0.194023, -0.866524), 1e-4);
    REQUIRE(m2.allFinite());
    REQUIRE(t1.allFinite());
    REQUIRE(m1.allFinite());
    CHECK((m2 - v2(5, 5)).norm() < 0.2);
    CHECK(oracle::eigenvalues(v.hessian(m2))[0] > 0);
    CHECK(oracle::eigenvalues(v.hessian(m1))[0] > 0);
    auto const c = min_two_eigpairs(v, t1);
    REQUIRE(c);
    CHECK(is_index1(*c));
    CHECK(v.value(t1) == doctest::Approx(0.153845).epsilon(1e-5));
  }

  TEST_CASE("morse: two atoms at r0 sit at the well bottom") {
    LatticeSpec spec;
    spec.free_atoms = 2;
    spec.fixed = Eigen::Matrix2Xd(2, 0);
    spec.free_sites = Eigen::Matrix2Xd(2, 2);
    spec.free_sites << 0, 1, 0, 0;
    spec.vacancy_site = Eigen::Vector2d(10, 10);
    spec.morse = MorseParams{1.7, 4.4, 1.0};
    MorseVacancy const v(spec);
    Vector const x = v.ideal_configuration();
    CHECK(v.value(x) == doctest::Approx(-1.7).epsilon(1e-14));
    CHECK(v.gradient(x).norm() < 1e-14);
  }

  TEST_CASE("morse: coincident atoms are rejected") {
    MorseVacancy const v(hex_vacancy_lattice(3, 4));
    Vector x = v.ideal_configuration();
    x.segment<2>(2) = x.segment<2>(0);
    CHECK_THROWS_AS((void)v.value(x), Error);
  }

  TEST_CASE("morse: relaxed vacancy lattice is a minimum") {
    MorseVacancy const v(hex_vacancy_lattice(7, 23));
    CHECK(v.dim() == 46);
    DescentResult const r = gradient_descent(v, v.ideal_configuration(), {1e-3, 1e-7, 200000});
    REQUIRE(r.converged);
    CHECK(v.gradient(r.minimum.position).norm() <= 1e-6);
    CHECK(oracle::eigenvalues(v.hessian(r.minimum.position))[0] > 0);
  }

  TEST_CASE("lj7: hexagon energy, relaxed minimum and translation modes") {
    LennardJones2D const v;
    Vector const hex = LennardJones2D::hexagon_configuration();
    // 12 nearest-neighbour bonds at the pair minimum, plus 6 pairs at sqrt(3) r and 3 at 2 r.
    double const r = std::pow(2.0, 1.0 / 6.0);
    auto lj = [](double d) { return 4 * (std::pow(d, -12) - std::pow(d, -6)); };
    double const expected = 12 * lj(r) + 6 * lj(std::sqrt(3.0) * r) + 3 * lj(2 * r);
    CHECK(v.value(hex) == doctest::Approx(expected).epsilon(1e-14));

    DescentResult const c0 = gradient_descent(v, hex, {1e-3, 1e-7, 200000});
    REQUIRE(c0.converged);
    CHECK(c0.minimum.energy == doctest::Approx(-12.535).epsilon(1e-3 / 12.535));

    auto const modes = v.zero_mode_basis();
    REQUIRE(modes.size() == 2);
    std::mt19937_64 g(3);
    std::normal_distribution<double> n(0, 0.2);
    for (int t = 0; t < 5; ++t) {
      Vector x = hex;
      for (Index i = 0; i < x.size(); ++i) {
        x[i] += n(g);
      }
      for (auto const& m : modes) {
        CHECK(m.norm() == doctest::Approx(1));
        CHECK(v.hvp(x, m).norm() < 1e-9 * (1 + v.hessian(x).norm()));
      }
    }
  }

  TEST_CASE("unknown registry names are rejected") {
    CHECK_THROWS_AS((void)make_potential("no-such"), ConfigError);
    for (auto const& name : potential_names()) {
      CHECK(make_potential(name)->name() == name);
    }
  }
}

TEST_SUITE("properties") {
  TEST_CASE("gradient matches central differences of the energy on 100 random points") {
    std::mt19937_64 g(11);
    for (auto& c : all_potentials()) {
      CAPTURE(c.pot->name());
      double worst = 0;
      for (int t = 0; t < 100; ++t) {
        Vector const x = c.sample(g);
        Vector const ga = c.pot->gradient(x);
        Vector const gf = oracle::fd_gradient(*c.pot, x);
        worst = std::max(worst, (ga - gf).norm() / std::max(ga.norm(), 1e-3));
      }
      CHECK(worst <= 1e-5);
    }
  }

  TEST_CASE("hvp agrees with the dense Hessian, which is symmetric") {
    std::mt19937_64 g(12);
    std::normal_distribution<double> n;
    for (auto& c : all_potentials()) {
      CAPTURE(c.pot->name());
      for (int t = 0; t < 20; ++t) {
        Vector const x = c.sample(g);
        Vector y(x.size());
        for (Index i = 0; i < y.size(); ++i) {
          y[i] = n(g);
        }
        Matrix const h = c.pot->hessian(x);
        Vector const hy = c.pot->hvp(x, y);
        CHECK((hy - h * y).norm() <= 1e-10 * std::max(1.0, (h * y).norm()));
        CHECK((h - h.transpose()).norm() <= 1e-14 * std::max(1.0, h.norm()));
        // Independent second derivatives of the energy.
        Matrix const hf = oracle::fd_hessian(*c.pot, x, 1e-4 * (1 + x.cwiseAbs().maxCoeff()));
        CHECK((h - hf).norm() <= 1e-4 * std::max(1.0, h.norm()));
      }
    }
  }

  TEST_CASE("hvp is linear in the direction and the fused kernel matches") {
    std::mt19937_64 g(13);
    std::normal_distribution<double> n;
    for (auto& c : all_potentials()) {
      CAPTURE(c.pot->name());
      Vector const x = c.sample(g);
      Index const d = x.size();
      Vector y1(d), y2(d);
      for (Index i = 0; i < d; ++i) {
        y1[i] = n(g);
        y2[i] = n(g);
      }
      double const a = 0.7, b = -2.3;
      Vector const lhs = c.pot->hvp(x, a * y1 + b * y2);
      Vector const rhs = a * c.pot->hvp(x, y1) + b * c.pot->hvp(x, y2);
      CHECK((lhs - rhs).norm() <= 1e-12 * std::max(1.0, rhs.norm()));
      Vector gg(d), hy(d);
      c.pot->gradient_hvp(x, y1, gg, hy);
      CHECK((gg - c.pot->gradient(x)).norm() <= 1e-13 * std::max(1.0, gg.norm()));
      CHECK((hy - c.pot->hvp(x, y1)).norm() <= 1e-13 * std::max(1.0, hy.norm()));
    }
  }

  TEST_CASE("pair potentials are invariant under relabelling the free atoms") {
    std::mt19937_64 g(14);
    auto cases = all_potentials();
    for (auto& c : cases) {
      if (c.pot->name() != "lj7" && c.pot->name() != "morse-vacancy") {
        continue;
      }
      CAPTURE(c.pot->name());
      Vector const x = c.sample(g);
      std::vector<Index> perm(static_cast<std::size_t>(x.size() / 2));
      std::iota(perm.begin(), perm.end(), 0);
      std::shuffle(perm.begin(), perm.end(), g);
      double const e = c.pot->value(x);
      CHECK(c.pot->value(permute_atoms(x, perm)) == doctest::Approx(e).epsilon(1e-12));
    }
  }

  TEST_CASE("lj7 is invariant under rigid motions") {
    LennardJones2D const v;
    std::mt19937_64 g(15);
    std::normal_distribution<double> n(0, 0.1);
    std::uniform_real_distribution<double> u(-M_PI, M_PI);
    for (int t = 0; t < 10; ++t) {
      Vector x = LennardJones2D::hexagon_configuration();
      for (Index i = 0; i < x.size(); ++i) {
        x[i] += n(g);
      }
      double const th = u(g);
      Eigen::Matrix2d rot;
      rot << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
      Eigen::Vector2d const shift(n(g) * 30, n(g) * 30);
      Vector y(x.size());
      for (Index a = 0; a < 7; ++a) {
        y.segment<2>(2 * a) = rot * x.segment<2>(2 * a) + shift;
      }
      CHECK(v.value(y) == doctest::Approx(v.value(x)).epsilon(1e-12));
    }
  }
}
