#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>

#include "oracles.hpp"
#include "scout/potentials.hpp"
#include "scout/search.hpp"
#include "scout/spectral.hpp"

using namespace scout;

namespace {

  Vector v2(double a, double b) { return Vector{{a, b}}; }

  SaddleRecord record(Vector pos, double e) {
    SaddleRecord r;
    r.position = std::move(pos);
    r.energy = e;
    return r;
  }

  Ensemble ensemble_of(Matrix x, Vector w) {
    Ensemble e;
    e.X = std::move(x);
    e.Y = Matrix::Zero(e.X.rows(), e.X.cols());
    for (Index n = 0; n < e.X.cols(); ++n) {
      e.Y(0, n) = w[n];
    }
    e.refresh_weights();
    return e;
  }

  /// (x^2 - 1)^2 + 2 y^2 + 0.3 x: two minima at different energies and one saddle between them.
  class TiltedWell final : public Potential {
  public:
    [[nodiscard]] std::string name() const override { return "tilted-well"; }
    [[nodiscard]] Index dim() const override { return 2; }
    [[nodiscard]] double value(VectorCRef x) const override {
      double const a = x[0] * x[0] - 1;
      return a * a + 2 * x[1] * x[1] + 0.3 * x[0];
    }
    using Potential::gradient;
    using Potential::hvp;
    void gradient(VectorCRef x, VectorRef g) const override {
      g[0] = 4 * x[0] * (x[0] * x[0] - 1) + 0.3;
      g[1] = 4 * x[1];
    }
    void hvp(VectorCRef x, VectorCRef y, VectorRef out) const override {
      out[0] = (12 * x[0] * x[0] - 4) * y[0];
      out[1] = 4 * y[1];
    }
    [[nodiscard]] Matrix hessian(VectorCRef x) const override {
      Matrix h = Matrix::Zero(2, 2);
      h(0, 0) = 12 * x[0] * x[0] - 4;
      h(1, 1) = 4;
      return h;
    }
  };

  GraphConfig quartic_graph(std::uint64_t seed) {
    GraphConfig g;
    g.search.sspd.delta = 1e-3;
    g.search.sspd.beta_inv = 0.5;
    g.search.sspd.rho_ess = 0.95;
    g.search.sspd.m = 10;
    g.search.sspd.n_particles = 200;
    g.search.sspd.max_iter = 300;
    g.search.sspd.seed = seed;
    g.search.dimer.delta = 1e-2;
    g.search.dimer.max_iter = 2000;
    g.descent = {1e-2, 1e-6, 100000};
    return g;
  }

}  // namespace

TEST_SUITE("search") {
  TEST_CASE("saddle identity examples") {
    SaddleRecord const a = record(v2(0.212, 0.293), -72.249);
    CHECK(saddle_identity(a, a));
    SaddleRecord const b = record(v2(-0.822, 0.624), -40.665);
    CHECK_FALSE(saddle_identity(a, b));

    // Same LJ7 configuration with atoms relabelled: positions differ, energies agree.
    LennardJones2D const lj;
    Vector x = LennardJones2D::hexagon_configuration();
    x[2] += 0.05;
    Vector y = x;
    y.segment<2>(2).swap(y.segment<2>(4));
    SaddleRecord const p = record(x, lj.value(x));
    SaddleRecord const q = record(y, lj.value(y));
    CHECK((x - y).norm() > 0.5);
    CHECK(saddle_identity(p, q));

    IdentityRule strict;
    strict.energy_rel_tol = 0;
    CHECK(saddle_identity(record(v2(0, 0), 1.0), record(v2(0, 5e-5), 2.0), strict));
    strict.position_tol = -1;
    CHECK_FALSE(saddle_identity(record(v2(0, 0), 1.0), record(v2(0, 5e-5), 2.0), strict));
  }

  TEST_CASE("index-1 members and start selection") {
    DoubleWellQuartic const v;
    Matrix at_min(2, 3);
    at_min.colwise() = v2(1, 0);
    CHECK(index1_members(ensemble_of(at_min, Vector::Ones(3)), v).empty());

    Matrix two(2, 2);
    two << 0, 1, 0, 0;
    CHECK(index1_members(ensemble_of(two, Vector::Ones(2)), v) == std::vector<Index>{0});

    Matrix pts(2, 5);
    pts << 0.1, 1.0, 0.2, 0.3, -0.1, 0, 0, 0, 0, 0;
    Ensemble const e = ensemble_of(pts, Vector{{2.0, 9.0, 5.0, 2.0, 1.0}});
    CHECK(select_starts(e, v, 1) == std::vector<Index>{2});
    CHECK(select_starts(e, v, 10) == std::vector<Index>{2, 0, 3, 4});
    // Tie between particles 0 and 3 keeps ascending index order.
    CHECK(select_starts(e, v, 2) == std::vector<Index>{2, 0});
  }

  TEST_CASE("gradient descent examples") {
    DoubleWellQuartic const v;
    DescentResult const at = gradient_descent(v, v2(1, 0), {1e-2, 1e-6, 1000});
    CHECK(at.converged);
    CHECK(at.iterations == 0);
    CHECK(at.minimum.position == v2(1, 0));

    DescentResult const r = gradient_descent(v, v2(0.5, 0.3), {1e-2, 1e-8, 100000});
    REQUIRE(r.converged);
    CHECK((r.minimum.position - v2(1, 0)).norm() < 1e-8);
    CHECK(r.minimum.lambda1 > 0);

    DescentResult const budget = gradient_descent(v, v2(0.5, 0.3), {1e-5, 1e-12, 10});
    CHECK_FALSE(budget.converged);
    CHECK_FALSE(budget.failure.empty());

    // A critical point that is not a minimum fails the certificate check.
    DescentResult const saddle = gradient_descent(v, v2(0, 0), {1e-2, 1e-6, 100});
    CHECK_FALSE(saddle.converged);

    // A step far beyond 2 / curvature diverges; halving recovers or reports divergence, never a false minimum.
    DescentResult const big = gradient_descent(v, v2(0.5, 0.3), {10.0, 1e-8, 100000});
    if (big.converged) {
      CHECK(std::abs(std::abs(big.minimum.position[0]) - 1) < 1e-6);
    } else {
      CHECK_FALSE(big.failure.empty());
    }

    LennardJones2D const lj;
    Vector x = LennardJones2D::hexagon_configuration();
    std::mt19937_64 g(51);
    std::normal_distribution<double> n(0, 0.03);
    for (Index i = 0; i < x.size(); ++i) {
      x[i] += n(g);
    }
    DescentResult const c0 = gradient_descent(lj, x, {1e-3, 1e-6, 400000});
    REQUIRE(c0.converged);
    CHECK(std::abs(c0.minimum.energy + 12.535) < 1e-3);
  }

  TEST_CASE("connect_minima examples") {
    DoubleWellQuartic const v;
    SaddleRecord s;
    s.position = v2(0, 0);
    s.certificate = *min_two_eigpairs(v, s.position);
    auto const [a, b] = connect_minima(v, s, 0.01, {1e-2, 1e-8, 100000});
    REQUIRE(a.converged);
    REQUIRE(b.converged);
    std::vector<double> xs{a.minimum.position[0], b.minimum.position[0]};
    std::sort(xs.begin(), xs.end());
    CHECK(xs[0] == doctest::Approx(-1).epsilon(1e-7));
    CHECK(xs[1] == doctest::Approx(1).epsilon(1e-7));

    MuellerBrown const mb;
    auto const t2 = oracle::newton_critical(mb, v2(0.212, 0.293));
    REQUIRE(t2);
    SaddleRecord m;
    m.position = *t2;
    m.certificate = *min_two_eigpairs(mb, m.position);
    auto const [c, d] = connect_minima(mb, m, 0.01, {1e-4, 1e-6, 400000});
    REQUIRE(c.converged);
    REQUIRE(d.converged);
    std::vector<double> es{c.minimum.energy, d.minimum.energy};
    std::sort(es.begin(), es.end());
    CHECK(es[0] == doctest::Approx(-108.167).epsilon(1e-2 / 108));
    CHECK(es[1] == doctest::Approx(-80.768).epsilon(1e-2 / 80));
  }

  TEST_CASE("sspd_ls on the quartic double well finds the origin") {
    DoubleWellQuartic const v;
    SearchConfig c = quartic_graph(3).search;
    SspdLsResult const r = sspd_ls(v, c, ensemble_at_point(v2(-1, 0), c.sspd));
    REQUIRE(r.saddles.size() == 1);
    CHECK(r.saddles[0].position.norm() < 1e-6);
    CHECK(r.first_success);
    CHECK(r.local_searches >= 1);
    CHECK(r.saddles[0].found_at_iteration % c.sspd.m == 0);
  }

  TEST_CASE("stop_when ends the run after a local-search round") {
    DoubleWellQuartic const v;
    SearchConfig c = quartic_graph(3).search;
    c.stop_when = [](std::vector<SaddleRecord> const& s) { return !s.empty(); };
    SspdLsResult const r = sspd_ls(v, c, ensemble_at_point(v2(-1, 0), c.sspd));
    CHECK(r.stopped_early);
    REQUIRE(r.first_success);
    CHECK(r.iterations == *r.first_success);
  }

  TEST_CASE("transition graph of a tilted double well") {
    TiltedWell const v;
    TransitionGraph const g = build_transition_graph(v, {v2(-0.9, 0.1)}, quartic_graph(5));
    CHECK(g.complete);
    CHECK(g.explored == 2);
    CHECK(g.nodes.size() == 2);
    REQUIRE(g.edges.size() == 1);
    CHECK(g.edges[0].from != g.edges[0].to);
    CHECK(g.find(g.edges[0].from) != nullptr);
    CHECK(g.find(g.edges[0].to) != nullptr);
    CHECK(v.gradient(g.edges[0].saddle.position).norm() < 1e-6);
  }

  TEST_CASE("symmetric minima share an energy and collapse to one node with a self-loop") {
    DoubleWellQuartic const v;
    TransitionGraph const g = build_transition_graph(v, {v2(-0.9, 0.1)}, quartic_graph(5));
    CHECK(g.nodes.size() == 1);
    REQUIRE(g.edges.size() == 1);
    CHECK(g.edges[0].from == g.edges[0].to);
    CHECK(g.edges[0].saddle.position.norm() < 1e-6);
  }

  TEST_CASE("transition graph of Mueller-Brown from the shallow minimum") {
    MuellerBrown const v;
    GraphConfig g;
    g.search.sspd.delta = 1e-3;
    g.search.sspd.beta_inv = 0.05;
    g.search.sspd.rho_ess = 0.95;
    g.search.sspd.m = 10;
    g.search.sspd.n_particles = 2000;
    g.search.sspd.max_iter = 20;
    g.search.sspd.seed = 1;
    g.search.dimer.delta = 1e-3;
    g.search.particle.dimer = g.search.dimer;
    g.search.particle.max_particles = 2000;
    g.search.particle.cutoff = CutoffMode::similarity_above;
    g.search.kind = LocalSearchKind::particle;
    g.descent = {1e-4, 1e-6, 400000};
    g.init_stddev = 0.1;
    g.labels = {{-146.700, "C1"}, {-80.768, "C2"}, {-108.167, "C3"}};
    TransitionGraph const t = build_transition_graph(v, {v2(-0.05, 0.467)}, g);
    REQUIRE(t.nodes.size() == 3);
    for (char const* l : {"C1", "C2", "C3"}) {
      CHECK(t.find(l) != nullptr);
    }
    std::map<std::string, std::pair<std::string, std::string>> by_energy;
    for (auto const& e : t.edges) {
      auto ends = std::minmax(e.from, e.to);
      if (std::abs(e.saddle.energy + 40.665) < 1e-2) {
        by_energy["T1"] = ends;
      }
      if (std::abs(e.saddle.energy + 72.249) < 1e-2) {
        by_energy["T2"] = ends;
      }
    }
    REQUIRE(by_energy.count("T1") == 1);
    REQUIRE(by_energy.count("T2") == 1);
    CHECK(by_energy["T1"] == std::make_pair(std::string("C1"), std::string("C2")));
    CHECK(by_energy["T2"] == std::make_pair(std::string("C2"), std::string("C3")));
  }

  TEST_CASE("minimum budget marks the graph incomplete") {
    TiltedWell const v;
    GraphConfig g = quartic_graph(5);
    g.max_minima = 1;
    TransitionGraph const t = build_transition_graph(v, {v2(-0.9, 0.1)}, g);
    CHECK_FALSE(t.complete);
    CHECK(t.explored == 1);
    CHECK_THROWS_AS((void)build_transition_graph(v, {}, g), ConfigError);
  }
}

TEST_SUITE("properties") {
  TEST_CASE("saddle identity is reflexive and symmetric; dedup ignores insertion order") {
    std::mt19937_64 g(52);
    std::vector<double> centres{-12.0, -10.9, -10.5, -3.0, 0.0, 7.25};
    std::vector<SaddleRecord> recs;
    std::normal_distribution<double> jitter(0, 1e-7);
    for (double c : centres) {
      for (int k = 0; k < 4; ++k) {
        recs.push_back(record(Vector::Random(4) * 10, c + jitter(g)));
      }
    }
    IdentityRule const rule;
    for (auto const& a : recs) {
      CHECK(saddle_identity(a, a, rule));
      for (auto const& b : recs) {
        CHECK(saddle_identity(a, b, rule) == saddle_identity(b, a, rule));
      }
    }
    auto signature = [&](std::vector<SaddleRecord> const& order) {
      std::vector<SaddleRecord> set;
      for (auto const& r : order) {
        (void)insert_unique(set, r, rule);
      }
      std::vector<long> keys;
      for (auto const& s : set) {
        keys.push_back(std::lround(s.energy * 100));
      }
      std::sort(keys.begin(), keys.end());
      return keys;
    };
    auto const base = signature(recs);
    CHECK(base.size() == centres.size());
    for (int t = 0; t < 20; ++t) {
      std::shuffle(recs.begin(), recs.end(), g);
      CHECK(signature(recs) == base);
    }
  }

  TEST_CASE("connect_minima endpoints do not depend on the sign of v1") {
    MuellerBrown const mb;
    for (Vector guess : {v2(0.212, 0.293), v2(-0.822, 0.624)}) {
      auto const t = oracle::newton_critical(mb, guess);
      REQUIRE(t);
      SaddleRecord s;
      s.position = *t;
      s.certificate = *min_two_eigpairs(mb, s.position);
      SaddleRecord f = s;
      f.certificate.v1 = -f.certificate.v1;
      DescentOptions const o{1e-4, 1e-6, 400000};
      auto const [a, b] = connect_minima(mb, s, 0.01, o);
      auto const [c, d] = connect_minima(mb, f, 0.01, o);
      REQUIRE(a.converged);
      REQUIRE(b.converged);
      CHECK((a.minimum.position - d.minimum.position).norm() < 1e-5);
      CHECK((b.minimum.position - c.minimum.position).norm() < 1e-5);
    }
  }

  TEST_CASE("found saddles re-validate independently") {
    MuellerBrown const v;
    SearchConfig c;
    c.sspd.delta = 1e-3;
    c.sspd.beta_inv = 0.05;
    c.sspd.m = 10;
    c.sspd.n_particles = 500;
    c.sspd.max_iter = 30;
    c.sspd.seed = 2;
    c.dimer.delta = 1e-3;
    c.particle.dimer = c.dimer;
    c.particle.max_particles = 500;
    c.particle.cutoff = CutoffMode::similarity_above;
    c.kind = LocalSearchKind::particle;
    SspdLsResult const r = sspd_ls(v, c, ensemble_gaussian(v2(-0.05, 0.467), 0.1, c.sspd));
    REQUIRE_FALSE(r.saddles.empty());
    for (auto const& s : r.saddles) {
      CHECK(oracle::fd_gradient4(v, s.position, 1e-4).norm() < 1e-5);
      CHECK(v.gradient(s.position).norm() < c.dimer.eps_d);
      Vector const ev = oracle::eigenvalues(oracle::fd_hessian(v, s.position, 1e-5));
      CHECK(ev[0] < 0);
      CHECK(ev[1] > 0);
      CHECK(s.energy == v.value(s.position));
    }
  }

  TEST_CASE("double-well transition graph is the same for two seeds") {
    TiltedWell const v;
    auto shape = [&](std::uint64_t seed) {
      TransitionGraph const t = build_transition_graph(v, {v2(-0.9, 0.1)}, quartic_graph(seed));
      std::vector<long> nodes;
      for (auto const& n : t.nodes) {
        nodes.push_back(std::lround(n.energy * 1e4));
      }
      std::sort(nodes.begin(), nodes.end());
      std::vector<long> edges;
      for (auto const& e : t.edges) {
        edges.push_back(std::lround(e.saddle.energy * 1e4));
      }
      std::sort(edges.begin(), edges.end());
      return std::make_pair(nodes, edges);
    };
    CHECK(shape(5) == shape(6));
  }
}
