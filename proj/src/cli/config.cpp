#include "scout/cli/config.hpp"

#include <fstream>
#include <set>

namespace scout::cli {

  namespace {

    /// Reads keys from one JSON object and rejects any key it was not asked for.
    class Reader {
    public:
      Reader(json const& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) {
          throw ConfigError(where() + " must be an object");
        }
      }

      template <typename T>
      void get(char const* key, T& out) {
        seen_.insert(key);
        auto it = j_.find(key);
        if (it == j_.end()) {
          return;
        }
        try {
          out = it->template get<T>();
        } catch (json::exception const& e) {
          throw ConfigError(path_ + "." + key + ": " + e.what());
        }
      }

      /// Nested object, or nullptr when absent.
      json const* child(char const* key) {
        seen_.insert(key);
        auto it = j_.find(key);
        return it == j_.end() ? nullptr : &*it;
      }

      [[nodiscard]] std::string sub(char const* key) const { return path_ + "." + key; }

      void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it) {
          if (seen_.count(it.key()) == 0) {
            throw ConfigError("unknown key " + path_ + "." + it.key());
          }
        }
      }

    private:
      [[nodiscard]] std::string where() const { return path_.empty() ? "config" : path_; }

      json const& j_;
      std::string path_;
      std::set<std::string> seen_;
    };

    CutoffMode parse_cutoff(std::string const& s) {
      if (s == "literal-below") {
        return CutoffMode::literal_below;
      }
      if (s == "similarity-above") {
        return CutoffMode::similarity_above;
      }
      throw ConfigError("cutoff_mode must be literal-below or similarity-above, got " + s);
    }

    std::string cutoff_name(CutoffMode m) {
      return m == CutoffMode::literal_below ? "literal-below" : "similarity-above";
    }

    LocalSearchKind parse_kind(std::string const& s) {
      if (s == "single") {
        return LocalSearchKind::single;
      }
      if (s == "particle") {
        return LocalSearchKind::particle;
      }
      throw ConfigError("local_search must be single or particle, got " + s);
    }

    void read_potential(json const& j, std::string const& path, PotentialSpec& p) {
      Reader r(j, path);
      r.get("name", p.name);
      r.get("E", p.E);
      r.get("C", p.C);
      r.get("mu", p.mu);
      r.get("Z", p.Z);
      r.get("lattice_radius", p.lattice_radius);
      r.get("free_atoms", p.free_atoms);
      r.get("spacing", p.spacing);
      r.get("atoms", p.atoms);
      if (json const* m = r.child("morse")) {
        Reader rm(*m, r.sub("morse"));
        rm.get("D", p.morse.D);
        rm.get("a", p.morse.a);
        rm.get("r0", p.morse.r0);
        rm.finish();
      }
      r.finish();
    }

    void read_sspd(json const& j, std::string const& path, SspdConfig& s) {
      Reader r(j, path);
      r.get("delta", s.delta);
      r.get("beta_inv", s.beta_inv);
      r.get("rho_ess", s.rho_ess);
      r.get("m", s.m);
      r.get("N", s.n_particles);
      r.get("K", s.max_iter);
      r.get("resample", s.resample);
      r.finish();
    }

    void read_dimer(Reader& r, DimerConfig& d) {
      r.get("delta", d.delta);
      r.get("K_d", d.max_iter);
      r.get("eps_d", d.eps_d);
    }

    void read_init(json const& j, std::string const& path, InitSpec& in) {
      Reader r(j, path);
      r.get("kind", in.kind);
      r.get("point", in.point);
      r.get("relax", in.relax);
      r.get("stddev", in.stddev);
      r.get("lower", in.lower);
      r.get("upper", in.upper);
      r.get("tangent", in.tangent);
      r.finish();
    }

    void read_pde(json const& j, std::string const& path, PdeSpec& p) {
      Reader r(j, path);
      if (json const* g = r.child("grid")) {
        Reader rg(*g, r.sub("grid"));
        rg.get("x_min", p.grid.x_min);
        rg.get("x_max", p.grid.x_max);
        rg.get("y_min", p.grid.y_min);
        rg.get("y_max", p.grid.y_max);
        rg.get("nx", p.grid.nx);
        rg.get("ny", p.grid.ny);
        rg.finish();
      }
      r.get("beta", p.beta);
      r.get("dt", p.dt);
      r.get("t_end", p.t_end);
      r.get("snapshots", p.snapshots);
      r.get("x0", p.x0);
      r.get("y0", p.y0);
      r.get("sigma0", p.sigma0);
      r.get("fokker_planck", p.fokker_planck);
      r.get("witten", p.witten);
      r.get("hessian_coupling", p.hessian_coupling);
      r.finish();
    }

    void read_bench(json const& j, std::string const& path, BenchSpec& b) {
      Reader r(j, path);
      r.get("free_atoms", b.free_atoms);
      r.get("lattice_radius", b.lattice_radius);
      r.get("iterations", b.iterations);
      r.get("particles", b.particles);
      r.get("repeats", b.repeats);
      r.finish();
    }

    Vector to_eigen(std::vector<double> const& v) {
      return Eigen::Map<Vector const>(v.data(), static_cast<Index>(v.size()));
    }

  }  // namespace

  void RunConfig::validate() const {
    sspd.validate();
    dimer.validate();
    particle.validate();
    if (init.kind != "minimum" && init.kind != "gaussian" && init.kind != "uniform") {
      throw ConfigError("init.kind must be minimum, gaussian or uniform");
    }
    if (init.kind == "uniform" && (init.lower.size() != init.upper.size() || init.lower.empty())) {
      throw ConfigError("uniform initialisation needs lower and upper of equal length");
    }
    if (search_mode != "sspd-ls" && search_mode != "graph") {
      throw ConfigError("search.mode must be sspd-ls or graph");
    }
    if (!(gamma > 0)) {
      throw ConfigError("search.gamma must be positive");
    }
    if (max_minima < 1) {
      throw ConfigError("search.max_minima must be at least 1");
    }
    if (!(identity.energy_rel_tol >= 0)) {
      throw ConfigError("identity.energy_rel_tol must be non-negative");
    }
    pde.grid.validate();
    if (!(pde.beta > 0) || !(pde.t_end >= 0) || pde.dt < 0 || pde.snapshots < 1) {
      throw ConfigError("pde: beta > 0, t_end >= 0, dt >= 0 and snapshots >= 1 required");
    }
    if (bench.free_atoms.empty() || bench.iterations < 1 || bench.particles < 1 || bench.repeats < 1) {
      throw ConfigError("bench needs free_atoms, and positive iterations, particles and repeats");
    }
    if (stop_after < 0) {
      throw ConfigError("search.stop_after must be non-negative");
    }
    if (snapshot_stride < 0) {
      throw ConfigError("snapshot_stride must be non-negative");
    }
  }

  std::vector<std::string> preset_names() {
    return {"double-well", "mueller-brown", "challenge-2d", "vacancy", "lj7", "fokker-planck", "witten"};
  }

  RunConfig preset(std::string const& name) {
    RunConfig c;
    c.preset = name;
    c.dimer.eps_d = 1e-6;
    c.dimer.max_iter = 1000;
    c.particle.sigma = 1.0;
    c.particle.r = 0.9;
    c.particle.cutoff = CutoffMode::similarity_above;

    auto table = [&](double delta, double beta_inv, double rho, long m, Index n) {
      c.sspd.delta = delta;
      c.sspd.beta_inv = beta_inv;
      c.sspd.rho_ess = rho;
      c.sspd.m = m;
      c.sspd.n_particles = n;
      c.sspd.max_iter = 10000;
      c.dimer.delta = delta;
    };

    if (name == "double-well") {
      c.potential.name = "double-well-quartic";
      table(1e-4, 0.1, 0.99, 10, 5000);
      c.sspd.max_iter = 400;
      // The unstable curvature is 4, so a step of 1e-4 would need ~10^5 dimer iterations.
      c.dimer.delta = 1e-2;
      c.init.kind = "uniform";
      c.init.lower = {-2, -2};
      c.init.upper = {2, 2};
      c.init.tangent = {1, 1};
      c.particle.max_particles = 5000;
    } else if (name == "mueller-brown") {
      c.potential.name = "mueller-brown";
      table(1e-3, 0.05, 0.95, 10, 2000);
      c.init.kind = "gaussian";
      c.init.point = {-0.05, 0.467};
      c.init.stddev = 0.1;
      c.particle.max_particles = 2000;
      c.labels = {{-146.700, "C1"}, {-80.768, "C2"}, {-108.167, "C3"}};
    } else if (name == "challenge-2d") {
      c.potential.name = "challenge-2d";
      table(1e-3, 0.1, 0.95, 10, 2000);
      c.sspd.max_iter = 100000;
      c.stop_after = 1;
      // Curvatures near the added well are O(1); the Table-1 step would need ~10^4 dimer iterations.
      c.dimer.delta = 0.5;
      c.dimer.max_iter = 2000;
      c.init.point = {0.194023, -0.866524};
      c.particle.max_particles = 2000;
    } else if (name == "vacancy") {
      c.potential.name = "morse-vacancy";
      table(1e-4, 0.1, 0.99, 100, 2000);
      c.dimer.delta = 2e-3;
      c.dimer.max_iter = 20000;
      c.particle.max_particles = 100;
    } else if (name == "lj7") {
      c.potential.name = "lj7";
      table(1e-4, 0.1, 0.99, 100, 2000);
      c.sspd.max_iter = 2000;
      c.dimer.delta = 3e-3;
      c.dimer.max_iter = 10000;
      c.descent_step = 1e-3;
      c.particle.max_particles = 100;
      // Table-5 saddles differ by as little as 1e-3 in energy.
      c.identity.energy_rel_tol = 1e-6;
      c.identity.position_tol = -1;
      c.search_mode = "graph";
      c.labels = {{-12.535, "C0"}, {-11.501, "C1"}, {-11.477, "C2"}, {-11.403, "C3"}};
    } else if (name == "fokker-planck" || name == "witten") {
      c.potential.name = "double-well-flat";
      c.pde.fokker_planck = name == "fokker-planck";
      c.pde.witten = name == "witten";
    } else {
      throw ConfigError("unknown preset " + name);
    }
    c.particle.dimer = c.dimer;
    return c;
  }

  RunConfig parse_config(json const& doc, RunConfig base) {
    RunConfig c = std::move(base);
    Reader r(doc, "");
    std::string preset_name;
    r.get("preset", preset_name);
    if (!preset_name.empty() && preset_name != c.preset) {
      c = preset(preset_name);
    }
    if (json const* p = r.child("potential")) {
      read_potential(*p, ".potential", c.potential);
    }
    if (json const* s = r.child("sspd")) {
      read_sspd(*s, ".sspd", c.sspd);
    }
    r.get("seed", c.sspd.seed);
    if (json const* d = r.child("dimer")) {
      Reader rd(*d, ".dimer");
      read_dimer(rd, c.dimer);
      rd.finish();
      c.particle.dimer = c.dimer;
    }
    if (json const* pd = r.child("particle_dimer")) {
      Reader rp(*pd, ".particle_dimer");
      rp.get("M", c.particle.max_particles);
      rp.get("sigma", c.particle.sigma);
      rp.get("r", c.particle.r);
      std::string mode = cutoff_name(c.particle.cutoff);
      rp.get("cutoff_mode", mode);
      c.particle.cutoff = parse_cutoff(mode);
      rp.get("freeze_failed", c.particle.freeze_failed);
      rp.get("freeze_converged", c.particle.freeze_converged);
      rp.finish();
    }
    if (json const* s = r.child("search")) {
      Reader rs(*s, ".search");
      std::string kind = to_string(c.local_search);
      rs.get("local_search", kind);
      c.local_search = parse_kind(kind);
      rs.get("mode", c.search_mode);
      rs.get("gamma", c.gamma);
      rs.get("max_minima", c.max_minima);
      rs.get("descent_step", c.descent_step);
      rs.get("descent_max_iter", c.descent_max_iter);
      rs.get("stop_after", c.stop_after);
      rs.get("energy_rel_tol", c.identity.energy_rel_tol);
      rs.get("position_tol", c.identity.position_tol);
      if (json const* l = rs.child("labels")) {
        c.labels.clear();
        for (auto const& [label, energy] : l->items()) {
          if (!energy.is_number()) {
            throw ConfigError(".search.labels." + label + " must be a number");
          }
          c.labels.emplace_back(energy.get<double>(), label);
        }
      }
      rs.finish();
    }
    if (json const* i = r.child("init")) {
      read_init(*i, ".init", c.init);
    }
    if (json const* p = r.child("pde")) {
      read_pde(*p, ".pde", c.pde);
    }
    if (json const* b = r.child("bench")) {
      read_bench(*b, ".bench", c.bench);
    }
    r.get("snapshot_stride", c.snapshot_stride);
    r.get("out", c.out_dir);
    r.get("threads", c.threads);
    r.finish();
    c.validate();
    return c;
  }

  RunConfig load_config_file(std::string const& path, RunConfig base) {
    std::ifstream is(path);
    if (!is) {
      throw ConfigError("cannot open config file " + path);
    }
    json doc;
    try {
      doc = json::parse(is);
    } catch (json::parse_error const& e) {
      throw ConfigError(path + ": " + e.what());
    }
    return parse_config(doc, std::move(base));
  }

  json to_json(RunConfig const& c) {
    json j;
    j["preset"] = c.preset;
    auto const& p = c.potential;
    j["potential"] = {{"name", p.name},
                      {"E", p.E},
                      {"C", p.C},
                      {"mu", p.mu},
                      {"Z", p.Z},
                      {"lattice_radius", p.lattice_radius},
                      {"free_atoms", p.free_atoms},
                      {"spacing", p.spacing},
                      {"atoms", p.atoms},
                      {"morse", {{"D", p.morse.D}, {"a", p.morse.a}, {"r0", p.morse.r0}}}};
    j["sspd"] = {{"delta", c.sspd.delta}, {"beta_inv", c.sspd.beta_inv}, {"rho_ess", c.sspd.rho_ess},
                 {"m", c.sspd.m},         {"N", c.sspd.n_particles},     {"K", c.sspd.max_iter},
                 {"resample", c.sspd.resample}};
    j["seed"] = c.sspd.seed;
    j["dimer"] = {{"delta", c.dimer.delta}, {"K_d", c.dimer.max_iter}, {"eps_d", c.dimer.eps_d}};
    j["particle_dimer"] = {{"M", c.particle.max_particles},
                           {"sigma", c.particle.sigma},
                           {"r", c.particle.r},
                           {"cutoff_mode", cutoff_name(c.particle.cutoff)},
                           {"freeze_failed", c.particle.freeze_failed},
                           {"freeze_converged", c.particle.freeze_converged}};
    json labels = json::object();
    for (auto const& [e, l] : c.labels) {
      labels[l] = e;
    }
    j["search"] = {{"local_search", to_string(c.local_search)},
                   {"mode", c.search_mode},
                   {"gamma", c.gamma},
                   {"max_minima", c.max_minima},
                   {"descent_step", c.descent_step},
                   {"descent_max_iter", c.descent_max_iter},
                   {"stop_after", c.stop_after},
                   {"energy_rel_tol", c.identity.energy_rel_tol},
                   {"position_tol", c.identity.position_tol},
                   {"labels", labels}};
    j["init"] = {{"kind", c.init.kind},     {"point", c.init.point}, {"relax", c.init.relax},
                 {"stddev", c.init.stddev}, {"lower", c.init.lower}, {"upper", c.init.upper},
                 {"tangent", c.init.tangent}};
    auto const& g = c.pde.grid;
    j["pde"] = {{"grid", {{"x_min", g.x_min}, {"x_max", g.x_max}, {"y_min", g.y_min}, {"y_max", g.y_max},
                          {"nx", g.nx}, {"ny", g.ny}}},
                {"beta", c.pde.beta},
                {"dt", c.pde.dt},
                {"t_end", c.pde.t_end},
                {"snapshots", c.pde.snapshots},
                {"x0", c.pde.x0},
                {"y0", c.pde.y0},
                {"sigma0", c.pde.sigma0},
                {"fokker_planck", c.pde.fokker_planck},
                {"witten", c.pde.witten},
                {"hessian_coupling", c.pde.hessian_coupling}};
    j["bench"] = {{"free_atoms", c.bench.free_atoms},
                  {"lattice_radius", c.bench.lattice_radius},
                  {"iterations", c.bench.iterations},
                  {"particles", c.bench.particles},
                  {"repeats", c.bench.repeats}};
    j["snapshot_stride"] = c.snapshot_stride;
    j["out"] = c.out_dir;
    j["threads"] = c.threads;
    return j;
  }

  std::unique_ptr<Potential> build_potential(PotentialSpec const& p) {
    if (p.name == "double-well-flat") {
      return std::make_unique<DoubleWellFlat>(p.E, p.C, p.mu);
    }
    if (p.name == "challenge-2d") {
      return std::make_unique<Challenge2D>(p.Z);
    }
    if (p.name == "morse-vacancy") {
      return std::make_unique<MorseVacancy>(hex_vacancy_lattice(p.lattice_radius, p.free_atoms, p.spacing, p.morse));
    }
    if (p.name == "lj7") {
      return std::make_unique<LennardJones2D>(p.atoms);
    }
    return make_potential(p.name);
  }

  Vector default_start(Potential const& pot) {
    if (auto const* lj = dynamic_cast<LennardJones2D const*>(&pot); lj != nullptr && lj->dim() == 14) {
      return LennardJones2D::hexagon_configuration();
    }
    if (auto const* mv = dynamic_cast<MorseVacancy const*>(&pot)) {
      return mv->ideal_configuration();
    }
    if (auto const* dw = dynamic_cast<DoubleWellFlat const*>(&pot)) {
      return Vector{{-dw->minimum_x(), 0.0}};
    }
    if (pot.name() == "double-well-quartic") {
      return Vector{{-1.0, 0.0}};
    }
    if (pot.name() == "mueller-brown") {
      return Vector{{-0.05, 0.467}};
    }
    if (pot.name() == "challenge-2d") {
      return Vector{{0.194023, -0.866524}};
    }
    throw ConfigError("no default starting point for potential " + pot.name() + "; set init.point");
  }

  GraphConfig graph_config(RunConfig const& c) {
    GraphConfig g;
    g.search.sspd = c.sspd;
    g.search.dimer = c.dimer;
    g.search.particle = c.particle;
    g.search.particle.dimer = c.dimer;
    g.search.kind = c.local_search;
    g.search.identity = c.identity;
    g.descent.step = c.descent_step > 0 ? c.descent_step : c.dimer.delta;
    g.descent.tol = c.dimer.eps_d;
    g.descent.max_iter = c.descent_max_iter;
    g.gamma = c.gamma;
    if (c.init.kind == "gaussian") {
      g.init_stddev = c.init.stddev;
    }
    g.max_minima = c.max_minima;
    g.labels = c.labels;
    return g;
  }

  Ensemble build_ensemble(Potential const& pot, RunConfig const& c) {
    Index const d = pot.dim();
    std::optional<Vector> tangent;
    if (!c.init.tangent.empty()) {
      if (static_cast<Index>(c.init.tangent.size()) != d) {
        throw ConfigError("init.tangent has the wrong dimension");
      }
      tangent = to_eigen(c.init.tangent);
    }
    Vector point = c.init.point.empty() ? default_start(pot) : to_eigen(c.init.point);
    if (point.size() != d) {
      throw ConfigError("init.point has the wrong dimension");
    }
    if (c.init.kind == "uniform") {
      if (static_cast<Index>(c.init.lower.size()) != d) {
        throw ConfigError("init.lower/upper have the wrong dimension");
      }
      return ensemble_uniform(to_eigen(c.init.lower), to_eigen(c.init.upper), c.sspd, tangent);
    }
    if (c.init.kind == "gaussian") {
      return ensemble_gaussian(point, c.init.stddev, c.sspd, tangent);
    }
    if (c.init.relax) {
      GraphConfig const g = graph_config(c);
      DescentResult r = gradient_descent(pot, point, g.descent);
      if (!r.converged) {
        throw Error("initial point does not relax to a minimum: " + r.failure);
      }
      point = r.minimum.position;
    }
    return ensemble_at_point(point, c.sspd, tangent);
  }

}  // namespace scout::cli
