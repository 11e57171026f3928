#include "scout/cli/commands.hpp"

#include <chrono>
#include <cstdio>
#include <limits>
#include <sstream>

#include "scout/cli/io.hpp"
#include "scout/parallel.hpp"

namespace scout::cli {

  namespace {

    std::string join(std::string const& dir, std::string const& file) { return dir + "/" + file; }

    std::string numbered(char const* stem, long k, char const* ext) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%s_%07ld.%s", stem, k, ext);
      return buf;
    }

    void apply_threads(RunConfig const& cfg) {
      if (cfg.threads > 0) {
        set_num_threads(cfg.threads);
      }
    }

  }  // namespace

  SspdResult cmd_sspd(RunConfig const& cfg) {
    cfg.validate();
    apply_threads(cfg);
    auto const pot = build_potential(cfg.potential);
    ensure_directory(cfg.out_dir);
    write_json(join(cfg.out_dir, "manifest.json"), manifest(cfg, "sspd"));

    Ensemble init = build_ensemble(*pot, cfg);
    write_ensemble_csv(join(cfg.out_dir, numbered("ensemble", 0, "csv")), init);

    SspdHook hook;
    if (cfg.snapshot_stride > 0) {
      hook = [&](Ensemble const& ens, long k) {
        if (k > 0 && k % cfg.snapshot_stride == 0) {
          write_ensemble_csv(join(cfg.out_dir, numbered("ensemble", k, "csv")), ens);
        }
        return HookAction::proceed;
      };
    }
    SspdResult res = run_sspd(*pot, cfg.sspd, std::move(init), hook);
    if (res.iterations > 0) {
      write_ensemble_csv(join(cfg.out_dir, numbered("ensemble", res.iterations, "csv")), res.final);
    }
    write_diagnostics_csv(join(cfg.out_dir, "diagnostics.csv"), res.diagnostics);
    return res;
  }

  SearchOutput cmd_search(RunConfig const& cfg) {
    cfg.validate();
    apply_threads(cfg);
    auto const pot = build_potential(cfg.potential);
    ensure_directory(cfg.out_dir);
    write_json(join(cfg.out_dir, "manifest.json"), manifest(cfg, "search"));

    GraphConfig gc = graph_config(cfg);
    SearchOutput out;
    if (cfg.search_mode == "graph") {
      Vector seed = cfg.init.point.empty() ? default_start(*pot)
                                           : Vector(Eigen::Map<Vector const>(cfg.init.point.data(),
                                                                             static_cast<Index>(cfg.init.point.size())));
      out.graph = build_transition_graph(*pot, {seed}, gc);
      for (auto const& e : out.graph.edges) {
        out.saddles.push_back(e.saddle);
      }
      for (auto const& s : out.graph.unconnected) {
        out.saddles.push_back(s);
      }
    } else {
      if (cfg.stop_after > 0) {
        Index const want = cfg.stop_after;
        gc.search.stop_when = [want](std::vector<SaddleRecord> const& found) {
          return static_cast<Index>(found.size()) >= want;
        };
      }
      out.run = sspd_ls(*pot, gc.search, build_ensemble(*pot, cfg));
      out.graph = connect_saddles(*pot, out.run->saddles, gc);
      out.graph.complete = !out.run->stopped_early || cfg.stop_after > 0;
      for (auto const& e : out.graph.edges) {
        out.saddles.push_back(e.saddle);
      }
      for (auto const& s : out.graph.unconnected) {
        out.saddles.push_back(s);
      }
      write_diagnostics_csv(join(cfg.out_dir, "diagnostics.csv"), out.run->diagnostics);
    }

    write_json(join(cfg.out_dir, "saddles.json"), saddles_json(out.saddles));
    write_json(join(cfg.out_dir, "minima.json"), minima_json(out.graph.nodes));
    write_json(join(cfg.out_dir, "graph.json"), graph_json(out.graph));
    write_text(join(cfg.out_dir, "graph.dot"), graph_dot(out.graph));
    return out;
  }

  double pde_time_step(PotentialOnGrid const& sampled, RunConfig const& cfg) {
    double const bound = stable_dt(sampled, cfg.pde.beta);
    if (cfg.pde.dt == 0) {
      return 0.95 * bound;
    }
    if (cfg.pde.dt > bound) {
      std::ostringstream os;
      os << "pde.dt = " << cfg.pde.dt << " exceeds the explicit stability bound " << bound;
      throw ConfigError(os.str());
    }
    return cfg.pde.dt;
  }

  PdeOutput cmd_pde(RunConfig const& cfg) {
    cfg.validate();
    apply_threads(cfg);
    auto const pot = build_potential(cfg.potential);
    PdeOutput out;
    out.sampled = sample_potential(*pot, cfg.pde.grid);
    out.dt = pde_time_step(out.sampled, cfg);

    PdeOptions opts;
    opts.dt = out.dt;
    opts.t_end = cfg.pde.t_end;
    opts.hessian_coupling = cfg.pde.hessian_coupling;
    opts.snapshot_times = cfg.pde.t_end > 0 ? geometric_times(1e-3 * cfg.pde.t_end, cfg.pde.t_end, cfg.pde.snapshots)
                                            : std::vector<double>{0.0};

    ensure_directory(cfg.out_dir);
    json m = manifest(cfg, "pde");
    auto const& g = cfg.pde.grid;
    m["grid"] = {{"x_min", g.x_min}, {"x_max", g.x_max}, {"y_min", g.y_min},
                 {"y_max", g.y_max}, {"nx", g.nx},       {"ny", g.ny}};
    m["dt"] = out.dt;
    m["stability_bound"] = stable_dt(out.sampled, cfg.pde.beta);

    auto record = [&](char const* stem, PdeRun const& run) {
      json snaps = json::array();
      for (std::size_t i = 0; i < run.snapshots.size(); ++i) {
        std::string const file = numbered(stem, static_cast<long>(i), "csv");
        write_field_csv(join(cfg.out_dir, file), run.snapshots[i].field);
        snaps.push_back({{"t", run.snapshots[i].t}, {"file", file}});
      }
      m[stem] = {{"snapshots", snaps},
                 {"steps", run.steps},
                 {"initial_mass", run.initial_mass},
                 {"final_mass", run.final_mass},
                 {"min_value", run.min_value}};
    };

    if (cfg.pde.fokker_planck) {
      GridField const rho0 = gaussian_bump(g, cfg.pde.x0, cfg.pde.y0, cfg.pde.sigma0, 1);
      out.fokker_planck = solve_fp(out.sampled, cfg.pde.beta, rho0, opts);
      record("fp", *out.fokker_planck);
    }
    if (cfg.pde.witten) {
      GridField const phi0 = gaussian_bump(g, cfg.pde.x0, cfg.pde.y0, cfg.pde.sigma0, 2);
      out.witten = solve_witten(out.sampled, cfg.pde.beta, phi0, opts);
      record("witten", *out.witten);
    }
    write_json(join(cfg.out_dir, "manifest.json"), m);
    return out;
  }

  std::vector<BenchRow> cmd_bench(RunConfig const& cfg) {
    cfg.validate();
    apply_threads(cfg);
    std::vector<BenchRow> rows;
    SspdConfig sc = cfg.sspd;
    sc.n_particles = cfg.bench.particles;
    sc.max_iter = cfg.bench.iterations;

    for (Index free : cfg.bench.free_atoms) {
      MorseVacancy const pot(
          hex_vacancy_lattice(cfg.bench.lattice_radius, free, cfg.potential.spacing, cfg.potential.morse));
      Ensemble const init = ensemble_at_point(pot.ideal_configuration(), sc);
      double best = std::numeric_limits<double>::infinity();
      for (int r = 0; r < cfg.bench.repeats; ++r) {
        auto const t0 = std::chrono::steady_clock::now();
        SspdResult const res = run_sspd(pot, sc, init);
        auto const t1 = std::chrono::steady_clock::now();
        (void)res;
        best = std::min(best, std::chrono::duration<double>(t1 - t0).count());
      }
      rows.push_back({free, pot.dim(), best, best / static_cast<double>(pot.dim())});
    }

    ensure_directory(cfg.out_dir);
    write_json(join(cfg.out_dir, "manifest.json"), manifest(cfg, "bench"));
    std::ostringstream os;
    os << "free_atoms,dimension,seconds,seconds_per_dimension\n";
    for (auto const& r : rows) {
      os << r.free_atoms << ',' << r.dim << ',' << format_number(r.seconds) << ','
         << format_number(r.seconds_per_dim) << '\n';
    }
    write_text(join(cfg.out_dir, "bench.csv"), os.str());
    return rows;
  }

  std::string potentials_list() {
    std::string s;
    for (auto const& n : potential_names()) {
      s += n + "\n";
    }
    return s;
  }

  json potential_info(std::string const& name) {
    auto const pot = make_potential(name);
    return {{"name", pot->name()}, {"dimension", pot->dim()}, {"description", potential_description(name)}};
  }

}  // namespace scout::cli
