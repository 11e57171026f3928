#include "scout/search.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>

#include "scout/parallel.hpp"

namespace scout {

  bool same_energy(double ea, double eb, IdentityRule const& rule) {
    return std::abs(ea - eb) <= rule.energy_rel_tol * (1 + std::max(std::abs(ea), std::abs(eb)));
  }

  bool saddle_identity(SaddleRecord const& a, SaddleRecord const& b, IdentityRule const& rule) {
    if (same_energy(a.energy, b.energy, rule)) {
      return true;
    }
    return rule.position_tol >= 0 && a.position.size() == b.position.size()
           && (a.position - b.position).norm() <= rule.position_tol;
  }

  std::vector<Index> index1_members(Ensemble const& ens, Potential const& pot, SpectralOptions const& opts) {
    std::vector<char> inside(static_cast<std::size_t>(ens.size()), 0);
    parallel_for(ens.size(), [&](Index n) {
      inside[static_cast<std::size_t>(n)] = in_index1_region(pot, ens.X.col(n), opts) ? 1 : 0;
    });
    std::vector<Index> out;
    for (Index n = 0; n < ens.size(); ++n) {
      if (inside[static_cast<std::size_t>(n)] != 0) {
        out.push_back(n);
      }
    }
    return out;
  }

  std::vector<Index> select_starts(Ensemble const& ens, Potential const& pot, Index max_count,
                                   SpectralOptions const& opts) {
    std::vector<Index> members = index1_members(ens, pot, opts);
    std::stable_sort(members.begin(), members.end(), [&](Index a, Index b) { return ens.w[a] > ens.w[b]; });
    if (static_cast<Index>(members.size()) > max_count) {
      members.resize(static_cast<std::size_t>(std::max<Index>(max_count, 0)));
    }
    return members;
  }

  DescentResult gradient_descent(Potential const& pot, VectorCRef x0, DescentOptions const& opts) {
    DescentResult res;
    Vector x = x0;
    Vector g(pot.dim());
    double step = opts.step;
    double energy = pot.value(x);
    int increases = 0;
    int halvings = 0;

    auto fail = [&](std::string why) {
      res.failure = std::move(why);
      res.minimum.position = x;
      res.minimum.energy = energy;
      res.minimum.gradient_norm = g.norm();
      return res;
    };

    for (long k = 0;; ++k) {
      pot.gradient(x, g);
      res.iterations = k;
      if (!g.allFinite() || !std::isfinite(energy)) {
        return fail("non-finite state during descent");
      }
      if (g.norm() <= opts.tol) {
        break;
      }
      if (k == opts.max_iter) {
        return fail("descent iteration budget exhausted");
      }
      x -= step * g;
      double const next = pot.value(x);
      increases = next > energy ? increases + 1 : 0;
      energy = next;
      if (increases == 10) {
        if (++halvings == 8) {
          return fail("descent diverged after repeated step halving");
        }
        step *= 0.5;
        increases = 0;
      }
    }

    res.minimum.position = x;
    res.minimum.energy = energy;
    res.minimum.gradient_norm = g.norm();
    auto const cert = min_two_eigpairs(pot, x);
    if (!cert) {
      return fail("eigensolver failed at the descent end point");
    }
    res.minimum.lambda1 = cert->lambda1;
    if (!(cert->lambda1 > cert->zero_tol)) {
      return fail("descent end point is not a minimum");
    }
    res.converged = true;
    return res;
  }

  std::pair<DescentResult, DescentResult> connect_minima(Potential const& pot, SaddleRecord const& saddle,
                                                         double gamma, DescentOptions const& opts) {
    Vector const& v = saddle.certificate.v1;
    return {gradient_descent(pot, saddle.position + gamma * v, opts),
            gradient_descent(pot, saddle.position - gamma * v, opts)};
  }

  std::string to_string(LocalSearchKind k) { return k == LocalSearchKind::single ? "single" : "particle"; }

  namespace {

    SaddleRecord make_record(Potential const& pot, DimerOutcome const& o, long k) {
      SaddleRecord r;
      r.position = o.point;
      r.energy = pot.value(o.point);
      r.certificate = *o.certificate;
      r.gradient_norm = o.gradient_norm;
      r.found_at_iteration = k;
      return r;
    }

  }  // namespace

  bool insert_unique(std::vector<SaddleRecord>& set, SaddleRecord rec, IdentityRule const& rule) {
    for (auto const& s : set) {
      if (saddle_identity(s, rec, rule)) {
        return false;
      }
    }
    set.push_back(std::move(rec));
    return true;
  }

  SspdLsResult sspd_ls(Potential const& pot, SearchConfig const& cfg, Ensemble init) {
    cfg.sspd.validate();
    cfg.dimer.validate();
    cfg.particle.validate();

    SspdLsResult out;
    SpectralOptions const& spec = cfg.kind == LocalSearchKind::single ? cfg.dimer.spectral : cfg.particle.dimer.spectral;

    auto hook = [&](Ensemble const& ens, long k) {
      if (k % cfg.sspd.m != 0) {
        return HookAction::proceed;
      }
      Index const wanted = cfg.kind == LocalSearchKind::single ? 1 : cfg.particle.max_particles;
      std::vector<Index> const starts = select_starts(ens, pot, wanted, spec);
      if (starts.empty()) {
        return HookAction::proceed;
      }
      ++out.local_searches;

      std::vector<DimerOutcome> outcomes;
      if (cfg.kind == LocalSearchKind::single) {
        outcomes.push_back(dimer_search(pot, ens.X.col(starts.front()), cfg.dimer));
      } else {
        Matrix u0(ens.dim(), static_cast<Index>(starts.size()));
        for (std::size_t i = 0; i < starts.size(); ++i) {
          u0.col(static_cast<Index>(i)) = ens.X.col(starts[i]);
        }
        outcomes = particle_dimer_search(pot, u0, cfg.particle).outcomes;
      }

      bool any = false;
      for (auto const& o : outcomes) {
        if (!o.success()) {
          continue;
        }
        any = true;
        if (insert_unique(out.saddles, make_record(pot, o, k), cfg.identity) && !out.first_success) {
          out.first_success = k;
        }
      }
      if (!any) {
        ++out.failed_searches;
      }
      if (cfg.stop_when && cfg.stop_when(out.saddles)) {
        return HookAction::stop;
      }
      return HookAction::proceed;
    };

    SspdResult run = run_sspd(pot, cfg.sspd, std::move(init), hook);
    out.diagnostics = std::move(run.diagnostics);
    out.iterations = run.iterations;
    out.stopped_early = run.stopped_early;
    return out;
  }

  MinimumRecord const* TransitionGraph::find(std::string const& label) const {
    for (auto const& n : nodes) {
      if (n.label == label) {
        return &n;
      }
    }
    return nullptr;
  }

  namespace {

    class MinimumCatalog {
    public:
      MinimumCatalog(TransitionGraph& g, GraphConfig const& cfg) : g_(g), cfg_(cfg) {}

      /// Label of the matching node, adding it (and queueing it) when new.
      std::string add(MinimumRecord m, std::deque<std::size_t>& work) {
        for (auto const& n : g_.nodes) {
          if (same_energy(n.energy, m.energy, cfg_.search.identity)) {
            return n.label;
          }
        }
        m.label = label_for(m.energy);
        g_.nodes.push_back(std::move(m));
        work.push_back(g_.nodes.size() - 1);
        return g_.nodes.back().label;
      }

    private:
      std::string label_for(double energy) {
        for (auto const& [e, name] : cfg_.labels) {
          if (std::abs(e - energy) <= cfg_.label_tol && g_.find(name) == nullptr) {
            return name;
          }
        }
        std::string name;
        do {
          name = "C" + std::to_string(next_++);
        } while (g_.find(name) != nullptr);
        return name;
      }

      TransitionGraph& g_;
      GraphConfig const& cfg_;
      int next_ = 0;
    };

  }  // namespace

  TransitionGraph connect_saddles(Potential const& pot, std::vector<SaddleRecord> const& saddles,
                                  GraphConfig const& cfg) {
    TransitionGraph g;
    MinimumCatalog catalog(g, cfg);
    std::deque<std::size_t> unused;
    for (SaddleRecord s : saddles) {
      auto [a, b] = connect_minima(pot, s, cfg.gamma, cfg.descent);
      if (!a.converged || !b.converged) {
        g.unconnected.push_back(std::move(s));
        continue;
      }
      std::string const la = catalog.add(std::move(a.minimum), unused);
      std::string const lb = catalog.add(std::move(b.minimum), unused);
      s.connects = std::make_pair(la, lb);
      g.edges.push_back({std::move(s), la, lb});
    }
    g.explored = 1;
    return g;
  }

  TransitionGraph build_transition_graph(Potential const& pot, std::vector<Vector> const& seeds,
                                         GraphConfig const& cfg) {
    if (seeds.empty()) {
      throw ConfigError("transition graph needs at least one seed minimum");
    }
    TransitionGraph g;
    MinimumCatalog catalog(g, cfg);
    std::deque<std::size_t> work;

    for (auto const& s : seeds) {
      DescentResult d = gradient_descent(pot, s, cfg.descent);
      if (!d.converged) {
        throw Error("seed does not descend to a minimum: " + d.failure);
      }
      (void)catalog.add(std::move(d.minimum), work);
    }

    std::vector<SaddleRecord> known;
    while (!work.empty()) {
      if (g.explored >= cfg.max_minima) {
        g.complete = false;
        break;
      }
      std::size_t const node = work.front();
      work.pop_front();

      SearchConfig sc = cfg.search;
      sc.sspd.seed = mix64(cfg.search.sspd.seed ^ static_cast<std::uint64_t>(g.explored));
      Vector const start = g.nodes[node].position;
      ++g.explored;

      Ensemble init = cfg.init_stddev > 0 ? ensemble_gaussian(start, cfg.init_stddev, sc.sspd)
                                          : ensemble_at_point(start, sc.sspd);
      SspdLsResult found = sspd_ls(pot, sc, std::move(init));
      for (auto& s : found.saddles) {
        if (!insert_unique(known, s, cfg.search.identity)) {
          continue;
        }
        auto [a, b] = connect_minima(pot, s, cfg.gamma, cfg.descent);
        if (!a.converged || !b.converged) {
          g.unconnected.push_back(s);
          continue;
        }
        std::string const la = catalog.add(std::move(a.minimum), work);
        std::string const lb = catalog.add(std::move(b.minimum), work);
        s.connects = std::make_pair(la, lb);
        g.edges.push_back({s, la, lb});
      }
    }
    return g;
  }

}  // namespace scout
