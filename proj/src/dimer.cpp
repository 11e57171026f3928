#include "scout/dimer.hpp"

#include <cmath>
#include <fstream>
#include <limits>

#include "scout/parallel.hpp"

namespace scout {

  void DimerConfig::validate() const {
    if (!(delta > 0) || !std::isfinite(delta)) {
      throw ConfigError("dimer.delta must be positive");
    }
    if (max_iter < 1) {
      throw ConfigError("dimer.max_iter must be at least 1");
    }
    if (!(eps_d > 0)) {
      throw ConfigError("dimer.eps_d must be positive");
    }
  }

  void ParticleDimerConfig::validate() const {
    dimer.validate();
    if (max_particles < 1) {
      throw ConfigError("particle dimer needs at least one particle");
    }
    if (!(sigma > 0)) {
      throw ConfigError("kernel width sigma must be positive");
    }
    if (!(r >= 0)) {
      throw ConfigError("cutoff r must be non-negative");
    }
  }

  std::string to_string(DimerStatus s) {
    switch (s) {
      case DimerStatus::success:
        return "success";
      case DimerStatus::failure_left_region:
        return "failure-left-region";
      case DimerStatus::failure_budget:
        return "failure-budget";
    }
    return "unknown";
  }

  Vector dimer_step(VectorCRef u, VectorCRef g, VectorCRef v1, double delta) {
    return u - delta * (g - 2 * v1.dot(g) * v1);
  }

  Vector dimer_step(Potential const& pot, VectorCRef u, DimerConfig const& cfg) {
    auto const cert = min_two_eigpairs(pot, u, cfg.spectral);
    if (!cert) {
      throw Error("eigensolver did not converge at the dimer iterate");
    }
    return dimer_step(u, pot.gradient(u), cert->v1, cfg.delta);
  }

  namespace {

    enum class Verdict { success, left_region, spectral_failure, proceed };

    struct Probe {
      std::optional<SpectralCertificate> cert;
      Vector g;
      double gnorm = 0;
      Verdict verdict = Verdict::proceed;
    };

    Probe probe(Potential const& pot, VectorCRef u, DimerConfig const& cfg) {
      Probe p;
      p.g = pot.gradient(u);
      p.gnorm = p.g.norm();
      p.cert = min_two_eigpairs(pot, u, cfg.spectral);
      if (!p.cert) {
        p.verdict = Verdict::spectral_failure;
      } else if (is_index1(*p.cert) && p.gnorm < cfg.eps_d) {
        p.verdict = Verdict::success;
      } else if (p.cert->lambda1 > p.cert->zero_tol) {
        p.verdict = Verdict::left_region;
      }
      return p;
    }

    void record(DimerTrace* trace, long k, Index particle, Probe const& p) {
      if (trace == nullptr) {
        return;
      }
      double const nan = std::numeric_limits<double>::quiet_NaN();
      trace->push_back({k, particle, p.gnorm, p.cert ? p.cert->lambda1 : nan, p.cert ? p.cert->lambda2 : nan});
    }

    void finish(DimerOutcome& out, Probe const& p, long k, VectorCRef u, DimerStatus status) {
      out.status = status;
      out.point = u;
      out.certificate = p.cert;
      out.gradient_norm = p.gnorm;
      out.iterations = k;
      out.spectral_failure = p.verdict == Verdict::spectral_failure;
    }

    DimerStatus status_of(Verdict v) {
      switch (v) {
        case Verdict::success:
          return DimerStatus::success;
        case Verdict::left_region:
        case Verdict::spectral_failure:
          return DimerStatus::failure_left_region;
        case Verdict::proceed:
          break;
      }
      return DimerStatus::failure_budget;
    }

  }  // namespace

  DimerOutcome dimer_search(Potential const& pot, VectorCRef u0, DimerConfig const& cfg, DimerTrace* trace) {
    cfg.validate();
    if (u0.size() != pot.dim()) {
      throw ConfigError("dimer start has the wrong dimension");
    }
    DimerOutcome out;
    Vector u = u0;
    for (long k = 0;; ++k) {
      Probe const p = probe(pot, u, cfg);
      record(trace, k, 0, p);
      if (p.verdict != Verdict::proceed || k == cfg.max_iter) {
        finish(out, p, k, u, status_of(p.verdict));
        return out;
      }
      u = dimer_step(u, p.g, p.cert->v1, cfg.delta);
    }
  }

  Matrix kernel_adjacency(Matrix const& u0s, double sigma, double r, CutoffMode mode) {
    Index const m = u0s.cols();
    Matrix w = Matrix::Zero(m, m);
    for (Index i = 0; i < m; ++i) {
      for (Index j = i + 1; j < m; ++j) {
        double const k = std::exp(-(u0s.col(i) - u0s.col(j)).squaredNorm() / sigma);
        bool const keep = mode == CutoffMode::literal_below ? k < r : k > r;
        if (keep) {
          w(i, j) = k;
          w(j, i) = k;
        }
      }
    }
    return w;
  }

  ParticleDimerResult particle_dimer_search(Potential const& pot, Matrix const& u0s, ParticleDimerConfig const& cfg,
                                            DimerTrace* trace) {
    cfg.validate();
    Index const m = u0s.cols();
    if (m < 1 || u0s.rows() != pot.dim()) {
      throw ConfigError("particle dimer starts must be a non-empty dim x M matrix");
    }
    DimerConfig const& dc = cfg.dimer;

    ParticleDimerResult res;
    res.adjacency = kernel_adjacency(u0s, cfg);
    res.outcomes.resize(static_cast<std::size_t>(m));

    Matrix u = u0s;
    std::vector<bool> frozen(static_cast<std::size_t>(m), false);
    // Particles still coupled through the graph; frozen failures are detached.
    Vector in_graph = Vector::Ones(m);
    std::vector<Probe> probes(static_cast<std::size_t>(m));

    for (long k = 0;; ++k) {
      parallel_for(m, [&](Index i) {
        if (!frozen[static_cast<std::size_t>(i)]) {
          probes[static_cast<std::size_t>(i)] = probe(pot, u.col(i), dc);
        }
      });

      bool all_success = true;
      bool all_positive = true;
      bool any_active = false;
      for (Index i = 0; i < m; ++i) {
        auto const s = static_cast<std::size_t>(i);
        Probe const& p = probes[s];
        if (!frozen[s]) {
          record(trace, k, i, p);
        }
        all_success = all_success && p.verdict == Verdict::success;
        all_positive = all_positive && p.cert && p.cert->lambda1 > p.cert->zero_tol;
        if (frozen[s]) {
          continue;
        }
        // Without a minimum mode there is no step to take, so solver failures always freeze.
        bool const stop_here = (p.verdict == Verdict::success && cfg.freeze_converged)
                               || (p.verdict == Verdict::left_region && cfg.freeze_failed)
                               || p.verdict == Verdict::spectral_failure;
        if (stop_here) {
          frozen[s] = true;
          finish(res.outcomes[s], p, k, u.col(i), status_of(p.verdict));
          if (p.verdict != Verdict::success) {
            in_graph[i] = 0;
          }
        } else {
          any_active = true;
        }
      }

      bool const done = all_success || all_positive || !any_active || k == dc.max_iter;
      if (done) {
        for (Index i = 0; i < m; ++i) {
          auto const s = static_cast<std::size_t>(i);
          if (!frozen[s]) {
            Probe const& p = probes[s];
            DimerStatus st = status_of(p.verdict);
            if (p.verdict == Verdict::proceed && all_positive) {
              st = DimerStatus::failure_left_region;
            }
            finish(res.outcomes[s], p, k, u.col(i), st);
          }
        }
        res.iterations = k;
        res.status = all_success    ? DimerStatus::success
                     : all_positive ? DimerStatus::failure_left_region
                                    : DimerStatus::failure_budget;
        return res;
      }

      Matrix const w = in_graph.asDiagonal() * res.adjacency * in_graph.asDiagonal();
      Matrix const consensus = apply_graph_laplacian(w, u);
      for (Index i = 0; i < m; ++i) {
        auto const s = static_cast<std::size_t>(i);
        if (frozen[s]) {
          continue;
        }
        Probe const& p = probes[s];
        u.col(i) = dimer_step(u.col(i), p.g, p.cert->v1, dc.delta) - dc.delta * consensus.col(i);
      }
    }
  }

  void write_dimer_trace_csv(std::string const& path, DimerTrace const& trace) {
    std::ofstream os(path);
    if (!os) {
      throw Error("cannot open " + path + " for writing");
    }
    os.precision(17);
    os << "iteration,particle,gradient_norm,lambda1,lambda2\n";
    for (auto const& row : trace) {
      os << row.iteration << ',' << row.particle << ',' << row.gradient_norm << ',' << row.lambda1 << ','
         << row.lambda2 << '\n';
    }
  }

}  // namespace scout
