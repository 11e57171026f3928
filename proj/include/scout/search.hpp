#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "scout/core.hpp"
#include "scout/dimer.hpp"
#include "scout/potentials.hpp"
#include "scout/spectral.hpp"
#include "scout/sspd.hpp"

/**
 * \file search.hpp
 *
 * @brief Particle dynamics with periodic dimer refinement, saddle bookkeeping and transition graphs.
 */

namespace scout {

  struct SaddleRecord {
    Vector position;
    double energy = 0;
    SpectralCertificate certificate;
    double gradient_norm = 0;
    /// SSPD iteration whose local search produced the saddle.
    long found_at_iteration = 0;
    /// Labels of the two minima reached by descent, once known.
    std::optional<std::pair<std::string, std::string>> connects;
  };

  struct MinimumRecord {
    Vector position;
    double energy = 0;
    std::string label;
    double gradient_norm = 0;
    double lambda1 = 0;
  };

  /// Energy-based identity with an optional position fallback.
  struct IdentityRule {
    /// Same point when |E_a - E_b| <= energy_rel_tol (1 + max(|E_a|, |E_b|)).
    double energy_rel_tol = 1e-4;
    /// Same point when the positions are this close (negative disables the test).
    double position_tol = 1e-4;
  };

  [[nodiscard]] bool same_energy(double ea, double eb, IdentityRule const& rule);

  /// Reflexive and symmetric; not transitive in general.
  [[nodiscard]] bool saddle_identity(SaddleRecord const& a, SaddleRecord const& b, IdentityRule const& rule = {});

  /// Append rec unless an equivalent saddle is already in set; returns whether it was added.
  bool insert_unique(std::vector<SaddleRecord>& set, SaddleRecord rec, IdentityRule const& rule);

  /// Indices of particles inside the index-1 region.
  [[nodiscard]] std::vector<Index> index1_members(Ensemble const& ens, Potential const& pot,
                                                  SpectralOptions const& opts = {});

  /// Up to max_count members of the index-1 region, by weight descending then index ascending.
  [[nodiscard]] std::vector<Index> select_starts(Ensemble const& ens, Potential const& pot, Index max_count,
                                                 SpectralOptions const& opts = {});

  struct DescentOptions {
    double step = 1e-3;
    double tol = 1e-6;
    long max_iter = 200000;
  };

  struct DescentResult {
    MinimumRecord minimum;
    bool converged = false;
    long iterations = 0;
    /// Empty on success.
    std::string failure;
  };

  /**
   * @brief Fixed-step steepest descent until |grad V| <= tol, then a positive-curvature check.
   *
   * Ten consecutive energy increases halve the step; the eighth halving is a divergence failure.
   */
  [[nodiscard]] DescentResult gradient_descent(Potential const& pot, VectorCRef x0, DescentOptions const& opts);

  /// Descents from position +- gamma v1.
  [[nodiscard]] std::pair<DescentResult, DescentResult> connect_minima(Potential const& pot,
                                                                       SaddleRecord const& saddle, double gamma,
                                                                       DescentOptions const& opts);

  enum class LocalSearchKind { single, particle };

  [[nodiscard]] std::string to_string(LocalSearchKind k);

  struct SearchConfig {
    SspdConfig sspd{};
    /// Used by the single-dimer local search.
    DimerConfig dimer{};
    /// Used by the particle-dimer local search; max_particles is the start count.
    ParticleDimerConfig particle{};
    LocalSearchKind kind = LocalSearchKind::single;
    IdentityRule identity{};
    /// Checked after every local-search round; returning true ends the run.
    std::function<bool(std::vector<SaddleRecord> const&)> stop_when;
  };

  struct SspdLsResult {
    std::vector<SaddleRecord> saddles;
    std::vector<IterationDiagnostics> diagnostics;
    long iterations = 0;
    bool stopped_early = false;
    /// First iteration at which a saddle was added.
    std::optional<long> first_success;
    long local_searches = 0;
    long failed_searches = 0;
  };

  /// Run the particle dynamics, launching a local search every m iterations from the index-1 members.
  [[nodiscard]] SspdLsResult sspd_ls(Potential const& pot, SearchConfig const& cfg, Ensemble init);

  struct GraphEdge {
    SaddleRecord saddle;
    std::string from;
    std::string to;
  };

  struct TransitionGraph {
    std::vector<MinimumRecord> nodes;
    std::vector<GraphEdge> edges;
    /// Saddles whose descents did not both reach a certified minimum.
    std::vector<SaddleRecord> unconnected;
    /// False when the exploration budget ran out with minima left to explore.
    bool complete = true;
    Index explored = 0;

    [[nodiscard]] MinimumRecord const* find(std::string const& label) const;
  };

  struct GraphConfig {
    SearchConfig search{};
    DescentOptions descent{};
    double gamma = 0.01;
    Index max_minima = 16;
    /// Initial cloud around each explored minimum: zero uses the SSPD jitter, positive a Gaussian of this width.
    double init_stddev = 0;
    /// Optional (energy, label) table; unmatched minima get "C<n>" labels in discovery order.
    std::vector<std::pair<double, std::string>> labels;
    /// Tolerance for matching the label table.
    double label_tol = 1e-2;
  };

  /// Graph spanned by already-found saddles: descends each one and catalogues the endpoints.
  [[nodiscard]] TransitionGraph connect_saddles(Potential const& pot, std::vector<SaddleRecord> const& saddles,
                                                GraphConfig const& cfg);

  /// Worklist exploration: search from each unexplored minimum, connect new saddles, queue new minima.
  [[nodiscard]] TransitionGraph build_transition_graph(Potential const& pot, std::vector<Vector> const& seeds,
                                                       GraphConfig const& cfg);

}  // namespace scout
