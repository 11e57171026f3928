#pragma once

#include <optional>
#include <string>
#include <vector>

#include "scout/core.hpp"
#include "scout/potentials.hpp"
#include "scout/spectral.hpp"

/**
 * \file dimer.hpp
 *
 * @brief Zero-length dimer dynamics u' = -(I - 2 v1 v1^T) grad V(u) and its graph-coupled many-particle variant.
 */

namespace scout {

  struct DimerConfig {
    double delta = 1e-3;
    long max_iter = 1000;
    double eps_d = 1e-6;
    SpectralOptions spectral{};

    void validate() const;
  };

  /// Rule turning kernel values K_ij into edge weights.
  enum class CutoffMode {
    /// W_ij = K_ij if K_ij < r.
    literal_below,
    /// W_ij = K_ij if K_ij > r, i.e. only nearby particles interact.
    similarity_above,
  };

  struct ParticleDimerConfig {
    DimerConfig dimer{};
    /// Upper bound on the number of coupled particles.
    Index max_particles = 10;
    double sigma = 1.0;
    double r = 0.9;
    CutoffMode cutoff = CutoffMode::literal_below;
    /// Stop moving particles that leave the index-1 region and drop them from the graph.
    bool freeze_failed = true;
    /// Stop moving particles that already satisfy the success test.
    bool freeze_converged = true;

    void validate() const;
  };

  enum class DimerStatus { success, failure_left_region, failure_budget };

  [[nodiscard]] std::string to_string(DimerStatus s);

  struct DimerOutcome {
    DimerStatus status = DimerStatus::failure_budget;
    /// Final iterate (the saddle on success).
    Vector point;
    /// Spectral data at the final iterate, absent when the eigensolver failed there.
    std::optional<SpectralCertificate> certificate;
    double gradient_norm = 0;
    long iterations = 0;
    /// Set when the search stopped because the eigensolver did not converge.
    bool spectral_failure = false;

    [[nodiscard]] bool success() const { return status == DimerStatus::success; }
  };

  /// One row of an optional convergence trace.
  struct DimerTraceRow {
    long iteration = 0;
    Index particle = 0;
    double gradient_norm = 0;
    double lambda1 = 0;
    double lambda2 = 0;
  };

  using DimerTrace = std::vector<DimerTraceRow>;

  /// u - delta (I - 2 v1 v1^T) g; invariant under v1 -> -v1.
  [[nodiscard]] Vector dimer_step(VectorCRef u, VectorCRef g, VectorCRef v1, double delta);

  /// One step at u using the minimum mode computed there; throws Error when the eigensolver fails.
  [[nodiscard]] Vector dimer_step(Potential const& pot, VectorCRef u, DimerConfig const& cfg);

  /**
   * @brief Iterate dimer steps from u0.
   *
   * At the top of every iteration: success if u is in the index-1 region with |grad V| < eps_d, failure if
   * lambda1 > zero tolerance, otherwise step. Running out of iterations gives failure_budget.
   */
  [[nodiscard]] DimerOutcome dimer_search(Potential const& pot, VectorCRef u0, DimerConfig const& cfg,
                                          DimerTrace* trace = nullptr);

  /// Gaussian-kernel adjacency over the columns of u0s (d x M), zero diagonal.
  [[nodiscard]] Matrix kernel_adjacency(Matrix const& u0s, double sigma, double r, CutoffMode mode);

  [[nodiscard]] inline Matrix kernel_adjacency(Matrix const& u0s, ParticleDimerConfig const& cfg) {
    return kernel_adjacency(u0s, cfg.sigma, cfg.r, cfg.cutoff);
  }

  /**
   * @brief Matrix-free graph-Laplacian action: column i of the result is sum_j W_ij (u_i - u_j).
   *
   * With particles stored as columns of U this is U (D - W), i.e. (I_d kron (D - W)) applied to the stacked vector.
   */
  template <typename DerivedW, typename DerivedU>
  [[nodiscard]] Matrix apply_graph_laplacian(Eigen::MatrixBase<DerivedW> const& w, Eigen::MatrixBase<DerivedU> const& u) {
    Vector const deg = w.rowwise().sum();
    return u * deg.asDiagonal() - u * w.transpose();
  }

  struct ParticleDimerResult {
    /// Per-particle outcomes, in input order.
    std::vector<DimerOutcome> outcomes;
    /// success iff every particle succeeded; failure_left_region when min lambda1 > 0 across particles.
    DimerStatus status = DimerStatus::failure_budget;
    long iterations = 0;
    /// Edge weights used for the whole run, fixed at the starting points.
    Matrix adjacency;
  };

  /// Coupled dimers u_i <- u_i - delta (I - 2 v1 v1^T) grad V(u_i) - delta sum_j W_ij (u_i - u_j).
  [[nodiscard]] ParticleDimerResult particle_dimer_search(Potential const& pot, Matrix const& u0s,
                                                          ParticleDimerConfig const& cfg, DimerTrace* trace = nullptr);

  /// CSV with header iteration,particle,gradient_norm,lambda1,lambda2.
  void write_dimer_trace_csv(std::string const& path, DimerTrace const& trace);

}  // namespace scout
