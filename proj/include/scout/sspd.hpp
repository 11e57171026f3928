#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "scout/core.hpp"
#include "scout/grid.hpp"
#include "scout/potentials.hpp"
#include "scout/rng.hpp"

/**
 * \file sspd.hpp
 *
 * @brief Weighted interacting particle system whose empirical vector field follows the Witten semigroup on 1-forms.
 *
 * Each particle carries a position X following overdamped Langevin dynamics and a tangent vector Y transported by
 * the Hessian along the path, dY = -Hess V(X) Y dt. The weights |Y| grow in regions of negative curvature; when the
 * effective sample size drops, particles are resampled in proportion to their weight.
 */

namespace scout {

  struct SspdConfig {
    double delta = 1e-3;
    double beta_inv = 0.05;
    double rho_ess = 0.95;
    /// Local-search period (used by the search orchestrator).
    long m = 10;
    Index n_particles = 2000;
    long max_iter = 10000;
    std::uint64_t seed = 0;
    /// Disable to run the plain weighted dynamics.
    bool resample = true;

    void validate() const;
  };

  /// Particle states; column n of X and Y belongs to particle n.
  struct Ensemble {
    Matrix X;
    Matrix Y;
    Vector w;
    long step = 0;

    [[nodiscard]] Index size() const { return X.cols(); }
    [[nodiscard]] Index dim() const { return X.rows(); }

    /// w_n = |Y_n|.
    void refresh_weights();
  };

  /// (sum w)^2 / sum w^2; throws DegenerateEnsembleError when every weight is zero.
  template <typename Derived>
  [[nodiscard]] double ess(Eigen::MatrixBase<Derived> const& w) {
    using Scalar = typename Derived::Scalar;
    if ((w.array() < Scalar(0)).any() || !w.allFinite()) {
      throw DegenerateEnsembleError("weights must be finite and non-negative");
    }
    Scalar const s = w.sum();
    if (!(s > Scalar(0))) {
      throw DegenerateEnsembleError("all weights are zero");
    }
    return static_cast<double>(s * s / w.squaredNorm());
  }

  /**
   * @brief Stratified resampling: ancestor n is drawn from the n-th equal-probability stratum of the cumulative
   * weights, at position (n + U_n) / N.
   */
  template <typename URBG>
  [[nodiscard]] std::vector<Index> stratified_resample(VectorCRef w, URBG& rng) {
    (void)ess(w);
    Index const n = w.size();
    double const total = w.sum();

    std::vector<Index> ancestors(static_cast<std::size_t>(n));
    double cumulative = w[0] / total;
    Index i = 0;
    for (Index k = 0; k < n; ++k) {
      double const u = (static_cast<double>(k) + uniform_open01(rng)) / static_cast<double>(n);
      while (u > cumulative && i < n - 1) {
        ++i;
        cumulative += w[i] / total;
      }
      // Never pick a zero-weight particle because of roundoff in the running sum.
      Index pick = i;
      while (w[pick] <= 0 && pick > 0) {
        --pick;
      }
      ancestors[static_cast<std::size_t>(k)] = pick;
    }
    return ancestors;
  }

  /// X_n <- X_{J[n]}, Y_n <- Y_{J[n]} / w_{J[n]}, so every weight becomes one.
  void apply_resample(Ensemble& ens, std::span<Index const> ancestors);

  /// Resample iff ESS(w) <= rho_ess N (and resampling is enabled). Returns whether it happened.
  bool maybe_resample(Ensemble& ens, SspdConfig const& cfg);

  /// One Euler-Maruyama step of every particle; refreshes weights and increments the step counter.
  void em_step(Ensemble& ens, Potential const& pot, SspdConfig const& cfg);

  struct MeanDirection {
    /// Weighted mean position sum w X / sum w.
    Vector xbar;
    /// Unit direction of sum w Y.
    Vector ybar;
  };

  /// nullopt when sum w = 0 or sum w Y vanishes.
  [[nodiscard]] std::optional<MeanDirection> weighted_mean_direction(Ensemble const& ens);

  struct IterationDiagnostics {
    long k = 0;
    double ess = 0;
    bool resampled = false;
    /// NaN-filled when the mean direction is undefined.
    Vector xbar;
    Vector ybar;
    double max_weight = 0;
  };

  enum class HookAction { proceed, stop };

  /// Called at the top of iteration k, after the weight refresh and before resampling.
  using SspdHook = std::function<HookAction(Ensemble const&, long)>;

  struct SspdResult {
    Ensemble final;
    /// One row per iteration plus a final row for the returned state.
    std::vector<IterationDiagnostics> diagnostics;
    long iterations = 0;
    bool stopped_early = false;
  };

  /// cfg.max_iter iterations of (weights, hook, maybe_resample, em_step).
  [[nodiscard]] SspdResult run_sspd(Potential const& pot, SspdConfig const& cfg, Ensemble init,
                                    SspdHook const& hook = {});

  // Initial ensembles.

  /// Normalised all-ones vector of length d.
  [[nodiscard]] Vector default_tangent(Index d);

  /// Every particle at x0 plus Gaussian jitter of standard deviation sqrt(2 beta^-1 delta); Y = y0 (default ones).
  [[nodiscard]] Ensemble ensemble_at_point(VectorCRef x0, SspdConfig const& cfg,
                                           std::optional<Vector> const& y0 = std::nullopt);

  /// Positions uniform in the box [lower, upper].
  [[nodiscard]] Ensemble ensemble_uniform(VectorCRef lower, VectorCRef upper, SspdConfig const& cfg,
                                          std::optional<Vector> const& y0 = std::nullopt);

  /// Positions from N(mean, stddev^2 I).
  [[nodiscard]] Ensemble ensemble_gaussian(VectorCRef mean, double stddev, SspdConfig const& cfg,
                                           std::optional<Vector> const& y0 = std::nullopt);

  struct BinnedField {
    GridField field;
    /// Particles whose position fell outside every cell.
    Index overflow = 0;
  };

  /// Bin sum Y_n over particles into node control cells and divide by N * cell area (2D ensembles only).
  [[nodiscard]] BinnedField empirical_vector_field(Ensemble const& ens, Grid2D const& grid);

}  // namespace scout
