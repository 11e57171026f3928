#pragma once

#include <optional>

#include "scout/core.hpp"
#include "scout/potentials.hpp"

/**
 * \file spectral.hpp
 *
 * @brief Lowest Hessian eigenpairs and index-1 classification.
 */

namespace scout {

  /// Two lowest retained Hessian eigenvalues and the minimum mode at one point.
  struct SpectralCertificate {
    double lambda1 = 0;
    double lambda2 = 0;
    /// Unit minimum-mode eigenvector, orthogonal to every deflated direction.
    Vector v1;
    /// Number of symmetry directions projected out before ranking.
    int n_deflated = 0;
    /// Eigenvalues with |lambda| below this were treated as zero modes and skipped.
    double zero_tol = 0;
  };

  enum class SpectralMethod { automatic, dense, iterative };

  struct SpectralOptions {
    SpectralMethod method = SpectralMethod::automatic;
    /// automatic selects the dense path up to this dimension.
    Index dense_limit = 512;
    int max_iter = 500;
    double residual_tol = 1e-8;
    /// Relative zero-mode tolerance, scaled by (1 + max |Hessian diagonal|).
    double zero_rel_tol = 1e-8;
    /// Also deflate position-dependent symmetry generators (rigid rotations).
    bool deflate_local_modes = true;
  };

  /**
   * @brief The two smallest eigenvalues of Hess V(x) on the complement of the symmetry directions.
   *
   * Returns nullopt when the iterative solver does not converge or fewer than two non-zero eigenvalues exist.
   */
  [[nodiscard]] std::optional<SpectralCertificate> min_two_eigpairs(Potential const& pot, VectorCRef x,
                                                                    SpectralOptions const& opts = {});

  /// lambda1 < -zero_tol and lambda2 > zero_tol.
  [[nodiscard]] inline bool is_index1(SpectralCertificate const& c) {
    return c.lambda1 < -c.zero_tol && c.lambda2 > c.zero_tol;
  }

  /// Membership in {x : lambda1(x) < 0 < lambda2(x)}; solver failure classifies as outside.
  [[nodiscard]] bool in_index1_region(Potential const& pot, VectorCRef x, SpectralOptions const& opts = {});

  /// Orthonormal basis (columns) of the symmetry directions at x.
  [[nodiscard]] Matrix deflation_basis(Potential const& pot, VectorCRef x, bool include_local);

}  // namespace scout
