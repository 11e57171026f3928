#include "scout/spectral.hpp"

#include <algorithm>
#include <cmath>

#include "scout/rng.hpp"

namespace scout {

  namespace {

    /// Orthonormal basis of range(s) via rank-revealing QR.
    Matrix orthonormal_range(Matrix const& s, double rel_tol = 1e-10) {
      if (s.cols() == 0) {
        return Matrix(s.rows(), 0);
      }
      Eigen::ColPivHouseholderQR<Matrix> qr(s);
      qr.setThreshold(rel_tol);
      Index const rank = qr.rank();
      Matrix q = qr.householderQ() * Matrix::Identity(s.rows(), rank);
      return q;
    }

    /// Rank eigenpairs ascending, skipping near-zero values; fills the certificate from the first two kept.
    std::optional<SpectralCertificate> pick_two(Vector const& evals, Matrix const& evecs, double zero_tol,
                                                int n_deflated) {
      std::vector<Index> kept;
      for (Index i = 0; i < evals.size() && kept.size() < 2; ++i) {
        if (std::abs(evals[i]) >= zero_tol) {
          kept.push_back(i);
        }
      }
      if (kept.size() < 2) {
        return std::nullopt;
      }
      SpectralCertificate c;
      c.lambda1 = evals[kept[0]];
      c.lambda2 = evals[kept[1]];
      c.v1 = evecs.col(kept[0]).normalized();
      c.n_deflated = n_deflated;
      c.zero_tol = zero_tol;
      return c;
    }

    std::optional<SpectralCertificate> dense_path(Potential const& pot, VectorCRef x, Matrix const& z,
                                                  SpectralOptions const& opts) {
      Matrix const h = pot.hessian(x);
      double const zero_tol = opts.zero_rel_tol * (1 + h.diagonal().cwiseAbs().maxCoeff());
      Index const d = h.rows();

      if (z.cols() == 0) {
        Eigen::SelfAdjointEigenSolver<Matrix> es(h);
        if (es.info() != Eigen::Success) {
          return std::nullopt;
        }
        return pick_two(es.eigenvalues(), es.eigenvectors(), zero_tol, 0);
      }

      // Basis of the orthogonal complement of the symmetry directions.
      Eigen::HouseholderQR<Matrix> qr(z);
      Matrix const q = qr.householderQ();
      Matrix const qc = q.rightCols(d - z.cols());
      Matrix const hc = qc.transpose() * h * qc;

      Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (hc + hc.transpose()));
      if (es.info() != Eigen::Success) {
        return std::nullopt;
      }
      Matrix const vecs = qc * es.eigenvectors();
      return pick_two(es.eigenvalues(), vecs, zero_tol, static_cast<int>(z.cols()));
    }

    /**
     * LOBPCG on the deflated operator P H P using only Hessian-vector products.
     * Block size 4 leaves room for accidental near-zero modes ahead of the two wanted pairs.
     */
    std::optional<SpectralCertificate> iterative_path(Potential const& pot, VectorCRef x, Matrix const& z,
                                                      SpectralOptions const& opts) {
      Index const d = pot.dim();
      Index const dc = d - z.cols();
      if (dc < 2) {
        return std::nullopt;
      }
      Index const nb = std::min<Index>(4, dc);

      auto project = [&](Matrix& m) {
        if (z.cols() > 0) {
          m -= z * (z.transpose() * m);
        }
      };

      Vector tmp(d);
      auto apply = [&](Matrix const& m) {
        Matrix out(d, m.cols());
        for (Index j = 0; j < m.cols(); ++j) {
          pot.hvp(x, m.col(j), tmp);
          out.col(j) = tmp;
        }
        project(out);
        return out;
      };

      // Deterministic start so repeated calls agree bit for bit.
      SplitMix64 engine{0x5EEDULL + static_cast<std::uint64_t>(d)};
      Matrix blk(d, nb);
      for (Index j = 0; j < nb; ++j) {
        fill_standard_normal(engine, blk.col(j));
      }
      project(blk);
      Matrix xb = orthonormal_range(blk);
      Matrix pb(d, 0);

      double norm_est = 0;

      for (int it = 0; it < opts.max_iter; ++it) {
        Matrix const ax = apply(xb);
        Matrix const gram = xb.transpose() * ax;
        Eigen::SelfAdjointEigenSolver<Matrix> small(0.5 * (gram + gram.transpose()));
        Matrix const xr = xb * small.eigenvectors();
        Matrix const axr = ax * small.eigenvectors();
        Vector const theta = small.eigenvalues();
        norm_est = std::max(norm_est, theta.cwiseAbs().maxCoeff());

        Matrix resid = axr - xr * theta.asDiagonal();
        double const zero_tol = opts.zero_rel_tol * (1 + norm_est);

        // Converged once every Ritz pair up to and including the second kept one has a small residual.
        int kept = 0;
        bool done = true;
        for (Index i = 0; i < theta.size() && kept < 2; ++i) {
          if (resid.col(i).norm() > opts.residual_tol * (1 + std::abs(theta[i]))) {
            done = false;
            break;
          }
          if (std::abs(theta[i]) >= zero_tol) {
            ++kept;
          }
        }
        if (done && kept == 2) {
          return pick_two(theta, xr, zero_tol, static_cast<int>(z.cols()));
        }

        project(resid);
        Matrix s(d, xr.cols() + resid.cols() + pb.cols());
        s << xr, resid, pb;
        Matrix const basis = orthonormal_range(s);
        Matrix const ab = apply(basis);
        Matrix const t = basis.transpose() * ab;
        Eigen::SelfAdjointEigenSolver<Matrix> rr(0.5 * (t + t.transpose()));
        norm_est = std::max(norm_est, rr.eigenvalues().cwiseAbs().maxCoeff());

        Index const keep = std::min<Index>(nb, basis.cols());
        Matrix xn = basis * rr.eigenvectors().leftCols(keep);
        // Search direction: the part of the new block outside the old one.
        Matrix p = xn - xr * (xr.transpose() * xn);
        project(p);
        pb = p.colwise().norm().maxCoeff() > 1e-14 ? orthonormal_range(p) : Matrix(d, 0);
        xb = orthonormal_range(xn);
      }
      return std::nullopt;
    }

  }  // namespace

  Matrix deflation_basis(Potential const& pot, VectorCRef x, bool include_local) {
    std::vector<Vector> modes = pot.zero_mode_basis();
    if (include_local) {
      for (auto& m : pot.local_zero_modes(x)) {
        modes.push_back(std::move(m));
      }
    }
    if (modes.empty()) {
      return Matrix(pot.dim(), 0);
    }
    Matrix z(pot.dim(), static_cast<Index>(modes.size()));
    for (std::size_t i = 0; i < modes.size(); ++i) {
      z.col(static_cast<Index>(i)) = modes[i];
    }
    return orthonormal_range(z);
  }

  std::optional<SpectralCertificate> min_two_eigpairs(Potential const& pot, VectorCRef x,
                                                      SpectralOptions const& opts) {
    if (!x.allFinite()) {
      return std::nullopt;
    }
    Matrix const z = deflation_basis(pot, x, opts.deflate_local_modes);

    bool dense = false;
    switch (opts.method) {
      case SpectralMethod::dense:
        dense = true;
        break;
      case SpectralMethod::iterative:
        dense = false;
        break;
      case SpectralMethod::automatic:
        dense = pot.has_hessian() && pot.dim() <= opts.dense_limit;
        break;
    }
    return dense ? dense_path(pot, x, z, opts) : iterative_path(pot, x, z, opts);
  }

  bool in_index1_region(Potential const& pot, VectorCRef x, SpectralOptions const& opts) {
    auto const cert = min_two_eigpairs(pot, x, opts);
    return cert && is_index1(*cert);
  }

}  // namespace scout
