#include "scout/sspd.hpp"

#include <cmath>
#include <limits>

#include "scout/parallel.hpp"

namespace scout {

  void SspdConfig::validate() const {
    if (!(delta > 0) || !std::isfinite(delta)) {
      throw ConfigError("sspd.delta must be positive");
    }
    if (!(beta_inv >= 0) || !std::isfinite(beta_inv)) {
      throw ConfigError("sspd.beta_inv must be non-negative");
    }
    if (!(rho_ess > 0 && rho_ess < 1)) {
      throw ConfigError("sspd.rho_ess must lie in (0, 1)");
    }
    if (m < 1) {
      throw ConfigError("sspd.m must be at least 1");
    }
    if (n_particles < 1) {
      throw ConfigError("sspd.n_particles must be at least 1");
    }
    if (max_iter < 0) {
      throw ConfigError("sspd.max_iter must be non-negative");
    }
  }

  void Ensemble::refresh_weights() { w = Y.colwise().norm().transpose(); }

  void apply_resample(Ensemble& ens, std::span<Index const> ancestors) {
    Index const n = ens.size();
    if (static_cast<Index>(ancestors.size()) != n) {
      throw Error("ancestor list length does not match the ensemble size");
    }
    Matrix x(ens.dim(), n);
    Matrix y(ens.dim(), n);
    for (Index k = 0; k < n; ++k) {
      Index const j = ancestors[static_cast<std::size_t>(k)];
      if (j < 0 || j >= n) {
        throw Error("ancestor index out of range");
      }
      if (!(ens.w[j] > 0)) {
        throw DegenerateEnsembleError("resampling selected a zero-weight ancestor");
      }
      x.col(k) = ens.X.col(j);
      y.col(k) = ens.Y.col(j) / ens.w[j];
    }
    ens.X = std::move(x);
    ens.Y = std::move(y);
    ens.refresh_weights();
  }

  bool maybe_resample(Ensemble& ens, SspdConfig const& cfg) {
    if (!cfg.resample) {
      return false;
    }
    double const e = ess(ens.w);
    if (e > cfg.rho_ess * static_cast<double>(ens.size())) {
      return false;
    }
    auto rng = stream_engine(cfg.seed, Stream::resample, 0, static_cast<std::uint64_t>(ens.step));
    auto const ancestors = stratified_resample(ens.w, rng);
    apply_resample(ens, ancestors);
    return true;
  }

  void em_step(Ensemble& ens, Potential const& pot, SspdConfig const& cfg) {
    Index const d = ens.dim();
    double const noise = std::sqrt(2 * cfg.beta_inv * cfg.delta);
    long const step = ens.step;

    parallel_for(ens.size(), [&](Index n) {
      Vector g(d), hy(d), gauss(d);
      pot.gradient_hvp(ens.X.col(n), ens.Y.col(n), g, hy);
      auto x = ens.X.col(n);
      auto y = ens.Y.col(n);
      if (noise > 0) {
        auto rng = stream_engine(cfg.seed, Stream::noise, static_cast<std::uint64_t>(n),
                                 static_cast<std::uint64_t>(step));
        fill_standard_normal(rng, gauss);
        x += -cfg.delta * g + noise * gauss;
      } else {
        x -= cfg.delta * g;
      }
      y -= cfg.delta * hy;
      if (!x.allFinite() || !y.allFinite()) {
        throw BlowUpError(n, step);
      }
    });

    ens.refresh_weights();
    ++ens.step;
  }

  std::optional<MeanDirection> weighted_mean_direction(Ensemble const& ens) {
    double const total = ens.w.sum();
    if (!(total > 0)) {
      return std::nullopt;
    }
    Vector const sy = ens.Y * ens.w;
    double const norm = sy.norm();
    if (!(norm > 0)) {
      return std::nullopt;
    }
    return MeanDirection{ens.X * ens.w / total, sy / norm};
  }

  namespace {

    IterationDiagnostics diagnose(Ensemble const& ens, long k) {
      IterationDiagnostics row;
      row.k = k;
      row.ess = ens.w.sum() > 0 ? ess(ens.w) : 0.0;
      row.max_weight = ens.w.size() > 0 ? ens.w.maxCoeff() : 0.0;
      if (auto md = weighted_mean_direction(ens)) {
        row.xbar = std::move(md->xbar);
        row.ybar = std::move(md->ybar);
      } else {
        double const nan = std::numeric_limits<double>::quiet_NaN();
        row.xbar = Vector::Constant(ens.dim(), nan);
        row.ybar = Vector::Constant(ens.dim(), nan);
      }
      return row;
    }

    void check_shapes(Potential const& pot, Ensemble const& ens) {
      if (ens.size() < 1) {
        throw ConfigError("ensemble must contain at least one particle");
      }
      if (ens.dim() != pot.dim() || ens.Y.rows() != pot.dim() || ens.Y.cols() != ens.size()) {
        throw ConfigError("ensemble shape does not match the potential dimension");
      }
      if (!ens.X.allFinite() || !ens.Y.allFinite()) {
        throw ConfigError("initial ensemble contains non-finite entries");
      }
    }

  }  // namespace

  SspdResult run_sspd(Potential const& pot, SspdConfig const& cfg, Ensemble init, SspdHook const& hook) {
    cfg.validate();
    check_shapes(pot, init);

    SspdResult out;
    out.final = std::move(init);
    Ensemble& ens = out.final;
    out.diagnostics.reserve(static_cast<std::size_t>(cfg.max_iter) + 1);

    for (long k = 0; k < cfg.max_iter; ++k) {
      ens.step = k;
      ens.refresh_weights();
      IterationDiagnostics row = diagnose(ens, k);
      if (hook && hook(ens, k) == HookAction::stop) {
        out.diagnostics.push_back(std::move(row));
        out.iterations = k;
        out.stopped_early = true;
        return out;
      }
      row.resampled = maybe_resample(ens, cfg);
      out.diagnostics.push_back(std::move(row));
      em_step(ens, pot, cfg);
    }

    ens.step = cfg.max_iter;
    ens.refresh_weights();
    out.diagnostics.push_back(diagnose(ens, cfg.max_iter));
    out.iterations = cfg.max_iter;
    return out;
  }

  Vector default_tangent(Index d) { return Vector::Ones(d) / std::sqrt(static_cast<double>(d)); }

  namespace {

    Ensemble with_tangents(Matrix x, std::optional<Vector> const& y0) {
      Ensemble ens;
      Index const d = x.rows();
      Vector const y = y0 ? *y0 : default_tangent(d);
      if (y.size() != d) {
        throw ConfigError("initial tangent has the wrong dimension");
      }
      ens.Y = y.replicate(1, x.cols());
      ens.X = std::move(x);
      ens.refresh_weights();
      return ens;
    }

  }  // namespace

  Ensemble ensemble_at_point(VectorCRef x0, SspdConfig const& cfg, std::optional<Vector> const& y0) {
    cfg.validate();
    double const sd = std::sqrt(2 * cfg.beta_inv * cfg.delta);
    Matrix x(x0.size(), cfg.n_particles);
    Vector gauss(x0.size());
    for (Index n = 0; n < cfg.n_particles; ++n) {
      auto rng = stream_engine(cfg.seed, Stream::init, static_cast<std::uint64_t>(n), 0);
      fill_standard_normal(rng, gauss);
      x.col(n) = x0 + sd * gauss;
    }
    return with_tangents(std::move(x), y0);
  }

  Ensemble ensemble_uniform(VectorCRef lower, VectorCRef upper, SspdConfig const& cfg,
                            std::optional<Vector> const& y0) {
    cfg.validate();
    if (lower.size() != upper.size() || (upper.array() < lower.array()).any()) {
      throw ConfigError("invalid initialisation box");
    }
    Matrix x(lower.size(), cfg.n_particles);
    for (Index n = 0; n < cfg.n_particles; ++n) {
      auto rng = stream_engine(cfg.seed, Stream::init, static_cast<std::uint64_t>(n), 0);
      for (Index i = 0; i < lower.size(); ++i) {
        x(i, n) = lower[i] + (upper[i] - lower[i]) * uniform_open01(rng);
      }
    }
    return with_tangents(std::move(x), y0);
  }

  Ensemble ensemble_gaussian(VectorCRef mean, double stddev, SspdConfig const& cfg,
                             std::optional<Vector> const& y0) {
    cfg.validate();
    if (!(stddev >= 0)) {
      throw ConfigError("initial standard deviation must be non-negative");
    }
    Matrix x(mean.size(), cfg.n_particles);
    Vector gauss(mean.size());
    for (Index n = 0; n < cfg.n_particles; ++n) {
      auto rng = stream_engine(cfg.seed, Stream::init, static_cast<std::uint64_t>(n), 0);
      fill_standard_normal(rng, gauss);
      x.col(n) = mean + stddev * gauss;
    }
    return with_tangents(std::move(x), y0);
  }

  BinnedField empirical_vector_field(Ensemble const& ens, Grid2D const& grid) {
    if (ens.dim() != 2) {
      throw ConfigError("empirical_vector_field requires a two-dimensional ensemble");
    }
    grid.validate();
    BinnedField out{GridField(grid, 2), 0};
    double const scale = 1.0 / (static_cast<double>(ens.size()) * grid.cell_area());
    for (Index n = 0; n < ens.size(); ++n) {
      auto const [i, j] = grid.locate(ens.X(0, n), ens.X(1, n));
      if (i < 0) {
        ++out.overflow;
        continue;
      }
      out.field[0](i, j) += ens.Y(0, n) * scale;
      out.field[1](i, j) += ens.Y(1, n) * scale;
    }
    return out;
  }

}  // namespace scout
