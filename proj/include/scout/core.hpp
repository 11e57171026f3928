#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

/**
 * \file core.hpp
 *
 * @brief Dense types and the error hierarchy shared by every module.
 */

namespace scout {

  template <typename Scalar>
  using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  template <typename Scalar>
  using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  using Vector = VectorX<double>;
  using Matrix = MatrixX<double>;
  using Eigen::Index;

  using VectorCRef = Eigen::Ref<const Vector>;
  using VectorRef = Eigen::Ref<Vector>;

  /// Base class of all errors raised by the library.
  class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
  };

  /// Invalid configuration or arguments (CLI exit code 2).
  class ConfigError : public Error {
  public:
    using Error::Error;
  };

  /// A particle state became non-finite during time stepping.
  class BlowUpError : public Error {
  public:
    BlowUpError(Index particle, long step)
        : Error("non-finite state in particle " + std::to_string(particle) + " at step " + std::to_string(step)
                + " (time step too large?)"),
          particle_(particle),
          step_(step) {}

    [[nodiscard]] Index particle() const noexcept { return particle_; }
    [[nodiscard]] long step() const noexcept { return step_; }

  private:
    Index particle_;
    long step_;
  };

  /// All weights vanished, so no distribution can be formed from them.
  class DegenerateEnsembleError : public Error {
  public:
    using Error::Error;
  };

  /// Explicit PDE step violates its stability bound, or the solution blew up.
  class InstabilityError : public Error {
  public:
    using Error::Error;
  };

  /// True when every coefficient is finite.
  template <typename Derived>
  [[nodiscard]] bool all_finite(const Eigen::DenseBase<Derived>& m) {
    return m.allFinite();
  }

}  // namespace scout
