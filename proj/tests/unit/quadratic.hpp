#pragma once

#include "scout/potentials.hpp"

namespace testing_support {

  /// V(x) = 1/2 x^T A x for a fixed symmetric A.
  class Quadratic final : public scout::Potential {
  public:
    explicit Quadratic(scout::Matrix a) : a_(std::move(a)) {}

    [[nodiscard]] std::string name() const override { return "quadratic"; }
    [[nodiscard]] scout::Index dim() const override { return a_.rows(); }
    [[nodiscard]] double value(scout::VectorCRef x) const override { return 0.5 * x.dot(a_ * x); }
    using Potential::gradient;
    using Potential::hvp;
    void gradient(scout::VectorCRef x, scout::VectorRef g) const override { g.noalias() = a_ * x; }
    void hvp(scout::VectorCRef, scout::VectorCRef y, scout::VectorRef out) const override { out.noalias() = a_ * y; }
    [[nodiscard]] scout::Matrix hessian(scout::VectorCRef) const override { return a_; }

  private:
    scout::Matrix a_;
  };

}  // namespace testing_support
