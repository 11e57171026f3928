#include "scout/potentials.hpp"

#include <cmath>

namespace scout {

  // ----------------------------------------------------------------------------------------------- DoubleWellFlat

  double DoubleWellFlat::value(VectorCRef x) const {
    double const x2 = x[0] * x[0];
    return E_ * (C_ * x2 * x2 - x2) + mu_ * x[1] * x[1];
  }

  void DoubleWellFlat::gradient(VectorCRef x, VectorRef g) const {
    g[0] = E_ * (4 * C_ * x[0] * x[0] * x[0] - 2 * x[0]);
    g[1] = 2 * mu_ * x[1];
  }

  void DoubleWellFlat::hvp(VectorCRef x, VectorCRef y, VectorRef out) const {
    out[0] = E_ * (12 * C_ * x[0] * x[0] - 2) * y[0];
    out[1] = 2 * mu_ * y[1];
  }

  Matrix DoubleWellFlat::hessian(VectorCRef x) const {
    Matrix h = Matrix::Zero(2, 2);
    h(0, 0) = E_ * (12 * C_ * x[0] * x[0] - 2);
    h(1, 1) = 2 * mu_;
    return h;
  }

  double DoubleWellFlat::minimum_x() const { return 1.0 / std::sqrt(2 * C_); }

  // -------------------------------------------------------------------------------------------- DoubleWellQuartic

  double DoubleWellQuartic::value(VectorCRef x) const {
    double const s = 1 - x[0] * x[0];
    return s * s + 2 * x[1] * x[1];
  }

  void DoubleWellQuartic::gradient(VectorCRef x, VectorRef g) const {
    g[0] = -4 * x[0] * (1 - x[0] * x[0]);
    g[1] = 4 * x[1];
  }

  void DoubleWellQuartic::hvp(VectorCRef x, VectorCRef y, VectorRef out) const {
    out[0] = (12 * x[0] * x[0] - 4) * y[0];
    out[1] = 4 * y[1];
  }

  Matrix DoubleWellQuartic::hessian(VectorCRef x) const {
    Matrix h = Matrix::Zero(2, 2);
    h(0, 0) = 12 * x[0] * x[0] - 4;
    h(1, 1) = 4;
    return h;
  }

  // ------------------------------------------------------------------------------------------------- MuellerBrown

  void MuellerBrown::eval(VectorCRef x, double* v, double* g, double* h) const {
    double val = 0, gx = 0, gy = 0, hxx = 0, hxy = 0, hyy = 0;

    for (std::size_t k = 0; k < 4; ++k) {
      double const dx = x[0] - p_.x0[k];
      double const dy = x[1] - p_.y0[k];
      double const e = p_.A[k] * std::exp(p_.a[k] * dx * dx + p_.b[k] * dx * dy + p_.c[k] * dy * dy);
      double const px = 2 * p_.a[k] * dx + p_.b[k] * dy;
      double const py = p_.b[k] * dx + 2 * p_.c[k] * dy;
      val += e;
      gx += e * px;
      gy += e * py;
      hxx += e * (px * px + 2 * p_.a[k]);
      hxy += e * (px * py + p_.b[k]);
      hyy += e * (py * py + 2 * p_.c[k]);
    }

    if (v) {
      *v = val;
    }
    if (g) {
      g[0] = gx;
      g[1] = gy;
    }
    if (h) {
      h[0] = hxx;
      h[1] = hxy;
      h[2] = hyy;
    }
  }

  double MuellerBrown::value(VectorCRef x) const {
    double v;
    eval(x, &v, nullptr, nullptr);
    return v;
  }

  void MuellerBrown::gradient(VectorCRef x, VectorRef g) const {
    double buf[2];
    eval(x, nullptr, buf, nullptr);
    g[0] = buf[0];
    g[1] = buf[1];
  }

  void MuellerBrown::hvp(VectorCRef x, VectorCRef y, VectorRef out) const {
    double h[3];
    eval(x, nullptr, nullptr, h);
    out[0] = h[0] * y[0] + h[1] * y[1];
    out[1] = h[1] * y[0] + h[2] * y[1];
  }

  void MuellerBrown::gradient_hvp(VectorCRef x, VectorCRef y, VectorRef g, VectorRef hy) const {
    double gb[2], h[3];
    eval(x, nullptr, gb, h);
    g[0] = gb[0];
    g[1] = gb[1];
    double const y0 = y[0], y1 = y[1];
    hy[0] = h[0] * y0 + h[1] * y1;
    hy[1] = h[1] * y0 + h[2] * y1;
  }

  Matrix MuellerBrown::hessian(VectorCRef x) const {
    double h[3];
    eval(x, nullptr, nullptr, h);
    Matrix m(2, 2);
    m << h[0], h[1], h[1], h[2];
    return m;
  }

  // -------------------------------------------------------------------------------------------------- Challenge2D

  namespace {

    constexpr double kWellX = 5.0;
    constexpr double kWellY = 5.0;

    double well(double x, double y) {
      double const dx = x - kWellX, dy = y - kWellY;
      return std::exp(-(dx * dx + dy * dy));
    }

  }  // namespace

  double Challenge2D::value(VectorCRef x) const {
    double const r2 = x[0] * x[0] + x[1] * x[1];
    double const v1 = r2 * r2 + x[0] * x[0] - x[1] * x[1] - x[0] + x[1];
    return v1 / Z_ - well(x[0], x[1]);
  }

  void Challenge2D::gradient(VectorCRef x, VectorRef g) const {
    double const r2 = x[0] * x[0] + x[1] * x[1];
    double const w = well(x[0], x[1]);
    g[0] = (4 * x[0] * r2 + 2 * x[0] - 1) / Z_ + 2 * (x[0] - kWellX) * w;
    g[1] = (4 * x[1] * r2 - 2 * x[1] + 1) / Z_ + 2 * (x[1] - kWellY) * w;
  }

  Matrix Challenge2D::hessian(VectorCRef x) const {
    double const w = well(x[0], x[1]);
    double const dx = x[0] - kWellX, dy = x[1] - kWellY;
    Matrix h(2, 2);
    h(0, 0) = (12 * x[0] * x[0] + 4 * x[1] * x[1] + 2) / Z_ - (4 * dx * dx - 2) * w;
    h(1, 1) = (4 * x[0] * x[0] + 12 * x[1] * x[1] - 2) / Z_ - (4 * dy * dy - 2) * w;
    h(0, 1) = 8 * x[0] * x[1] / Z_ - 4 * dx * dy * w;
    h(1, 0) = h(0, 1);
    return h;
  }

  void Challenge2D::hvp(VectorCRef x, VectorCRef y, VectorRef out) const {
    Matrix const h = hessian(x);
    out = h * y;
  }

  // ----------------------------------------------------------------------------------------------------- Registry

  std::vector<std::string> potential_names() {
    return {"double-well-flat", "double-well-quartic", "mueller-brown", "challenge-2d", "morse-vacancy", "lj7"};
  }

  std::string potential_description(const std::string& name) {
    if (name == "double-well-flat") {
      return "dim 2: E(Cx^4 - x^2) + mu y^2, E=2e-4, C=0.045, mu=1e-3; saddle (0,0), minima x=+-(2C)^(-1/2)";
    }
    if (name == "double-well-quartic") {
      return "dim 2: (1-x^2)^2 + 2y^2; minima (+-1,0), saddle (0,0)";
    }
    if (name == "mueller-brown") {
      return "dim 2: four-Gaussian Mueller-Brown surface; 3 minima, 2 saddles";
    }
    if (name == "challenge-2d") {
      return "dim 2: V1/4000 - exp(-|x-(5,5)|^2); disconnected index-1 region";
    }
    if (name == "morse-vacancy") {
      return "dim 2*free: Morse pairs (D=1, a=4.4, r0=1) on a triangular lattice with a vacancy; default 23 free atoms";
    }
    if (name == "lj7") {
      return "dim 14: 7-atom Lennard-Jones cluster in 2D, sigma=epsilon=1";
    }
    throw ConfigError("unknown potential '" + name + "'");
  }

  std::unique_ptr<Potential> make_potential(const std::string& name) {
    if (name == "double-well-flat") {
      return std::make_unique<DoubleWellFlat>();
    }
    if (name == "double-well-quartic") {
      return std::make_unique<DoubleWellQuartic>();
    }
    if (name == "mueller-brown") {
      return std::make_unique<MuellerBrown>();
    }
    if (name == "challenge-2d") {
      return std::make_unique<Challenge2D>();
    }
    if (name == "morse-vacancy") {
      return std::make_unique<MorseVacancy>(hex_vacancy_lattice(7, 23));
    }
    if (name == "lj7") {
      return std::make_unique<LennardJones2D>(7);
    }
    throw ConfigError("unknown potential '" + name + "'");
  }

}  // namespace scout
