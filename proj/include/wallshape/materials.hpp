#pragma once

#include <stdexcept>

namespace wallshape {

/// Macroscopic parameters of a porous absorber together with the damped-wave
/// PDE coefficients they induce.  Air occupies the lossless side (xi0, eta0),
/// the porous medium the lossy side (xi1, eta1, a).
struct MaterialParams {
  // base physical constants
  double phi;      ///< porosity, 0 < phi <= 1
  double gamma_p;  ///< ratio of specific heats
  double sigma;    ///< flow resistivity [N m^-4 s]
  double rho0;     ///< air density [kg/m^3]
  double alpha_h;  ///< tortuosity, >= 1
  double c0;       ///< sound speed in air [m/s]

  // derived PDE coefficients
  double xi0;   ///< 1/c0^2
  double eta0;  ///< 1
  double xi1;   ///< phi*gamma_p/c0^2
  double eta1;  ///< phi/alpha_h
  double a;     ///< sigma*phi^2*gamma_p/(c0^2*rho0*alpha_h)

  static MaterialParams make(double phi, double gamma_p, double sigma,
                             double rho0, double alpha_h, double c0) {
    if (!(phi > 0.0 && phi <= 1.0))
      throw std::invalid_argument("MaterialParams: porosity must be in (0,1]");
    if (!(alpha_h >= 1.0))
      throw std::invalid_argument("MaterialParams: tortuosity must be >= 1");
    if (!(gamma_p > 0.0 && sigma > 0.0 && rho0 > 0.0 && c0 > 0.0))
      throw std::invalid_argument("MaterialParams: all base fields must be positive");
    MaterialParams m;
    m.phi = phi;
    m.gamma_p = gamma_p;
    m.sigma = sigma;
    m.rho0 = rho0;
    m.alpha_h = alpha_h;
    m.c0 = c0;
    m.xi0 = 1.0 / (c0 * c0);
    m.eta0 = 1.0;
    m.xi1 = phi * gamma_p / (c0 * c0);
    m.eta1 = phi / alpha_h;
    m.a = sigma * phi * phi * gamma_p / (c0 * c0 * rho0 * alpha_h);
    return m;
  }

  /// ISOREL building-insulation board.
  static MaterialParams isorel() {
    return make(0.7, 1.4, 142300.0, 1.2, 1.15, 340.0);
  }
};

}  // namespace wallshape
