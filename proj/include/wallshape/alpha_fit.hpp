#pragma once

#include <map>
#include <span>
#include <vector>

#include "wallshape/analytic.hpp"

namespace wallshape {

/// Setup of the truncated mode-error sum e_dx(alpha) and of its minimizer.
struct FitConfig {
  double dx = 0.05;       ///< grid size; modes are kept for |n| <= L/dx
  double L = 2.0;         ///< strip length
  double ell = 0.5;       ///< half height of the duct
  double k_spacing = 0.0; ///< wavenumber step; <= 0 means pi/(2*ell)
  std::map<int, cplx> g_spectrum = {{0, cplx{1.0, 0.0}}};
  double A = 1.0, B = 1.0;

  double simplex_scale = 0.25;  ///< initial simplex edge relative to |alpha0|
  int max_iterations = 4000;    ///< objective evaluation budget per fit
  double tolerance = 1e-14;
  int restarts = 2;
  double penalty_weight = 1e4;  ///< quadratic penalty for leaving Re>0, Im<0
  bool warm_start = true;       ///< seed each sweep fit from the previous omega

  double mode_spacing() const;
  int max_mode_index() const;
};

struct AlphaRow {
  double omega = 0.0;
  cplx alpha{0.0, 0.0};
  double error = 0.0;
  int iterations = 0;
  bool converged = false;
};

struct AlphaTable {
  std::vector<AlphaRow> rows;
  bool all_converged() const;
};

struct FitDiagnostics {
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
};

/// Truncated total error  e_dx(alpha) = sum_{|n| <= L/dx} e_{k_n}(alpha)
/// over the configured g-spectrum.  No quadrant constraint here; throws a
/// SingularModeError naming the offending mode if one is singular.
double total_error(cplx alpha, double omega, const FitConfig& cfg,
                   const MaterialParams& mat);

struct FitResult {
  cplx alpha;
  double error = 0.0;
  FitDiagnostics diagnostics;
};

/// Penalized Nelder-Mead minimization of total_error over complex alpha,
/// started at the k=0 matched impedance lambda1(0)*eta1.  An unconverged
/// search is reported through the diagnostics, not an exception.
FitResult fit_alpha(double omega, const FitConfig& cfg, const MaterialParams& mat);
FitResult fit_alpha_from(cplx alpha0, double omega, const FitConfig& cfg,
                         const MaterialParams& mat);

/// One fit per frequency; warm_start seeds each fit with the previous
/// optimum (sequential by contract).
AlphaTable alpha_sweep(std::span<const double> omegas, const FitConfig& cfg,
                       const MaterialParams& mat, bool warm_start = true);

}  // namespace wallshape
