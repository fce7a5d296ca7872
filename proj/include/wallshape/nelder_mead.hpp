#pragma once

#include <functional>
#include <vector>

namespace wallshape {

struct NelderMeadOptions {
  int max_evaluations = 2000;
  double f_tol = 1e-13;    ///< relative spread of simplex values
  double x_tol = 1e-10;    ///< simplex diameter relative to initial step
  double init_step = 0.1;  ///< initial simplex edge length
  int restarts = 0;        ///< re-seed a fresh simplex around the best point
};

struct NelderMeadResult {
  std::vector<double> x;
  double fx = 0.0;
  int iterations = 0;    ///< accepted simplex updates
  int evaluations = 0;   ///< objective calls
  bool converged = false;
};

/// Downhill simplex over R^n (reflection 1, expansion 2, contraction 1/2,
/// shrink 1/2).  Deterministic for a deterministic objective.
NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                             std::vector<double> x0, const NelderMeadOptions& opt);

}  // namespace wallshape
