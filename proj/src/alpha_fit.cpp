#include "wallshape/alpha_fit.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "wallshape/nelder_mead.hpp"

namespace wallshape {

double FitConfig::mode_spacing() const {
  if (k_spacing > 0.0) return k_spacing;
  return std::numbers::pi / (2.0 * ell);
}

int FitConfig::max_mode_index() const {
  // highest mode representable on a grid of size dx
  return static_cast<int>(std::floor(L / dx + 1e-12));
}

bool AlphaTable::all_converged() const {
  for (const auto& r : rows)
    if (!r.converged) return false;
  return true;
}

double total_error(cplx alpha, double omega, const FitConfig& cfg,
                   const MaterialParams& mat) {
  if (!(cfg.dx > 0.0)) throw std::invalid_argument("total_error: dx must be positive");
  if (!(cfg.A >= 0.0 && cfg.B >= 0.0 && cfg.A + cfg.B > 0.0))
    throw std::invalid_argument("total_error: need A, B >= 0 with A + B > 0");

  const int n_max = cfg.max_mode_index();
  const double dk = cfg.mode_spacing();
  double total = 0.0;
  for (const auto& [n, g] : cfg.g_spectrum) {
    if (n < -n_max || n > n_max) continue;
    if (g == cplx{0.0, 0.0}) continue;
    ModeProblem mp;
    mp.k = n * dk;
    mp.omega = omega;
    mp.L = cfg.L;
    mp.g_k = g;
    mp.materials = mat;
    try {
      total += mode_error(mp, alpha, cfg.A, cfg.B);
    } catch (const SingularModeError& e) {
      throw SingularModeError("mode n=" + std::to_string(n) + ": " + e.what());
    }
  }
  return total;
}

namespace {

double quadrant_penalty(cplx alpha, double weight) {
  const double re_violation = std::max(0.0, -alpha.real());
  const double im_violation = std::max(0.0, alpha.imag());
  return weight * (re_violation * re_violation + im_violation * im_violation);
}

}  // namespace

FitResult fit_alpha_from(cplx alpha0, double omega, const FitConfig& cfg,
                         const MaterialParams& mat) {
  if (!(omega > 0.0)) throw std::invalid_argument("fit_alpha: omega must be positive");

  const double cap = std::numeric_limits<double>::max() / 4.0;
  auto objective = [&](const std::vector<double>& x) {
    const cplx alpha{x[0], x[1]};
    double value;
    try {
      value = total_error(alpha, omega, cfg, mat);
    } catch (const SingularModeError&) {
      // f(alpha) = 0 only happens outside the feasible quadrant; steer away
      return cap;
    }
    return value + quadrant_penalty(alpha, cfg.penalty_weight);
  };

  NelderMeadOptions opt;
  opt.max_evaluations = cfg.max_iterations;
  opt.f_tol = cfg.tolerance;
  opt.x_tol = 1e-9;
  opt.init_step = cfg.simplex_scale * std::max(1.0, std::abs(alpha0));
  opt.restarts = cfg.restarts;

  const auto nm = nelder_mead(objective, {alpha0.real(), alpha0.imag()}, opt);

  FitResult res;
  res.alpha = cplx{nm.x[0], nm.x[1]};
  res.error = total_error(res.alpha, omega, cfg, mat);
  res.diagnostics.iterations = nm.iterations;
  res.diagnostics.evaluations = nm.evaluations;
  const bool in_quadrant = res.alpha.real() > 0.0 && res.alpha.imag() < 0.0;
  res.diagnostics.converged = nm.converged && in_quadrant;
  return res;
}

FitResult fit_alpha(double omega, const FitConfig& cfg, const MaterialParams& mat) {
  const cplx alpha0 = lambda1(0.0, omega, mat) * mat.eta1;
  return fit_alpha_from(alpha0, omega, cfg, mat);
}

AlphaTable alpha_sweep(std::span<const double> omegas, const FitConfig& cfg,
                       const MaterialParams& mat, bool warm_start) {
  if (omegas.empty()) throw std::invalid_argument("alpha_sweep: empty frequency list");
  AlphaTable table;
  table.rows.reserve(omegas.size());
  cplx prev{0.0, 0.0};
  bool have_prev = false;
  for (double omega : omegas) {
    if (!(omega > 0.0)) throw std::invalid_argument("alpha_sweep: omega must be positive");
    const FitResult r = (warm_start && have_prev)
                            ? fit_alpha_from(prev, omega, cfg, mat)
                            : fit_alpha(omega, cfg, mat);
    table.rows.push_back({omega, r.alpha, r.error, r.diagnostics.iterations,
                          r.diagnostics.converged});
    prev = r.alpha;
    have_prev = true;
  }
  return table;
}

}  // namespace wallshape
