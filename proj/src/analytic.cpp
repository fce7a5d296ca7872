#include "wallshape/analytic.hpp"

#include <cmath>

namespace wallshape {

namespace {

double abs2(cplx z) { return z.real() * z.real() + z.imag() * z.imag(); }

// Everything below works with the rescaled denominator
//   F(x) = e^{-l0 L} f(x) = (l0 eta0 + x) + (l0 eta0 - x) S^2,   S = e^{-l0 L},
// so that the e^{+l0 L} growth never appears explicitly; |S| <= 1 since
// Re(l0) >= 0 on both branches.
struct ModeScaled {
  cplx lam0;
  cplx lam1eta1;
  cplx S;         // e^{-lam0 L}
  cplx chi_hat;   // chi = S * chi_hat
  cplx gamma_hat; // gamma = S * gamma_hat
};

cplx scaled_denominator(cplx lam0eta0, cplx x, cplx S2) {
  return (lam0eta0 + x) + (lam0eta0 - x) * S2;
}

void check_regular(cplx F, cplx lam0eta0, cplx x, const char* what) {
  const double scale = (std::abs(lam0eta0) + std::abs(x)) * 2.0 + 1e-300;
  if (std::abs(F) <= 1e-13 * scale)
    throw SingularModeError(std::string("singular mode configuration: f(") + what +
                            ") vanishes");
}

ModeScaled make_scaled(const ModeProblem& mp, cplx alpha) {
  const MaterialParams& mat = mp.materials;
  ModeScaled ms;
  ms.lam0 = lambda0(mp.k, mp.omega, mat);
  ms.lam1eta1 = lambda1(mp.k, mp.omega, mat) * mat.eta1;
  ms.S = std::exp(-ms.lam0 * mp.L);
  const cplx l0e0 = ms.lam0 * mat.eta0;
  const cplx S2 = ms.S * ms.S;

  const cplx F1 = scaled_denominator(l0e0, ms.lam1eta1, S2);
  const cplx Fa = scaled_denominator(l0e0, alpha, S2);
  check_regular(F1, l0e0, ms.lam1eta1, "lambda1*eta1");
  check_regular(Fa, l0e0, alpha, "alpha");

  ms.chi_hat = mp.g_k * ((l0e0 - ms.lam1eta1) / F1 - (l0e0 - alpha) / Fa);
  ms.gamma_hat = mp.g_k * ((l0e0 + ms.lam1eta1) / F1 - (l0e0 + alpha) / Fa);
  return ms;
}

bool evanescent(const ModeProblem& mp) {
  const MaterialParams& mat = mp.materials;
  return mp.k * mp.k >= mat.xi0 / mat.eta0 * mp.omega * mp.omega;
}

// u(x) = g [ (l0 e0 - x0) e^{l0 (x-L)} + (l0 e0 + x0) e^{-l0 (x+L)} ] / F(x0)
// with x0 the matched coefficient (lambda1*eta1 or alpha); both exponents are
// nonpositive-real-part for x in [-L, 0].
cplx mode_solution(const ModeProblem& mp, cplx x0, double x) {
  const MaterialParams& mat = mp.materials;
  const cplx lam0 = lambda0(mp.k, mp.omega, mat);
  const cplx l0e0 = lam0 * mat.eta0;
  const cplx S = std::exp(-lam0 * mp.L);
  const cplx F = scaled_denominator(l0e0, x0, S * S);
  check_regular(F, l0e0, x0, "mode denominator");
  return mp.g_k *
         ((l0e0 - x0) * std::exp(lam0 * (x - mp.L)) +
          (l0e0 + x0) * std::exp(-lam0 * (x + mp.L))) /
         F;
}

}  // namespace

cplx lambda0(double k, double omega, const MaterialParams& mat) {
  const double cut = mat.xi0 / mat.eta0 * omega * omega;
  const double k2 = k * k;
  if (k2 >= cut) return {std::sqrt(k2 - cut), 0.0};
  return {0.0, std::sqrt(cut - k2)};
}

cplx lambda1(double k, double omega, const MaterialParams& mat) {
  // explicit root of lambda1^2 = k^2 - (1 + a i/(xi1 w)) xi1/eta1 w^2
  // on the branch Re >= 0, Im <= 0
  const double p = k * k - mat.xi1 / mat.eta1 * omega * omega;
  const double q = mat.a * omega / mat.eta1;
  const double hyp = std::hypot(p, q);
  const double re = std::sqrt(std::max(0.0, 0.5 * (hyp + p)));
  const double im = -std::sqrt(std::max(0.0, 0.5 * (hyp - p)));
  return {re, im};
}

std::pair<cplx, cplx> chi_gamma(const ModeProblem& mp, cplx alpha) {
  if (!(mp.omega > 0.0) || !(mp.L > 0.0))
    throw std::invalid_argument("chi_gamma: omega and L must be positive");
  const ModeScaled ms = make_scaled(mp, alpha);
  return {ms.S * ms.chi_hat, ms.S * ms.gamma_hat};
}

cplx mode_u0(const ModeProblem& mp, double x) {
  return mode_solution(mp, lambda1(mp.k, mp.omega, mp.materials) * mp.materials.eta1, x);
}

cplx mode_u2(const ModeProblem& mp, cplx alpha, double x) {
  return mode_solution(mp, alpha, x);
}

double mode_error(const ModeProblem& mp, cplx alpha, double A, double B) {
  if (!(mp.omega > 0.0) || !(mp.L > 0.0))
    throw std::invalid_argument("mode_error: omega and L must be positive");
  if (!(A >= 0.0) || !(B >= 0.0))
    throw std::invalid_argument("mode_error: weights must be nonnegative");
  if (A == 0.0 && B == 0.0) return 0.0;

  const ModeScaled ms = make_scaled(mp, alpha);
  const double L = mp.L;
  const double k2 = mp.k * mp.k;
  cplx e;
  double term_scale;

  if (evanescent(mp)) {
    // lam0 real: rewrite the paper's combination with chi = S chi_hat,
    // gamma = S gamma_hat so e^{2 l0 L} |gamma|^2 stays finite:
    //   |chi|^2 (1 - e^{-2 l0 L})       = |chi_hat|^2 S^2 (1 - S^2)
    //   |gamma|^2 (e^{2 l0 L} - 1)      = |gamma_hat|^2 (1 - S^2)
    //   Re(chi conj(gamma))             = S^2 Re(chi_hat conj(gamma_hat))
    const cplx S2 = ms.S * ms.S;
    const cplx sum = abs2(ms.chi_hat) * S2 * (1.0 - S2) + abs2(ms.gamma_hat) * (1.0 - S2);
    const cplx cross = S2 * ms.chi_hat * std::conj(ms.gamma_hat);
    const cplx l2 = sum / (2.0 * ms.lam0) + 2.0 * L * cross.real();
    const cplx h1x = ms.lam0 * sum * 0.5 - 2.0 * ms.lam0 * ms.lam0 * L * cross.real();
    e = (A + B * k2) * l2 + B * h1x;
    term_scale = std::abs((A + B * k2) * l2) + std::abs(B * h1x);
  } else {
    const cplx chi = ms.S * ms.chi_hat;
    const cplx gamma = ms.S * ms.gamma_hat;
    const double P = abs2(chi) + abs2(gamma);
    const cplx W = chi * std::conj(gamma) * (1.0 - ms.S * ms.S);
    const cplx i_unit{0.0, 1.0};
    const cplx l2 = L * P + i_unit / ms.lam0 * W.imag();
    const cplx h1x = L * abs2(ms.lam0) * P + i_unit * ms.lam0 * W.imag();
    e = (A + B * k2) * l2 + B * h1x;
    term_scale = std::abs((A + B * k2) * l2) + std::abs(B * h1x);
  }

  if (std::abs(e.imag()) > 1e-10 * (term_scale + 1e-300))
    throw std::logic_error("mode_error: non-negligible imaginary part");
  return e.real();
}

}  // namespace wallshape
