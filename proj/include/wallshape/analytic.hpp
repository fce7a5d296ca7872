#pragma once

#include <complex>
#include <stdexcept>
#include <utility>

#include "wallshape/materials.hpp"

namespace wallshape {

using cplx = std::complex<double>;

struct SingularModeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// One Fourier mode of the two-medium strip problem: wavenumber k in y,
/// angular frequency omega, strip length L and boundary amplitude g_k.
struct ModeProblem {
  double k = 0.0;
  double omega = 0.0;
  double L = 0.0;
  cplx g_k{1.0, 0.0};
  MaterialParams materials = MaterialParams::isorel();
};

/// Air-side axial exponent: real sqrt(k^2 - xi0/eta0 w^2) above cut-off,
/// i*sqrt(xi0/eta0 w^2 - k^2) below.
cplx lambda0(double k, double omega, const MaterialParams& mat);

/// Porous-side axial exponent, branch with Re >= 0 and Im <= 0 of
/// lambda1^2 = k^2 - (1 + a i/(xi1 w)) xi1/eta1 w^2.
cplx lambda1(double k, double omega, const MaterialParams& mat);

/// Reflection-mismatch coefficients (chi, gamma) of u0 - u2 =
/// chi e^{l0 x} + gamma e^{-l0 x}.  Throws SingularModeError when a
/// denominator f(.) vanishes.
std::pair<cplx, cplx> chi_gamma(const ModeProblem& mp, cplx alpha);

/// Two-medium mode solution on the air strip [-L, 0].
cplx mode_u0(const ModeProblem& mp, double x);

/// Boundary-damped mode solution with Robin coefficient alpha.
cplx mode_u2(const ModeProblem& mp, cplx alpha, double x);

/// Closed-form weighted discrepancy
///   e_k = A ||u0-u2||^2_{L2(-L,0)} + B ||grad(u0-u2)||^2_{L2(-L,0)}
/// evaluated in the regime selected by sign(k^2 - xi0/eta0 w^2).
/// Evaluated in an exponent-rescaled form so large real lambda0*L cannot
/// overflow.  Real and >= 0 up to rounding; zero iff alpha matches
/// lambda1*eta1 or g_k = 0.
double mode_error(const ModeProblem& mp, cplx alpha, double A, double B);

}  // namespace wallshape
