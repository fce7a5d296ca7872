#pragma once

#include <map>
#include <span>

#include "wallshape/fem.hpp"
#include "wallshape/materials.hpp"

namespace wallshape {

struct EnergyWeights {
  double A = 1.0, B = 1.0, C = 1.0;
  double kappa = 1e3;    ///< volume-variation penalty
  double vol_ref = 0.0;  ///< Vol(Omega_0)
};

struct EnergyBreakdown {
  double total = 0.0;
  double l2_term = 0.0;        // A * ||u||^2
  double gradient_term = 0.0;  // B * ||grad u||^2
  double boundary_term = 0.0;  // C * ||Tr u||^2 on Gamma
};

/// J = A int |u|^2 + B int |grad u|^2 + C int_Gamma |u|^2, evaluated through
/// the real P1 mass/stiffness/boundary-mass matrices.
EnergyBreakdown energy_J(const HelmholtzSolution& sol, const EnergyWeights& w);

/// J1 = J + kappa (Vol(Omega) - vol_ref)^2.
double energy_J1(const HelmholtzSolution& sol, const EnergyWeights& w,
                 const ShapeParam& shape);

/// Same three integrals by direct element/edge quadrature (midpoint rule on
/// triangles, two-point Gauss on edges; both exact for squares of P1 fields).
/// Independent code path from energy_J.
EnergyBreakdown energy_J_quadrature(const HelmholtzSolution& sol, const EnergyWeights& w);

/// How a (shape, frequency, alpha) triple turns into a Helmholtz problem.
/// The physical frequency enters the air Helmholtz operator through the
/// dispersion omega_fem = omega * sqrt(xi0/eta0); the Dirichlet data is the
/// cosine mode expansion of the configured g-spectrum.
struct ProblemSetup {
  MaterialParams materials = MaterialParams::isorel();
  std::map<int, cplx> g_spectrum = {{0, cplx{1.0, 0.0}}};
  double k_spacing = 0.0;  ///< <= 0 means pi/(2*ell)
  int nx = 32, ny = 32;
  ScalarField f;  ///< optional volume source
  ScalarField h;  ///< optional Robin data
};

HelmholtzProblem make_problem(const ShapeParam& shape, const Mesh& mesh, double omega,
                              cplx alpha, const ProblemSetup& setup);

struct MultiFrequencyResult {
  double mean_J = 0.0;
  double mean_J1 = 0.0;
};

/// Arithmetic mean of J1 over the frequency set with its fitted alphas; the
/// mesh is built once per shape and reused.  Honors WALLSHAPE_THREADS.
MultiFrequencyResult multi_frequency_energy_detail(const ShapeParam& shape,
                                                   std::span<const double> omegas,
                                                   std::span<const cplx> alphas,
                                                   const EnergyWeights& w,
                                                   const ProblemSetup& setup);
double multi_frequency_energy(const ShapeParam& shape, std::span<const double> omegas,
                              std::span<const cplx> alphas, const EnergyWeights& w,
                              const ProblemSetup& setup);

/// Worker cap: min(WALLSHAPE_THREADS, hardware), at least 1.
int worker_count();

}  // namespace wallshape
