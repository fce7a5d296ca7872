#include "wallshape/energy.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <future>
#include <numbers>
#include <stdexcept>
#include <thread>

namespace wallshape {

namespace {

double quadratic_form(const std::vector<SparseComplexMatrix::Triplet>& trip,
                      std::span<const cplx> u) {
  // sum conj(u_i) T_ij u_j for real-valued triplets; imaginary parts cancel
  double acc = 0.0;
  for (const auto& t : trip)
    acc += t.value.real() * (std::conj(u[t.row]) * u[t.col]).real();
  return acc;
}

}  // namespace

EnergyBreakdown energy_J(const HelmholtzSolution& sol, const EnergyWeights& w) {
  if (!(w.A >= 0.0 && w.B >= 0.0 && w.C >= 0.0 && w.A + w.B + w.C > 0.0))
    throw std::invalid_argument("energy_J: need nonnegative weights with A+B+C > 0");
  const Mesh& mesh = sol.problem.mesh;
  EnergyBreakdown e;
  e.l2_term = w.A * quadratic_form(mass_triplets(mesh), sol.u);
  e.gradient_term = w.B * quadratic_form(stiffness_triplets(mesh), sol.u);
  e.boundary_term = w.C * quadratic_form(boundary_mass_triplets(mesh), sol.u);
  e.total = e.l2_term + e.gradient_term + e.boundary_term;
  return e;
}

double energy_J1(const HelmholtzSolution& sol, const EnergyWeights& w,
                 const ShapeParam& shape) {
  const double dv = domain_volume(shape) - w.vol_ref;
  return energy_J(sol, w).total + w.kappa * dv * dv;
}

EnergyBreakdown energy_J_quadrature(const HelmholtzSolution& sol, const EnergyWeights& w) {
  const Mesh& mesh = sol.problem.mesh;
  EnergyBreakdown e;

  for (int t = 0; t < static_cast<int>(mesh.triangles.size()); ++t) {
    const auto& tri = mesh.triangles[t];
    const auto& p0 = mesh.nodes[tri[0]];
    const auto& p1 = mesh.nodes[tri[1]];
    const auto& p2 = mesh.nodes[tri[2]];
    const double det = (p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1]);
    const double area = 0.5 * det;

    // edge-midpoint rule, exact for quadratics
    const cplx u0 = sol.u[tri[0]], u1 = sol.u[tri[1]], u2 = sol.u[tri[2]];
    const cplx m01 = 0.5 * (u0 + u1), m12 = 0.5 * (u1 + u2), m20 = 0.5 * (u2 + u0);
    e.l2_term += area / 3.0 * (std::norm(m01) + std::norm(m12) + std::norm(m20));

    const cplx gx = (u0 * (p1[1] - p2[1]) + u1 * (p2[1] - p0[1]) + u2 * (p0[1] - p1[1])) / det;
    const cplx gy = (u0 * (p2[0] - p1[0]) + u1 * (p0[0] - p2[0]) + u2 * (p1[0] - p0[0])) / det;
    e.gradient_term += area * (std::norm(gx) + std::norm(gy));
  }

  const double gauss = 1.0 / std::sqrt(3.0);
  for (const auto& edge : mesh.boundary_edges) {
    if (edge.tag != EdgeTag::Robin) continue;
    const auto& pa = mesh.nodes[edge.a];
    const auto& pb = mesh.nodes[edge.b];
    const double le = std::hypot(pb[0] - pa[0], pb[1] - pa[1]);
    const cplx ua = sol.u[edge.a], ub = sol.u[edge.b];
    for (double xi : {-gauss, gauss}) {
      const double s = 0.5 * (1.0 + xi);
      e.boundary_term += 0.5 * le * std::norm(ua + (ub - ua) * s);
    }
  }

  e.l2_term *= w.A;
  e.gradient_term *= w.B;
  e.boundary_term *= w.C;
  e.total = e.l2_term + e.gradient_term + e.boundary_term;
  return e;
}

HelmholtzProblem make_problem(const ShapeParam& shape, const Mesh& mesh, double omega,
                              cplx alpha, const ProblemSetup& setup) {
  const double dk = setup.k_spacing > 0.0
                        ? setup.k_spacing
                        : std::numbers::pi / (2.0 * shape.half_height);
  const double ell = shape.half_height;
  const auto spectrum = setup.g_spectrum;

  HelmholtzProblem p;
  p.mesh = mesh;
  p.omega = omega * std::sqrt(setup.materials.xi0 / setup.materials.eta0);
  p.alpha = alpha;
  p.f = setup.f;
  p.h = setup.h;
  p.g = [spectrum, dk, ell](double, double y) {
    cplx acc = 0.0;
    for (const auto& [n, gn] : spectrum) acc += gn * std::cos(n * dk * (y + ell));
    return acc;
  };
  return p;
}

int worker_count() {
  int hw = static_cast<int>(std::thread::hardware_concurrency());
  if (hw < 1) hw = 1;
  if (const char* env = std::getenv("WALLSHAPE_THREADS")) {
    const int cap = std::atoi(env);
    if (cap >= 1) hw = std::min(hw, cap);
  }
  return hw;
}

MultiFrequencyResult multi_frequency_energy_detail(const ShapeParam& shape,
                                                   std::span<const double> omegas,
                                                   std::span<const cplx> alphas,
                                                   const EnergyWeights& w,
                                                   const ProblemSetup& setup) {
  if (omegas.empty() || omegas.size() != alphas.size())
    throw std::invalid_argument("multi_frequency_energy: need matching nonempty omega/alpha lists");

  const Mesh mesh = build_wall_mesh(shape, setup.nx, setup.ny);
  const std::size_t n = omegas.size();
  std::vector<double> J(n), J1(n);

  auto eval_one = [&](std::size_t i) {
    const auto problem = make_problem(shape, mesh, omegas[i], alphas[i], setup);
    HelmholtzSolution sol;
    try {
      sol = solve(problem);
    } catch (const SingularSystemError& e) {
      throw SingularSystemError("multi_frequency_energy at omega=" +
                                std::to_string(omegas[i]) + ": " + e.what());
    }
    J[i] = energy_J(sol, w).total;
    const double dv = domain_volume(shape) - w.vol_ref;
    J1[i] = J[i] + w.kappa * dv * dv;
  };

  const int workers = std::min<int>(worker_count(), static_cast<int>(n));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) eval_one(i);
  } else {
    std::vector<std::future<void>> tasks;
    std::atomic<std::size_t> next{0};
    for (int t = 0; t < workers; ++t)
      tasks.push_back(std::async(std::launch::async, [&] {
        for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) eval_one(i);
      }));
    for (auto& t : tasks) t.get();  // rethrows solve failures
  }

  MultiFrequencyResult res;
  for (std::size_t i = 0; i < n; ++i) {
    res.mean_J += J[i];
    res.mean_J1 += J1[i];
  }
  res.mean_J /= static_cast<double>(n);
  res.mean_J1 /= static_cast<double>(n);
  return res;
}

double multi_frequency_energy(const ShapeParam& shape, std::span<const double> omegas,
                              std::span<const cplx> alphas, const EnergyWeights& w,
                              const ProblemSetup& setup) {
  return multi_frequency_energy_detail(shape, omegas, alphas, w, setup).mean_J1;
}

}  // namespace wallshape
