#include <doctest.h>

#include <algorithm>
#include <numbers>
#include <numeric>
#include <random>

#include "oracles.hpp"
#include "wallshape/fem.hpp"

using namespace wallshape;

namespace {

Mesh flat_mesh(int n, double L = 2.0, double ell = 0.5) {
  const auto s = make_flat_shape(2, L, ell, 0.5, 4.0, 10.0);
  return build_wall_mesh(s, n, n);
}

void retag(Mesh& mesh, EdgeTag from, EdgeTag to) {
  for (auto& e : mesh.boundary_edges)
    if (e.tag == from) e.tag = to;
}

double max_abs(std::span<const cplx> v) {
  double m = 0.0;
  for (const auto& z : v) m = std::max(m, std::abs(z));
  return m;
}

}  // namespace

TEST_CASE("unit right triangle has the textbook P1 stiffness matrix") {
  Mesh mesh;
  mesh.nodes = {{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}};
  mesh.triangles = {{0, 1, 2}};
  mesh.boundary_edges = {{0, 1, EdgeTag::Dirichlet},
                         {1, 2, EdgeTag::Dirichlet},
                         {2, 0, EdgeTag::Dirichlet}};
  const auto K = SparseComplexMatrix::from_triplets(3, stiffness_triplets(mesh));
  CHECK(K.coeff(0, 0) == cplx{1.0, 0.0});
  CHECK(K.coeff(1, 1) == cplx{0.5, 0.0});
  CHECK(K.coeff(2, 2) == cplx{0.5, 0.0});
  CHECK(K.coeff(0, 1) == cplx{-0.5, 0.0});
  CHECK(K.coeff(0, 2) == cplx{-0.5, 0.0});
  CHECK(K.coeff(1, 2) == cplx{0.0, 0.0});
}

TEST_CASE("assembled matrix is complex-symmetric, exactly") {
  auto shape = make_flat_shape(5, 2.0, 0.5, 0.5, 4.0, 10.0);
  shape.heights = {0.0, 0.2, 0.05, 0.3, 0.1};
  HelmholtzProblem p;
  p.mesh = build_wall_mesh(shape, 7, 6);
  p.omega = 5.5;
  p.alpha = cplx{1.5, -2.5};
  const auto [A, b] = assemble(p);
  CHECK(A.max_asymmetry() == 0.0);
  CHECK(max_abs(b) == 0.0);  // f = h = 0
}

TEST_CASE("matrix equals K - w^2 M + alpha M_Gamma") {
  HelmholtzProblem p;
  p.mesh = flat_mesh(3);
  p.omega = 2.0;
  p.alpha = cplx{0.7, -1.1};
  const auto [A, b] = assemble(p);

  const int n = static_cast<int>(p.mesh.nodes.size());
  const auto K = SparseComplexMatrix::from_triplets(n, stiffness_triplets(p.mesh));
  const auto M = SparseComplexMatrix::from_triplets(n, mass_triplets(p.mesh));
  std::vector<cplx> robin(3, p.alpha);  // 3 Robin edges on the right wall for ny = 3
  const auto MG = SparseComplexMatrix::from_triplets(n, boundary_mass_triplets(p.mesh, robin));

  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const cplx expected = K.coeff(i, j) - p.omega * p.omega * M.coeff(i, j) + MG.coeff(i, j);
      CHECK(std::abs(A.coeff(i, j) - expected) <= 1e-14 * (std::abs(expected) + 1.0));
    }
}

TEST_CASE("omega = 0: constant Dirichlet data propagates iff no Robin term") {
  HelmholtzProblem p;
  p.mesh = flat_mesh(4);
  retag(p.mesh, EdgeTag::Robin, EdgeTag::Neumann);
  p.omega = 0.0;
  p.alpha = cplx{2.0, 0.0};
  p.g = [](double, double) { return cplx{3.0, 0.0}; };
  const auto sol = solve(p);
  for (const auto& z : sol.u) CHECK(std::abs(z - cplx{3.0, 0.0}) <= 1e-12);

  HelmholtzProblem q;
  q.mesh = flat_mesh(4);
  q.omega = 0.0;
  q.alpha = cplx{2.0, 0.0};  // real alpha, coercive
  const auto sol_q = solve(q);
  CHECK(max_abs(sol_q.u) <= 1e-12);
  REQUIRE(!sol_q.report.warnings.empty());  // quadrant warning for real alpha
}

TEST_CASE("patch test: linears are reproduced exactly") {
  HelmholtzProblem p;
  p.mesh = flat_mesh(2);  // 9 nodes, one interior
  retag(p.mesh, EdgeTag::Robin, EdgeTag::Dirichlet);
  retag(p.mesh, EdgeTag::Neumann, EdgeTag::Dirichlet);
  p.omega = 3.0;
  const auto exact = [](double x, double y) { return cplx{1.0 + 2.0 * x - 3.0 * y, 0.0}; };
  p.g = exact;
  p.f = [&](double x, double y) { return p.omega * p.omega * exact(x, y); };
  const auto sol = solve(p);
  for (std::size_t i = 0; i < sol.u.size(); ++i) {
    const auto& node = p.mesh.nodes[i];
    CHECK(std::abs(sol.u[i] - exact(node[0], node[1])) <= 1e-12);
  }
}

TEST_CASE("zero data gives the zero solution with a tiny residual") {
  HelmholtzProblem p;
  p.mesh = flat_mesh(8);
  p.omega = 4.0;
  p.alpha = cplx{1.0, -1.0};
  const auto sol = solve(p);
  CHECK(max_abs(sol.u) <= 1e-10);
  CHECK(sol.report.residual <= 1e-10);
  CHECK(sol.report.free_nodes == 9 * 9 - 9);
}

TEST_CASE("solve refuses a boundary with neither Dirichlet nor Robin edges") {
  HelmholtzProblem p;
  p.mesh = flat_mesh(2);
  retag(p.mesh, EdgeTag::Robin, EdgeTag::Neumann);
  retag(p.mesh, EdgeTag::Dirichlet, EdgeTag::Neumann);
  p.omega = 1.0;
  CHECK_THROWS_AS(solve(p), std::invalid_argument);
}

TEST_CASE("missing Robin edges are flagged in the report") {
  HelmholtzProblem p;
  p.mesh = flat_mesh(3);
  retag(p.mesh, EdgeTag::Robin, EdgeTag::Neumann);
  p.omega = 1.0;
  p.g = [](double, double) { return cplx{1.0, 0.0}; };
  const auto sol = solve(p);
  REQUIRE(!sol.report.warnings.empty());
  CHECK(sol.report.warnings[0].find("Robin") != std::string::npos);
}

TEST_CASE("superposition over volume sources") {
  HelmholtzProblem p;
  p.mesh = flat_mesh(8);
  p.omega = 3.0;
  p.alpha = cplx{1.0, -0.5};
  const ScalarField f1 = [](double x, double y) { return cplx{x * y, 0.3}; };
  const ScalarField f2 = [](double x, double y) { return cplx{std::sin(x), y}; };

  auto pa = p; pa.f = f1;
  auto pb = p; pb.f = f2;
  auto pc = p;
  pc.f = [&](double x, double y) { return f1(x, y) + f2(x, y); };

  const auto ua = solve(pa).u, ub = solve(pb).u, uc = solve(pc).u;
  double scale = std::max(max_abs(uc), 1e-30), worst = 0.0;
  for (std::size_t i = 0; i < uc.size(); ++i)
    worst = std::max(worst, std::abs(uc[i] - ua[i] - ub[i]));
  CHECK(worst <= 1e-9 * scale);
}

TEST_CASE("FEM converges at second order to the analytic damped mode") {
  const auto mat = MaterialParams::isorel();
  const double omega = 2000.0, L = 2.0, ell = 0.5;
  const double k = std::numbers::pi / (2.0 * ell);  // first transverse mode
  const cplx alpha{2.0, -3.0};

  ModeProblem mp;
  mp.k = k;
  mp.omega = omega;
  mp.L = L;
  mp.g_k = 1.0;
  mp.materials = mat;

  std::vector<double> errs;
  for (int n : {16, 32, 64}) {
    HelmholtzProblem p;
    p.mesh = flat_mesh(n, L, ell);
    p.omega = omega * std::sqrt(mat.xi0 / mat.eta0);
    p.alpha = alpha;
    p.g = [&](double, double y) { return cplx{std::cos(k * (y + ell)), 0.0}; };
    const auto sol = solve(p);
    CHECK(sol.report.residual <= 1e-10);

    std::vector<cplx> diff(sol.u.size());
    for (std::size_t i = 0; i < sol.u.size(); ++i) {
      const auto& node = p.mesh.nodes[i];
      diff[i] = sol.u[i] - mode_u2(mp, alpha, node[0]) * std::cos(k * (node[1] + ell));
    }
    double e2 = 0.0;
    for (const auto& t : mass_triplets(p.mesh))
      e2 += t.value.real() * (std::conj(diff[t.row]) * diff[t.col]).real();
    errs.push_back(std::sqrt(std::max(0.0, e2)));
  }
  const double order1 = std::log2(errs[0] / errs[1]);
  const double order2 = std::log2(errs[1] / errs[2]);
  CHECK(order1 >= 1.8);
  CHECK(order1 <= 2.2);
  CHECK(order2 >= 1.8);
  CHECK(order2 <= 2.2);
}

TEST_CASE("solution is invariant under a node permutation") {
  auto shape = make_flat_shape(4, 2.0, 0.5, 0.5, 4.0, 10.0);
  shape.heights = {0.1, 0.3, 0.0, 0.2};
  HelmholtzProblem p;
  p.mesh = build_wall_mesh(shape, 6, 6);
  p.omega = 4.0;
  p.alpha = cplx{1.0, -1.0};
  p.g = [](double, double y) { return cplx{y, 1.0}; };
  p.f = [](double x, double y) { return cplx{x, -y}; };
  const auto base = solve(p);

  const int n = static_cast<int>(p.mesh.nodes.size());
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::mt19937_64 rng(99);
  std::shuffle(perm.begin(), perm.end(), rng);

  HelmholtzProblem q = p;
  q.mesh.nodes.assign(n, {0.0, 0.0});
  for (int i = 0; i < n; ++i) q.mesh.nodes[perm[i]] = p.mesh.nodes[i];
  for (auto& tri : q.mesh.triangles)
    for (auto& v : tri) v = perm[v];
  for (auto& e : q.mesh.boundary_edges) {
    e.a = perm[e.a];
    e.b = perm[e.b];
  }
  const auto permuted = solve(q);

  const double scale = std::max(max_abs(base.u), 1e-30);
  for (int i = 0; i < n; ++i)
    CHECK(std::abs(permuted.u[perm[i]] - base.u[i]) <= 1e-12 * scale);
}

TEST_CASE("variational residual vanishes in V_h and rejects bad test vectors") {
  HelmholtzProblem p;
  p.mesh = flat_mesh(6);
  p.omega = 3.5;
  p.alpha = cplx{1.0, -2.0};
  p.h = [](double, double y) { return cplx{1.0 + y, -0.5}; };  // Robin-driven, g = 0
  const auto sol = solve(p);

  const auto [A, b] = assemble(p);
  double bnorm = 0.0, unorm = 0.0;
  for (const auto& z : b) bnorm += std::norm(z);
  for (const auto& z : sol.u) unorm += std::norm(z);
  const double scale = std::sqrt(bnorm) * std::sqrt(unorm) + 1e-30;

  // v = 0
  std::vector<cplx> zero(sol.u.size(), cplx{0.0, 0.0});
  CHECK(variational_residual(sol, zero) == cplx{0.0, 0.0});

  // v = u_h itself (g = 0 so u_h lies in V_h)
  CHECK(std::abs(variational_residual(sol, sol.u)) <= 1e-9 * scale);

  // random v in V_h
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<cplx> v(sol.u.size());
  for (auto& z : v) z = cplx{u(rng), u(rng)};
  for (int d : dirichlet_nodes(p.mesh)) v[d] = 0.0;
  CHECK(std::abs(variational_residual(sol, v)) <= 1e-9 * scale);

  // contract violation: nonzero on the Dirichlet side
  v[dirichlet_nodes(p.mesh)[0]] = cplx{1.0, 0.0};
  CHECK_THROWS_AS(variational_residual(sol, v), std::invalid_argument);
}

TEST_CASE("imaginary-part energy identity balances the boundary damping") {
  HelmholtzProblem p;
  p.mesh = flat_mesh(12);
  p.omega = 5.0;
  p.alpha = cplx{1.3, -0.9};
  p.h = [](double, double y) { return cplx{std::cos(y), 0.7 * y}; };
  p.f = [](double x, double y) { return cplx{0.2 * x, 0.1 * y}; };
  const auto sol = solve(p);  // g = 0, so u_h is admissible as test function

  const auto [A, b] = assemble(p);
  const auto au = A.multiply(sol.u);
  cplx uAu = 0.0, ub = 0.0;
  for (std::size_t i = 0; i < sol.u.size(); ++i) {
    uAu += std::conj(sol.u[i]) * au[i];
    ub += std::conj(sol.u[i]) * b[i];
  }
  CHECK(std::abs(uAu.imag() - ub.imag()) <= 1e-8 * (std::abs(ub.imag()) + 1e-30));

  // the imaginary part of u^H A u is exactly the alpha-weighted boundary term
  const auto MG = SparseComplexMatrix::from_triplets(
      static_cast<int>(sol.u.size()), boundary_mass_triplets(p.mesh));
  const auto mgu = MG.multiply(sol.u);
  cplx uMGu = 0.0;
  for (std::size_t i = 0; i < sol.u.size(); ++i) uMGu += std::conj(sol.u[i]) * mgu[i];
  const double boundary_term = (p.alpha * uMGu).imag();
  CHECK(uAu.imag() == doctest::Approx(boundary_term).epsilon(1e-10));
}

TEST_CASE("per-edge alpha values reproduce the constant-alpha matrix") {
  HelmholtzProblem p;
  p.mesh = flat_mesh(4);
  p.omega = 2.0;
  p.alpha = cplx{1.0, -1.5};
  const auto [A1, b1] = assemble(p);

  auto q = p;
  q.alpha_per_edge.assign(4, p.alpha);
  const auto [A2, b2] = assemble(q);
  for (int i = 0; i < A1.rows(); ++i)
    for (int j = 0; j < A1.rows(); ++j) CHECK(A1.coeff(i, j) == A2.coeff(i, j));

  q.alpha_per_edge.resize(3);
  CHECK_THROWS_AS(assemble(q), std::invalid_argument);
}
