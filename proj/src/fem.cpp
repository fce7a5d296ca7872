#include "wallshape/fem.hpp"

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace wallshape {

SparseComplexMatrix SparseComplexMatrix::from_triplets(int n, std::vector<Triplet> triplets) {
  // stable sort keeps duplicate contributions in insertion order, so (i,j)
  // and (j,i) accumulate bitwise-identical sums from a symmetric element loop
  std::stable_sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });

  SparseComplexMatrix m;
  m.row_ptr_.assign(static_cast<std::size_t>(n) + 1, 0);
  std::size_t i = 0;
  while (i < triplets.size()) {
    const int r = triplets[i].row;
    const int c = triplets[i].col;
    cplx sum = 0.0;
    while (i < triplets.size() && triplets[i].row == r && triplets[i].col == c)
      sum += triplets[i++].value;
    m.col_idx_.push_back(c);
    m.values_.push_back(sum);
    m.row_ptr_[static_cast<std::size_t>(r) + 1]++;
  }
  for (int r = 0; r < n; ++r) m.row_ptr_[r + 1] += m.row_ptr_[r];
  return m;
}

cplx SparseComplexMatrix::coeff(int i, int j) const {
  for (int p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p)
    if (col_idx_[p] == j) return values_[p];
  return {0.0, 0.0};
}

std::vector<cplx> SparseComplexMatrix::multiply(std::span<const cplx> x) const {
  std::vector<cplx> y(static_cast<std::size_t>(rows()), cplx{0.0, 0.0});
  for (int r = 0; r < rows(); ++r)
    for (int p = row_ptr_[r]; p < row_ptr_[r + 1]; ++p)
      y[r] += values_[p] * x[col_idx_[p]];
  return y;
}

double SparseComplexMatrix::max_asymmetry() const {
  double worst = 0.0;
  for (int r = 0; r < rows(); ++r)
    for (int p = row_ptr_[r]; p < row_ptr_[r + 1]; ++p)
      worst = std::max(worst, std::abs(values_[p] - coeff(col_idx_[p], r)));
  return worst;
}

namespace {

using Triplet = SparseComplexMatrix::Triplet;

struct TriangleGeometry {
  double area;
  std::array<double, 3> bx, by;  // P1 basis gradients
};

TriangleGeometry triangle_geometry(const Mesh& mesh, int t) {
  const auto& tri = mesh.triangles[t];
  const auto& p0 = mesh.nodes[tri[0]];
  const auto& p1 = mesh.nodes[tri[1]];
  const auto& p2 = mesh.nodes[tri[2]];
  const double det = (p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1]);
  TriangleGeometry g;
  g.area = 0.5 * det;
  g.bx = {(p1[1] - p2[1]) / det, (p2[1] - p0[1]) / det, (p0[1] - p1[1]) / det};
  g.by = {(p2[0] - p1[0]) / det, (p0[0] - p2[0]) / det, (p1[0] - p0[0]) / det};
  return g;
}

double edge_length(const Mesh& mesh, const BoundaryEdge& e) {
  const auto& pa = mesh.nodes[e.a];
  const auto& pb = mesh.nodes[e.b];
  return std::hypot(pb[0] - pa[0], pb[1] - pa[1]);
}

std::vector<cplx> nodal_values(const Mesh& mesh, const ScalarField& field) {
  std::vector<cplx> v(mesh.nodes.size(), cplx{0.0, 0.0});
  if (field)
    for (std::size_t i = 0; i < mesh.nodes.size(); ++i)
      v[i] = field(mesh.nodes[i][0], mesh.nodes[i][1]);
  return v;
}

}  // namespace

std::vector<Triplet> stiffness_triplets(const Mesh& mesh) {
  std::vector<Triplet> trip;
  trip.reserve(mesh.triangles.size() * 9);
  for (int t = 0; t < static_cast<int>(mesh.triangles.size()); ++t) {
    const auto g = triangle_geometry(mesh, t);
    const auto& tri = mesh.triangles[t];
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b)
        trip.push_back({tri[a], tri[b], cplx{g.area * (g.bx[a] * g.bx[b] + g.by[a] * g.by[b]), 0.0}});
  }
  return trip;
}

std::vector<Triplet> mass_triplets(const Mesh& mesh) {
  std::vector<Triplet> trip;
  trip.reserve(mesh.triangles.size() * 9);
  for (int t = 0; t < static_cast<int>(mesh.triangles.size()); ++t) {
    const auto g = triangle_geometry(mesh, t);
    const auto& tri = mesh.triangles[t];
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b)
        trip.push_back({tri[a], tri[b], cplx{g.area / 12.0 * (a == b ? 2.0 : 1.0), 0.0}});
  }
  return trip;
}

std::vector<Triplet> boundary_mass_triplets(const Mesh& mesh,
                                            std::span<const cplx> edge_weights) {
  std::vector<Triplet> trip;
  std::size_t robin_index = 0;
  for (const auto& e : mesh.boundary_edges) {
    if (e.tag != EdgeTag::Robin) continue;
    const cplx w = edge_weights.empty() ? cplx{1.0, 0.0} : edge_weights[robin_index];
    ++robin_index;
    const double le = edge_length(mesh, e);
    const cplx diag = w * (le / 3.0), off = w * (le / 6.0);
    trip.push_back({e.a, e.a, diag});
    trip.push_back({e.a, e.b, off});
    trip.push_back({e.b, e.a, off});
    trip.push_back({e.b, e.b, diag});
  }
  if (!edge_weights.empty() && robin_index != edge_weights.size())
    throw std::invalid_argument("boundary_mass_triplets: edge weight count mismatch");
  return trip;
}

std::vector<Triplet> boundary_mass_triplets(const Mesh& mesh) {
  return boundary_mass_triplets(mesh, {});
}

std::vector<int> dirichlet_nodes(const Mesh& mesh) {
  std::vector<int> nodes;
  for (const auto& e : mesh.boundary_edges)
    if (e.tag == EdgeTag::Dirichlet) {
      nodes.push_back(e.a);
      nodes.push_back(e.b);
    }
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  return nodes;
}

std::pair<SparseComplexMatrix, std::vector<cplx>> assemble(const HelmholtzProblem& problem) {
  const Mesh& mesh = problem.mesh;
  const int n = static_cast<int>(mesh.nodes.size());

  std::size_t robin_count = 0;
  for (const auto& e : mesh.boundary_edges)
    if (e.tag == EdgeTag::Robin) ++robin_count;
  if (!problem.alpha_per_edge.empty() && problem.alpha_per_edge.size() != robin_count)
    throw std::invalid_argument("assemble: alpha_per_edge size must match Robin edge count");

  std::vector<cplx> robin_weights(robin_count, problem.alpha);
  if (!problem.alpha_per_edge.empty()) robin_weights = problem.alpha_per_edge;

  std::vector<Triplet> trip = stiffness_triplets(mesh);
  const double w2 = problem.omega * problem.omega;
  for (auto& t : mass_triplets(mesh)) trip.push_back({t.row, t.col, -w2 * t.value});
  for (auto& t : boundary_mass_triplets(mesh, robin_weights)) trip.push_back(t);

  auto matrix = SparseComplexMatrix::from_triplets(n, std::move(trip));

  // rhs = -M f_h + M_Gamma h_h with nodally interpolated data
  std::vector<cplx> rhs(static_cast<std::size_t>(n), cplx{0.0, 0.0});
  if (problem.f) {
    const auto fv = nodal_values(mesh, problem.f);
    for (int t = 0; t < static_cast<int>(mesh.triangles.size()); ++t) {
      const auto g = triangle_geometry(mesh, t);
      const auto& tri = mesh.triangles[t];
      for (int a = 0; a < 3; ++a) {
        cplx acc = 0.0;
        for (int b = 0; b < 3; ++b) acc += g.area / 12.0 * (a == b ? 2.0 : 1.0) * fv[tri[b]];
        rhs[tri[a]] -= acc;
      }
    }
  }
  if (problem.h) {
    const auto hv = nodal_values(mesh, problem.h);
    for (const auto& e : mesh.boundary_edges) {
      if (e.tag != EdgeTag::Robin) continue;
      const double le = edge_length(mesh, e);
      rhs[e.a] += le / 6.0 * (2.0 * hv[e.a] + hv[e.b]);
      rhs[e.b] += le / 6.0 * (hv[e.a] + 2.0 * hv[e.b]);
    }
  }
  return {std::move(matrix), std::move(rhs)};
}

HelmholtzSolution solve(const HelmholtzProblem& problem) {
  const Mesh& mesh = problem.mesh;
  const int n = static_cast<int>(mesh.nodes.size());

  bool has_dirichlet = false, has_robin = false;
  for (const auto& e : mesh.boundary_edges) {
    if (e.tag == EdgeTag::Dirichlet) has_dirichlet = true;
    if (e.tag == EdgeTag::Robin) has_robin = true;
  }
  if (!has_dirichlet && !has_robin)
    throw std::invalid_argument("solve: need at least one Dirichlet or Robin edge");

  SolverReport report;
  if (!has_robin)
    report.warnings.push_back("no Robin edges: uniqueness not guaranteed at resonances");
  if (!(problem.alpha.real() > 0.0 && problem.alpha.imag() < 0.0) && has_robin &&
      problem.alpha_per_edge.empty())
    report.warnings.push_back("Robin coefficient outside the quadrant Re>0, Im<0");

  auto [matrix, rhs] = assemble(problem);

  const auto dnodes = dirichlet_nodes(mesh);
  std::vector<int> free_of(n, -1);
  {
    std::size_t d = 0;
    int next = 0;
    for (int i = 0; i < n; ++i) {
      if (d < dnodes.size() && dnodes[d] == i) { ++d; continue; }
      free_of[i] = next++;
    }
  }
  const int n_free = n - static_cast<int>(dnodes.size());
  report.free_nodes = n_free;

  std::vector<cplx> u(static_cast<std::size_t>(n), cplx{0.0, 0.0});
  std::vector<cplx> gv(static_cast<std::size_t>(n), cplx{0.0, 0.0});
  if (problem.g)
    for (int dnode : dnodes)
      gv[dnode] = problem.g(mesh.nodes[dnode][0], mesh.nodes[dnode][1]);
  for (int dnode : dnodes) u[dnode] = gv[dnode];

  if (n_free > 0) {
    Eigen::SparseMatrix<cplx> A(n_free, n_free);
    std::vector<Eigen::Triplet<cplx>> trip;
    Eigen::VectorXcd b(n_free);
    for (int i = 0; i < n; ++i) {
      if (free_of[i] < 0) continue;
      cplx bi = rhs[i];
      const auto rp = matrix.row_ptr();
      const auto ci = matrix.col_idx();
      const auto vals = matrix.values();
      for (int p = rp[i]; p < rp[i + 1]; ++p) {
        const int j = ci[p];
        if (free_of[j] >= 0)
          trip.emplace_back(free_of[i], free_of[j], vals[p]);
        else
          bi -= vals[p] * gv[j];
      }
      b(free_of[i]) = bi;
    }
    A.setFromTriplets(trip.begin(), trip.end());

    Eigen::SparseLU<Eigen::SparseMatrix<cplx>> lu;
    lu.compute(A);
    if (lu.info() != Eigen::Success)
      throw SingularSystemError("solve: singular factorization at omega=" +
                                std::to_string(problem.omega));
    const Eigen::VectorXcd x = lu.solve(b);
    if (lu.info() != Eigen::Success)
      throw SingularSystemError("solve: backsolve failed at omega=" +
                                std::to_string(problem.omega));

    const double bnorm = b.norm();
    const double rnorm = (A * x - b).norm();
    report.residual = bnorm > 0.0 ? rnorm / bnorm : rnorm;

    for (int i = 0; i < n; ++i)
      if (free_of[i] >= 0) u[i] = x(free_of[i]);
  }

  return {std::move(u), problem, std::move(report)};
}

cplx variational_residual(const HelmholtzSolution& sol, std::span<const cplx> v) {
  const Mesh& mesh = sol.problem.mesh;
  if (v.size() != mesh.nodes.size())
    throw std::invalid_argument("variational_residual: size mismatch");
  for (int dnode : dirichlet_nodes(mesh))
    if (v[dnode] != cplx{0.0, 0.0})
      throw std::invalid_argument("variational_residual: test vector nonzero on Dirichlet nodes");

  auto [matrix, rhs] = assemble(sol.problem);
  const auto au = matrix.multiply(sol.u);
  cplx res = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i)
    res += std::conj(v[i]) * (au[i] - rhs[i]);
  return res;
}

}  // namespace wallshape
