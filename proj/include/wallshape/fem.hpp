#pragma once

#include <complex>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "wallshape/geometry.hpp"

namespace wallshape {

using cplx = std::complex<double>;

struct SingularSystemError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Compressed-row complex matrix with a symmetric pattern; assembled values
/// are complex-symmetric (A = A^T, not Hermitian).
class SparseComplexMatrix {
 public:
  struct Triplet {
    int row, col;
    cplx value;
  };

  SparseComplexMatrix() = default;
  static SparseComplexMatrix from_triplets(int n, std::vector<Triplet> triplets);

  int rows() const { return static_cast<int>(row_ptr_.size()) - 1; }
  int nonzeros() const { return static_cast<int>(values_.size()); }
  cplx coeff(int i, int j) const;
  std::vector<cplx> multiply(std::span<const cplx> x) const;
  /// max_{ij} |A_ij - A_ji|; zero for a correctly assembled system.
  double max_asymmetry() const;

  std::span<const int> row_ptr() const { return row_ptr_; }
  std::span<const int> col_idx() const { return col_idx_; }
  std::span<const cplx> values() const { return values_; }

 private:
  std::vector<int> row_ptr_{0};
  std::vector<int> col_idx_;
  std::vector<cplx> values_;
};

using ScalarField = std::function<cplx(double, double)>;

/// Discrete Helmholtz problem: laplace(u) + omega^2 u = f on the meshed
/// domain, u = g on the Dirichlet side, du/dn = 0 on the Neumann walls and
/// du/dn + alpha u = h on the Robin wall.  Null fields mean zero data.
struct HelmholtzProblem {
  Mesh mesh;
  double omega = 0.0;
  cplx alpha{1.0, -1.0};
  std::vector<cplx> alpha_per_edge;  ///< optional, one value per Robin edge
  ScalarField f;  ///< volume source
  ScalarField g;  ///< Dirichlet data
  ScalarField h;  ///< Robin right-hand side
};

struct SolverReport {
  double residual = 0.0;  ///< ||A u - b|| / ||b|| on the reduced system
  int free_nodes = 0;
  std::vector<std::string> warnings;
};

struct HelmholtzSolution {
  std::vector<cplx> u;
  HelmholtzProblem problem;
  SolverReport report;
};

/// Discrete form of the weak Helmholtz problem:
///   matrix = K - omega^2 M + alpha M_Gamma,  rhs = -M f_h + M_Gamma h_h
/// with exact P1 element integrals and nodally interpolated data.
std::pair<SparseComplexMatrix, std::vector<cplx>> assemble(const HelmholtzProblem& problem);

/// Direct sparse complex LU after strong elimination of the Dirichlet rows.
/// Throws SingularSystemError (carrying omega) if the factorization breaks.
HelmholtzSolution solve(const HelmholtzProblem& problem);

/// Discrete sesquilinear form minus load functional, a(u_h, v) - l(v), for a
/// test vector v in V_h.  Throws if v does not vanish on the Dirichlet nodes.
cplx variational_residual(const HelmholtzSolution& sol, std::span<const cplx> v);

/// Nodes lying on Dirichlet edges, ascending.
std::vector<int> dirichlet_nodes(const Mesh& mesh);

/// Real P1 building blocks, shared with the energy functionals.
std::vector<SparseComplexMatrix::Triplet> stiffness_triplets(const Mesh& mesh);
std::vector<SparseComplexMatrix::Triplet> mass_triplets(const Mesh& mesh);
std::vector<SparseComplexMatrix::Triplet> boundary_mass_triplets(
    const Mesh& mesh, std::span<const cplx> edge_weights);
std::vector<SparseComplexMatrix::Triplet> boundary_mass_triplets(const Mesh& mesh);

}  // namespace wallshape
