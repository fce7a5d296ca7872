#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace wallshape {

struct MalformedShapeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct GeometryError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Wall boundary Gamma as a graph x = s(y), described by control heights at
/// equispaced stations over y in [-ell, ell], plus the admissibility data:
/// containment strip width, slope bound, length window and reference volume.
struct ShapeParam {
  std::vector<double> heights;  ///< s_1..s_m, wall abscissa at the stations [m]
  double box_width = 0.0;       ///< w_G, allowed strip is 0 <= s <= w_G
  double slope_max = 0.0;       ///< Lipschitz bound on |ds/dy|
  double len_min = 0.0;         ///< M0, lower length bound (2*ell for a graph)
  double len_max = 0.0;         ///< M, upper length bound
  double vol_ref = 0.0;         ///< Vol(Omega_0), reference volume
  double half_height = 0.0;     ///< ell
  double length = 0.0;          ///< L, x-extent of the duct

  int control_count() const { return static_cast<int>(heights.size()); }
  /// y-coordinate of control station i (exactly antisymmetric in i).
  double station(int i) const;
  /// Piecewise-linear interpolant s(y) of the control heights.
  double eval(double y) const;
};

/// Flat reference shape (heights all zero); len_min = 2*ell, vol_ref = 2*L*ell.
ShapeParam make_flat_shape(int m, double L, double ell, double box_width,
                           double slope_max, double len_max);

struct ConstraintViolation {
  enum class Kind { Box, Slope, LengthMin, LengthMax };
  Kind kind;
  int index;      ///< offending control point / segment, -1 for global
  double excess;  ///< nonnegative magnitude, usable as penalty input
};

/// Empty report iff the shape satisfies all admissibility constraints.
std::vector<ConstraintViolation> validate_shape(const ShapeParam& shape);

/// Polyline length of Gamma; >= 2*ell always.
double shape_length(const ShapeParam& shape);

/// Area of Omega = {(x,y): -L <= x <= s(y)}, trapezoid-exact for the
/// piecewise-linear graph.
double domain_volume(const ShapeParam& shape);

enum class EdgeTag : std::uint8_t { Dirichlet, Neumann, Robin };

struct BoundaryEdge {
  int a, b;  ///< node indices, oriented along the boundary loop
  EdgeTag tag;
};

struct Mesh {
  std::vector<std::array<double, 2>> nodes;
  std::vector<std::array<int, 3>> triangles;  ///< counterclockwise
  std::vector<BoundaryEdge> boundary_edges;
  double h = 0.0;  ///< nominal element size
  int nx = 0, ny = 0;
};

/// Mapped structured triangulation of the shaped duct.  Node (i,j) sits at
/// x = -L + (i/nx)(L + s(y_j)), y_j equispaced over [-ell, ell]; each quad is
/// split along a row-alternating diagonal so that a y-mirrored shape produces
/// the exactly mirrored mesh (for even ny).  Deterministic and pure.
Mesh build_wall_mesh(const ShapeParam& shape, int nx, int ny);

double triangle_area(const Mesh& mesh, int t);
double mesh_area(const Mesh& mesh);

/// Single-column CSV (header "s") with one control height per row.
void write_shape_csv(std::ostream& out, const ShapeParam& shape);
std::vector<double> read_shape_csv(std::istream& in);

}  // namespace wallshape
