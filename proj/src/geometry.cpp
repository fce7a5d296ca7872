#include "wallshape/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

namespace wallshape {

double ShapeParam::station(int i) const {
  const int m = control_count();
  // barycentric form keeps station(i) == -station(m-1-i) bitwise
  return ((m - 1 - i) * (-half_height) + i * half_height) / (m - 1);
}

double ShapeParam::eval(double y) const {
  const int m = control_count();
  if (m < 2) throw MalformedShapeError("ShapeParam: need at least 2 control points");
  const double dy = 2.0 * half_height / (m - 1);
  double t = (y + half_height) / dy;
  int i = static_cast<int>(std::floor(t));
  i = std::clamp(i, 0, m - 2);
  const double frac = std::clamp(t - i, 0.0, 1.0);
  return heights[i] + (heights[i + 1] - heights[i]) * frac;
}

ShapeParam make_flat_shape(int m, double L, double ell, double box_width,
                           double slope_max, double len_max) {
  if (m < 2) throw MalformedShapeError("make_flat_shape: m must be >= 2");
  ShapeParam s;
  s.heights.assign(static_cast<std::size_t>(m), 0.0);
  s.box_width = box_width;
  s.slope_max = slope_max;
  s.len_min = 2.0 * ell;
  s.len_max = len_max;
  s.vol_ref = 2.0 * L * ell;
  s.half_height = ell;
  s.length = L;
  return s;
}

std::vector<ConstraintViolation> validate_shape(const ShapeParam& shape) {
  const int m = shape.control_count();
  if (m < 2) throw MalformedShapeError("validate_shape: need at least 2 control points");

  std::vector<ConstraintViolation> report;
  for (int i = 0; i < m; ++i) {
    const double s = shape.heights[i];
    if (s < 0.0)
      report.push_back({ConstraintViolation::Kind::Box, i, -s});
    else if (s > shape.box_width)
      report.push_back({ConstraintViolation::Kind::Box, i, s - shape.box_width});
  }

  const double dy = 2.0 * shape.half_height / (m - 1);
  const double step_max = shape.slope_max * dy;
  for (int i = 0; i + 1 < m; ++i) {
    const double step = std::abs(shape.heights[i + 1] - shape.heights[i]);
    if (step > step_max)
      report.push_back({ConstraintViolation::Kind::Slope, i, step - step_max});
  }

  const double len = shape_length(shape);
  if (len < shape.len_min)
    report.push_back({ConstraintViolation::Kind::LengthMin, -1, shape.len_min - len});
  if (len > shape.len_max)
    report.push_back({ConstraintViolation::Kind::LengthMax, -1, len - shape.len_max});

  return report;
}

double shape_length(const ShapeParam& shape) {
  const int m = shape.control_count();
  if (m < 2) throw MalformedShapeError("shape_length: need at least 2 control points");
  const double dy = 2.0 * shape.half_height / (m - 1);
  // anchored at the straight length so that length >= 2*ell holds bitwise,
  // flat shapes included (each hypot(dy, ds) - dy is nonnegative)
  double excess = 0.0;
  for (int i = 0; i + 1 < m; ++i) {
    const double ds = shape.heights[i + 1] - shape.heights[i];
    excess += std::max(0.0, std::hypot(dy, ds) - dy);
  }
  return 2.0 * shape.half_height + excess;
}

double domain_volume(const ShapeParam& shape) {
  const int m = shape.control_count();
  if (m < 2) throw MalformedShapeError("domain_volume: need at least 2 control points");
  const double dy = 2.0 * shape.half_height / (m - 1);
  double vol = 0.0;
  for (int i = 0; i + 1 < m; ++i) {
    const double w0 = shape.length + shape.heights[i];
    const double w1 = shape.length + shape.heights[i + 1];
    vol += 0.5 * dy * (w0 + w1);
  }
  return vol;
}

Mesh build_wall_mesh(const ShapeParam& shape, int nx, int ny) {
  if (nx < 1 || ny < 1) throw GeometryError("build_wall_mesh: nx, ny must be >= 1");
  const int m = shape.control_count();
  if (m < 2) throw MalformedShapeError("build_wall_mesh: need at least 2 control points");

  const double L = shape.length;
  const double ell = shape.half_height;

  Mesh mesh;
  mesh.nx = nx;
  mesh.ny = ny;
  mesh.nodes.reserve(static_cast<std::size_t>((nx + 1) * (ny + 1)));

  // station y_j in barycentric form: exactly antisymmetric under j <-> ny-j
  std::vector<double> ys(ny + 1), widths(ny + 1);
  for (int j = 0; j <= ny; ++j) {
    ys[j] = ((ny - j) * (-ell) + j * ell) / ny;
    const double s = shape.eval(ys[j]);
    widths[j] = L + s;
    if (!(widths[j] > 0.0))
      throw GeometryError("build_wall_mesh: wall crosses the Dirichlet side (s(y) <= -L)");
  }

  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i)
      mesh.nodes.push_back({-L + (static_cast<double>(i) / nx) * widths[j], ys[j]});

  auto idx = [nx](int i, int j) { return j * (nx + 1) + i; };

  mesh.triangles.reserve(static_cast<std::size_t>(2 * nx * ny));
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const int n00 = idx(i, j), n10 = idx(i + 1, j);
      const int n01 = idx(i, j + 1), n11 = idx(i + 1, j + 1);
      if (j % 2 == 0) {
        mesh.triangles.push_back({n00, n10, n11});
        mesh.triangles.push_back({n00, n11, n01});
      } else {
        mesh.triangles.push_back({n00, n10, n01});
        mesh.triangles.push_back({n10, n11, n01});
      }
    }
  }

  // boundary loop: left wall Dirichlet, top/bottom Neumann, shaped wall Robin
  for (int j = 0; j < ny; ++j)
    mesh.boundary_edges.push_back({idx(0, j), idx(0, j + 1), EdgeTag::Dirichlet});
  for (int i = 0; i < nx; ++i) {
    mesh.boundary_edges.push_back({idx(i, 0), idx(i + 1, 0), EdgeTag::Neumann});
    mesh.boundary_edges.push_back({idx(i, ny), idx(i + 1, ny), EdgeTag::Neumann});
  }
  for (int j = 0; j < ny; ++j)
    mesh.boundary_edges.push_back({idx(nx, j), idx(nx, j + 1), EdgeTag::Robin});

  double wmax = 0.0;
  for (int j = 0; j <= ny; ++j) wmax = std::max(wmax, widths[j]);
  mesh.h = std::max(2.0 * ell / ny, wmax / nx);
  return mesh;
}

double triangle_area(const Mesh& mesh, int t) {
  const auto& tri = mesh.triangles[t];
  const auto& p0 = mesh.nodes[tri[0]];
  const auto& p1 = mesh.nodes[tri[1]];
  const auto& p2 = mesh.nodes[tri[2]];
  return 0.5 * ((p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1]));
}

double mesh_area(const Mesh& mesh) {
  double area = 0.0;
  for (int t = 0; t < static_cast<int>(mesh.triangles.size()); ++t)
    area += triangle_area(mesh, t);
  return area;
}

void write_shape_csv(std::ostream& out, const ShapeParam& shape) {
  out << "s\n";
  char buf[64];
  for (double s : shape.heights) {
    std::snprintf(buf, sizeof(buf), "%.17g", s);
    out << buf << "\n";
  }
}

std::vector<double> read_shape_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw GeometryError("shape CSV: empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "s") throw GeometryError("shape CSV: expected header \"s\", got \"" + line + "\"");
  std::vector<double> heights;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::size_t pos = 0;
    const double v = std::stod(line, &pos);
    if (pos != line.size()) throw GeometryError("shape CSV: bad row \"" + line + "\"");
    heights.push_back(v);
  }
  if (heights.size() < 2) throw MalformedShapeError("shape CSV: need at least 2 control points");
  return heights;
}

}  // namespace wallshape
