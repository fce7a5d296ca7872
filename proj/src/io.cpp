#include "wallshape/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

namespace wallshape {

namespace fs = std::filesystem;

namespace {

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<std::string> split_csv_row(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      cells.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  cells.push_back(cur);
  return cells;
}

double to_number(const std::string& cell, const std::string& what) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(cell, &pos);
  } catch (const std::exception&) {
    throw IoError(what + ": bad number \"" + cell + "\"");
  }
  if (pos != cell.size()) throw IoError(what + ": bad number \"" + cell + "\"");
  return v;
}

void expect_header(std::istream& in, const std::string& expected, const std::string& what) {
  std::string line;
  if (!std::getline(in, line)) throw IoError(what + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != expected)
    throw IoError(what + ": expected header \"" + expected + "\", got \"" + line + "\"");
}

}  // namespace

void write_file_atomic(const fs::path& path, const std::string& contents) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open for writing: " + tmp.string());
    out << contents;
    out.flush();
    if (!out) throw IoError("write failed: " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::string format_alpha_table_csv(const AlphaTable& table) {
  std::string out = "omega,re_alpha,im_alpha,error,iterations,converged\n";
  for (const auto& r : table.rows) {
    out += num(r.omega) + "," + num(r.alpha.real()) + "," + num(r.alpha.imag()) + "," +
           num(r.error) + "," + std::to_string(r.iterations) + "," +
           (r.converged ? "1" : "0") + "\n";
  }
  return out;
}

AlphaTable read_alpha_table_csv(std::istream& in) {
  expect_header(in, "omega,re_alpha,im_alpha,error,iterations,converged", "alpha table");
  AlphaTable table;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const auto cells = split_csv_row(line);
    if (cells.size() != 6) throw IoError("alpha table: expected 6 columns");
    AlphaRow r;
    r.omega = to_number(cells[0], "alpha table");
    r.alpha = cplx{to_number(cells[1], "alpha table"), to_number(cells[2], "alpha table")};
    r.error = to_number(cells[3], "alpha table");
    r.iterations = static_cast<int>(to_number(cells[4], "alpha table"));
    r.converged = cells[5] == "1";
    table.rows.push_back(r);
  }
  return table;
}

std::string format_alpha_panel_csv(const AlphaTable& table, const std::string& column) {
  std::string out = "omega," + column + "\n";
  for (const auto& r : table.rows) {
    double v = 0.0;
    if (column == "re_alpha")
      v = r.alpha.real();
    else if (column == "im_alpha")
      v = r.alpha.imag();
    else if (column == "error")
      v = r.error;
    else
      throw IoError("unknown panel column: " + column);
    out += num(r.omega) + "," + num(v) + "\n";
  }
  return out;
}

std::string format_history_csv(const std::vector<HistoryRow>& history) {
  std::string out = "iter,J,J1,vol,len,omega_mean\n";
  for (const auto& r : history)
    out += std::to_string(r.iteration) + "," + num(r.J) + "," + num(r.J1) + "," + num(r.vol) +
           "," + num(r.len) + "," + num(r.omega_mean) + "\n";
  return out;
}

std::vector<HistoryRow> read_history_csv(std::istream& in) {
  expect_header(in, "iter,J,J1,vol,len,omega_mean", "history");
  std::vector<HistoryRow> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const auto cells = split_csv_row(line);
    if (cells.size() != 6) throw IoError("history: expected 6 columns");
    HistoryRow r;
    r.iteration = static_cast<int>(to_number(cells[0], "history"));
    r.J = to_number(cells[1], "history");
    r.J1 = to_number(cells[2], "history");
    r.vol = to_number(cells[3], "history");
    r.len = to_number(cells[4], "history");
    r.omega_mean = to_number(cells[5], "history");
    rows.push_back(r);
  }
  return rows;
}

std::string format_vtk(const Mesh& mesh, std::span<const cplx> u) {
  if (u.size() != mesh.nodes.size()) throw IoError("format_vtk: field size mismatch");
  std::string out;
  out += "# vtk DataFile Version 3.0\n";
  out += "wallshape solution\n";
  out += "ASCII\n";
  out += "DATASET UNSTRUCTURED_GRID\n";
  out += "POINTS " + std::to_string(mesh.nodes.size()) + " double\n";
  for (const auto& p : mesh.nodes) out += num(p[0]) + " " + num(p[1]) + " 0\n";
  const auto t = mesh.triangles.size();
  out += "CELLS " + std::to_string(t) + " " + std::to_string(4 * t) + "\n";
  for (const auto& tri : mesh.triangles)
    out += "3 " + std::to_string(tri[0]) + " " + std::to_string(tri[1]) + " " +
           std::to_string(tri[2]) + "\n";
  out += "CELL_TYPES " + std::to_string(t) + "\n";
  for (std::size_t i = 0; i < t; ++i) out += "5\n";
  out += "POINT_DATA " + std::to_string(mesh.nodes.size()) + "\n";
  const auto scalars = [&](const std::string& name, auto&& get) {
    out += "SCALARS " + name + " double 1\n";
    out += "LOOKUP_TABLE default\n";
    for (const auto& z : u) out += num(get(z)) + "\n";
  };
  scalars("re_u", [](cplx z) { return z.real(); });
  scalars("im_u", [](cplx z) { return z.imag(); });
  scalars("abs_u", [](cplx z) { return std::abs(z); });
  return out;
}

VtkData read_vtk(std::istream& in) {
  VtkData data;
  std::string line;
  auto next_tokens = [&](std::vector<std::string>& toks) {
    toks.clear();
    if (!std::getline(in, line)) return false;
    std::istringstream ss(line);
    std::string t;
    while (ss >> t) toks.push_back(t);
    return true;
  };

  std::vector<std::string> toks;
  while (next_tokens(toks)) {
    if (toks.empty()) continue;
    if (toks[0] == "POINTS") {
      const int n = std::stoi(toks[1]);
      data.points.resize(n);
      for (int i = 0; i < n; ++i) {
        double x, y, z;
        in >> x >> y >> z;
        data.points[i] = {x, y};
      }
    } else if (toks[0] == "CELLS") {
      const int t = std::stoi(toks[1]);
      data.triangles.resize(t);
      for (int i = 0; i < t; ++i) {
        int k, a, b, c;
        in >> k >> a >> b >> c;
        if (k != 3) throw IoError("read_vtk: only triangles supported");
        data.triangles[i] = {a, b, c};
      }
    } else if (toks[0] == "SCALARS") {
      const std::string name = toks[1];
      std::getline(in, line);  // LOOKUP_TABLE line (after consuming newline)
      if (line.empty()) std::getline(in, line);
      std::vector<double>* dst = nullptr;
      if (name == "re_u") dst = &data.re_u;
      else if (name == "im_u") dst = &data.im_u;
      else if (name == "abs_u") dst = &data.abs_u;
      if (!dst) throw IoError("read_vtk: unexpected scalar field " + name);
      dst->resize(data.points.size());
      for (auto& v : *dst) in >> v;
    }
  }
  if (data.points.empty()) throw IoError("read_vtk: no POINTS section");
  return data;
}

std::string format_nodes_csv(const Mesh& mesh) {
  std::string out = "x,y\n";
  for (const auto& p : mesh.nodes) out += num(p[0]) + "," + num(p[1]) + "\n";
  return out;
}

std::string format_triangles_csv(const Mesh& mesh) {
  std::string out = "a,b,c\n";
  for (const auto& t : mesh.triangles)
    out += std::to_string(t[0]) + "," + std::to_string(t[1]) + "," + std::to_string(t[2]) + "\n";
  return out;
}

namespace {

RunConfig load_with_overrides(const CliOptions& opt) {
  RunConfig cfg = load_config(opt.config_path);
  if (opt.out_dir) cfg.output_dir = *opt.out_dir;
  if (opt.seed) {
    cfg.seed = *opt.seed;
    cfg.optimize.seed = *opt.seed;
  }
  return cfg;
}

ShapeParam solve_shape(const RunConfig& cfg) {
  ShapeParam shape = cfg.geometry.flat_shape();
  if (!cfg.solve.shape_csv.empty()) {
    std::ifstream in(cfg.solve.shape_csv);
    if (!in) throw IoError("cannot open shape file: " + cfg.solve.shape_csv);
    shape.heights = read_shape_csv(in);
  }
  return shape;
}

int guarded(const CliOptions& opt, int (*body)(const RunConfig&, const CliOptions&)) {
  RunConfig cfg;
  try {
    cfg = load_with_overrides(opt);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }
  try {
    return body(cfg, opt);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

int fit_alpha_body(const RunConfig& cfg, const CliOptions&) {
  if (cfg.frequencies.empty()) {
    std::cerr << "config error: fit-alpha needs a nonempty frequency list\n";
    return 2;
  }
  const AlphaTable table =
      alpha_sweep(cfg.frequencies, cfg.fit, cfg.material, cfg.fit.warm_start);

  const fs::path out(cfg.output_dir);
  write_file_atomic(out / "alpha_table.csv", format_alpha_table_csv(table));
  write_file_atomic(out / "alpha_re.csv", format_alpha_panel_csv(table, "re_alpha"));
  write_file_atomic(out / "alpha_im.csv", format_alpha_panel_csv(table, "im_alpha"));
  write_file_atomic(out / "alpha_error.csv", format_alpha_panel_csv(table, "error"));
  return table.all_converged() ? 0 : 1;
}

int solve_body(const RunConfig& cfg, const CliOptions& opt) {
  if (cfg.mesh_resolution_defaulted)
    std::cerr << "note: mesh resolution not specified, using nx=" << cfg.geometry.nx
              << " ny=" << cfg.geometry.ny << "\n";

  const ShapeParam shape = solve_shape(cfg);
  const double omega = cfg.solve.omega;

  bool converged = true;
  cplx alpha;
  if (cfg.solve.alpha) {
    alpha = *cfg.solve.alpha;
  } else {
    const FitResult fit = fit_alpha(omega, cfg.fit, cfg.material);
    alpha = fit.alpha;
    converged = fit.diagnostics.converged;
  }

  const ProblemSetup setup = cfg.problem_setup();
  const Mesh mesh = build_wall_mesh(shape, cfg.geometry.nx, cfg.geometry.ny);
  const HelmholtzSolution sol = solve(make_problem(shape, mesh, omega, alpha, setup));

  EnergyWeights w = cfg.energy;
  const double J = energy_J(sol, w).total;
  const double J1 = energy_J1(sol, w, shape);

  const fs::path out(cfg.output_dir);
  write_file_atomic(out / "solution.vtk", format_vtk(mesh, sol.u));
  std::string summary = "omega,J,J1\n";
  summary += num(omega) + "," + num(J) + "," + num(J1) + "\n";
  write_file_atomic(out / "energy_summary.csv", summary);

  std::cout << "J=" << num(J) << " J1=" << num(J1) << "\n";

  if (opt.verify && cfg.solve.verify_mode) {
    const int n = *cfg.solve.verify_mode;
    const auto it = cfg.fit.g_spectrum.find(n);
    const cplx gk = it != cfg.fit.g_spectrum.end() ? it->second : cplx{0.0, 0.0};
    ModeProblem mp;
    mp.k = n * cfg.fit.mode_spacing();
    mp.omega = omega;
    mp.L = cfg.geometry.L;
    mp.g_k = gk;
    mp.materials = cfg.material;

    const double ell = cfg.geometry.ell;
    std::vector<cplx> diff(mesh.nodes.size());
    for (std::size_t i = 0; i < mesh.nodes.size(); ++i) {
      const double x = mesh.nodes[i][0], y = mesh.nodes[i][1];
      diff[i] = sol.u[i] - mode_u2(mp, alpha, x) * std::cos(mp.k * (y + ell));
    }
    double err2 = 0.0;
    for (const auto& t : mass_triplets(mesh))
      err2 += t.value.real() * (std::conj(diff[t.row]) * diff[t.col]).real();
    std::cout << "verify_L2_error=" << num(std::sqrt(std::max(0.0, err2))) << "\n";
  }
  return converged ? 0 : 1;
}

int optimize_body(const RunConfig& cfg, const CliOptions&) {
  if (cfg.frequencies.empty()) {
    std::cerr << "config error: optimize needs a nonempty frequency list\n";
    return 2;
  }
  const AlphaTable table =
      alpha_sweep(cfg.frequencies, cfg.fit, cfg.material, cfg.fit.warm_start);

  ObjectiveContext ctx;
  ctx.base_shape = cfg.geometry.flat_shape();
  ctx.omegas = cfg.frequencies;
  for (const auto& r : table.rows) ctx.alphas.push_back(r.alpha);
  ctx.weights = cfg.energy;
  ctx.setup = cfg.problem_setup();

  const OptResult res = optimize_shape(cfg.optimize, ctx);

  const fs::path out(cfg.output_dir);
  write_file_atomic(out / "history.csv", format_history_csv(res.history));
  {
    std::ostringstream shape_csv;
    write_shape_csv(shape_csv, res.best_shape);
    write_file_atomic(out / "best_shape.csv", shape_csv.str());
  }
  if (cfg.write_snapshots) {
    for (std::size_t i = 0; i < res.accepted_shapes.size(); ++i) {
      const ShapeParam& s = res.accepted_shapes[i];
      const Mesh m = build_wall_mesh(s, cfg.geometry.nx, cfg.geometry.ny);
      const HelmholtzSolution snap =
          solve(make_problem(s, m, ctx.omegas[0], ctx.alphas[0], ctx.setup));
      write_file_atomic(out / ("snapshot_" + std::to_string(res.history[i].iteration) + ".vtk"),
                        format_vtk(m, snap.u));
    }
  }
  std::cout << "J1_initial=" << num(res.initial_objective)
            << " J1_final=" << num(res.final_objective) << "\n";
  return table.all_converged() ? 0 : 1;
}

int sweep_body(const RunConfig& cfg, const CliOptions&) {
  if (cfg.frequencies.empty()) {
    std::cerr << "config error: sweep needs a nonempty frequency list\n";
    return 2;
  }
  const AlphaTable table =
      alpha_sweep(cfg.frequencies, cfg.fit, cfg.material, cfg.fit.warm_start);

  const ShapeParam shape = solve_shape(cfg);
  const ProblemSetup setup = cfg.problem_setup();
  const Mesh mesh = build_wall_mesh(shape, cfg.geometry.nx, cfg.geometry.ny);

  std::string rows = "omega,J,J1\n";
  for (std::size_t i = 0; i < cfg.frequencies.size(); ++i) {
    const double omega = cfg.frequencies[i];
    const HelmholtzSolution sol =
        solve(make_problem(shape, mesh, omega, table.rows[i].alpha, setup));
    const double J = energy_J(sol, cfg.energy).total;
    const double J1 = energy_J1(sol, cfg.energy, shape);
    rows += num(omega) + "," + num(J) + "," + num(J1) + "\n";
  }

  const fs::path out(cfg.output_dir);
  write_file_atomic(out / "alpha_table.csv", format_alpha_table_csv(table));
  write_file_atomic(out / "sweep_energy.csv", rows);
  return table.all_converged() ? 0 : 1;
}

}  // namespace

int cmd_fit_alpha(const CliOptions& opt) { return guarded(opt, fit_alpha_body); }
int cmd_solve(const CliOptions& opt) { return guarded(opt, solve_body); }
int cmd_optimize(const CliOptions& opt) { return guarded(opt, optimize_body); }
int cmd_sweep(const CliOptions& opt) { return guarded(opt, sweep_body); }

}  // namespace wallshape
