#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "wallshape/alpha_fit.hpp"
#include "wallshape/config.hpp"
#include "wallshape/fem.hpp"
#include "wallshape/shape_opt.hpp"

namespace wallshape {

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Write-to-temp-then-rename; partial files never appear under `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

// ---- alpha table ----------------------------------------------------------
// header: omega,re_alpha,im_alpha,error,iterations,converged
std::string format_alpha_table_csv(const AlphaTable& table);
AlphaTable read_alpha_table_csv(std::istream& in);

/// Two-column panels mirroring the alpha sweep figures:
/// (omega, re_alpha), (omega, im_alpha), (omega, error).
std::string format_alpha_panel_csv(const AlphaTable& table, const std::string& column);
struct PanelData {
  std::string x_name, y_name;
  std::vector<std::array<double, 2>> rows;
};
PanelData read_panel_csv(std::istream& in);

/// Energy rows as emitted by solve and sweep (header "omega,J,J1").
std::vector<std::array<double, 3>> read_energy_csv(std::istream& in);

// ---- optimization history -------------------------------------------------
// header: iter,J,J1,vol,len,omega_mean
std::string format_history_csv(const std::vector<HistoryRow>& history);
std::vector<HistoryRow> read_history_csv(std::istream& in);

// ---- solution fields ------------------------------------------------------
/// Legacy ASCII VTK 3.0 unstructured grid with point scalars re_u, im_u, abs_u.
std::string format_vtk(const Mesh& mesh, std::span<const cplx> u);
struct VtkData {
  std::vector<std::array<double, 2>> points;
  std::vector<std::array<int, 3>> triangles;
  std::vector<double> re_u, im_u, abs_u;
};
VtkData read_vtk(std::istream& in);

/// Debug dumps: nodes as "x,y", triangles as "a,b,c".
std::string format_nodes_csv(const Mesh& mesh);
std::string format_triangles_csv(const Mesh& mesh);

// ---- subcommands ----------------------------------------------------------
struct CliOptions {
  std::string config_path;
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  bool verify = false;
};

/// Exit status 0 on success, 1 for unconverged/failed runs, 2 for config
/// errors (diagnostics on stderr).  All files are written atomically.
int cmd_fit_alpha(const CliOptions& opt);
int cmd_solve(const CliOptions& opt);
int cmd_optimize(const CliOptions& opt);
int cmd_sweep(const CliOptions& opt);

}  // namespace wallshape
