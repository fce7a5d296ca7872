#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "wallshape/io.hpp"

using namespace wallshape;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("wallshape_test_" + tag);
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

const char* kMinimalConfig = R"(
seed = 5
[geometry]
L = 2.0
ell = 0.5
box_width = 0.5
m = 4
nx = 8
ny = 8
[fit]
dx = 0.25
mode_n = [0, 1]
mode_re = [1.0, 0.5]
[frequencies]
values = [1500.0]
)";

}  // namespace

TEST_CASE("toml subset: tables, scalars, arrays, comments") {
  const auto kv = parse_toml(R"(
# top comment
title = "demo"  # trailing comment
flag = true
[block]
count = 3
ratio = 1.5e-2
names = ["a", "b"]
nums = [1, 2, 3]
)");
  CHECK(std::get<std::string>(kv.at("title").data) == "demo");
  CHECK(std::get<bool>(kv.at("flag").data) == true);
  CHECK(std::get<double>(kv.at("block.count").data) == 3.0);
  CHECK(std::get<double>(kv.at("block.ratio").data) == 0.015);
  CHECK(std::get<std::vector<std::string>>(kv.at("block.names").data).size() == 2);
  CHECK(std::get<std::vector<double>>(kv.at("block.nums").data) ==
        std::vector<double>{1.0, 2.0, 3.0});
}

TEST_CASE("toml subset: malformed input carries line numbers") {
  try {
    parse_toml("a = 1\nb 2\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_toml("a = 1\na = 2\n"), ConfigError);
  CHECK_THROWS_AS(parse_toml("[open\n"), ConfigError);
  CHECK_THROWS_AS(parse_toml("x = [1, 2\n"), ConfigError);
}

TEST_CASE("config parsing fills defaults and derived fields") {
  const auto cfg = parse_config(kMinimalConfig);
  CHECK(cfg.seed == 5);
  CHECK(cfg.geometry.m == 4);
  CHECK(cfg.fit.L == 2.0);
  CHECK(cfg.fit.ell == 0.5);
  CHECK(cfg.energy.vol_ref == 2.0);
  CHECK(cfg.fit.g_spectrum.size() == 2);
  CHECK(cfg.fit.g_spectrum.at(1) == cplx{0.5, 0.0});
  CHECK(cfg.frequencies == std::vector<double>{1500.0});
  CHECK(cfg.optimize.seed == 5);
  CHECK_FALSE(cfg.mesh_resolution_defaulted);
}

TEST_CASE("unknown keys are rejected with diagnostics") {
  try {
    parse_config("[geometry]\nL = 2.0\nbogus = 1\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("geometry.bogus") != std::string::npos);
    CHECK(msg.find("line 3") != std::string::npos);
  }
}

TEST_CASE("config validation catches bad blocks") {
  CHECK_THROWS_AS(parse_config("[geometry]\nL = -1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[geometry]\nm = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[material]\npreset = \"granite\"\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[material]\nphi = 1.5\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[fit]\ndx = 0\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[energy]\nA = 0\nB = 0\nC = 0\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[frequencies]\nvalues = [0.0]\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[frequencies]\ncount = 4\nspacing = \"cubic\"\n"), ConfigError);
}

TEST_CASE("log-spaced frequency generation") {
  const auto cfg = parse_config("[frequencies]\ncount = 3\nmin = 100.0\nmax = 10000.0\n");
  REQUIRE(cfg.frequencies.size() == 3);
  CHECK(cfg.frequencies[0] == doctest::Approx(100.0));
  CHECK(cfg.frequencies[1] == doctest::Approx(1000.0));
  CHECK(cfg.frequencies[2] == doctest::Approx(10000.0));
}

TEST_CASE("alpha table and panels round-trip") {
  AlphaTable table;
  table.rows = {{600.0, cplx{1.25, -3.5}, 1e-9, 42, true},
                {1200.0, cplx{0.5, -7.0}, 2.5e-8, 99, false}};
  const std::string csv = format_alpha_table_csv(table);
  std::istringstream in(csv);
  const auto back = read_alpha_table_csv(in);
  REQUIRE(back.rows.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(back.rows[i].omega == table.rows[i].omega);
    CHECK(back.rows[i].alpha == table.rows[i].alpha);
    CHECK(back.rows[i].error == table.rows[i].error);
    CHECK(back.rows[i].iterations == table.rows[i].iterations);
    CHECK(back.rows[i].converged == table.rows[i].converged);
  }
  CHECK_FALSE(back.all_converged());

  const std::string panel = format_alpha_panel_csv(table, "im_alpha");
  CHECK(panel.find("omega,im_alpha") == 0);
  CHECK(panel.find("-3.5") != std::string::npos);
}

TEST_CASE("history CSV round-trips") {
  std::vector<HistoryRow> rows = {{0, 1.5, 2.25, 2.0, 1.0, 1800.0},
                                  {17, 1.25, 2.0, 2.01, 1.01, 1800.0}};
  const std::string csv = format_history_csv(rows);
  CHECK(csv.find("iter,J,J1,vol,len,omega_mean") == 0);
  std::istringstream in(csv);
  const auto back = read_history_csv(in);
  REQUIRE(back.size() == 2);
  CHECK(back[1].iteration == 17);
  CHECK(back[1].J == 1.25);
  CHECK(back[1].len == 1.01);
}

TEST_CASE("VTK export round-trips through its own reader") {
  const auto shape = make_flat_shape(3, 1.0, 0.5, 0.5, 4.0, 10.0);
  const auto mesh = build_wall_mesh(shape, 3, 2);
  std::vector<cplx> u(mesh.nodes.size());
  for (std::size_t i = 0; i < u.size(); ++i)
    u[i] = cplx{0.1 * static_cast<double>(i), -0.05 * static_cast<double>(i)};

  const std::string vtk = format_vtk(mesh, u);
  CHECK(vtk.find("# vtk DataFile Version 3.0") == 0);
  CHECK(vtk.find("SCALARS re_u double 1") != std::string::npos);

  std::istringstream in(vtk);
  const auto data = read_vtk(in);
  REQUIRE(data.points.size() == mesh.nodes.size());
  REQUIRE(data.triangles.size() == mesh.triangles.size());
  REQUIRE(data.re_u.size() == u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    CHECK(data.points[i][0] == mesh.nodes[i][0]);
    CHECK(data.re_u[i] == u[i].real());
    CHECK(data.im_u[i] == u[i].imag());
    CHECK(data.abs_u[i] == std::abs(u[i]));
  }
}

TEST_CASE("atomic writes leave no temp file behind") {
  TempDir dir("atomic");
  const auto target = dir.path / "x.csv";
  write_file_atomic(target, "hello\n");
  CHECK(slurp(target) == "hello\n");
  CHECK_FALSE(fs::exists(dir.path / "x.csv.tmp"));
}

TEST_CASE("cmd_fit_alpha writes the table and panels") {
  TempDir dir("fit");
  const auto cfg_path = dir.path / "run.toml";
  write_file_atomic(cfg_path, kMinimalConfig);

  CliOptions opt;
  opt.config_path = cfg_path.string();
  opt.out_dir = (dir.path / "out").string();
  CHECK(cmd_fit_alpha(opt) == 0);

  std::ifstream table_in(dir.path / "out" / "alpha_table.csv");
  const auto table = read_alpha_table_csv(table_in);
  REQUIRE(table.rows.size() == 1);
  CHECK(table.rows[0].omega == 1500.0);
  CHECK(table.rows[0].alpha.real() > 0.0);
  CHECK(table.rows[0].alpha.imag() < 0.0);
  CHECK(fs::exists(dir.path / "out" / "alpha_re.csv"));
  CHECK(fs::exists(dir.path / "out" / "alpha_im.csv"));
  CHECK(fs::exists(dir.path / "out" / "alpha_error.csv"));
}

TEST_CASE("malformed config exits 2 and writes nothing") {
  TempDir dir("bad");
  const auto cfg_path = dir.path / "bad.toml";
  write_file_atomic(cfg_path, "definitely not toml ===\n");

  CliOptions opt;
  opt.config_path = cfg_path.string();
  opt.out_dir = (dir.path / "out").string();
  CHECK(cmd_fit_alpha(opt) == 2);
  CHECK_FALSE(fs::exists(dir.path / "out"));

  CliOptions missing;
  missing.config_path = (dir.path / "absent.toml").string();
  CHECK(cmd_fit_alpha(missing) == 2);
}

TEST_CASE("cmd_solve emits the field and the energy summary") {
  TempDir dir("solve");
  const std::string cfg = std::string(kMinimalConfig) + "[solve]\nomega = 1500.0\n";
  const auto cfg_path = dir.path / "run.toml";
  write_file_atomic(cfg_path, cfg);

  CliOptions opt;
  opt.config_path = cfg_path.string();
  opt.out_dir = (dir.path / "out").string();
  CHECK(cmd_solve(opt) == 0);

  std::ifstream vtk_in(dir.path / "out" / "solution.vtk");
  const auto data = read_vtk(vtk_in);
  CHECK(data.points.size() == 9 * 9);
  CHECK(fs::exists(dir.path / "out" / "energy_summary.csv"));
}

TEST_CASE("zero-data solve emits an all-zero field") {
  TempDir dir("zero");
  const std::string cfg = R"(
[geometry]
nx = 6
ny = 6
[fit]
mode_n = []
mode_re = []
[solve]
omega = 1500.0
alpha_re = 1.0
alpha_im = -1.0
)";
  const auto cfg_path = dir.path / "run.toml";
  write_file_atomic(cfg_path, cfg);

  CliOptions opt;
  opt.config_path = cfg_path.string();
  opt.out_dir = (dir.path / "out").string();
  CHECK(cmd_solve(opt) == 0);

  std::ifstream vtk_in(dir.path / "out" / "solution.vtk");
  const auto data = read_vtk(vtk_in);
  for (double v : data.abs_u) CHECK(v <= 1e-10);
}

TEST_CASE("identical config and seed give bitwise-identical outputs") {
  TempDir dir("determinism");
  const auto cfg_path = dir.path / "run.toml";
  write_file_atomic(cfg_path, kMinimalConfig);

  CliOptions a;
  a.config_path = cfg_path.string();
  a.out_dir = (dir.path / "a").string();
  CliOptions b = a;
  b.out_dir = (dir.path / "b").string();

  REQUIRE(cmd_fit_alpha(a) == 0);
  REQUIRE(cmd_fit_alpha(b) == 0);
  CHECK(slurp(dir.path / "a" / "alpha_table.csv") == slurp(dir.path / "b" / "alpha_table.csv"));

  const std::string opt_cfg = std::string(kMinimalConfig) + "[optimize]\nbudget = 25\n";
  write_file_atomic(cfg_path, opt_cfg);
  CliOptions oa = a, ob = b;
  REQUIRE(cmd_optimize(oa) == 0);
  REQUIRE(cmd_optimize(ob) == 0);
  CHECK(slurp(dir.path / "a" / "history.csv") == slurp(dir.path / "b" / "history.csv"));
  CHECK(slurp(dir.path / "a" / "best_shape.csv") == slurp(dir.path / "b" / "best_shape.csv"));
}

TEST_CASE("cmd_sweep writes alpha table plus energy rows") {
  TempDir dir("sweep");
  const std::string cfg = std::string(kMinimalConfig) + "[solve]\nomega = 1500.0\n";
  const auto cfg_path = dir.path / "run.toml";
  write_file_atomic(cfg_path, cfg);

  CliOptions opt;
  opt.config_path = cfg_path.string();
  opt.out_dir = (dir.path / "out").string();
  CHECK(cmd_sweep(opt) == 0);
  const std::string rows = slurp(dir.path / "out" / "sweep_energy.csv");
  CHECK(rows.find("omega,J,J1") == 0);
  CHECK(std::count(rows.begin(), rows.end(), '\n') == 2);  // header + one row
}

TEST_CASE("best shape CSV from optimize round-trips through the geometry reader") {
  TempDir dir("roundtrip");
  const std::string cfg = std::string(kMinimalConfig) + "[optimize]\nbudget = 10\n";
  const auto cfg_path = dir.path / "run.toml";
  write_file_atomic(cfg_path, cfg);

  CliOptions opt;
  opt.config_path = cfg_path.string();
  opt.out_dir = (dir.path / "out").string();
  REQUIRE(cmd_optimize(opt) == 0);

  std::ifstream in(dir.path / "out" / "best_shape.csv");
  const auto heights = read_shape_csv(in);
  CHECK(heights.size() == 4);
}
