#pragma once

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "wallshape/alpha_fit.hpp"
#include "wallshape/energy.hpp"
#include "wallshape/materials.hpp"
#include "wallshape/shape_opt.hpp"

namespace wallshape {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Value of one TOML key: string, number, boolean, or homogeneous array.
struct TomlValue {
  std::variant<std::string, double, bool, std::vector<double>, std::vector<std::string>> data;
  int line = 0;

  bool is_number() const { return std::holds_alternative<double>(data); }
  bool is_string() const { return std::holds_alternative<std::string>(data); }
  bool is_bool() const { return std::holds_alternative<bool>(data); }
  bool is_number_array() const { return std::holds_alternative<std::vector<double>>(data); }
};

/// Keys flattened as "section.key"; strict subset of TOML: [tables],
/// key = value with strings, numbers, booleans and flat arrays, # comments.
std::map<std::string, TomlValue> parse_toml(const std::string& text);

struct GeometryConfig {
  double L = 2.0;
  double ell = 0.5;
  double box_width = 0.5;
  int m = 8;
  double slope_max = 4.0;
  double len_max = 0.0;  ///< 0 means 2*ell*sqrt(1+slope_max^2)
  int nx = 32, ny = 32;

  ShapeParam flat_shape() const;
};

struct SolveConfig {
  double omega = 2000.0;
  std::optional<int> verify_mode;   ///< compare against the mode oracle
  std::optional<cplx> alpha;        ///< fixed Robin coefficient; unset = fit
  std::string shape_csv;            ///< optional wall shape file; empty = flat
};

struct RunConfig {
  GeometryConfig geometry;
  MaterialParams material = MaterialParams::isorel();
  FitConfig fit;
  EnergyWeights energy;
  OptConfig optimize;
  SolveConfig solve;
  std::vector<double> frequencies;
  std::string output_dir = "out";
  std::uint64_t seed = 0;
  bool mesh_resolution_defaulted = false;
  bool write_snapshots = false;  ///< VTK snapshot per accepted optimizer iterate

  ProblemSetup problem_setup() const;
};

/// Parse and validate a config file; unknown keys are rejected with their
/// line numbers.  Throws ConfigError.
RunConfig load_config(const std::string& path);
RunConfig parse_config(const std::string& text);

}  // namespace wallshape
