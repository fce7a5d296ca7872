#include "wallshape/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace wallshape {

namespace {

void trim(std::string& s) {
  const auto notspace = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), notspace));
  s.erase(std::find_if(s.rbegin(), s.rend(), notspace).base(), s.end());
}

[[noreturn]] void fail(int line, const std::string& msg) {
  throw ConfigError("config line " + std::to_string(line) + ": " + msg);
}

double parse_number(const std::string& tok, int line) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(tok, &pos);
  } catch (const std::exception&) {
    fail(line, "expected a number, got \"" + tok + "\"");
  }
  if (pos != tok.size()) fail(line, "trailing characters after number \"" + tok + "\"");
  return v;
}

TomlValue parse_value(const std::string& raw, int line) {
  TomlValue v;
  v.line = line;
  if (raw.empty()) fail(line, "missing value");

  if (raw.front() == '"') {
    if (raw.size() < 2 || raw.back() != '"') fail(line, "unterminated string");
    v.data = raw.substr(1, raw.size() - 2);
    return v;
  }
  if (raw == "true") { v.data = true; return v; }
  if (raw == "false") { v.data = false; return v; }
  if (raw.front() == '[') {
    if (raw.back() != ']') fail(line, "unterminated array (arrays must be single-line)");
    std::string inner = raw.substr(1, raw.size() - 2);
    std::vector<std::string> items;
    std::string cur;
    bool in_str = false;
    for (char c : inner) {
      if (c == '"') in_str = !in_str;
      if (c == ',' && !in_str) {
        items.push_back(cur);
        cur.clear();
      } else {
        cur.push_back(c);
      }
    }
    trim(cur);
    if (!cur.empty()) items.push_back(cur);
    for (auto& it : items) trim(it);

    if (!items.empty() && items.front().size() >= 1 && items.front().front() == '"') {
      std::vector<std::string> out;
      for (auto& it : items) {
        if (it.size() < 2 || it.front() != '"' || it.back() != '"')
          fail(line, "mixed or malformed string array");
        out.push_back(it.substr(1, it.size() - 2));
      }
      v.data = std::move(out);
    } else {
      std::vector<double> out;
      for (auto& it : items) out.push_back(parse_number(it, line));
      v.data = std::move(out);
    }
    return v;
  }
  v.data = parse_number(raw, line);
  return v;
}

std::string strip_comment(const std::string& line) {
  std::string out;
  bool in_str = false;
  for (char c : line) {
    if (c == '"') in_str = !in_str;
    if (c == '#' && !in_str) break;
    out.push_back(c);
  }
  return out;
}

}  // namespace

std::map<std::string, TomlValue> parse_toml(const std::string& text) {
  std::map<std::string, TomlValue> out;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = strip_comment(line);
    trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') fail(lineno, "malformed table header");
      section = line.substr(1, line.size() - 2);
      trim(section);
      if (section.empty()) fail(lineno, "empty table name");
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(lineno, "expected key = value");
    std::string key = line.substr(0, eq);
    std::string val = line.substr(eq + 1);
    trim(key);
    trim(val);
    if (key.empty()) fail(lineno, "empty key");
    const std::string full = section.empty() ? key : section + "." + key;
    if (out.count(full)) fail(lineno, "duplicate key \"" + full + "\"");
    out[full] = parse_value(val, lineno);
  }
  return out;
}

namespace {

/// Tracks which keys a loader consumed so leftovers can be rejected.
class KeyReader {
 public:
  explicit KeyReader(const std::map<std::string, TomlValue>& kv) : kv_(kv) {}

  double number(const std::string& key, double fallback) {
    const auto* v = get(key);
    if (!v) return fallback;
    if (!v->is_number()) fail(v->line, "key \"" + key + "\" must be a number");
    return std::get<double>(v->data);
  }
  int integer(const std::string& key, int fallback) {
    const double d = number(key, static_cast<double>(fallback));
    const int i = static_cast<int>(std::llround(d));
    if (d != static_cast<double>(i)) {
      const auto* v = get(key);
      fail(v ? v->line : 0, "key \"" + key + "\" must be an integer");
    }
    return i;
  }
  bool boolean(const std::string& key, bool fallback) {
    const auto* v = get(key);
    if (!v) return fallback;
    if (!v->is_bool()) fail(v->line, "key \"" + key + "\" must be true or false");
    return std::get<bool>(v->data);
  }
  std::string text(const std::string& key, const std::string& fallback) {
    const auto* v = get(key);
    if (!v) return fallback;
    if (!v->is_string()) fail(v->line, "key \"" + key + "\" must be a string");
    return std::get<std::string>(v->data);
  }
  std::optional<std::vector<double>> numbers(const std::string& key) {
    const auto* v = get(key);
    if (!v) return std::nullopt;
    if (!v->is_number_array()) fail(v->line, "key \"" + key + "\" must be a number array");
    return std::get<std::vector<double>>(v->data);
  }
  bool has(const std::string& key) {
    return get(key) != nullptr;
  }

  void reject_unknown() const {
    for (const auto& [key, value] : kv_)
      if (!consumed_.count(key))
        fail(value.line, "unknown key \"" + key + "\"");
  }

 private:
  const TomlValue* get(const std::string& key) {
    const auto it = kv_.find(key);
    if (it == kv_.end()) return nullptr;
    consumed_.insert(key);
    return &it->second;
  }

  const std::map<std::string, TomlValue>& kv_;
  std::set<std::string> consumed_;
};

}  // namespace

ShapeParam GeometryConfig::flat_shape() const {
  const double M = len_max > 0.0 ? len_max
                                 : 2.0 * ell * std::sqrt(1.0 + slope_max * slope_max);
  return make_flat_shape(m, L, ell, box_width, slope_max, M);
}

ProblemSetup RunConfig::problem_setup() const {
  ProblemSetup s;
  s.materials = material;
  s.g_spectrum = fit.g_spectrum;
  s.k_spacing = fit.k_spacing;
  s.nx = geometry.nx;
  s.ny = geometry.ny;
  return s;
}

RunConfig parse_config(const std::string& text) {
  const auto kv = parse_toml(text);
  KeyReader r(kv);
  RunConfig c;

  c.geometry.L = r.number("geometry.L", c.geometry.L);
  c.geometry.ell = r.number("geometry.ell", c.geometry.ell);
  c.geometry.box_width = r.number("geometry.box_width", c.geometry.box_width);
  c.geometry.m = r.integer("geometry.m", c.geometry.m);
  c.geometry.slope_max = r.number("geometry.slope_max", c.geometry.slope_max);
  c.geometry.len_max = r.number("geometry.len_max", c.geometry.len_max);
  c.mesh_resolution_defaulted = !r.has("geometry.nx") || !r.has("geometry.ny");
  c.geometry.nx = r.integer("geometry.nx", c.geometry.nx);
  c.geometry.ny = r.integer("geometry.ny", c.geometry.ny);
  if (!(c.geometry.L > 0.0 && c.geometry.ell > 0.0))
    throw ConfigError("geometry: L and ell must be positive");
  if (!(c.geometry.box_width > 0.0))
    throw ConfigError("geometry: box_width must be positive");
  if (c.geometry.m < 2) throw ConfigError("geometry: m must be >= 2");
  if (c.geometry.nx < 1 || c.geometry.ny < 1)
    throw ConfigError("geometry: nx and ny must be >= 1");
  if (c.geometry.len_max != 0.0 && c.geometry.len_max < 2.0 * c.geometry.ell)
    throw ConfigError("geometry: len_max must be at least the straight length 2*ell");

  const std::string preset = r.text("material.preset", "isorel");
  try {
    if (r.has("material.phi") || r.has("material.gamma_p") || r.has("material.sigma") ||
        r.has("material.rho0") || r.has("material.alpha_h") || r.has("material.c0")) {
      c.material = MaterialParams::make(
          r.number("material.phi", 0.7), r.number("material.gamma_p", 1.4),
          r.number("material.sigma", 142300.0), r.number("material.rho0", 1.2),
          r.number("material.alpha_h", 1.15), r.number("material.c0", 340.0));
    } else if (preset == "isorel") {
      c.material = MaterialParams::isorel();
    } else {
      throw ConfigError("material: unknown preset \"" + preset + "\"");
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("material: ") + e.what());
  }

  c.fit.dx = r.number("fit.dx", c.fit.dx);
  c.fit.L = c.geometry.L;
  c.fit.ell = c.geometry.ell;
  c.fit.k_spacing = r.number("fit.k_spacing", 0.0);
  c.fit.A = r.number("fit.A", c.fit.A);
  c.fit.B = r.number("fit.B", c.fit.B);
  c.fit.simplex_scale = r.number("fit.simplex_scale", c.fit.simplex_scale);
  c.fit.max_iterations = r.integer("fit.max_iterations", c.fit.max_iterations);
  c.fit.tolerance = r.number("fit.tolerance", c.fit.tolerance);
  c.fit.restarts = r.integer("fit.restarts", c.fit.restarts);
  c.fit.penalty_weight = r.number("fit.penalty_weight", c.fit.penalty_weight);
  c.fit.warm_start = r.boolean("fit.warm_start", true);
  if (!(c.fit.dx > 0.0)) throw ConfigError("fit: dx must be positive");
  if (!(c.fit.A >= 0.0 && c.fit.B >= 0.0 && c.fit.A + c.fit.B > 0.0))
    throw ConfigError("fit: need A, B >= 0 with A + B > 0");

  if (const auto modes = r.numbers("fit.mode_n")) {
    const auto re = r.numbers("fit.mode_re");
    const auto im = r.numbers("fit.mode_im");
    if (!re || re->size() != modes->size())
      throw ConfigError("fit: mode_re must match mode_n in length");
    if (im && im->size() != modes->size())
      throw ConfigError("fit: mode_im must match mode_n in length");
    c.fit.g_spectrum.clear();
    for (std::size_t i = 0; i < modes->size(); ++i) {
      const double nd = (*modes)[i];
      const int n = static_cast<int>(std::llround(nd));
      if (nd != static_cast<double>(n)) throw ConfigError("fit: mode_n entries must be integers");
      c.fit.g_spectrum[n] = cplx{(*re)[i], im ? (*im)[i] : 0.0};
    }
  }

  c.energy.A = r.number("energy.A", c.energy.A);
  c.energy.B = r.number("energy.B", c.energy.B);
  c.energy.C = r.number("energy.C", c.energy.C);
  c.energy.kappa = r.number("energy.kappa", c.energy.kappa);
  c.energy.vol_ref = 2.0 * c.geometry.L * c.geometry.ell;
  if (!(c.energy.A >= 0.0 && c.energy.B >= 0.0 && c.energy.C >= 0.0 &&
        c.energy.A + c.energy.B + c.energy.C > 0.0))
    throw ConfigError("energy: need nonnegative A, B, C with A+B+C > 0");
  if (!(c.energy.kappa >= 0.0)) throw ConfigError("energy: kappa must be >= 0");

  c.optimize.m = c.geometry.m;
  c.optimize.budget = r.integer("optimize.budget", c.optimize.budget);
  c.optimize.step = r.number("optimize.step", c.optimize.step);
  c.optimize.restarts = r.integer("optimize.restarts", c.optimize.restarts);
  c.optimize.tie_heights = r.boolean("optimize.tie_heights", false);
  c.optimize.w_box = r.number("optimize.w_box", c.optimize.w_box);
  c.optimize.w_slope = r.number("optimize.w_slope", c.optimize.w_slope);
  c.optimize.w_length = r.number("optimize.w_length", c.optimize.w_length);
  c.write_snapshots = r.boolean("optimize.write_snapshots", false);
  if (c.optimize.budget < 1) throw ConfigError("optimize: budget must be >= 1");
  if (!(c.optimize.step > 0.0)) throw ConfigError("optimize: step must be positive");

  c.solve.omega = r.number("solve.omega", c.solve.omega);
  if (r.has("solve.verify_mode")) c.solve.verify_mode = r.integer("solve.verify_mode", 0);
  if (r.has("solve.alpha_re") || r.has("solve.alpha_im")) {
    c.solve.alpha = cplx{r.number("solve.alpha_re", 1.0), r.number("solve.alpha_im", -1.0)};
  }
  c.solve.shape_csv = r.text("solve.shape_csv", "");
  if (!(c.solve.omega > 0.0)) throw ConfigError("solve: omega must be positive");

  if (const auto vals = r.numbers("frequencies.values")) {
    c.frequencies = *vals;
  } else if (r.has("frequencies.count")) {
    const int count = r.integer("frequencies.count", 0);
    const double lo = r.number("frequencies.min", 600.0);
    const double hi = r.number("frequencies.max", 30000.0);
    const std::string spacing = r.text("frequencies.spacing", "log");
    if (count < 1) throw ConfigError("frequencies: count must be >= 1");
    if (!(lo > 0.0 && hi >= lo)) throw ConfigError("frequencies: need 0 < min <= max");
    c.frequencies.resize(count);
    for (int i = 0; i < count; ++i) {
      const double t = count == 1 ? 0.0 : static_cast<double>(i) / (count - 1);
      if (spacing == "log")
        c.frequencies[i] = lo * std::pow(hi / lo, t);
      else if (spacing == "linear")
        c.frequencies[i] = lo + (hi - lo) * t;
      else
        throw ConfigError("frequencies: spacing must be \"log\" or \"linear\"");
    }
  }
  for (double w : c.frequencies)
    if (!(w > 0.0)) throw ConfigError("frequencies: all values must be positive");

  c.output_dir = r.text("output.dir", c.output_dir);
  const double seed = r.number("seed", 0.0);
  if (seed < 0.0 || seed != std::floor(seed))
    throw ConfigError("seed must be a nonnegative integer");
  c.seed = static_cast<std::uint64_t>(seed);
  c.optimize.seed = c.seed;

  r.reject_unknown();
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

}  // namespace wallshape
