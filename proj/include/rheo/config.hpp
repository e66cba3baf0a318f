// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "rheo/params.hpp"

// Run configuration: flat `key = value` text with dotted section prefixes.
// `#` starts a comment, blank lines are skipped, unknown keys are errors.
// Parsing collects every problem (syntax with line numbers, then semantic
// violations) instead of stopping at the first; emission uses 17 significant
// digits so a written config re-parses to bitwise-identical values.

namespace rheo {

struct ConfigError : std::runtime_error {
  explicit ConfigError(std::vector<std::string> msgs)
      : std::runtime_error(join(msgs)), messages(std::move(msgs)) {}
  std::vector<std::string> messages;

 private:
  static std::string join(const std::vector<std::string>& msgs) {
    std::string all = "invalid configuration:";
    for (const auto& m : msgs) all += "\n  " + m;
    return all;
  }
};

enum class RunMode { Dynamic, QuasiStatic };

struct TractionCfg {
  int axis = 0;
  int side = 0;
  std::vector<double> value;
  bool operator==(const TractionCfg&) const = default;
};

struct ClampCfg {
  int axis = 0;
  int side = 0;
  int comp = 0;
  double value = 0.0;
  bool operator==(const ClampCfg&) const = default;
};

struct RunConfig {
  int dim = 2;
  RunMode mode = RunMode::Dynamic;  // QuasiStatic runs with the density zeroed

  std::vector<double> grid_lengths = {1.0, 1.0};
  std::vector<int> grid_cells = {8, 8};
  std::vector<bool> grid_periodic = {false, false};

  MaterialParams material;

  std::string init_kind = "reference";  // reference | file
  std::string init_file;                // state dump path when init_kind == file

  std::vector<double> body_force = {0.0, 0.0};
  std::vector<TractionCfg> tractions;
  double loads_t_ramp = 0.0;

  std::vector<ClampCfg> clamps;
  double dirichlet_t_ramp = 0.0;

  double t_end = 1.0;
  double dt = 0.01;
  double dt_min = 1e-8;
  double dt_max = 0.1;
  bool adaptive = false;

  std::string out_dir = "out";
  int dump_every = 0;  // state dumps every this many accepted steps; 0 disables

  double newton_tol = 1e-10;
  int max_newton = 25;
  int max_backtrack = 8;
  double det_floor = 1e-6;

  bool operator==(const RunConfig&) const = default;
};

namespace detail {

inline std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

struct ValueParser {
  std::vector<std::string>& errors;
  std::string where;  // "line N: key"
  std::vector<std::string> tokens;
  bool arity_ok = true;

  void expect(std::size_t lo, std::size_t hi) {
    if (tokens.size() < lo || tokens.size() > hi) {
      errors.push_back(where + ": expected " +
                       (lo == hi ? std::to_string(lo)
                                 : std::to_string(lo) + " to " + std::to_string(hi)) +
                       " values, got " + std::to_string(tokens.size()));
      arity_ok = false;
    }
  }
  double num(std::size_t i) {
    const std::string& t = tokens[i];
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (end != t.c_str() + t.size() || t.empty()) {
      errors.push_back(where + ": '" + t + "' is not a number");
      return 0.0;
    }
    return v;
  }
  int integer(std::size_t i) {
    const std::string& t = tokens[i];
    char* end = nullptr;
    const long v = std::strtol(t.c_str(), &end, 10);
    if (end != t.c_str() + t.size() || t.empty()) {
      errors.push_back(where + ": '" + t + "' is not an integer");
      return 0;
    }
    return static_cast<int>(v);
  }
  bool boolean(std::size_t i) {
    const std::string& t = tokens[i];
    if (t == "1" || t == "true") return true;
    if (t == "0" || t == "false") return false;
    errors.push_back(where + ": '" + t + "' is not a boolean (use 0/1/true/false)");
    return false;
  }
  std::vector<double> nums() {
    std::vector<double> v;
    for (std::size_t i = 0; i < tokens.size(); ++i) v.push_back(num(i));
    return v;
  }
  std::vector<int> ints() {
    std::vector<int> v;
    for (std::size_t i = 0; i < tokens.size(); ++i) v.push_back(integer(i));
    return v;
  }
  std::vector<bool> bools() {
    std::vector<bool> v;
    for (std::size_t i = 0; i < tokens.size(); ++i) v.push_back(boolean(i));
    return v;
  }
};

}  // namespace detail

// semantic checks only; returns every violation
inline std::vector<std::string> validate_config(const RunConfig& c) {
  std::vector<std::string> bad = validate_params(c.material, c.dim);
  const auto dim = static_cast<std::size_t>(c.dim);
  if (c.dim == 2 || c.dim == 3) {
    if (c.grid_lengths.size() != dim) bad.push_back("grid.lengths needs one entry per axis");
    if (c.grid_cells.size() != dim) bad.push_back("grid.cells needs one entry per axis");
    if (c.grid_periodic.size() != dim) bad.push_back("grid.periodic needs one entry per axis");
    if (c.body_force.size() != dim) bad.push_back("loads.body_force needs one entry per axis");
  }
  for (std::size_t a = 0; a < c.grid_lengths.size(); ++a)
    if (!(c.grid_lengths[a] > 0.0))
      bad.push_back("grid.lengths[" + std::to_string(a) + "] must be positive");
  for (std::size_t a = 0; a < c.grid_cells.size(); ++a) {
    const bool per = a < c.grid_periodic.size() && c.grid_periodic[a];
    const int min_cells = per ? 4 : 2;
    if (c.grid_cells[a] < min_cells)
      bad.push_back("grid.cells[" + std::to_string(a) + "] must be >= " +
                    std::to_string(min_cells) + (per ? " (periodic axis)" : ""));
  }
  if (c.init_kind != "reference" && c.init_kind != "file")
    bad.push_back("init.kind must be 'reference' or 'file'");
  if (c.init_kind == "file" && c.init_file.empty())
    bad.push_back("init.kind = file requires init.file");
  for (std::size_t i = 0; i < c.tractions.size(); ++i) {
    const auto& t = c.tractions[i];
    const std::string at = "loads.traction[" + std::to_string(i) + "]";
    if (t.axis < 0 || t.axis >= c.dim) bad.push_back(at + ": axis out of range");
    if (t.side != 0 && t.side != 1) bad.push_back(at + ": side must be 0 or 1");
    if (t.value.size() != dim) bad.push_back(at + ": needs one component per axis");
    if (t.axis >= 0 && t.axis < c.dim &&
        static_cast<std::size_t>(t.axis) < c.grid_periodic.size() &&
        c.grid_periodic[static_cast<std::size_t>(t.axis)])
      bad.push_back(at + ": axis " + std::to_string(t.axis) + " is periodic, it has no faces");
  }
  for (std::size_t i = 0; i < c.clamps.size(); ++i) {
    const auto& cl = c.clamps[i];
    const std::string at = "dirichlet.clamp[" + std::to_string(i) + "]";
    if (cl.axis < 0 || cl.axis >= c.dim) bad.push_back(at + ": axis out of range");
    if (cl.side != 0 && cl.side != 1) bad.push_back(at + ": side must be 0 or 1");
    if (cl.comp < 0 || cl.comp >= c.dim) bad.push_back(at + ": comp out of range");
    if (cl.axis >= 0 && cl.axis < c.dim &&
        static_cast<std::size_t>(cl.axis) < c.grid_periodic.size() &&
        c.grid_periodic[static_cast<std::size_t>(cl.axis)])
      bad.push_back(at + ": axis " + std::to_string(cl.axis) + " is periodic, it has no faces");
  }
  if (!(c.loads_t_ramp >= 0.0)) bad.push_back("loads.t_ramp must be >= 0");
  if (!(c.dirichlet_t_ramp >= 0.0)) bad.push_back("dirichlet.t_ramp must be >= 0");
  if (!(c.t_end > 0.0)) bad.push_back("time.t_end must be positive");
  if (!(c.dt > 0.0)) bad.push_back("time.dt must be positive");
  if (!(c.dt_min > 0.0)) bad.push_back("time.dt_min must be positive");
  if (!(c.dt_max >= c.dt_min)) bad.push_back("time.dt_max must be >= time.dt_min");
  if (c.dump_every < 0) bad.push_back("output.every must be >= 0");
  if (c.out_dir.empty()) bad.push_back("output.dir must not be empty");
  if (!(c.newton_tol > 0.0)) bad.push_back("solver.newton_tol must be positive");
  if (c.max_newton < 1) bad.push_back("solver.max_newton must be >= 1");
  if (c.max_backtrack < 0) bad.push_back("solver.max_backtrack must be >= 0");
  if (!(c.det_floor > 0.0)) bad.push_back("solver.det_floor must be positive");
  return bad;
}

// parses and fully validates; throws ConfigError carrying every problem found
inline RunConfig parse_config(std::istream& is, const std::string& source = "config") {
  RunConfig c;
  // repeatable keys replace the defaults wholesale on first appearance
  bool saw_traction = false, saw_clamp = false;
  std::vector<std::string> errors;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      errors.push_back(source + ":" + std::to_string(lineno) + ": expected 'key = value'");
      continue;
    }
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    const std::string where = source + ":" + std::to_string(lineno) + ": " + key;
    detail::ValueParser vp{errors, where, {}, true};
    {
      std::istringstream ts(value);
      std::string tok;
      while (ts >> tok) vp.tokens.push_back(tok);
    }

    if (key == "dim") {
      vp.expect(1, 1);
      if (vp.arity_ok) c.dim = vp.integer(0);
    } else if (key == "mode") {
      vp.expect(1, 1);
      if (vp.arity_ok) {
        if (vp.tokens[0] == "dynamic") c.mode = RunMode::Dynamic;
        else if (vp.tokens[0] == "quasi_static") c.mode = RunMode::QuasiStatic;
        else errors.push_back(where + ": must be 'dynamic' or 'quasi_static'");
      }
    } else if (key == "grid.lengths") {
      vp.expect(1, 3);
      if (vp.arity_ok) c.grid_lengths = vp.nums();
    } else if (key == "grid.cells") {
      vp.expect(1, 3);
      if (vp.arity_ok) c.grid_cells = vp.ints();
    } else if (key == "grid.periodic") {
      vp.expect(1, 3);
      if (vp.arity_ok) c.grid_periodic = vp.bools();
    } else if (key == "material.rho") {
      vp.expect(1, 1);
      if (vp.arity_ok) c.material.rho = vp.num(0);
    } else if (key == "material.nu_m") {
      vp.expect(1, 1);
      if (vp.arity_ok) c.material.nu_m = vp.num(0);
    } else if (key == "material.nu_h") {
      vp.expect(1, 1);
      if (vp.arity_ok) c.material.nu_h = vp.num(0);
    } else if (key == "material.nu_kv") {
      vp.expect(1, 1);
      if (vp.arity_ok) c.material.nu_kv = vp.num(0);
    } else if (key == "material.mu") {
      vp.expect(1, 1);
      if (vp.arity_ok) c.material.mu = vp.num(0);
    } else if (key == "material.eps_b") {
      vp.expect(1, 1);
      if (vp.arity_ok) c.material.eps_b = vp.num(0);
    } else if (key == "material.r_el") {
      vp.expect(1, 1);
      if (vp.arity_ok) c.material.r_el = vp.num(0);
    } else if (key == "material.delta") {
      vp.expect(1, 1);
      if (vp.arity_ok) c.material.delta = vp.num(0);
    } else if (key == "material.s_h") {
      vp.expect(1, 1);
      if (vp.arity_ok) c.material.s_h = vp.integer(0);
    } else if (key == "material.eps_g") {
      vp.expect(1, 1);
      if (vp.arity_ok) c.material.eps_g = vp.num(0);
    } else if (key == "material.p_g") {
      vp.expect(1, 1);
      if (vp.arity_ok) c.material.p_g = vp.num(0);
    } else if (key == "init.kind") {
      vp.expect(1, 1);
      if (vp.arity_ok) c.init_kind = vp.tokens[0];
    } else if (key == "init.file") {
      c.init_file = value;  // paths may contain spaces
    } else if (key == "loads.body_force") {
      vp.expect(1, 3);
      if (vp.arity_ok) c.body_force = vp.nums();
    } else if (key == "loads.traction") {
      vp.expect(3, 5);
      if (vp.arity_ok) {
        if (!saw_traction) c.tractions.clear();
        saw_traction = true;
        TractionCfg t;
        t.axis = vp.integer(0);
        t.side = vp.integer(1);
        for (std::size_t i = 2; i < vp.tokens.size(); ++i) t.value.push_back(vp.num(i));
        c.tractions.push_back(std::move(t));
      }
    } else if (key == "loads.t_ramp") {
      vp.expect(1, 1);
      if (vp.arity_ok) c.loads_t_ramp = vp.num(0);
    } else if (key == "dirichlet.clamp") {
      vp.expect(4, 4);
      if (vp.arity_ok) {
        if (!saw_clamp) c.clamps.clear();
        saw_clamp = true;
        c.clamps.push_back({vp.integer(0), vp.integer(1), vp.integer(2), vp.num(3)});
      }
    } else if (key == "dirichlet.t_ramp") {
      vp.expect(1, 1);
      if (vp.arity_ok) c.dirichlet_t_ramp = vp.num(0);
    } else if (key == "time.t_end") {
      vp.expect(1, 1);
      if (vp.arity_ok) c.t_end = vp.num(0);
    } else if (key == "time.dt") {
      vp.expect(1, 1);
      if (vp.arity_ok) c.dt = vp.num(0);
    } else if (key == "time.dt_min") {
      vp.expect(1, 1);
      if (vp.arity_ok) c.dt_min = vp.num(0);
    } else if (key == "time.dt_max") {
      vp.expect(1, 1);
      if (vp.arity_ok) c.dt_max = vp.num(0);
    } else if (key == "time.adaptive") {
      vp.expect(1, 1);
      if (vp.arity_ok) c.adaptive = vp.boolean(0);
    } else if (key == "output.dir") {
      c.out_dir = value;
    } else if (key == "output.every") {
      vp.expect(1, 1);
      if (vp.arity_ok) c.dump_every = vp.integer(0);
    } else if (key == "solver.newton_tol") {
      vp.expect(1, 1);
      if (vp.arity_ok) c.newton_tol = vp.num(0);
    } else if (key == "solver.max_newton") {
      vp.expect(1, 1);
      if (vp.arity_ok) c.max_newton = vp.integer(0);
    } else if (key == "solver.max_backtrack") {
      vp.expect(1, 1);
      if (vp.arity_ok) c.max_backtrack = vp.integer(0);
    } else if (key == "solver.det_floor") {
      vp.expect(1, 1);
      if (vp.arity_ok) c.det_floor = vp.num(0);
    } else {
      errors.push_back(where + ": unknown key");
    }
  }
  for (const auto& v : validate_config(c)) errors.push_back(source + ": " + v);
  if (!errors.empty()) throw ConfigError(std::move(errors));
  return c;
}

inline RunConfig parse_config_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError({"cannot open config file '" + path + "'"});
  return parse_config(is, path);
}

// emits every key (repeatables once per entry) so parse(write(c)) == c
inline std::string write_config(const RunConfig& c) {
  std::ostringstream os;
  auto list_d = [&](const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + detail::fmt17(v[i]);
    return s;
  };
  os << "dim = " << c.dim << "\n";
  os << "mode = " << (c.mode == RunMode::Dynamic ? "dynamic" : "quasi_static") << "\n";
  os << "grid.lengths = " << list_d(c.grid_lengths) << "\n";
  os << "grid.cells =";
  for (int x : c.grid_cells) os << " " << x;
  os << "\ngrid.periodic =";
  for (bool x : c.grid_periodic) os << " " << (x ? 1 : 0);
  os << "\n";
  os << "material.rho = " << detail::fmt17(c.material.rho) << "\n";
  os << "material.nu_m = " << detail::fmt17(c.material.nu_m) << "\n";
  os << "material.nu_h = " << detail::fmt17(c.material.nu_h) << "\n";
  os << "material.nu_kv = " << detail::fmt17(c.material.nu_kv) << "\n";
  os << "material.mu = " << detail::fmt17(c.material.mu) << "\n";
  os << "material.eps_b = " << detail::fmt17(c.material.eps_b) << "\n";
  os << "material.r_el = " << detail::fmt17(c.material.r_el) << "\n";
  os << "material.delta = " << detail::fmt17(c.material.delta) << "\n";
  os << "material.s_h = " << c.material.s_h << "\n";
  os << "material.eps_g = " << detail::fmt17(c.material.eps_g) << "\n";
  os << "material.p_g = " << detail::fmt17(c.material.p_g) << "\n";
  os << "init.kind = " << c.init_kind << "\n";
  if (!c.init_file.empty()) os << "init.file = " << c.init_file << "\n";
  os << "loads.body_force = " << list_d(c.body_force) << "\n";
  for (const auto& t : c.tractions)
    os << "loads.traction = " << t.axis << " " << t.side << " " << list_d(t.value) << "\n";
  os << "loads.t_ramp = " << detail::fmt17(c.loads_t_ramp) << "\n";
  for (const auto& cl : c.clamps)
    os << "dirichlet.clamp = " << cl.axis << " " << cl.side << " " << cl.comp << " "
       << detail::fmt17(cl.value) << "\n";
  os << "dirichlet.t_ramp = " << detail::fmt17(c.dirichlet_t_ramp) << "\n";
  os << "time.t_end = " << detail::fmt17(c.t_end) << "\n";
  os << "time.dt = " << detail::fmt17(c.dt) << "\n";
  os << "time.dt_min = " << detail::fmt17(c.dt_min) << "\n";
  os << "time.dt_max = " << detail::fmt17(c.dt_max) << "\n";
  os << "time.adaptive = " << (c.adaptive ? 1 : 0) << "\n";
  os << "output.dir = " << c.out_dir << "\n";
  os << "output.every = " << c.dump_every << "\n";
  os << "solver.newton_tol = " << detail::fmt17(c.newton_tol) << "\n";
  os << "solver.max_newton = " << c.max_newton << "\n";
  os << "solver.max_backtrack = " << c.max_backtrack << "\n";
  os << "solver.det_floor = " << detail::fmt17(c.det_floor) << "\n";
  return os.str();
}

}  // namespace rheo
