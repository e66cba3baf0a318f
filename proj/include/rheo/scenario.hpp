// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "rheo/config.hpp"
#include "rheo/solver.hpp"

// Bridges a validated RunConfig to concrete solver objects and runs it, plus
// the energy-ledger CSV round trip. Shared by the command-line tool and the
// acceptance suite so both drive scenarios through the same path.

namespace rheo {

// quasi-static mode runs the same equations with the density zeroed
inline MaterialParams effective_material(const RunConfig& c) {
  MaterialParams p = c.material;
  if (c.mode == RunMode::QuasiStatic) p.rho = 0.0;
  return p;
}

template <int d>
Grid<d> make_grid(const RunConfig& c) {
  if (c.dim != d)
    throw std::invalid_argument("config is " + std::to_string(c.dim) + "d, expected " +
                                std::to_string(d) + "d");
  Grid<d> g;
  for (int a = 0; a < d; ++a) {
    g.lengths[a] = c.grid_lengths[a];
    g.cells[a] = c.grid_cells[a];
    g.periodic[a] = c.grid_periodic[a];
  }
  return g;
}

template <int d>
LoadSpec<d> make_loads(const RunConfig& c) {
  LoadSpec<d> l;
  for (int a = 0; a < d; ++a) l.body_force[a] = c.body_force[a];
  for (const auto& t : c.tractions) {
    typename LoadSpec<d>::Traction tr;
    tr.axis = t.axis;
    tr.side = t.side;
    for (int a = 0; a < d; ++a) tr.value[a] = t.value[a];
    l.tractions.push_back(tr);
  }
  l.t_ramp = c.loads_t_ramp;
  return l;
}

template <int d>
DirichletSpec<d> make_dirichlet(const RunConfig& c) {
  DirichletSpec<d> bc;
  for (const auto& cl : c.clamps) bc.clamps.push_back({cl.axis, cl.side, cl.comp, cl.value});
  bc.t_ramp = c.dirichlet_t_ramp;
  return bc;
}

inline TimeSettings make_time_settings(const RunConfig& c) {
  TimeSettings ts;
  ts.t_end = c.t_end;
  ts.dt = c.dt;
  ts.adaptive = c.adaptive;
  ts.dt_min = c.dt_min;
  ts.dt_max = c.dt_max;
  ts.dump_every = c.dump_every;
  return ts;
}

inline StepSettings make_step_settings(const RunConfig& c) {
  StepSettings ss;
  ss.newton_tol = c.newton_tol;
  ss.max_newton = c.max_newton;
  ss.max_backtrack = c.max_backtrack;
  ss.det_floor = c.det_floor;
  return ss;
}

template <int d>
State<d> make_initial_state(const RunConfig& c, const Basis<d>& basis) {
  if (c.init_kind == "reference") return make_state(basis);
  Grid<d> gf;
  State<d> s;
  read_state_file(c.init_file, gf, s);
  const Grid<d> want = make_grid<d>(c);
  if (gf.lengths != want.lengths || gf.cells != want.cells || gf.periodic != want.periodic)
    throw std::runtime_error("init.file '" + c.init_file +
                             "' was dumped on a different grid than the configured one");
  (void)basis;
  return s;
}

template <int d>
SimResult<d> run_scenario(const RunConfig& c, int nthreads,
                          const std::function<void(const State<d>&, long)>& on_dump = {}) {
  const Grid<d> g = make_grid<d>(c);
  const Basis<d> basis(g);
  const Assembler<d> asmb(basis, effective_material(c), make_loads<d>(c), make_dirichlet<d>(c),
                          nthreads);
  return simulate(asmb, make_initial_state<d>(c, basis), make_time_settings(c),
                  make_step_settings(c), on_dump);
}

inline constexpr const char* energy_csv_header =
    "t,kinetic,elastic,constraint,gradient,diss_kv,diss_m,diss_h,work_ext,"
    "balance_residual,min_det_P,min_det_grad_y,newton_iters";

inline void write_energy_csv(std::ostream& os, const std::vector<EnergyRow>& rows) {
  os << energy_csv_header << "\n";
  for (const auto& r : rows) {
    os << detail::fmt16(r.t) << "," << detail::fmt16(r.kinetic) << ","
       << detail::fmt16(r.elastic) << "," << detail::fmt16(r.constraint) << ","
       << detail::fmt16(r.gradient) << "," << detail::fmt16(r.diss_kv) << ","
       << detail::fmt16(r.diss_m) << "," << detail::fmt16(r.diss_h) << ","
       << detail::fmt16(r.work_ext) << "," << detail::fmt16(r.balance_residual) << ","
       << detail::fmt16(r.min_det_P) << "," << detail::fmt16(r.min_det_grad_y) << ","
       << r.newton_iters << "\n";
  }
}

inline std::vector<EnergyRow> read_energy_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != energy_csv_header)
    throw std::runtime_error("energy csv: missing or unexpected header");
  std::vector<EnergyRow> rows;
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<double> f;
    std::size_t pos = 0;
    while (pos <= line.size()) {
      const auto comma = line.find(',', pos);
      const std::string tok =
          line.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
      char* end = nullptr;
      const double v = std::strtod(tok.c_str(), &end);
      if (tok.empty() || end != tok.c_str() + tok.size())
        throw std::runtime_error("energy csv line " + std::to_string(lineno) +
                                 ": bad field '" + tok + "'");
      f.push_back(v);
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    if (f.size() != 13)
      throw std::runtime_error("energy csv line " + std::to_string(lineno) +
                               ": expected 13 fields, got " + std::to_string(f.size()));
    EnergyRow r;
    r.t = f[0];
    r.kinetic = f[1];
    r.elastic = f[2];
    r.constraint = f[3];
    r.gradient = f[4];
    r.diss_kv = f[5];
    r.diss_m = f[6];
    r.diss_h = f[7];
    r.work_ext = f[8];
    r.balance_residual = f[9];
    r.min_det_P = f[10];
    r.min_det_grad_y = f[11];
    r.newton_iters = static_cast<int>(f[12]);
    rows.push_back(r);
  }
  return rows;
}

}  // namespace rheo
