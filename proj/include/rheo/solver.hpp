// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>

#include "rheo/assembly.hpp"
#include "rheo/linalg.hpp"

// Implicit Euler time stepping: full Newton with a finite-difference
// Jacobian, monotone backtracking line search, a determinant floor check on
// each converged state, and an optional step-halving/step-doubling loop.
// The energy ledger tracks stored energy, cumulative dissipation and
// external work so the balance residual |E + D - E0 - W| is available per
// step.

namespace rheo {

struct NewtonDiverged : std::runtime_error {
  explicit NewtonDiverged(const std::string& what) : std::runtime_error(what) {}
};

struct DeterminantBreached : std::runtime_error {
  DeterminantBreached(const std::string& field, double value)
      : std::runtime_error("determinant floor breached: min det " + field + " = " +
                           std::to_string(value)),
        field(field), value(value) {}
  std::string field;
  double value;
};

struct StepSettings {
  double newton_tol = 1e-10;  // max-norm of the step residual
  int max_newton = 25;
  int max_backtrack = 8;
  double det_floor = 1e-6;  // reject a step whose converged state dips below
};

struct StepReport {
  int newton_iters = 0;
  double residual_norm = 0.0;
  double min_det_P = 1.0, min_det_grad_y = 1.0, min_det_f_el = 1.0;
};

namespace detail {
inline double linf(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}
}  // namespace detail

// One backward Euler step from old_st to old_st.time + dt. Throws
// NewtonDiverged or DeterminantBreached on failure; the caller decides
// whether to retry with a smaller step.
template <int d>
std::pair<State<d>, StepReport> step_implicit_euler(const Assembler<d>& asmb,
                                                    const State<d>& old_st, double dt,
                                                    const StepSettings& ss) {
  const double t_new = old_st.time + dt;
  const int N = asmb.nunknowns();
  std::vector<double> z = asmb.pack(old_st);
  std::vector<double> r, rt, jac, dz, ztry(N);

  asmb.residual(old_st, z, t_new, dt, r);
  double rnorm = detail::linf(r);
  StepReport rep;
  for (; rep.newton_iters < ss.max_newton && rnorm > ss.newton_tol; ++rep.newton_iters) {
    asmb.jacobian_fd(old_st, z, t_new, dt, jac);
    std::optional<DenseLU> lu;
    try {
      lu.emplace(std::move(jac), N);
    } catch (const std::runtime_error& e) {
      throw NewtonDiverged(std::string("singular step Jacobian: ") + e.what());
    }
    dz = r;
    for (double& x : dz) x = -x;
    lu->solve(dz);

    bool accepted = false;
    double lambda = 1.0;
    for (int b = 0; b <= ss.max_backtrack; ++b, lambda *= 0.5) {
      for (int i = 0; i < N; ++i) ztry[i] = z[i] + lambda * dz[i];
      try {
        asmb.residual(old_st, ztry, t_new, dt, rt);
      } catch (const NonPositiveDeterminant&) {
        continue;  // trial state left the admissible set
      } catch (const SingularMatrix&) {
        continue;
      }
      const double rtn = detail::linf(rt);
      if (rtn < rnorm) {
        z.swap(ztry);
        r.swap(rt);
        rnorm = rtn;
        accepted = true;
        break;
      }
    }
    if (!accepted)
      throw NewtonDiverged("no residual decrease after " + std::to_string(ss.max_backtrack) +
                           " halvings at t = " + std::to_string(t_new));
  }
  if (rnorm > ss.newton_tol)
    throw NewtonDiverged("residual " + std::to_string(rnorm) + " above tolerance after " +
                         std::to_string(rep.newton_iters) + " iterations at t = " +
                         std::to_string(t_new));
  rep.residual_norm = rnorm;

  const DetMinima<d> dm = asmb.det_minima(z);
  rep.min_det_P = dm.det_P;
  rep.min_det_grad_y = dm.det_grad_y;
  rep.min_det_f_el = dm.det_f_el;
  if (dm.det_P < ss.det_floor) throw DeterminantBreached("P", dm.det_P);
  if (dm.det_grad_y < ss.det_floor) throw DeterminantBreached("grad_y", dm.det_grad_y);
  if (dm.det_f_el < ss.det_floor) throw DeterminantBreached("F_el", dm.det_f_el);

  return {asmb.unpack(z, old_st, dt, t_new), rep};
}

struct TimeSettings {
  double t_end = 1.0;
  double dt = 0.01;
  bool adaptive = false;
  double dt_min = 1e-8;
  double dt_max = 0.1;
  int dump_every = 0;  // 0: no intermediate dumps
};

struct EnergyRow {
  double t = 0.0;
  double kinetic = 0.0, elastic = 0.0, constraint = 0.0, gradient = 0.0;
  double diss_kv = 0.0, diss_m = 0.0, diss_h = 0.0;  // cumulative
  double work_ext = 0.0;                             // cumulative
  double balance_residual = 0.0;                     // |E + D - E0 - W|
  double min_det_P = 1.0, min_det_grad_y = 1.0;
  int newton_iters = 0;

  double stored() const { return kinetic + elastic + constraint + gradient; }
  double dissipated() const { return diss_kv + diss_m + diss_h; }
};

template <int d>
struct SimResult {
  std::vector<EnergyRow> rows;  // first row is the initial state
  State<d> final_state;
  long total_newton = 0;
  int rejected_steps = 0;
};

// Time loop. In adaptive mode a failed step (Newton divergence or
// determinant floor) halves dt down to dt_min and five consecutive easy
// steps double it up to dt_max; otherwise failures propagate.
template <int d>
SimResult<d> simulate(const Assembler<d>& asmb, State<d> s0, const TimeSettings& ts,
                      const StepSettings& ss,
                      const std::function<void(const State<d>&, long)>& on_dump = {}) {
  SimResult<d> res;
  const EnergyParts e0p = asmb.energies(s0);
  const double e0 = e0p.stored();
  EnergyRow row;
  row.t = s0.time;
  row.kinetic = e0p.kinetic;
  row.elastic = e0p.elastic;
  row.constraint = e0p.constraint;
  row.gradient = e0p.gradient;
  {
    const DetMinima<d> dm = asmb.det_minima(asmb.pack(s0));
    row.min_det_P = dm.det_P;
    row.min_det_grad_y = dm.det_grad_y;
  }
  res.rows.push_back(row);

  double diss_kv = 0.0, diss_m = 0.0, diss_h = 0.0, work = 0.0;
  double dt = ts.dt;
  int easy = 0;
  long step = 0;
  State<d> s = std::move(s0);
  const double t_eps = 1e-12 * std::max(1.0, std::abs(ts.t_end));
  if (on_dump) on_dump(s, 0);
  while (s.time < ts.t_end - t_eps) {
    const double dt_step = std::min(dt, ts.t_end - s.time);
    State<d> s_new;
    StepReport rep;
    try {
      std::tie(s_new, rep) = step_implicit_euler(asmb, s, dt_step, ss);
    } catch (const std::runtime_error&) {
      if (!ts.adaptive) throw;
      ++res.rejected_steps;
      easy = 0;
      dt *= 0.5;
      if (dt < ts.dt_min) throw;
      continue;
    }
    const double t_new = s_new.time;
    const DissipationIncrement di = asmb.dissipation_increment(s, s_new, dt_step);
    diss_kv += di.kv;
    diss_m += di.m;
    diss_h += di.h;
    work += asmb.work_increment(s, s_new, t_new, dt_step);

    const EnergyParts ep = asmb.energies(s_new);
    EnergyRow r2;
    r2.t = t_new;
    r2.kinetic = ep.kinetic;
    r2.elastic = ep.elastic;
    r2.constraint = ep.constraint;
    r2.gradient = ep.gradient;
    r2.diss_kv = diss_kv;
    r2.diss_m = diss_m;
    r2.diss_h = diss_h;
    r2.work_ext = work;
    r2.balance_residual = std::abs(ep.stored() + diss_kv + diss_m + diss_h - e0 - work);
    r2.min_det_P = rep.min_det_P;
    r2.min_det_grad_y = rep.min_det_grad_y;
    r2.newton_iters = rep.newton_iters;
    res.rows.push_back(r2);
    res.total_newton += rep.newton_iters;

    s = std::move(s_new);
    ++step;
    if (on_dump && ts.dump_every > 0 && step % ts.dump_every == 0) on_dump(s, step);

    if (ts.adaptive) {
      if (++easy >= 5 && dt < ts.dt_max) {
        dt = std::min(2.0 * dt, ts.dt_max);
        easy = 0;
      }
    }
  }
  if (on_dump) on_dump(s, -1);  // final state
  res.final_state = std::move(s);
  return res;
}

}  // namespace rheo
