// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "rheo/scenario.hpp"
#include "rheo/stratified.hpp"
#include "rheo/weakform.hpp"

// Command-line front end. Subcommands:
//   simulate           run a configured scenario, write energy.csv + dumps
//   audit-hardening    closed-form stripe audit of the gradient penalties
//   verify-derivatives finite-difference check of the variational derivatives
//   energy-report      summarize and gate an energy.csv ledger
// Exit codes: 0 success, 1 validation/verification failure, 2 solver failure.

namespace rheo {

namespace detail {

inline int hardware_threads() {
  if (const char* s = std::getenv("RHEO_THREADS")) {
    const int n = std::atoi(s);
    if (n >= 1) return n;
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc > 0 ? static_cast<int>(hc) : 1;
}

template <int d>
int run_simulate(const RunConfig& cfg, const std::string& config_path) {
  namespace fs = std::filesystem;
  const fs::path out(cfg.out_dir);
  fs::create_directories(out);

  const Grid<d> grid = make_grid<d>(cfg);
  const Basis<d> basis(grid);
  const int nthreads = hardware_threads();
  const Assembler<d> asmb(basis, effective_material(cfg), make_loads<d>(cfg),
                          make_dirichlet<d>(cfg), nthreads);
  State<d> s0;
  try {
    s0 = make_initial_state<d>(cfg, basis);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  auto dump = [&](const State<d>& s, long step) {
    const std::string name =
        step < 0 ? "fields_final.dump" : "fields_" + std::to_string(step) + ".dump";
    write_state_file((out / name).string(), grid, s, basis.ndof());
  };

  SimResult<d> res;
  try {
    res = simulate<d>(asmb, std::move(s0), make_time_settings(cfg), make_step_settings(cfg),
                      dump);
  } catch (const std::exception& e) {
    std::ofstream sum(out / "summary.txt");
    sum << "status = failed\nconfig = " << config_path << "\nerror = " << e.what() << "\n";
    std::cerr << "solver failure: " << e.what() << "\n"
              << "diagnostics under " << out.string() << "\n";
    return 2;
  }

  {
    std::ofstream csv(out / "energy.csv");
    write_energy_csv(csv, res.rows);
  }
  double max_bal = 0.0, min_det_p = 1e300, min_det_gy = 1e300, peak = 0.0;
  for (const auto& r : res.rows) {
    max_bal = std::max(max_bal, r.balance_residual);
    peak = std::max(peak, r.stored());
    min_det_p = std::min(min_det_p, r.min_det_P);
    min_det_gy = std::min(min_det_gy, r.min_det_grad_y);
  }
  const auto& last = res.rows.back();
  {
    std::ofstream sum(out / "summary.txt");
    sum << "status = ok\n";
    sum << "config = " << config_path << "\n";
    sum << "unknowns = " << (d + d * d) * basis.ndof() << "\n";
    sum << "threads = " << nthreads << "\n";
    sum << "steps = " << res.rows.size() - 1 << "\n";
    sum << "rejected_steps = " << res.rejected_steps << "\n";
    sum << "total_newton = " << res.total_newton << "\n";
    sum << "t_final = " << detail::fmt16(last.t) << "\n";
    sum << "stored_initial = " << detail::fmt16(res.rows.front().stored()) << "\n";
    sum << "stored_final = " << detail::fmt16(last.stored()) << "\n";
    sum << "dissipated_final = " << detail::fmt16(last.dissipated()) << "\n";
    sum << "work_final = " << detail::fmt16(last.work_ext) << "\n";
    sum << "max_balance_residual = " << detail::fmt16(max_bal) << "\n";
    sum << "peak_stored = " << detail::fmt16(peak) << "\n";
    sum << "min_det_P = " << detail::fmt16(min_det_p) << "\n";
    sum << "min_det_grad_y = " << detail::fmt16(min_det_gy) << "\n";
  }
  std::cout << "simulate: " << res.rows.size() - 1 << " steps to t = " << last.t << ", "
            << res.total_newton << " Newton iterations, max balance residual " << max_bal
            << "\noutputs under " << out.string() << "\n";
  return 0;
}

inline int cmd_simulate(const std::string& config_path, const std::string& out_override) {
  RunConfig cfg;
  try {
    cfg = parse_config_file(config_path);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  if (!out_override.empty()) cfg.out_dir = out_override;
  try {
    return cfg.dim == 2 ? run_simulate<2>(cfg, config_path) : run_simulate<3>(cfg, config_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

inline int cmd_audit(const std::string& profile_name, double ell, double width, double t_min,
                     double t_max, int samples, double kappa, int quad_points,
                     const std::string& out_csv) {
  SlipProfile profile;
  std::vector<double> t_grid;
  try {
    profile = profile_name == "linear" ? linear_profile(ell) : tanh_profile(ell, width);
    if (!(t_min > 0.0) || !(t_max > t_min))
      throw std::invalid_argument("need 0 < t-min < t-max");
    if (samples < 3) throw std::invalid_argument("need at least 3 samples");
    for (int i = 0; i < samples; ++i)
      t_grid.push_back(t_min * std::pow(t_max / t_min, static_cast<double>(i) / (samples - 1)));
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  const AuditReport rep =
      audit({profile}, all_regularizer_kinds(), t_grid, kappa, quad_points);

  namespace fs = std::filesystem;
  const fs::path csv_path(out_csv);
  if (csv_path.has_parent_path()) fs::create_directories(csv_path.parent_path());
  {
    std::ofstream csv(csv_path);
    csv << "t";
    for (const auto kind : all_regularizer_kinds()) csv << "," << to_string(kind);
    csv << "\n";
    for (std::size_t i = 0; i < rep.t_grid.size(); ++i) {
      csv << detail::fmt16(rep.t_grid[i]);
      for (const auto& ent : rep.entries) csv << "," << detail::fmt16(ent.energy[i]);
      csv << "\n";
    }
  }

  nlohmann::ordered_json j;
  j["profile"]["kind"] = profile_name;
  j["profile"]["ell"] = ell;
  if (profile.kind == SlipProfile::Kind::Tanh) j["profile"]["width"] = width;
  j["kappa"] = kappa;
  j["t_min"] = t_min;
  j["t_max"] = t_max;
  j["samples"] = samples;
  j["results"] = nlohmann::ordered_json::array();
  for (const auto& ent : rep.entries) {
    nlohmann::ordered_json r;
    r["kind"] = to_string(ent.kind);
    r["classification"] = to_string(ent.growth);
    if (ent.growth == Growth::Grows) r["exponent"] = ent.exponent;
    r["max_energy"] = ent.max_energy;
    r["trailing_drift"] = ent.trailing_drift;
    j["results"].push_back(std::move(r));
  }
  fs::path summary_path = csv_path;
  summary_path.replace_filename(csv_path.stem().string() + "_summary.json");
  {
    std::ofstream js(summary_path);
    js << j.dump(2) << "\n";
  }

  for (const auto& ent : rep.entries) {
    std::printf("%-16s %s", to_string(ent.kind).c_str(), to_string(ent.growth).c_str());
    if (ent.growth == Growth::Grows) std::printf(" (exponent %.3f)", ent.exponent);
    std::printf("\n");
  }
  std::printf("wrote %s and %s\n", csv_path.string().c_str(), summary_path.string().c_str());
  return 0;
}

inline int cmd_verify(int dim, int trials, unsigned seed, double tol) {
  if (dim != 2 && dim != 3) {
    std::cerr << "error: --dim must be 2 or 3\n";
    return 1;
  }
  if (trials < 1) {
    std::cerr << "error: --trials must be >= 1\n";
    return 1;
  }
  const FdCheckReport rep = fd_check_all(seed, trials, dim);
  std::printf("derivative check, %dd, %d trials, seed %u\n", dim, trials, seed);
  std::printf("  stress pairing          max rel err %.3e\n", rep.err_momentum);
  std::printf("  flow pairing            max rel err %.3e\n", rep.err_flow);
  std::printf("  viscous stress pairing  max rel err %.3e\n", rep.err_kv_stress);
  std::printf("  viscous flow pairing    max rel err %.3e\n", rep.err_kv_flow);
  const double worst = rep.max_err();
  std::printf("worst %.3e against tolerance %.1e: %s\n", worst, tol,
              worst <= tol ? "ok" : "FAIL");
  return worst <= tol ? 0 : 1;
}

inline int cmd_energy_report(const std::string& in_csv, double gate) {
  std::vector<EnergyRow> rows;
  try {
    std::ifstream is(in_csv);
    if (!is) throw std::runtime_error("cannot open '" + in_csv + "'");
    rows = read_energy_csv(is);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  if (rows.size() < 2) {
    std::cerr << "error: ledger has no steps\n";
    return 1;
  }
  double peak = 0.0, max_bal = 0.0, min_det = 1e300;
  for (const auto& r : rows) {
    peak = std::max(peak, r.stored());
    max_bal = std::max(max_bal, r.balance_residual);
    min_det = std::min(min_det, std::min(r.min_det_P, r.min_det_grad_y));
  }
  const auto& last = rows.back();
  const double elapsed = last.t - rows.front().t;
  const double per_time = elapsed > 0.0 ? last.balance_residual / elapsed : 0.0;
  const double rel = peak > 0.0 ? per_time / peak : 0.0;
  std::printf("rows                       %zu (t = %g .. %g)\n", rows.size(), rows.front().t,
              last.t);
  std::printf("stored energy              %.10e -> %.10e (peak %.10e)\n",
              rows.front().stored(), last.stored(), peak);
  std::printf("dissipated (kv, m, h)      %.10e = %.3e + %.3e + %.3e\n", last.dissipated(),
              last.diss_kv, last.diss_m, last.diss_h);
  std::printf("external work              %.10e\n", last.work_ext);
  std::printf("final balance residual     %.10e\n", last.balance_residual);
  std::printf("per unit time / peak       %.10e (gate %g)\n", rel, gate);
  std::printf("min det (P, grad y)        %.10e\n", min_det);
  if (peak > 0.0 && rel > gate) {
    std::printf("FAIL: energy ledger is out of balance\n");
    return 1;
  }
  std::printf("ok\n");
  return 0;
}

}  // namespace detail

inline int cli_main(int argc, char** argv) {
  CLI::App app{"large-strain viscoelastic creep: solver and hardening audit"};
  app.require_subcommand(1);

  std::string config_path, out_override;
  auto* sim = app.add_subcommand("simulate", "run a configured scenario");
  sim->add_option("--config", config_path, "run configuration file")->required();
  sim->add_option("--out", out_override, "override the configured output directory");

  std::string profile_name = "tanh", audit_out = "audit.csv";
  double ell = 1.0, width = 0.2, t_min = 0.0, t_max = 100.0, kappa = 1.0;
  int samples = 49, quad_points = 64;
  auto* aud = app.add_subcommand("audit-hardening",
                                 "closed-form growth audit of the gradient penalties");
  aud->add_option("--profile", profile_name, "slip profile")
      ->check(CLI::IsMember({"linear", "tanh"}))
      ->capture_default_str();
  aud->add_option("--ell", ell, "stripe half-width")->capture_default_str();
  aud->add_option("--width", width, "tanh transition width")->capture_default_str();
  aud->add_option("--t-max", t_max, "last sample time")->capture_default_str();
  aud->add_option("--t-min", t_min, "first sample time (default t-max/100)");
  aud->add_option("--samples", samples, "sample count, geometric spacing")
      ->capture_default_str();
  aud->add_option("--kappa", kappa, "penalty coefficient")->capture_default_str();
  aud->add_option("--quad-points", quad_points, "Gauss points across the stripe")
      ->capture_default_str();
  aud->add_option("--out", audit_out, "output CSV path")->capture_default_str();

  int dim = 2, trials = 20;
  unsigned seed = 7;
  double tol = 1e-5;
  auto* ver = app.add_subcommand("verify-derivatives",
                                 "finite-difference check of the variational derivatives");
  ver->add_option("--dim", dim, "spatial dimension")->capture_default_str();
  ver->add_option("--trials", trials, "random states per family")->capture_default_str();
  ver->add_option("--seed", seed, "random seed")->capture_default_str();
  ver->add_option("--tol", tol, "pass/fail tolerance")->capture_default_str();

  std::string report_in;
  double gate = 0.05;
  auto* erep = app.add_subcommand("energy-report", "summarize and gate an energy.csv ledger");
  erep->add_option("--in", report_in, "energy.csv produced by simulate")->required();
  erep->add_option("--gate", gate, "max (balance residual per unit time)/peak stored")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  if (sim->parsed()) return detail::cmd_simulate(config_path, out_override);
  if (aud->parsed()) {
    if (t_min <= 0.0) t_min = t_max / 100.0;
    return detail::cmd_audit(profile_name, ell, width, t_min, t_max, samples, kappa,
                             quad_points, audit_out);
  }
  if (ver->parsed()) return detail::cmd_verify(dim, trials, seed, tol);
  if (erep->parsed()) return detail::cmd_energy_report(report_in, gate);
  return 1;
}

}  // namespace rheo
