// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch_amalgamated.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "rheo/config.hpp"
#include "rheo/scenario.hpp"

using namespace rheo;

namespace {

bool any_contains(const std::vector<std::string>& msgs, const std::string& needle) {
  for (const auto& m : msgs)
    if (m.find(needle) != std::string::npos) return true;
  return false;
}

}  // namespace

TEST_CASE("empty input yields the default configuration") {
  std::istringstream empty("");
  const RunConfig c = parse_config(empty);
  CHECK(c == RunConfig{});
  CHECK(validate_config(RunConfig{}).empty());
}

TEST_CASE("comments, blank lines, and loose spacing are accepted") {
  std::istringstream is(
      "# full-line comment\n"
      "\n"
      "   time.dt   =   0.005   # trailing comment\n"
      "\tgrid.cells\t=\t4 4\n");
  const RunConfig c = parse_config(is);
  CHECK(c.dt == 0.005);
  CHECK(c.grid_cells == std::vector<int>{4, 4});
}

TEST_CASE("written configuration re-parses to the identical value") {
  RunConfig c;
  c.dim = 2;
  c.mode = RunMode::QuasiStatic;
  c.grid_lengths = {1.0 / 3.0, 0.1};
  c.grid_cells = {5, 9};
  c.grid_periodic = {true, false};
  c.material.rho = 0.0;
  c.material.nu_m = 0.30000000000000004;
  c.material.nu_h = 1e-7;
  c.material.nu_kv = 2.0 / 7.0;
  c.material.mu = 6.02214076e-1;
  c.material.eps_b = 0.123456789012345678;
  c.material.r_el = 7.25;
  c.material.delta = 1e-3;
  c.material.s_h = 5;
  c.material.eps_g = 1e-6;
  c.material.p_g = 3.5;
  c.init_kind = "file";
  c.init_file = "states/warm start.dump";  // path with a space survives
  c.body_force = {-0.1, 1.0 / 7.0};
  c.tractions = {{1, 1, {1e-3, -2e-4}}, {1, 0, {0.0, 0.25}}};
  c.loads_t_ramp = 0.125;
  c.clamps = {{1, 0, 0, 0.0}, {1, 0, 1, -0.75}, {1, 1, 0, 0.04}};
  c.dirichlet_t_ramp = 0.3;
  c.t_end = 2.5000000000000004;
  c.dt = 1.0 / 48.0;
  c.dt_min = 1e-9;
  c.dt_max = 0.2;
  c.adaptive = true;
  c.out_dir = "out/some run";
  c.dump_every = 7;
  c.newton_tol = 3e-11;
  c.max_newton = 19;
  c.max_backtrack = 5;
  c.det_floor = 2e-6;
  REQUIRE(validate_config(c).empty());

  const std::string text = write_config(c);
  std::istringstream is(text);
  const RunConfig back = parse_config(is);
  CHECK(back == c);

  // a second emission is byte-stable
  CHECK(write_config(back) == text);
}

TEST_CASE("repeated traction and clamp keys accumulate in order") {
  std::istringstream is(
      "grid.periodic = 1 0\n"
      "grid.cells = 4 4\n"
      "loads.traction = 1 1 0.25 0\n"
      "loads.traction = 1 0 0 -0.5\n"
      "dirichlet.clamp = 1 0 0 0.0\n"
      "dirichlet.clamp = 1 0 1 0.125\n");
  const RunConfig c = parse_config(is);
  REQUIRE(c.tractions.size() == 2);
  CHECK(c.tractions[0] == TractionCfg{1, 1, {0.25, 0.0}});
  CHECK(c.tractions[1] == TractionCfg{1, 0, {0.0, -0.5}});
  REQUIRE(c.clamps.size() == 2);
  CHECK(c.clamps[0] == ClampCfg{1, 0, 0, 0.0});
  CHECK(c.clamps[1] == ClampCfg{1, 0, 1, 0.125});
}

TEST_CASE("every problem is reported at once, with source and line numbers") {
  std::istringstream is(
      "this line has no equals sign\n"   // line 1: syntax
      "time.dt = fast\n"                 // line 2: not a number
      "coffee.size = venti\n"            // line 3: unknown key
      "grid.cells = 4\n"                 // line 4: wrong arity for dim 2
      "material.p_g = 2\n"               // semantic: must lie in (d, 2*)
      "material.nu_h = 0\n"              // semantic: must be > 0
      "time.t_end = -1\n");              // semantic: must be positive
  try {
    parse_config(is, "bad.cfg");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(any_contains(e.messages, "bad.cfg:1: expected 'key = value'"));
    CHECK(any_contains(e.messages, "bad.cfg:2: time.dt: 'fast' is not a number"));
    CHECK(any_contains(e.messages, "bad.cfg:3: coffee.size: unknown key"));
    CHECK(any_contains(e.messages, "grid.cells needs one entry per axis"));
    CHECK(any_contains(e.messages, "p_g must lie in"));
    CHECK(any_contains(e.messages, "nu_h must be > 0"));
    CHECK(any_contains(e.messages, "time.t_end must be positive"));
    CHECK(e.messages.size() >= 7);
    // the formatted what() carries all of them
    CHECK(std::string(e.what()).find("coffee.size") != std::string::npos);
  }
}

TEST_CASE("faces of a periodic axis accept no tractions or clamps") {
  std::istringstream is(
      "grid.periodic = 1 0\n"
      "grid.cells = 4 4\n"
      "loads.traction = 0 1 0.1 0\n"
      "dirichlet.clamp = 0 0 0 0.0\n");
  try {
    parse_config(is);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(any_contains(e.messages, "loads.traction[0]: axis 0 is periodic"));
    CHECK(any_contains(e.messages, "dirichlet.clamp[0]: axis 0 is periodic"));
  }
}

TEST_CASE("mode accepts exactly the two run modes") {
  std::istringstream ok("mode = quasi_static\n");
  CHECK(parse_config(ok).mode == RunMode::QuasiStatic);
  std::istringstream bad("mode = static\n");
  CHECK_THROWS_AS(parse_config(bad), ConfigError);
}

TEST_CASE("a missing config file reports its path") {
  try {
    parse_config_file("definitely_not_here.cfg");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(any_contains(e.messages, "cannot open config file 'definitely_not_here.cfg'"));
  }
}

TEST_CASE("the shipped configurations parse without complaint") {
  const std::string dir = RHEO_CONFIG_DIR;

  const RunConfig def = parse_config_file(dir + "/default.cfg");
  CHECK(def.dim == 2);
  CHECK(def.mode == RunMode::Dynamic);
  CHECK(def.grid_cells == std::vector<int>{6, 6});
  CHECK(def.grid_periodic == std::vector<bool>{true, false});
  CHECK(def.clamps.size() == 4);
  CHECK(def.dump_every == 5);

  const RunConfig eq = parse_config_file(dir + "/equilibrium.cfg");
  CHECK(eq.mode == RunMode::Dynamic);
  CHECK(eq.tractions.empty());
  CHECK(eq.clamps.size() == 8);
  CHECK(eq.t_end == 0.5);
  CHECK(eq.dt == 0.05);

  const RunConfig sh = parse_config_file(dir + "/shear_ramp.cfg");
  CHECK(sh.mode == RunMode::QuasiStatic);
  CHECK(sh.grid_cells == std::vector<int>{8, 8});
  CHECK(sh.t_end == 1.0);
  CHECK(sh.dt == 0.02);  // 50 steps
  CHECK(sh.dirichlet_t_ramp == 0.5);

  const RunConfig cr = parse_config_file(dir + "/jeffreys_creep.cfg");
  CHECK(cr.mode == RunMode::QuasiStatic);
  REQUIRE(cr.tractions.size() == 1);
  CHECK(cr.tractions[0].axis == 1);
  CHECK(cr.tractions[0].side == 1);
  CHECK(cr.tractions[0].value == std::vector<double>{1e-3, 0.0});
  CHECK(cr.loads_t_ramp == 0.0);
}

TEST_CASE("scenario conversion honors the run mode and grid spec") {
  std::istringstream is(
      "mode = quasi_static\n"
      "grid.lengths = 2 0.5\n"
      "grid.cells = 4 6\n"
      "grid.periodic = 1 0\n");
  const RunConfig c = parse_config(is);
  CHECK(effective_material(c).rho == 0.0);

  const Grid<2> g = make_grid<2>(c);
  CHECK(g.lengths == std::array<double, 2>{2.0, 0.5});
  CHECK(g.cells == std::array<int, 2>{4, 6});
  CHECK(g.periodic == std::array<bool, 2>{true, false});

  CHECK_THROWS(make_grid<3>(c));  // declared dim must match the instantiation
}

TEST_CASE("energy ledger rows survive a write/read cycle exactly") {
  std::vector<EnergyRow> rows(3);
  rows[0].t = 0.0;
  rows[1] = EnergyRow{0.1, 1.0 / 3.0, 2e-17, 0.1, 4.9e-3,
                      1e-5,  2e-5,    3e-5,  7e-4, 1.25e-9,
                      0.99999999999,  0.98765432109876543, 4};
  rows[2] = EnergyRow{0.2, 0.25, 3e-16, 0.1, 5.1e-3,
                      2e-5, 4e-5, 6e-5, 1.4e-3, 2.5e-9,
                      0.9999999999,  0.9876543210987,  3};

  std::ostringstream os;
  write_energy_csv(os, rows);
  std::istringstream is(os.str());
  const std::vector<EnergyRow> back = read_energy_csv(is);

  REQUIRE(back.size() == rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(back[i].t == rows[i].t);
    CHECK(back[i].kinetic == rows[i].kinetic);
    CHECK(back[i].elastic == rows[i].elastic);
    CHECK(back[i].constraint == rows[i].constraint);
    CHECK(back[i].gradient == rows[i].gradient);
    CHECK(back[i].diss_kv == rows[i].diss_kv);
    CHECK(back[i].diss_m == rows[i].diss_m);
    CHECK(back[i].diss_h == rows[i].diss_h);
    CHECK(back[i].work_ext == rows[i].work_ext);
    CHECK(back[i].balance_residual == rows[i].balance_residual);
    CHECK(back[i].min_det_P == rows[i].min_det_P);
    CHECK(back[i].min_det_grad_y == rows[i].min_det_grad_y);
    CHECK(back[i].newton_iters == rows[i].newton_iters);
  }
}

TEST_CASE("malformed energy ledgers are rejected with line numbers") {
  SECTION("wrong header") {
    std::istringstream is("t,elastic\n0,1\n");
    CHECK_THROWS_AS(read_energy_csv(is), std::runtime_error);
  }
  SECTION("wrong field count") {
    std::string text = energy_csv_header;
    text += "\n1,2,3\n";
    std::istringstream is(text);
    try {
      read_energy_csv(is);
      FAIL("expected rejection");
    } catch (const std::runtime_error& e) {
      CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
  }
  SECTION("non-numeric field") {
    std::string text = energy_csv_header;
    text += "\n0,0,0,0,0,0,0,0,0,zero,1,1,0\n";
    std::istringstream is(text);
    CHECK_THROWS_AS(read_energy_csv(is), std::runtime_error);
  }
}
