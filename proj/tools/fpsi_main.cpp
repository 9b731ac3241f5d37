// Command-line driver: convergence studies, the arterial benchmark, mesh
// validation, the small-data report, and generic runs on mesh files.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "fpsi/config.hpp"
#include "fpsi/errors.hpp"
#include "fpsi/infsup.hpp"
#include "fpsi/vtk.hpp"

namespace {

using namespace fpsi;

int cmd_converge(const ConvergeConfig& config) {
  std::vector<int> cells;
  int n = static_cast<int>(std::llround(1.0 / config.hmax));
  for (int level = 0; level < config.levels; ++level, n *= 2) cells.push_back(n);
  std::cerr << "convergence study: family=" << to_string(config.family) << " dt=" << config.dt
            << " T=" << config.T << " h=1/" << cells.front() << "..1/" << cells.back() << "\n";
  const ErrorTable table = convergence_study(config.family, cells, config.dt, config.T);
  const std::string csv = table.to_csv();
  std::cout << csv;
  if (!config.output.empty()) {
    std::ofstream out(config.output);
    if (!out) {
      std::cerr << "error: cannot write '" << config.output << "'\n";
      return 1;
    }
    out << csv;
    std::cerr << "wrote " << config.output << "\n";
  }
  return 0;
}

int cmd_arterial(const ArterialConfig& config) {
  std::cerr << "arterial benchmark: T=" << config.T << " dt=" << config.dt << " mesh=" << config.nx
            << "x" << config.ny_f << "+2x" << config.ny_wall << " strips\n";
  const ArterialResult result = run_arterial(config);
  std::cerr << "max |p_f| over run: " << result.max_pressure << "\n";
  for (const auto& snap : result.snapshots)
    std::cerr << "t=" << snap.t * 1e3 << " ms: pressure peak " << snap.pressure_peak << " at x="
              << snap.pressure_peak_x << "\n";
  if (!result.all_finite) {
    std::cerr << "error: non-finite values in the solution\n";
    return 1;
  }
  return 0;
}

int cmd_check_mesh(const std::string& path) {
  CoupledMesh mesh;
  try {
    mesh = read_mesh(path);
  } catch (const std::exception& err) {
    std::cerr << err.what() << "\n";
    return 1;
  }
  const auto violations = validate(mesh);
  for (const auto& v : violations) std::cerr << v.entity << ": " << v.rule << "\n";
  if (!violations.empty()) return 1;
  std::cout << "ok: " << mesh.fluid.num_triangles() << " fluid triangles, "
            << mesh.poro.num_triangles() << " poroelastic triangles, " << mesh.interface.size()
            << " interface edges\n";
  return 0;
}

int cmd_small_data(const SmallDataConfig& config) {
  CoupledMesh mesh =
      build_rectangle_coupled_mesh(0.0, 1.0, -1.0, 1.0, 0.0, config.cells, config.cells,
                                   config.cells);
  FemSystem sys = build_fem_system(mesh, config.family);
  const ManufacturedSolution ms = make_mms_solution();
  SourceFunctions src;
  src.f_f = ms.f_f;
  src.f_p = ms.f_p;
  src.q_p = ms.q_p;
  SolverConfig run;
  run.dt = config.dt;
  run.T = config.T;
  const SmallDataReport report = small_data_check(sys, src, ms.coefficients, run, config.S_f,
                                                  config.K_f, config.beta_p);
  double lhs_max = 0.0;
  for (double v : report.lhs) lhs_max = std::max(lhs_max, v);
  std::cout << "small-data condition with S_f=" << config.S_f << " K_f=" << config.K_f
            << " beta_p=" << config.beta_p << "\n";
  std::cout << "  max lhs over steps: " << lhs_max << "\n";
  std::cout << "  rhs threshold:      " << report.rhs << "\n";
  std::cout << "  satisfied:          " << (report.satisfied ? "yes" : "no") << "\n";
  return 0;
}

int cmd_solve(const SolveCommandConfig& config) {
  if (config.mesh_path.empty()) {
    std::cerr << "error: solve requires a mesh path\n";
    return 1;
  }
  CoupledMesh mesh = read_mesh(config.mesh_path);
  FemSystem sys = build_fem_system(mesh, config.family);

  SourceFunctions src;
  ProblemCoefficients coef = config.coefficients;
  BoundaryConditions bcs;
  TimeState state = TimeState::zero(sys);
  ManufacturedSolution ms;
  if (config.sources == "mms") {
    ms = make_mms_solution();
    coef = ms.coefficients;
    src.f_f = ms.f_f;
    src.f_p = ms.f_p;
    src.q_p = ms.q_p;
    src.q_f = ms.q_f;
    src.p_p_natural = ms.p_p;
    src.darcy_natural_tags = {BoundaryTag::GammaPD};
    const BoundaryTag fluid_tags[] = {BoundaryTag::GammaF};
    const BoundaryTag poro_tags[] = {BoundaryTag::GammaPD, BoundaryTag::GammaPN};
    bcs.uf = essential_bc(sys.uf, fluid_tags);
    bcs.uf_fn = ms.u_f;
    bcs.eta = essential_bc(sys.eta, poro_tags);
    bcs.eta_fn = ms.eta;
    state.uf = interpolate(sys.uf, ms.u_f, 0.0);
    state.up = interpolate(sys.up, ms.u_p, 0.0);
    state.pp = interpolate_scalar(sys.pp, ms.p_p, 0.0);
    state.eta = interpolate(sys.eta, ms.eta, 0.0);
    state.eta_prev = interpolate(sys.eta, ms.eta, -config.dt);
  } else {
    const BoundaryTag fluid_tags[] = {BoundaryTag::GammaF};
    const BoundaryTag poro_tags[] = {BoundaryTag::GammaPD, BoundaryTag::GammaPN};
    bcs.uf = essential_bc(sys.uf, fluid_tags);
    bcs.eta = essential_bc(sys.eta, poro_tags);
  }

  SolverConfig run;
  run.dt = config.dt;
  run.T = config.T;
  TimeStepper stepper(sys, coef, src, std::move(bcs), run);
  const auto series = stepper.run(state);

  const auto& last = series.back();
  std::cout << "completed " << series.size() << " steps to T=" << state.t << "\n";
  std::cout << "  ||u_f||^2=" << last.uf_l2_sq << " ||p_p||^2=" << last.pp_l2_sq
            << " elastic=" << last.ape_energy() << "\n";
  if (!config.output_dir.empty()) {
    std::filesystem::create_directories(config.output_dir);
    // final-state snapshot
    std::vector<VtkField> fluid_fields;
    std::vector<double> uf_vertices(2 * mesh.fluid.num_vertices());
    for (int v = 0; v < mesh.fluid.num_vertices(); ++v) {
      uf_vertices[2 * v] = state.uf[sys.uf.global(v, 0)];
      uf_vertices[2 * v + 1] = state.uf[sys.uf.global(v, 1)];
    }
    fluid_fields.push_back({"velocity", 2, uf_vertices});
    write_vtk(mesh.fluid, config.output_dir + "/solve_fluid_final.vtk", fluid_fields);
    std::vector<VtkField> poro_fields;
    std::vector<double> eta_vertices(2 * mesh.poro.num_vertices());
    for (int v = 0; v < mesh.poro.num_vertices(); ++v) {
      eta_vertices[2 * v] = state.eta[sys.eta.global(v, 0)];
      eta_vertices[2 * v + 1] = state.eta[sys.eta.global(v, 1)];
    }
    poro_fields.push_back({"displacement", 2, eta_vertices});
    write_vtk(mesh.poro, config.output_dir + "/solve_poro_final.vtk", poro_fields);
    std::cerr << "wrote final-state VTK to " << config.output_dir << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Navier-Stokes/Biot coupled finite element solver"};
  app.require_subcommand(1);

  std::string config_path;
  app.add_option("--config", config_path, "JSON configuration file")->expected(1);

  RunConfig config;

  auto* converge = app.add_subcommand("converge", "manufactured-solution convergence study");
  std::string hmax_text, family_text;
  auto* opt_family = converge->add_option("--family", family_text, "lower|higher");
  auto* opt_hmax = converge->add_option("--hmax", hmax_text, "coarsest spacing, e.g. 1/8");
  auto* opt_levels = converge->add_option("--levels", config.converge.levels, "refinement levels");
  auto* opt_cdt = converge->add_option("--dt", config.converge.dt, "time step");
  auto* opt_cT = converge->add_option("--T", config.converge.T, "final time");
  auto* opt_out = converge->add_option("--output", config.converge.output, "CSV output path");

  auto* arterial = app.add_subcommand("arterial", "arterial flow benchmark");
  auto* opt_aT = arterial->add_option("--T", config.arterial.T, "final time [s]");
  auto* opt_adt = arterial->add_option("--dt", config.arterial.dt, "time step [s]");
  auto* opt_nx = arterial->add_option("--nx", config.arterial.nx, "cells along the vessel");
  auto* opt_nyf = arterial->add_option("--ny-f", config.arterial.ny_f, "cells across the lumen");
  auto* opt_nyw = arterial->add_option("--ny-wall", config.arterial.ny_wall, "cells across a wall");
  auto* opt_pmax = arterial->add_option("--P-max", config.arterial.P_max, "peak inflow pressure");
  auto* opt_tmax = arterial->add_option("--T-max", config.arterial.T_max, "pulse duration [s]");
  auto* opt_xi = arterial->add_option("--xi", config.arterial.coefficients.xi, "spring coefficient");
  auto* opt_dir =
      arterial->add_option("--output-dir", config.arterial.output_dir, "snapshot directory");
  auto* opt_mag = arterial->add_flag("--magnify", config.arterial.magnify_displacement,
                                     "magnify exported wall displacement x40");

  auto* check = app.add_subcommand("check-mesh", "validate a mesh file");
  std::string mesh_path;
  check->add_option("path", mesh_path, "mesh file")->required();

  auto* small = app.add_subcommand("small-data", "discrete small-data condition report");
  std::string sd_family_text;
  auto* opt_sdfam = small->add_option("--family", sd_family_text, "lower|higher");
  auto* opt_cells = small->add_option("--cells", config.small_data.cells, "cells per unit");
  auto* opt_sdt = small->add_option("--dt", config.small_data.dt, "time step");
  auto* opt_sT = small->add_option("--T", config.small_data.T, "final time");
  auto* opt_sf = small->add_option("--Sf", config.small_data.S_f, "Sobolev constant");
  auto* opt_kf = small->add_option("--Kf", config.small_data.K_f, "Korn constant");
  auto* opt_bp = small->add_option("--beta-p", config.small_data.beta_p, "inf-sup constant");

  auto* solve = app.add_subcommand("solve", "run the scheme on a mesh file");
  std::string solve_family_text;
  auto* opt_smesh = solve->add_option("--mesh", config.solve.mesh_path, "mesh file");
  auto* opt_sofam = solve->add_option("--family", solve_family_text, "lower|higher");
  auto* opt_src = solve->add_option("--sources", config.solve.sources, "zero|mms");
  auto* opt_sodt = solve->add_option("--dt", config.solve.dt, "time step");
  auto* opt_soT = solve->add_option("--T", config.solve.T, "final time");
  auto* opt_sodir = solve->add_option("--output-dir", config.solve.output_dir, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (!config_path.empty()) {
      RunConfig from_file = load_config_file(config_path);
      // flags already parsed above override file values below
      const RunConfig flag_values = config;
      config = from_file;
      if (*opt_levels) config.converge.levels = flag_values.converge.levels;
      if (*opt_cdt) config.converge.dt = flag_values.converge.dt;
      if (*opt_cT) config.converge.T = flag_values.converge.T;
      if (*opt_out) config.converge.output = flag_values.converge.output;
      if (*opt_aT) config.arterial.T = flag_values.arterial.T;
      if (*opt_adt) config.arterial.dt = flag_values.arterial.dt;
      if (*opt_nx) config.arterial.nx = flag_values.arterial.nx;
      if (*opt_nyf) config.arterial.ny_f = flag_values.arterial.ny_f;
      if (*opt_nyw) config.arterial.ny_wall = flag_values.arterial.ny_wall;
      if (*opt_pmax) config.arterial.P_max = flag_values.arterial.P_max;
      if (*opt_tmax) config.arterial.T_max = flag_values.arterial.T_max;
      if (*opt_xi) config.arterial.coefficients.xi = flag_values.arterial.coefficients.xi;
      if (*opt_dir) config.arterial.output_dir = flag_values.arterial.output_dir;
      if (*opt_mag) config.arterial.magnify_displacement = true;
      if (*opt_cells) config.small_data.cells = flag_values.small_data.cells;
      if (*opt_sdt) config.small_data.dt = flag_values.small_data.dt;
      if (*opt_sT) config.small_data.T = flag_values.small_data.T;
      if (*opt_sf) config.small_data.S_f = flag_values.small_data.S_f;
      if (*opt_kf) config.small_data.K_f = flag_values.small_data.K_f;
      if (*opt_bp) config.small_data.beta_p = flag_values.small_data.beta_p;
      if (*opt_smesh) config.solve.mesh_path = flag_values.solve.mesh_path;
      if (*opt_src) config.solve.sources = flag_values.solve.sources;
      if (*opt_sodt) config.solve.dt = flag_values.solve.dt;
      if (*opt_soT) config.solve.T = flag_values.solve.T;
      if (*opt_sodir) config.solve.output_dir = flag_values.solve.output_dir;
    }
    if (*opt_family) config.converge.family = family_from_string(family_text);
    if (*opt_hmax) config.converge.hmax = parse_h(hmax_text);
    if (*opt_sdfam) config.small_data.family = family_from_string(sd_family_text);
    if (*opt_sofam) config.solve.family = family_from_string(solve_family_text);

    if (converge->parsed()) return cmd_converge(config.converge);
    if (arterial->parsed()) return cmd_arterial(config.arterial);
    if (check->parsed()) return cmd_check_mesh(mesh_path);
    if (small->parsed()) return cmd_small_data(config.small_data);
    if (solve->parsed()) return cmd_solve(config.solve);
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }
  return 2;
}
