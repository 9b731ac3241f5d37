#include <doctest.h>

#include <cmath>

#include "fpsi/errors.hpp"
#include "fpsi/stepper.hpp"

using namespace fpsi;

namespace {

CoupledMesh unit_coupled(int n) { return build_rectangle_coupled_mesh(0, 1, -1, 1, 0.0, n, n, n); }

BoundaryConditions homogeneous_bcs(const FemSystem& sys) {
  BoundaryConditions bcs;
  const BoundaryTag fluid_tags[] = {BoundaryTag::GammaF};
  const BoundaryTag poro_tags[] = {BoundaryTag::GammaPD};
  bcs.uf = essential_bc(sys.uf, fluid_tags);
  bcs.eta = essential_bc(sys.eta, poro_tags);
  return bcs;
}

}  // namespace

TEST_CASE("zero data keeps the state identically zero") {
  CoupledMesh mesh = unit_coupled(3);
  FemSystem sys = build_fem_system(mesh, ElementFamily::LowerOrder);
  SolverConfig config;
  config.dt = 0.05;
  config.T = 0.25;
  TimeStepper stepper(sys, ProblemCoefficients{}, SourceFunctions{}, homogeneous_bcs(sys), config);
  TimeState state = TimeState::zero(sys);
  stepper.run(state);
  double max_norm = 0.0;
  for (const auto* field : {&state.uf, &state.pf, &state.up, &state.pp, &state.eta, &state.lam})
    for (double v : *field) max_norm = std::max(max_norm, std::abs(v));
  CHECK(max_norm <= 1e-12);
}

TEST_CASE("N = 0 returns the initial state unchanged") {
  CoupledMesh mesh = unit_coupled(2);
  FemSystem sys = build_fem_system(mesh, ElementFamily::LowerOrder);
  SolverConfig config;
  config.dt = 0.1;
  config.T = 0.0;
  TimeStepper stepper(sys, ProblemCoefficients{}, SourceFunctions{}, homogeneous_bcs(sys), config);
  TimeState state = TimeState::zero(sys);
  auto series = stepper.run(state);
  CHECK(series.empty());
  CHECK(state.n == 0);
  CHECK(state.t == 0.0);
}

TEST_CASE("manufactured step: discrete residual below the solver tolerance") {
  CoupledMesh mesh = unit_coupled(4);
  const ManufacturedSolution ms = make_mms_solution();
  SolverConfig config;
  config.dt = 1e-3;
  config.T = 3e-3;
  MmsRunResult result = run_mms(mesh, ElementFamily::LowerOrder, ms, config);
  for (const auto& d : result.series) {
    CHECK(d.solver_residual <= 1e-9 * d.rhs_norm);
    CHECK(d.residual_mass <= 1e-8 * d.rhs_norm);
    CHECK(d.residual_interface <= 1e-8 * d.rhs_norm);
  }
}

TEST_CASE("interface mass conservation holds for the solved fields") {
  // independent quadrature route for the interface equation
  CoupledMesh mesh = unit_coupled(4);
  const ManufacturedSolution ms = make_mms_solution();
  FemSystem sys = build_fem_system(mesh, ElementFamily::LowerOrder);

  SourceFunctions src;
  src.f_f = ms.f_f;
  src.f_p = ms.f_p;
  src.q_p = ms.q_p;
  src.q_f = ms.q_f;
  src.p_p_natural = ms.p_p;
  src.darcy_natural_tags = {BoundaryTag::GammaPD};
  BoundaryConditions bcs;
  const BoundaryTag fluid_tags[] = {BoundaryTag::GammaF};
  const BoundaryTag poro_tags[] = {BoundaryTag::GammaPD};
  bcs.uf = essential_bc(sys.uf, fluid_tags);
  bcs.uf_fn = ms.u_f;
  bcs.eta = essential_bc(sys.eta, poro_tags);
  bcs.eta_fn = ms.eta;
  SolverConfig config;
  config.dt = 1e-3;
  config.T = 2e-3;
  TimeStepper stepper(sys, ms.coefficients, src, std::move(bcs), config);
  TimeState state = TimeState::zero(sys);
  state.uf = interpolate(sys.uf, ms.u_f, 0.0);
  state.up = interpolate(sys.up, ms.u_p, 0.0);
  state.pp = interpolate_scalar(sys.pp, ms.p_p, 0.0);
  state.eta = interpolate(sys.eta, ms.eta, 0.0);
  state.eta_prev = interpolate(sys.eta, ms.eta, -config.dt);

  TimeState prev = state;
  stepper.step(state);

  const QuadratureRule rule = edge_rule(8);
  double scale = 0.0;
  for (const auto& d : {state.uf, state.up})
    for (double v : d) scale = std::max(scale, std::abs(v));
  for (std::size_t e = 0; e < mesh.interface.size(); ++e) {
    const auto& rec = mesh.interface[e];
    Point2 a = mesh.fluid.vertices[rec.fluid_v0], b = mesh.fluid.vertices[rec.fluid_v1];
    for (int m = 0; m < sys.lam.per_edge; ++m) {
      double residual = 0.0;
      for (const auto& node : rule.nodes) {
        Point2 p = a + node.x * (b - a);
        Point2 uf_v = eval_vector(sys.uf, state.uf, rec.fluid_tri, p);
        Point2 up_v = eval_vector(sys.up, state.up, rec.poro_tri, p);
        Point2 eta_new = eval_vector(sys.eta, state.eta, rec.poro_tri, p);
        Point2 eta_old = eval_vector(sys.eta, prev.eta, rec.poro_tri, p);
        Point2 dteta = (1.0 / config.dt) * (eta_new - eta_old);
        const double flux = dot(uf_v, rec.normal_f) + dot(dteta + up_v, rec.normal_p);
        residual += node.w * rec.length * flux * MultiplierSpace::basis(m, node.x);
      }
      CHECK(std::abs(residual) <= 1e-8 * (1.0 + scale));
    }
  }
}

TEST_CASE("homogeneous data: discrete energy does not increase") {
  CoupledMesh mesh = unit_coupled(4);
  FemSystem sys = build_fem_system(mesh, ElementFamily::LowerOrder);
  SolverConfig config;
  config.dt = 5e-3;
  config.T = 0.1;
  TimeStepper stepper(sys, ProblemCoefficients{}, SourceFunctions{}, homogeneous_bcs(sys), config);

  TimeState state = TimeState::zero(sys);
  // small initial elastic energy; velocity history zero
  auto bump = [](Point2 p, double) -> Point2 {
    const double s = 1e-2 * std::sin(M_PI * p.x) * std::sin(M_PI * p.y);
    return {s, s};
  };
  state.eta = interpolate(sys.eta, bump, 0.0);
  state.eta_prev = state.eta;

  auto energy = [&](const StepDiagnostics& d) {
    ProblemCoefficients coef;
    return coef.rho_f * d.uf_l2_sq + coef.s0 * d.pp_l2_sq + d.ape_energy() +
           coef.rho_p * d.dteta_l2_sq;
  };
  StepDiagnostics d0 = stepper.measure(state);
  double prev_energy = energy(d0);
  CHECK(prev_energy > 0.0);
  for (int n = 0; n < stepper.config().num_steps(); ++n) {
    StepDiagnostics d = stepper.step(state);
    const double e = energy(d);
    CHECK(e <= prev_energy * (1.0 + 1e-12));
    prev_energy = e;
  }
  CHECK(prev_energy < energy(d0));
}

TEST_CASE("determinism: identical runs produce identical states") {
  CoupledMesh mesh = unit_coupled(3);
  const ManufacturedSolution ms = make_mms_solution();
  SolverConfig config;
  config.dt = 1e-3;
  config.T = 2e-3;
  MmsRunResult a = run_mms(mesh, ElementFamily::LowerOrder, ms, config);
  MmsRunResult b = run_mms(mesh, ElementFamily::LowerOrder, ms, config);
  CHECK(a.errors.uf_l2H1 == b.errors.uf_l2H1);
  CHECK(a.errors.lam_l2L2 == b.errors.lam_l2L2);
}

TEST_CASE("small-data report") {
  CoupledMesh mesh = unit_coupled(3);
  FemSystem sys = build_fem_system(mesh, ElementFamily::LowerOrder);
  SolverConfig config;
  config.dt = 0.05;
  config.T = 0.2;

  SUBCASE("zero sources satisfy the condition") {
    SmallDataReport report =
        small_data_check(sys, SourceFunctions{}, ProblemCoefficients{}, config, 1.0, 1.0, 1.0);
    CHECK(report.satisfied);
    for (double v : report.lhs) CHECK(v == doctest::Approx(0.0).scale(1.0));
    CHECK(report.rhs == doctest::Approx(0.25));
  }

  SUBCASE("quadratic scaling in the data") {
    const ManufacturedSolution ms = make_mms_solution();
    SourceFunctions src;
    src.f_f = ms.f_f;
    src.f_p = ms.f_p;
    src.q_p = ms.q_p;
    SourceFunctions scaled;
    scaled.f_f = [&ms](Point2 p, double t) { return 3.0 * ms.f_f(p, t); };
    scaled.f_p = [&ms](Point2 p, double t) { return 3.0 * ms.f_p(p, t); };
    scaled.q_p = [&ms](Point2 p, double t) { return 3.0 * ms.q_p(p, t); };
    SmallDataReport r1 =
        small_data_check(sys, src, ms.coefficients, config, 1.0, 1.0, 1.0);
    SmallDataReport r2 =
        small_data_check(sys, scaled, ms.coefficients, config, 1.0, 1.0, 1.0);
    for (std::size_t j = 1; j < r1.C1.size(); ++j) {
      CHECK(r2.C1[j] == doctest::Approx(9.0 * r1.C1[j]).epsilon(1e-12));
      CHECK(r2.C2[j] == doctest::Approx(9.0 * r1.C2[j]).epsilon(1e-12));
    }
    CHECK(r2.C4 == doctest::Approx(9.0 * r1.C4).epsilon(1e-12));
  }

  SUBCASE("nonpositive constants rejected") {
    CHECK_THROWS(small_data_check(sys, SourceFunctions{}, ProblemCoefficients{}, config, -1.0,
                                  1.0, 1.0));
  }
}

TEST_CASE("energy report on a zero run") {
  std::vector<StepDiagnostics> series(5);  // all zeros
  EnergyReport report = energy_report(series, ProblemCoefficients{}, 0.1, 1.0, {});
  CHECK(report.lhs == 0.0);
  CHECK(report.holds);
}

TEST_CASE("config validation") {
  SolverConfig config;
  config.dt = -0.1;
  CHECK_THROWS(config.validate());
  config.dt = 2.0;  // the scheme assumes dt <= 1
  CHECK_THROWS(config.validate());
  config.dt = 0.1;
  config.T = 0.55;  // not an integral number of steps
  CHECK_THROWS(config.validate());
  config.T = 0.5;
  CHECK_NOTHROW(config.validate());
  CHECK(config.num_steps() == 5);
}
