#include <doctest.h>

#include "fpsi/arterial.hpp"

using namespace fpsi;

TEST_CASE("inflow pressure profile") {
  const double P = 13334.0, Tmax = 0.003;
  CHECK(inflow_pressure(0.0, P, Tmax) == doctest::Approx(0.0).scale(1.0));
  CHECK(inflow_pressure(Tmax / 2, P, Tmax) == doctest::Approx(P));
  CHECK(inflow_pressure(2 * Tmax, P, Tmax) == 0.0);
  CHECK(inflow_pressure(Tmax, P, Tmax) == doctest::Approx(0.0).scale(1.0));
  // stays within [0, P_max]
  for (int i = 0; i <= 20; ++i) {
    const double v = inflow_pressure(i * Tmax / 20, P, Tmax);
    CHECK(v >= 0.0);
    CHECK(v <= P * (1 + 1e-12));
  }
  CHECK_THROWS(inflow_pressure(-1.0, P, Tmax));
}

TEST_CASE("table defaults") {
  ArterialConfig config = ArterialConfig::defaults();
  CHECK(config.coefficients.rho_p == doctest::Approx(1.1));
  CHECK(config.coefficients.xi == doctest::Approx(5e7));
  CHECK(config.coefficients.mu_f == doctest::Approx(0.035));
  CHECK(config.coefficients.s0 == doctest::Approx(5e-6));
  CHECK(config.coefficients.K[0][0] == doctest::Approx(5e-9));
  CHECK(config.coefficients.mu_p == doctest::Approx(4.28e6));
  CHECK(config.coefficients.lambda_p == doctest::Approx(1.07e6));
  CHECK(config.P_max == doctest::Approx(13334.0));
  CHECK(config.T_max == doctest::Approx(0.003));
  CHECK(config.T == doctest::Approx(0.006));
  CHECK_NOTHROW(config.validate());
}

TEST_CASE("trace extraction on interpolants") {
  CoupledMesh mesh = build_channel_coupled_mesh(2.0, 0.5, 0.1, 8, 3, 1);
  FemSystem sys = build_fem_system(mesh, ElementFamily::LowerOrder);
  TimeState state = TimeState::zero(sys);

  InterfaceTrace zero_trace = extract_trace(sys, state, TraceQuantity::UfN);
  CHECK(zero_trace.x.size() == 8);
  for (double v : zero_trace.value) CHECK(v == 0.0);
  for (std::size_t i = 1; i < zero_trace.x.size(); ++i) CHECK(zero_trace.x[i] > zero_trace.x[i - 1]);

  state.uf = interpolate(sys.uf, [](Point2, double) -> Point2 { return {0.0, 1.0}; }, 0.0);
  InterfaceTrace up_trace = extract_trace(sys, state, TraceQuantity::UfN);
  InterfaceTrace tangential = extract_trace(sys, state, TraceQuantity::UfT);
  for (double v : up_trace.value) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));
  for (double v : tangential.value) CHECK(v == doctest::Approx(0.0).epsilon(1e-12).scale(1.0));

  state.uf = interpolate(sys.uf, [](Point2, double) -> Point2 { return {1.0, 0.0}; }, 0.0);
  InterfaceTrace rightward = extract_trace(sys, state, TraceQuantity::UfT);
  for (double v : rightward.value) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));

  CHECK(!trace_quantity_from_string("bogus").has_value());
  CHECK(trace_quantity_from_string("eta_n") == TraceQuantity::EtaN);
}

TEST_CASE("zero inflow produces the zero solution") {
  ArterialConfig config = ArterialConfig::defaults();
  config.P_max = 0.0;
  config.nx = 8;
  config.ny_f = 3;
  config.ny_wall = 1;
  config.dt = 5e-4;
  config.T = 2e-3;
  config.snapshot_times = {5e-4, 1e-3, 1.5e-3};
  ArterialResult result = run_arterial(config);
  CHECK(result.max_pressure <= 1e-10);
  for (const auto& snap : result.snapshots)
    for (const auto& trace : snap.traces)
      for (double v : trace.value) CHECK(std::abs(v) <= 1e-12);
}

TEST_CASE("coarse arterial smoke run") {
  ArterialConfig config = ArterialConfig::defaults();
  config.nx = 12;
  config.ny_f = 4;
  config.ny_wall = 1;
  config.dt = 2e-4;
  config.T = 2e-3;
  config.snapshot_times = {6e-4, 1.2e-3, 1.8e-3};
  ArterialResult result = run_arterial(config);
  CHECK(result.all_finite);
  REQUIRE(result.snapshots.size() == 3);
  for (const auto& snap : result.snapshots) {
    CHECK(snap.traces[0].x.size() == 12);
    for (const auto& trace : snap.traces)
      for (double v : trace.value) CHECK(std::isfinite(v));
  }
  CHECK(result.max_pressure > 0.0);
}
