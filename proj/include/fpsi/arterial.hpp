#pragma once

#include <array>
#include <optional>
#include <string>

#include "fpsi/errors.hpp"
#include "fpsi/stepper.hpp"

namespace fpsi {

/// Arterial-flow benchmark configuration. Physical defaults follow the
/// blood-flow parameter set: dyne/cm^2 pressures, cm lengths, seconds.
struct ArterialConfig {
  double R = 0.5;    // lumen radius [cm]
  double L = 6.0;    // vessel length [cm]
  double r_p = 0.1;  // wall thickness [cm]
  ProblemCoefficients coefficients;
  double P_max = 13334.0;  // peak inflow pressure [dyne/cm^2]
  double T_max = 0.003;    // inflow pulse duration [s]
  double T = 0.006;        // simulated interval [s]
  double dt = 1e-4;
  int nx = 60, ny_f = 10, ny_wall = 2;
  std::array<double, 3> snapshot_times = {1.8e-3, 3.6e-3, 5.4e-3};
  std::string output_dir;          // empty: no files written
  bool magnify_displacement = false;  // x40 vertical wall displacement in VTK only

  static ArterialConfig defaults();
  void validate() const;
};

/// Pulse profile: (P_max/2)(1 - cos(2 pi t / T_max)) for t <= T_max, else 0.
double inflow_pressure(double t, double P_max, double T_max);

enum class TraceQuantity { EtaN, UpN, UpT, UfN, UfT };
const char* to_string(TraceQuantity q);
std::optional<TraceQuantity> trace_quantity_from_string(const std::string& name);

/// Samples along the top interface at edge midpoints, ordered by x. The
/// normal points upward and the tangent points rightward.
struct InterfaceTrace {
  TraceQuantity quantity = TraceQuantity::EtaN;
  double t = 0.0;
  std::vector<double> x;
  std::vector<double> value;
};

InterfaceTrace extract_trace(const FemSystem& sys, const TimeState& state, TraceQuantity q);

struct ArterialSnapshot {
  double t = 0.0;
  std::array<InterfaceTrace, 5> traces;  // EtaN, UpN, UpT, UfN, UfT
  double pressure_peak_x = 0.0;          // argmax of p_f over fluid vertices
  double pressure_peak = 0.0;
};

struct ArterialResult {
  std::vector<StepDiagnostics> series;
  std::vector<ArterialSnapshot> snapshots;
  double max_pressure = 0.0;  // max over the whole run
  bool all_finite = true;
};

ArterialResult run_arterial(const ArterialConfig& config);

}  // namespace fpsi
