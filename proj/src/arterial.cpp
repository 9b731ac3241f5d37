#include "fpsi/arterial.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "fpsi/vtk.hpp"

namespace fpsi {

ArterialConfig ArterialConfig::defaults() {
  ArterialConfig config;
  ProblemCoefficients& c = config.coefficients;
  c.rho_p = 1.1;
  c.xi = 5e7;
  c.rho_f = 1.0;
  c.mu_f = 0.035;
  c.s0 = 5e-6;
  c.K[0][0] = c.K[1][1] = 5e-9;
  c.K[0][1] = c.K[1][0] = 0.0;
  c.mu_p = 4.28e6;
  c.lambda_p = 1.07e6;
  c.alpha_bjs = 1.0;
  c.alpha = 1.0;
  return config;
}

void ArterialConfig::validate() const {
  if (!(R > 0)) throw std::invalid_argument("arterial: 'R' must be positive");
  if (!(L > 0)) throw std::invalid_argument("arterial: 'L' must be positive");
  if (!(r_p > 0)) throw std::invalid_argument("arterial: 'r_p' must be positive");
  if (!(P_max >= 0)) throw std::invalid_argument("arterial: 'P_max' must be nonnegative");
  if (!(T_max > 0)) throw std::invalid_argument("arterial: 'T_max' must be positive");
  if (!(T > 0)) throw std::invalid_argument("arterial: 'T' must be positive");
  if (!(dt > 0)) throw std::invalid_argument("arterial: 'dt' must be positive");
  if (nx < 1 || ny_f < 1 || ny_wall < 1)
    throw std::invalid_argument("arterial: 'nx', 'ny_f', 'ny_wall' must be >= 1");
  coefficients.validate();
}

double inflow_pressure(double t, double P_max, double T_max) {
  if (t < 0) throw std::invalid_argument("inflow_pressure: negative time");
  if (t > T_max) return 0.0;
  return 0.5 * P_max * (1.0 - std::cos(2.0 * M_PI * t / T_max));
}

const char* to_string(TraceQuantity q) {
  switch (q) {
    case TraceQuantity::EtaN: return "eta_n";
    case TraceQuantity::UpN: return "up_n";
    case TraceQuantity::UpT: return "up_t";
    case TraceQuantity::UfN: return "uf_n";
    case TraceQuantity::UfT: return "uf_t";
  }
  return "?";
}

std::optional<TraceQuantity> trace_quantity_from_string(const std::string& name) {
  for (auto q : {TraceQuantity::EtaN, TraceQuantity::UpN, TraceQuantity::UpT, TraceQuantity::UfN,
                 TraceQuantity::UfT})
    if (name == to_string(q)) return q;
  return std::nullopt;
}

InterfaceTrace extract_trace(const FemSystem& sys, const TimeState& state, TraceQuantity q) {
  InterfaceTrace trace;
  trace.quantity = q;
  trace.t = state.t;
  const Point2 n{0.0, 1.0}, tau{1.0, 0.0};
  struct Sample {
    double x, value;
  };
  std::vector<Sample> samples;
  for (const auto& rec : sys.mesh->interface) {
    if (rec.normal_f.y < 0.5) continue;  // top interface: fluid below, n_f upward
    Point2 mid = 0.5 * (sys.mesh->fluid.vertices[rec.fluid_v0] +
                        sys.mesh->fluid.vertices[rec.fluid_v1]);
    double value = 0.0;
    switch (q) {
      case TraceQuantity::EtaN:
        value = dot(eval_vector(sys.eta, state.eta, rec.poro_tri, mid), n);
        break;
      case TraceQuantity::UpN:
        value = dot(eval_vector(sys.up, state.up, rec.poro_tri, mid), n);
        break;
      case TraceQuantity::UpT:
        value = dot(eval_vector(sys.up, state.up, rec.poro_tri, mid), tau);
        break;
      case TraceQuantity::UfN:
        value = dot(eval_vector(sys.uf, state.uf, rec.fluid_tri, mid), n);
        break;
      case TraceQuantity::UfT:
        value = dot(eval_vector(sys.uf, state.uf, rec.fluid_tri, mid), tau);
        break;
    }
    samples.push_back({mid.x, value});
  }
  if (samples.empty()) throw std::runtime_error("extract_trace: mesh has no top interface");
  std::sort(samples.begin(), samples.end(),
            [](const Sample& a, const Sample& b) { return a.x < b.x; });
  for (const auto& s : samples) {
    trace.x.push_back(s.x);
    trace.value.push_back(s.value);
  }
  return trace;
}

namespace {

std::string format_ms(double t_seconds) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", t_seconds * 1e3);
  return buf;
}

void write_trace_csv(const InterfaceTrace& trace, const std::string& dir) {
  const std::string path =
      dir + "/trace_" + to_string(trace.quantity) + "_" + format_ms(trace.t) + ".csv";
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "'");
  out << "x,value\n";
  char buf[64];
  for (std::size_t i = 0; i < trace.x.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.10g,%.10g", trace.x[i], trace.value[i]);
    out << buf << "\n";
  }
}

// vertex samples of the solution fields for VTK export
std::vector<double> vertex_vector_field(const DofMap& map, const std::vector<double>& coeffs) {
  const SubMesh& mesh = *map.mesh;
  std::vector<double> out(2 * mesh.num_vertices(), 0.0);
  if (!is_hdiv(map.kind)) {
    // vertex dofs coincide with vertex ids for P1/P1Bubble/P2
    for (int v = 0; v < mesh.num_vertices(); ++v) {
      out[2 * v] = coeffs[map.global(v, 0)];
      out[2 * v + 1] = coeffs[map.global(v, 1)];
    }
    return out;
  }
  std::vector<int> count(mesh.num_vertices(), 0);
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    for (int k = 0; k < 3; ++k) {
      const int v = mesh.triangles[t][k];
      const Point2 value = eval_vector(map, coeffs, t, mesh.vertices[v]);
      out[2 * v] += value.x;
      out[2 * v + 1] += value.y;
      count[v] += 1;
    }
  }
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    if (count[v] > 0) {
      out[2 * v] /= count[v];
      out[2 * v + 1] /= count[v];
    }
  }
  return out;
}

std::vector<double> vertex_scalar_field(const DofMap& map, const std::vector<double>& coeffs) {
  const SubMesh& mesh = *map.mesh;
  std::vector<double> out(mesh.num_vertices(), 0.0);
  if (map.kind == ElementKind::P1) {
    for (int v = 0; v < mesh.num_vertices(); ++v) out[v] = coeffs[v];
    return out;
  }
  std::vector<int> count(mesh.num_vertices(), 0);
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    for (int k = 0; k < 3; ++k) {
      const int v = mesh.triangles[t][k];
      out[v] += eval_scalar(map, coeffs, t, mesh.vertices[v]);
      count[v] += 1;
    }
  }
  for (int v = 0; v < mesh.num_vertices(); ++v)
    if (count[v] > 0) out[v] /= count[v];
  return out;
}

void write_snapshot_vtk(const FemSystem& sys, const TimeState& state,
                        const ArterialConfig& config) {
  const std::string suffix = format_ms(state.t) + "ms.vtk";
  {
    std::vector<VtkField> fields;
    fields.push_back({"velocity", 2, vertex_vector_field(sys.uf, state.uf)});
    fields.push_back({"pressure", 1, vertex_scalar_field(sys.pf, state.pf)});
    write_vtk(sys.mesh->fluid, config.output_dir + "/arterial_fluid_" + suffix, fields);
  }
  {
    std::vector<VtkField> fields;
    fields.push_back({"displacement", 2, vertex_vector_field(sys.eta, state.eta)});
    fields.push_back({"darcy_velocity", 2, vertex_vector_field(sys.up, state.up)});
    fields.push_back({"pressure", 1, vertex_scalar_field(sys.pp, state.pp)});
    std::vector<VtkField> cell_fields;
    if (sys.pp.kind == ElementKind::P0)
      cell_fields.push_back({"pressure_cell", 1, state.pp});
    const SubMesh& poro = sys.mesh->poro;
    std::vector<Point2> displaced;
    const std::vector<Point2>* points = nullptr;
    if (config.magnify_displacement) {
      displaced = poro.vertices;
      const auto& disp = fields[0].data;
      for (int v = 0; v < poro.num_vertices(); ++v) {
        displaced[v].x += disp[2 * v];
        displaced[v].y += 40.0 * disp[2 * v + 1];
      }
      points = &displaced;
    }
    write_vtk(poro, config.output_dir + "/arterial_poro_" + suffix, fields, cell_fields, points);
  }
}

}  // namespace

ArterialResult run_arterial(const ArterialConfig& config) {
  config.validate();
  CoupledMesh mesh =
      build_channel_coupled_mesh(config.L, config.R, config.r_p, config.nx, config.ny_f,
                                 config.ny_wall);
  FemSystem sys = build_fem_system(mesh, ElementFamily::LowerOrder);

  SourceFunctions src;
  const double pmax = config.P_max, tmax = config.T_max;
  src.p_in = [pmax, tmax](Point2, double t) { return inflow_pressure(t, pmax, tmax); };
  src.inflow_tags = {BoundaryTag::FInlet};

  BoundaryConditions bcs;
  const BoundaryTag wall_ends[] = {BoundaryTag::PInlet, BoundaryTag::POutlet};
  const BoundaryTag wall_ext[] = {BoundaryTag::PExt};
  bcs.eta = essential_bc(sys.eta, wall_ends);
  EssentialBc ext = essential_bc(sys.eta, wall_ext, /*component=*/0);  // eta.tau = 0
  bcs.eta.entries.insert(bcs.eta.entries.end(), ext.entries.begin(), ext.entries.end());
  bcs.eta.values.assign(bcs.eta.entries.size(), 0.0);
  bcs.up = essential_bc(sys.up, wall_ends);  // u_p = 0 at the wall ends

  SolverConfig solver_config;
  solver_config.dt = config.dt;
  solver_config.T = config.T;

  TimeStepper stepper(sys, config.coefficients, src, std::move(bcs), solver_config);

  ArterialResult result;
  std::vector<int> snapshot_steps;
  for (double ts : config.snapshot_times)
    snapshot_steps.push_back(static_cast<int>(std::round(ts / config.dt)));

  if (!config.output_dir.empty()) std::filesystem::create_directories(config.output_dir);

  TimeState state = TimeState::zero(sys);
  std::vector<TimeStepper::Observer> observers = {
      [&](const TimeState& s, const StepDiagnostics&) {
        for (const double v : s.pf)
          if (!std::isfinite(v)) result.all_finite = false;
        for (const double v : s.uf)
          if (!std::isfinite(v)) result.all_finite = false;
        double peak = 0.0, peak_x = 0.0;
        const auto vertex_p = vertex_scalar_field(sys.pf, s.pf);
        for (int v = 0; v < sys.mesh->fluid.num_vertices(); ++v) {
          result.max_pressure = std::max(result.max_pressure, std::abs(vertex_p[v]));
          if (std::abs(vertex_p[v]) > peak) {
            peak = std::abs(vertex_p[v]);
            peak_x = sys.mesh->fluid.vertices[v].x;
          }
        }
        const auto it = std::find(snapshot_steps.begin(), snapshot_steps.end(), s.n);
        if (it == snapshot_steps.end()) return;
        ArterialSnapshot snap;
        snap.t = s.t;
        snap.pressure_peak = peak;
        snap.pressure_peak_x = peak_x;
        const TraceQuantity quantities[5] = {TraceQuantity::EtaN, TraceQuantity::UpN,
                                             TraceQuantity::UpT, TraceQuantity::UfN,
                                             TraceQuantity::UfT};
        for (int k = 0; k < 5; ++k) snap.traces[k] = extract_trace(sys, s, quantities[k]);
        if (!config.output_dir.empty()) {
          for (const auto& trace : snap.traces) write_trace_csv(trace, config.output_dir);
          write_snapshot_vtk(sys, s, config);
        }
        result.snapshots.push_back(std::move(snap));
      }};
  result.series = stepper.run(state, observers);
  return result;
}

}  // namespace fpsi
