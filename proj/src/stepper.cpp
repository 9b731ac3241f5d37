#include "fpsi/stepper.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace fpsi {

TimeState TimeState::zero(const FemSystem& sys) {
  TimeState state;
  state.uf.assign(sys.uf.total_dofs, 0.0);
  state.pf.assign(sys.pf.total_dofs, 0.0);
  state.up.assign(sys.up.total_dofs, 0.0);
  state.pp.assign(sys.pp.total_dofs, 0.0);
  state.eta.assign(sys.eta.total_dofs, 0.0);
  state.lam.assign(sys.lam.total, 0.0);
  state.eta_prev.assign(sys.eta.total_dofs, 0.0);
  return state;
}

void SolverConfig::validate() const {
  if (!(dt > 0)) throw std::invalid_argument("config: dt must be positive");
  if (dt > 1.0) throw std::invalid_argument("config: dt must be <= 1");
  if (!(T >= 0)) throw std::invalid_argument("config: T must be nonnegative");
  const double steps = T / dt;
  if (std::abs(steps - std::round(steps)) > 1e-8 * std::max(1.0, steps))
    throw std::invalid_argument("config: T must be an integral number of steps");
}

int SolverConfig::num_steps() const { return static_cast<int>(std::round(T / dt)); }

TimeStepper::TimeStepper(const FemSystem& sys, const ProblemCoefficients& coef,
                         const SourceFunctions& src, BoundaryConditions bcs, SolverConfig config)
    : sys_(sys), coef_(coef), src_(src), bcs_(std::move(bcs)), config_(config) {
  coef_.validate();
  config_.validate();
  blocks_ = assemble_constant_blocks(sys_, coef_);
  masked_.assign(sys_.total, 0);
  for (const auto& entry : bcs_.uf.entries) masked_[sys_.off_uf + entry.dof] = 1;
  for (const auto& entry : bcs_.eta.entries) masked_[sys_.off_eta + entry.dof] = 1;
  for (const auto& entry : bcs_.up.entries) masked_[sys_.off_up + entry.dof] = 1;
}

namespace {

double quad_value(const SparseBlock& block, std::span<const double> x) {
  return block_value(block, x, x);
}

}  // namespace

StepDiagnostics TimeStepper::measure(const TimeState& state) const {
  StepDiagnostics d;
  d.t = state.t;
  d.uf_l2_sq = quad_value(blocks_.Mf, state.uf);
  d.Duf_l2_sq = quad_value(blocks_.Af, state.uf) / (2.0 * coef_.mu_f);
  std::vector<double> dteta(state.eta.size());
  const double inv_dt = 1.0 / config_.dt;
  for (std::size_t i = 0; i < dteta.size(); ++i)
    dteta[i] = (state.eta[i] - state.eta_prev[i]) * inv_dt;
  d.dteta_l2_sq = quad_value(blocks_.Ms, dteta);
  d.strain_energy = quad_value(blocks_.Ae_strain, state.eta);
  d.div_energy = quad_value(blocks_.Ae_div, state.eta);
  d.spring_energy = quad_value(blocks_.Ae_spring, state.eta);
  d.pp_l2_sq = quad_value(blocks_.Mp, state.pp);
  d.upK_l2_sq = quad_value(blocks_.Ad, state.up) / coef_.mu_f;
  d.bjs_seminorm_sq = block_value(blocks_.bjs.ff, state.uf, state.uf) -
                      block_value(blocks_.bjs.fe, state.uf, dteta) -
                      block_value(blocks_.bjs.ef, dteta, state.uf) +
                      block_value(blocks_.bjs.ee, dteta, dteta);
  d.lam_l2_sq = quad_value(blocks_.Mlam, state.lam);
  return d;
}

StepDiagnostics TimeStepper::step(TimeState& state) {
  const double t1 = state.t + config_.dt;

  SparseBlock convection = assemble_convection(sys_.uf, state.uf, coef_.rho_f);
  std::vector<double> rhs_src = assemble_rhs(sys_, src_, t1);

  std::vector<double> bc_values(sys_.total, 0.0);
  auto fill_values = [&](EssentialBc& bc, const DofMap& map, const VectorFn& fn, int offset) {
    if (bc.entries.empty()) return;
    if (fn)
      set_bc_values(bc, map, fn, t1);
    else
      bc.values.assign(bc.entries.size(), 0.0);
    for (std::size_t i = 0; i < bc.entries.size(); ++i)
      bc_values[offset + bc.entries[i].dof] = bc.values[i];
  };
  fill_values(bcs_.uf, sys_.uf, bcs_.uf_fn, sys_.off_uf);
  fill_values(bcs_.eta, sys_.eta, bcs_.eta_fn, sys_.off_eta);
  fill_values(bcs_.up, sys_.up, bcs_.up_fn, sys_.off_up);

  PreviousState prev{state.uf, state.pp, state.eta, state.eta_prev};
  BlockSystem system = compose_step_system(sys_, blocks_, convection, coef_, config_.dt, rhs_src,
                                           prev, masked_, bc_values);

  solver_.factorize(system.A);
  LinearSolveReport report;
  std::vector<double> x = solver_.solve(system.rhs, &report);

  state.eta_prev = state.eta;
  auto take = [&x](int offset, std::vector<double>& field) {
    std::copy(x.begin() + offset, x.begin() + offset + field.size(), field.begin());
  };
  take(sys_.off_uf, state.uf);
  take(sys_.off_pf, state.pf);
  take(sys_.off_up, state.up);
  take(sys_.off_pp, state.pp);
  take(sys_.off_eta, state.eta);
  take(sys_.off_lam, state.lam);
  state.t = t1;
  state.n += 1;

  StepDiagnostics d = measure(state);
  d.rhs_norm = report.rhs_norm;
  d.solver_residual = report.residual_norm;
  if (report.rhs_norm > 0 && report.residual_norm > config_.solver_rtol * report.rhs_norm)
    throw std::runtime_error("linear solve did not reach the requested residual");

  // residuals of the mass-balance and interface equations
  std::vector<double> resid = system.A.multiply(x);
  for (std::size_t i = 0; i < resid.size(); ++i) resid[i] -= system.rhs[i];
  auto block_norm = [&resid](int begin, int count) {
    double s = 0.0;
    for (int i = begin; i < begin + count; ++i) s += resid[i] * resid[i];
    return std::sqrt(s);
  };
  const double mass_pf = block_norm(sys_.off_pf, sys_.pf.total_dofs);
  const double mass_pp = block_norm(sys_.off_pp, sys_.pp.total_dofs);
  d.residual_mass = std::hypot(mass_pf, mass_pp);
  d.residual_interface = block_norm(sys_.off_lam, sys_.lam.total);
  return d;
}

std::vector<StepDiagnostics> TimeStepper::run(TimeState& state,
                                              const std::vector<Observer>& observers) {
  std::vector<StepDiagnostics> series;
  const int N = config_.num_steps();
  series.reserve(N);
  for (int n = 0; n < N; ++n) {
    StepDiagnostics d;
    try {
      d = step(state);
    } catch (const std::exception& err) {
      throw std::runtime_error("step " + std::to_string(n + 1) + ": " + err.what());
    }
    series.push_back(d);
    for (const auto& obs : observers) obs(state, d);
  }
  return series;
}

// ---------------------------------------------------------------------------
// Small-data condition and stability bound
// ---------------------------------------------------------------------------

namespace {

double l2_sq_vector(const SubMesh& mesh, const VectorFn& f, double t) {
  if (!f) return 0.0;
  const QuadratureRule rule = triangle_rule(6);
  double sum = 0.0;
  for (int tri = 0; tri < mesh.num_triangles(); ++tri) {
    const ElementGeometry geom = element_geometry(mesh, tri);
    for (const auto& node : rule.nodes) {
      Point2 v = f(geom.map(node.x, node.y), t);
      sum += node.w * geom.det * dot(v, v);
    }
  }
  return sum;
}

double l2_sq_scalar(const SubMesh& mesh, const ScalarSpaceFn& f, double t) {
  if (!f) return 0.0;
  const QuadratureRule rule = triangle_rule(6);
  double sum = 0.0;
  for (int tri = 0; tri < mesh.num_triangles(); ++tri) {
    const ElementGeometry geom = element_geometry(mesh, tri);
    for (const auto& node : rule.nodes) {
      const double v = f(geom.map(node.x, node.y), t);
      sum += node.w * geom.det * v * v;
    }
  }
  return sum;
}

}  // namespace

SmallDataReport small_data_check(const FemSystem& sys, const SourceFunctions& src,
                                 const ProblemCoefficients& coef, const SolverConfig& config,
                                 double S_f, double K_f, double beta_p) {
  if (!(S_f > 0) || !(K_f > 0) || !(beta_p > 0))
    throw std::invalid_argument("small_data_check: constants must be positive");
  config.validate();
  const int N = config.num_steps();
  const double dt = config.dt;
  const double kmin = coef.k_min();

  SmallDataReport report;
  report.C1.assign(N + 1, 0.0);
  report.C2.assign(N + 1, 0.0);

  auto dt_vector = [&](const VectorFn& f, double tj) -> VectorFn {
    if (!f) return nullptr;
    return [f, tj, dt](Point2 p, double) {
      Point2 hi = f(p, tj), lo = f(p, tj - dt);
      return (1.0 / dt) * (hi - lo);
    };
  };
  auto dt_scalar = [&](const ScalarSpaceFn& f, double tj) -> ScalarSpaceFn {
    if (!f) return nullptr;
    return [f, tj, dt](Point2 p, double) { return (f(p, tj) - f(p, tj - dt)) / dt; };
  };

  for (int j = 1; j <= N; ++j) {
    const double tj = j * dt;
    const double ff = l2_sq_vector(sys.mesh->fluid, src.f_f, tj);
    const double fp = l2_sq_vector(sys.mesh->poro, src.f_p, tj);
    const double qp = l2_sq_scalar(sys.mesh->poro, src.q_p, tj);
    report.C1[j] = 2.0 / coef.rho_f * ff + 2.0 / coef.rho_p * fp +
                   2.0 / (kmin * beta_p * beta_p) * qp;
    const double dff = l2_sq_vector(sys.mesh->fluid, dt_vector(src.f_f, tj), 0.0);
    const double dfp = l2_sq_vector(sys.mesh->poro, dt_vector(src.f_p, tj), 0.0);
    const double dqp = l2_sq_scalar(sys.mesh->poro, dt_scalar(src.q_p, tj), 0.0);
    report.C2[j] = 2.0 / coef.rho_f * dff + 2.0 / coef.rho_p * dfp +
                   2.0 / (kmin * beta_p * beta_p) * dqp;
    if (j == 1) {
      const double storage = coef.s0 > 0 ? qp / coef.s0
                                         : (qp > 0 ? std::numeric_limits<double>::infinity() : 0.0);
      report.C4 = ff / coef.rho_f + fp / coef.rho_p + storage;
    }
  }

  report.rhs = std::pow(coef.mu_f, 3) /
               (4.0 * coef.rho_f * coef.rho_f * std::pow(S_f, 4) * std::pow(K_f, 6));
  report.lhs.assign(N, 0.0);
  double running = 0.0;
  report.satisfied = true;
  for (int n = 0; n < N; ++n) {
    running += dt * (4.0 / 3.0 * report.C1[n + 1] + 2.0 / 3.0 * report.C2[n + 1]);
    report.lhs[n] = std::exp((n + 1) * dt) * (running + 2.0 / 3.0 * report.C4) +
                    report.C1[n + 1] / 6.0;
    if (!(report.lhs[n] < report.rhs)) report.satisfied = false;
  }
  return report;
}

EnergyReport energy_report(const std::vector<StepDiagnostics>& series,
                           const ProblemCoefficients& coef, double dt, double beta_p,
                           const std::vector<double>& C1) {
  EnergyReport out;
  const double kb2 = coef.k_min() * beta_p * beta_p;
  double sum_c1 = 0.0;
  for (std::size_t n = 0; n < series.size(); ++n) {
    const auto& d = series[n];
    out.max_uf_energy = std::max(out.max_uf_energy, 0.5 * coef.rho_f * d.uf_l2_sq);
    out.sum_Duf += 3.0 * coef.mu_f * dt * d.Duf_l2_sq;
    out.sum_bjs += 2.0 * dt * d.bjs_seminorm_sq;
    out.max_dteta_energy = std::max(out.max_dteta_energy, 0.5 * coef.rho_p * d.dteta_l2_sq);
    out.max_elastic_energy = std::max(out.max_elastic_energy, d.ape_energy());
    out.max_pp_storage = std::max(out.max_pp_storage, coef.s0 * d.pp_l2_sq);
    out.sum_upK += dt * d.upK_l2_sq;
    out.sum_pp += 0.5 * kb2 * dt * d.pp_l2_sq;
    out.sum_lam += kb2 * dt * d.lam_l2_sq;
    if (n + 1 < C1.size()) sum_c1 += dt * C1[n + 1];
  }
  out.lhs = out.max_uf_energy + out.sum_Duf + out.sum_bjs + out.max_dteta_energy +
            out.max_elastic_energy + out.max_pp_storage + out.sum_upK + out.sum_pp + out.sum_lam;
  const double T = dt * static_cast<double>(series.size());
  out.rhs = std::exp(T) * sum_c1;
  out.holds = out.lhs <= out.rhs * (1.0 + 1e-12) || out.lhs == 0.0;
  return out;
}

}  // namespace fpsi
