#include "fpsi/errors.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace fpsi {

const char* ErrorNorms::column_name(int i) {
  static const char* names[7] = {"e_uf_l2H1",   "e_fp_l2L2",   "e_up_l2L2", "e_divup_l2L2",
                                 "e_pp_linfL2", "e_s_linfH1", "e_lam_l2L2"};
  return names[i];
}

double convergence_rate(double e_coarse, double e_fine) {
  if (!(e_coarse > 0) || !(e_fine > 0))
    throw std::invalid_argument("convergence_rate: errors must be positive");
  return std::log2(e_coarse / e_fine);
}

std::vector<std::array<double, 7>> ErrorTable::rates() const {
  std::vector<std::array<double, 7>> out;
  for (std::size_t i = 0; i + 1 < errors.size(); ++i) {
    std::array<double, 7> row{};
    const auto coarse = errors[i].as_array(), fine = errors[i + 1].as_array();
    for (int k = 0; k < 7; ++k) row[k] = convergence_rate(coarse[k], fine[k]);
    out.push_back(row);
  }
  return out;
}

std::string ErrorTable::to_csv() const {
  std::ostringstream out;
  out << "h";
  for (int k = 0; k < 7; ++k) out << "," << ErrorNorms::column_name(k) << ",rate";
  out << "\n";
  const auto rate_rows = rates();
  char buf[32];
  for (std::size_t i = 0; i < errors.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.10g", h[i]);
    out << buf;
    const auto err = errors[i].as_array();
    for (int k = 0; k < 7; ++k) {
      std::snprintf(buf, sizeof buf, "%.6e", err[k]);
      out << "," << buf << ",";
      if (i > 0) {
        std::snprintf(buf, sizeof buf, "%.2f", rate_rows[i - 1][k]);
        out << buf;
      }
    }
    out << "\n";
  }
  return out.str();
}

namespace {

int norm_rule_degree(ElementKind kind) { return std::max(6, 2 * polynomial_degree(kind) + 2); }

}  // namespace

ErrorAccumulator::ErrorAccumulator(const FemSystem& sys, const ManufacturedSolution& ms)
    : sys_(sys), ms_(ms) {
  fluid_rule_ = triangle_rule(norm_rule_degree(sys.uf.kind));
  poro_rule_ = triangle_rule(norm_rule_degree(sys.eta.kind));
  edge_rule_ = fpsi::edge_rule(8);
  uf_basis_ = tabulate(sys.uf.kind, fluid_rule_);
  pf_basis_ = tabulate(sys.pf.kind, fluid_rule_);
  up_basis_ = tabulate(sys.up.kind, poro_rule_);
  pp_basis_ = tabulate(sys.pp.kind, poro_rule_);
  eta_basis_ = tabulate(sys.eta.kind, poro_rule_);
}

void ErrorAccumulator::add_step(const TimeState& state) {
  const double t = state.t;
  double uf_step = 0, uf_ex_step = 0, pf_step = 0, pf_ex_step = 0;
  double up_step = 0, up_ex_step = 0, divup_step = 0, divup_ex_step = 0;
  double pp_step = 0, pp_ex_step = 0, eta_step = 0, eta_ex_step = 0;
  double lam_step = 0, lam_ex_step = 0;

  // fluid subdomain: velocity H1 and pressure L2
  const SubMesh& fmesh = sys_.mesh->fluid;
  const int nuf = uf_basis_.ndof, npf = pf_basis_.ndof;
  for (int tri = 0; tri < fmesh.num_triangles(); ++tri) {
    const ElementGeometry geom = element_geometry(fmesh, tri);
    for (std::size_t q = 0; q < fluid_rule_.size(); ++q) {
      const double w = fluid_rule_.nodes[q].w * geom.det;
      const Point2 p = geom.map(fluid_rule_.nodes[q].x, fluid_rule_.nodes[q].y);
      Point2 uh{0, 0};
      double g[2][2] = {{0, 0}, {0, 0}};
      for (int l = 0; l < nuf; ++l) {
        const int s = sys_.uf.elem_dofs[tri * sys_.uf.ndof_local + l];
        const double cx = state.uf[sys_.uf.global(s, 0)], cy = state.uf[sys_.uf.global(s, 1)];
        const double val = uf_basis_.val[q * nuf + l];
        const double rgx = uf_basis_.gx[q * nuf + l], rgy = uf_basis_.gy[q * nuf + l];
        const double pgx = geom.inv[0][0] * rgx + geom.inv[1][0] * rgy;
        const double pgy = geom.inv[0][1] * rgx + geom.inv[1][1] * rgy;
        uh.x += cx * val;
        uh.y += cy * val;
        g[0][0] += cx * pgx;
        g[0][1] += cx * pgy;
        g[1][0] += cy * pgx;
        g[1][1] += cy * pgy;
      }
      const Point2 ue = ms_.u_f(p, t);
      const Mat2 ge = ms_.grad_u_f(p, t);
      const Point2 du = uh - ue;
      double dg_sq = 0, ge_sq = 0;
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
          const double d = g[a][b] - ge[a][b];
          dg_sq += d * d;
          ge_sq += ge[a][b] * ge[a][b];
        }
      uf_step += w * (dot(du, du) + dg_sq);
      uf_ex_step += w * (dot(ue, ue) + ge_sq);

      double ph = 0;
      for (int l = 0; l < npf; ++l)
        ph += state.pf[sys_.pf.elem_dofs[tri * sys_.pf.ndof_local + l]] * pf_basis_.val[q * npf + l];
      const double pe = ms_.p_f(p, t);
      pf_step += w * (ph - pe) * (ph - pe);
      pf_ex_step += w * pe * pe;
    }
  }

  // poroelastic subdomain: Darcy velocity L2 + div, pressure L2, displacement H1
  const SubMesh& pmesh = sys_.mesh->poro;
  const int nup = up_basis_.ndof, npp = pp_basis_.ndof, neta = eta_basis_.ndof;
  for (int tri = 0; tri < pmesh.num_triangles(); ++tri) {
    const ElementGeometry geom = element_geometry(pmesh, tri);
    const double inv_det = 1.0 / geom.det;
    for (std::size_t q = 0; q < poro_rule_.size(); ++q) {
      const double w = poro_rule_.nodes[q].w * geom.det;
      const Point2 p = geom.map(poro_rule_.nodes[q].x, poro_rule_.nodes[q].y);

      Point2 uph{0, 0};
      double divh = 0;
      for (int l = 0; l < nup; ++l) {
        const double c = state.up[sys_.up.elem_dofs[tri * sys_.up.ndof_local + l]] *
                         sys_.up.elem_signs[tri * sys_.up.ndof_local + l];
        const double rx = up_basis_.vx[q * nup + l], ry = up_basis_.vy[q * nup + l];
        uph.x += c * inv_det * (geom.jac[0][0] * rx + geom.jac[0][1] * ry);
        uph.y += c * inv_det * (geom.jac[1][0] * rx + geom.jac[1][1] * ry);
        divh += c * inv_det * up_basis_.dv[q * nup + l];
      }
      const Point2 upe = ms_.u_p(p, t);
      const double dive = ms_.div_u_p(p, t);
      up_step += w * dot(uph - upe, uph - upe);
      up_ex_step += w * dot(upe, upe);
      divup_step += w * (divh - dive) * (divh - dive);
      divup_ex_step += w * dive * dive;

      double pph = 0;
      for (int l = 0; l < npp; ++l)
        pph += state.pp[sys_.pp.elem_dofs[tri * sys_.pp.ndof_local + l]] * pp_basis_.val[q * npp + l];
      const double ppe = ms_.p_p(p, t);
      pp_step += w * (pph - ppe) * (pph - ppe);
      pp_ex_step += w * ppe * ppe;

      Point2 eh{0, 0};
      double g[2][2] = {{0, 0}, {0, 0}};
      for (int l = 0; l < neta; ++l) {
        const int s = sys_.eta.elem_dofs[tri * sys_.eta.ndof_local + l];
        const double cx = state.eta[sys_.eta.global(s, 0)], cy = state.eta[sys_.eta.global(s, 1)];
        const double val = eta_basis_.val[q * neta + l];
        const double rgx = eta_basis_.gx[q * neta + l], rgy = eta_basis_.gy[q * neta + l];
        const double pgx = geom.inv[0][0] * rgx + geom.inv[1][0] * rgy;
        const double pgy = geom.inv[0][1] * rgx + geom.inv[1][1] * rgy;
        eh.x += cx * val;
        eh.y += cy * val;
        g[0][0] += cx * pgx;
        g[0][1] += cx * pgy;
        g[1][0] += cy * pgx;
        g[1][1] += cy * pgy;
      }
      const Point2 ee = ms_.eta(p, t);
      const Mat2 ge = ms_.grad_eta(p, t);
      double dg_sq = 0, ge_sq = 0;
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
          const double d = g[a][b] - ge[a][b];
          dg_sq += d * d;
          ge_sq += ge[a][b] * ge[a][b];
        }
      eta_step += w * (dot(eh - ee, eh - ee) + dg_sq);
      eta_ex_step += w * (dot(ee, ee) + ge_sq);
    }
  }

  // interface: multiplier L2
  for (std::size_t e = 0; e < sys_.mesh->interface.size(); ++e) {
    const auto& rec = sys_.mesh->interface[e];
    Point2 a = sys_.mesh->fluid.vertices[rec.fluid_v0];
    Point2 b = sys_.mesh->fluid.vertices[rec.fluid_v1];
    for (const auto& node : edge_rule_.nodes) {
      const double w = node.w * rec.length;
      double lh = 0;
      for (int m = 0; m < sys_.lam.per_edge; ++m)
        lh += state.lam[sys_.lam.dof(static_cast<int>(e), m)] *
              MultiplierSpace::basis(m, node.x);
      const Point2 p = a + node.x * (b - a);
      const double le = ms_.lambda(p, t);
      lam_step += w * (lh - le) * (lh - le);
      lam_ex_step += w * le * le;
    }
  }

  uf_sq_ += uf_step;
  uf_ex_ += uf_ex_step;
  pf_sq_ += pf_step;
  pf_ex_ += pf_ex_step;
  up_sq_ += up_step;
  up_ex_ += up_ex_step;
  divup_sq_ += divup_step;
  divup_ex_ += divup_ex_step;
  lam_sq_ += lam_step;
  lam_ex_ += lam_ex_step;
  pp_max_ = std::max(pp_max_, pp_step);
  pp_ex_max_ = std::max(pp_ex_max_, pp_ex_step);
  eta_max_ = std::max(eta_max_, eta_step);
  eta_ex_max_ = std::max(eta_ex_max_, eta_ex_step);
}

ErrorNorms ErrorAccumulator::finalize(double dt) const {
  ErrorNorms out;
  auto relative = [&out](double err, double exact) {
    if (exact > 0) return err / exact;
    out.absolute_fallback = true;
    return err;
  };
  out.uf_l2H1 = relative(std::sqrt(dt * uf_sq_), std::sqrt(dt * uf_ex_));
  out.pf_l2L2 = relative(std::sqrt(dt * pf_sq_), std::sqrt(dt * pf_ex_));
  out.up_l2L2 = relative(std::sqrt(dt * up_sq_), std::sqrt(dt * up_ex_));
  out.divup_l2L2 = relative(std::sqrt(dt * divup_sq_), std::sqrt(dt * divup_ex_));
  out.pp_linfL2 = relative(std::sqrt(pp_max_), std::sqrt(pp_ex_max_));
  out.eta_linfH1 = relative(std::sqrt(eta_max_), std::sqrt(eta_ex_max_));
  out.lam_l2L2 = relative(std::sqrt(dt * lam_sq_), std::sqrt(dt * lam_ex_));
  return out;
}

MmsRunResult run_mms(const CoupledMesh& mesh, ElementFamily family,
                     const ManufacturedSolution& ms, const SolverConfig& config) {
  FemSystem sys = build_fem_system(mesh, family);

  SourceFunctions src;
  src.f_f = ms.f_f;
  src.f_p = ms.f_p;
  src.q_p = ms.q_p;
  src.q_f = ms.q_f;
  src.p_p_natural = ms.p_p;
  src.darcy_natural_tags = {BoundaryTag::GammaPD};

  BoundaryConditions bcs;
  const BoundaryTag fluid_tags[] = {BoundaryTag::GammaF};
  const BoundaryTag poro_tags[] = {BoundaryTag::GammaPD, BoundaryTag::GammaPN};
  bcs.uf = essential_bc(sys.uf, fluid_tags);
  bcs.uf_fn = ms.u_f;
  bcs.eta = essential_bc(sys.eta, poro_tags);
  bcs.eta_fn = ms.eta;

  TimeStepper stepper(sys, ms.coefficients, src, std::move(bcs), config);

  TimeState state = TimeState::zero(sys);
  state.uf = interpolate(sys.uf, ms.u_f, 0.0);
  state.up = interpolate(sys.up, ms.u_p, 0.0);
  state.pp = interpolate_scalar(sys.pp, ms.p_p, 0.0);
  state.eta = interpolate(sys.eta, ms.eta, 0.0);
  state.eta_prev = interpolate(sys.eta, ms.eta, -config.dt);

  ErrorAccumulator acc(sys, ms);
  MmsRunResult result;
  std::vector<TimeStepper::Observer> observers = {
      [&acc](const TimeState& s, const StepDiagnostics&) { acc.add_step(s); }};
  result.series = stepper.run(state, observers);
  result.errors = acc.finalize(config.dt);
  return result;
}

ErrorNorms interpolation_errors(const FemSystem& sys, const ManufacturedSolution& ms, double t,
                                double dt_for_eta) {
  (void)dt_for_eta;
  TimeState state = TimeState::zero(sys);
  state.t = t;
  state.uf = interpolate(sys.uf, ms.u_f, t);
  state.pf = interpolate_scalar(sys.pf, ms.p_f, t);
  state.up = interpolate(sys.up, ms.u_p, t);
  state.pp = interpolate_scalar(sys.pp, ms.p_p, t);
  state.eta = interpolate(sys.eta, ms.eta, t);
  // multiplier: L2 projection edge by edge
  for (std::size_t e = 0; e < sys.mesh->interface.size(); ++e) {
    const auto& rec = sys.mesh->interface[e];
    Point2 a = sys.mesh->fluid.vertices[rec.fluid_v0];
    Point2 b = sys.mesh->fluid.vertices[rec.fluid_v1];
    const QuadratureRule rule = edge_rule(8);
    double m0 = 0, m1 = 0;
    for (const auto& node : rule.nodes) {
      const double le = ms.lambda(a + node.x * (b - a), t);
      m0 += node.w * le;
      m1 += node.w * le * (2.0 * node.x - 1.0) * 3.0;  // 1/||2s-1||^2 = 3
    }
    state.lam[sys.lam.dof(static_cast<int>(e), 0)] = m0;
    if (sys.lam.per_edge > 1) state.lam[sys.lam.dof(static_cast<int>(e), 1)] = m1;
  }
  ErrorAccumulator acc(sys, ms);
  acc.add_step(state);
  return acc.finalize(1.0);
}

ErrorTable convergence_study(ElementFamily family, const std::vector<int>& cells_per_unit,
                             double dt, double T, std::vector<MmsRunResult>* runs) {
  const ManufacturedSolution ms = make_mms_solution();
  ErrorTable table;
  for (int n : cells_per_unit) {
    CoupledMesh mesh = build_rectangle_coupled_mesh(0.0, 1.0, -1.0, 1.0, 0.0, n, n, n);
    SolverConfig config;
    config.dt = dt;
    config.T = T;
    MmsRunResult result = run_mms(mesh, family, ms, config);
    table.h.push_back(1.0 / n);
    table.errors.push_back(result.errors);
    if (runs) runs->push_back(std::move(result));
  }
  return table;
}

}  // namespace fpsi
