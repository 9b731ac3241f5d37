#include "fpsi/assembly.hpp"

#include <cmath>
#include <stdexcept>

namespace fpsi {

void ProblemCoefficients::validate() const {
  if (!(mu_f > 0) || !(rho_f > 0) || !(rho_p > 0) || !(mu_p > 0))
    throw std::invalid_argument("coefficients: mu_f, rho_f, rho_p, mu_p must be positive");
  if (lambda_p < 0) throw std::invalid_argument("coefficients: lambda_p must be >= 0");
  if (s0 < 0) throw std::invalid_argument("coefficients: s0 must be >= 0");
  if (!(alpha > 0) || alpha > 1) throw std::invalid_argument("coefficients: alpha must be in (0,1]");
  if (alpha_bjs < 0) throw std::invalid_argument("coefficients: alpha_BJS must be >= 0");
  if (xi < 0) throw std::invalid_argument("coefficients: xi must be >= 0");
  if (std::abs(K[0][1] - K[1][0]) > 1e-14 * (std::abs(K[0][1]) + 1.0))
    throw std::invalid_argument("coefficients: K must be symmetric");
  if (!(k_min() > 0)) throw std::invalid_argument("coefficients: K must be positive definite");
}

double ProblemCoefficients::k_min() const {
  const double tr = K[0][0] + K[1][1];
  const double det = K[0][0] * K[1][1] - K[0][1] * K[1][0];
  return 0.5 * (tr - std::sqrt(std::max(tr * tr - 4.0 * det, 0.0)));
}

double ProblemCoefficients::k_max() const {
  const double tr = K[0][0] + K[1][1];
  const double det = K[0][0] * K[1][1] - K[0][1] * K[1][0];
  return 0.5 * (tr + std::sqrt(std::max(tr * tr - 4.0 * det, 0.0)));
}

FemSystem build_fem_system(const CoupledMesh& mesh, ElementFamily family) {
  FemSystem sys;
  sys.mesh = &mesh;
  sys.family = family;
  if (family == ElementFamily::LowerOrder) {
    sys.uf = build_space(mesh.fluid, ElementKind::P1Bubble, true);
    sys.pf = build_space(mesh.fluid, ElementKind::P1, false);
    sys.up = build_space(mesh.poro, ElementKind::RT0, true);
    sys.pp = build_space(mesh.poro, ElementKind::P0, false);
    sys.eta = build_space(mesh.poro, ElementKind::P1, true);
    sys.lam = build_multiplier_space(mesh, 0);
  } else {
    sys.uf = build_space(mesh.fluid, ElementKind::P2, true);
    sys.pf = build_space(mesh.fluid, ElementKind::P1, false);
    sys.up = build_space(mesh.poro, ElementKind::RT1, true);
    sys.pp = build_space(mesh.poro, ElementKind::P1dc, false);
    sys.eta = build_space(mesh.poro, ElementKind::P2, true);
    sys.lam = build_multiplier_space(mesh, 1);
  }
  sys.off_uf = 0;
  sys.off_pf = sys.off_uf + sys.uf.total_dofs;
  sys.off_up = sys.off_pf + sys.pf.total_dofs;
  sys.off_pp = sys.off_up + sys.up.total_dofs;
  sys.off_eta = sys.off_pp + sys.pp.total_dofs;
  sys.off_lam = sys.off_eta + sys.eta.total_dofs;
  sys.total = sys.off_lam + sys.lam.total;
  return sys;
}

double block_value(const SparseBlock& block, std::span<const double> v,
                   std::span<const double> u) {
  double sum = 0.0;
  for (const auto& t : block.triplets) sum += v[t.row()] * t.value() * u[t.col()];
  return sum;
}

std::vector<double> block_apply(const SparseBlock& block, std::span<const double> u) {
  std::vector<double> out(block.rows, 0.0);
  for (const auto& t : block.triplets) out[t.row()] += t.value() * u[t.col()];
  return out;
}

namespace {

struct MappedBasis {
  // physical basis data at the volume quadrature points of one element
  const BasisTable* ref = nullptr;
  ElementGeometry geom;
  std::vector<double> gx, gy;      // physical gradients, scalar kinds
  std::vector<double> vx, vy, dv;  // physical values/divergence, RT kinds
};

void map_basis(const DofMap& map, int tri, const BasisTable& ref, std::size_t nq,
               MappedBasis& out) {
  out.ref = &ref;
  out.geom = element_geometry(*map.mesh, tri);
  const int nl = ref.ndof;
  if (is_hdiv(map.kind)) {
    out.vx.resize(nq * nl);
    out.vy.resize(nq * nl);
    out.dv.resize(nq * nl);
    const double inv_det = 1.0 / out.geom.det;
    for (std::size_t q = 0; q < nq; ++q) {
      for (int l = 0; l < nl; ++l) {
        const double sign = map.elem_signs[tri * map.ndof_local + l];
        const double rx = ref.vx[q * nl + l], ry = ref.vy[q * nl + l];
        out.vx[q * nl + l] = sign * inv_det * (out.geom.jac[0][0] * rx + out.geom.jac[0][1] * ry);
        out.vy[q * nl + l] = sign * inv_det * (out.geom.jac[1][0] * rx + out.geom.jac[1][1] * ry);
        out.dv[q * nl + l] = sign * inv_det * ref.dv[q * nl + l];
      }
    }
  } else {
    out.gx.resize(nq * nl);
    out.gy.resize(nq * nl);
    for (std::size_t q = 0; q < nq; ++q) {
      for (int l = 0; l < nl; ++l) {
        const double rx = ref.gx[q * nl + l], ry = ref.gy[q * nl + l];
        out.gx[q * nl + l] = out.geom.inv[0][0] * rx + out.geom.inv[1][0] * ry;
        out.gy[q * nl + l] = out.geom.inv[0][1] * rx + out.geom.inv[1][1] * ry;
      }
    }
  }
}

int volume_rule_degree(ElementKind a, ElementKind b) {
  return 2 * std::max(polynomial_degree(a), polynomial_degree(b)) + 1;
}

constexpr int kInterfaceRuleDegree = 6;

}  // namespace

SparseBlock assemble_af(const DofMap& uf, double mu_f) {
  if (uf.components() != 2) throw std::invalid_argument("assemble_af: vector H1 space required");
  const SubMesh& mesh = *uf.mesh;
  const QuadratureRule rule = triangle_rule(volume_rule_degree(uf.kind, uf.kind));
  const BasisTable ref = tabulate(uf.kind, rule);
  SparseBlock block{uf.total_dofs, uf.total_dofs, {}};
  MappedBasis basis;
  const int nl = ref.ndof;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    map_basis(uf, t, ref, rule.size(), basis);
    for (int l = 0; l < nl; ++l) {
      for (int m = 0; m < nl; ++m) {
        double gg = 0.0, cross[2][2] = {{0, 0}, {0, 0}};
        for (std::size_t q = 0; q < rule.size(); ++q) {
          const double w = rule.nodes[q].w * basis.geom.det;
          const double lx = basis.gx[q * nl + l], ly = basis.gy[q * nl + l];
          const double mx = basis.gx[q * nl + m], my = basis.gy[q * nl + m];
          gg += w * (lx * mx + ly * my);
          // cross[a][b] = int d_b(test) d_a(trial)
          cross[0][0] += w * lx * mx;
          cross[0][1] += w * ly * mx;
          cross[1][0] += w * lx * my;
          cross[1][1] += w * ly * my;
        }
        const int sl = uf.elem_dofs[t * uf.ndof_local + l];
        const int sm = uf.elem_dofs[t * uf.ndof_local + m];
        for (int a = 0; a < 2; ++a)
          for (int b = 0; b < 2; ++b) {
            const double value = mu_f * ((a == b ? gg : 0.0) + cross[a][b]);
            if (value != 0.0)
              block.triplets.emplace_back(uf.global(sl, a), uf.global(sm, b), value);
          }
      }
    }
  }
  return block;
}

SparseBlock assemble_divdiv(const DofMap& space, double lambda) {
  if (space.components() != 2) throw std::invalid_argument("assemble_divdiv: vector H1 space");
  const SubMesh& mesh = *space.mesh;
  const QuadratureRule rule = triangle_rule(volume_rule_degree(space.kind, space.kind));
  const BasisTable ref = tabulate(space.kind, rule);
  SparseBlock block{space.total_dofs, space.total_dofs, {}};
  MappedBasis basis;
  const int nl = ref.ndof;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    map_basis(space, t, ref, rule.size(), basis);
    for (int l = 0; l < nl; ++l) {
      for (int m = 0; m < nl; ++m) {
        double dd[2][2] = {{0, 0}, {0, 0}};  // dd[a][b] = int d_a(test) d_b(trial)
        for (std::size_t q = 0; q < rule.size(); ++q) {
          const double w = rule.nodes[q].w * basis.geom.det;
          const double lg[2] = {basis.gx[q * nl + l], basis.gy[q * nl + l]};
          const double mg[2] = {basis.gx[q * nl + m], basis.gy[q * nl + m]};
          for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) dd[a][b] += w * lg[a] * mg[b];
        }
        const int sl = space.elem_dofs[t * space.ndof_local + l];
        const int sm = space.elem_dofs[t * space.ndof_local + m];
        for (int a = 0; a < 2; ++a)
          for (int b = 0; b < 2; ++b)
            block.triplets.emplace_back(space.global(sl, a), space.global(sm, b),
                                        lambda * dd[a][b]);
      }
    }
  }
  return block;
}

SparseBlock assemble_apd(const DofMap& up, const ProblemCoefficients& coef) {
  if (!is_hdiv(up.kind)) throw std::invalid_argument("assemble_apd: H(div) space required");
  const double det = coef.K[0][0] * coef.K[1][1] - coef.K[0][1] * coef.K[1][0];
  if (!(det > 0) || !(coef.k_min() > 0))
    throw std::invalid_argument("assemble_apd: K must be SPD");
  const double Kinv[2][2] = {{coef.K[1][1] / det, -coef.K[0][1] / det},
                             {-coef.K[1][0] / det, coef.K[0][0] / det}};
  const SubMesh& mesh = *up.mesh;
  const QuadratureRule rule = triangle_rule(volume_rule_degree(up.kind, up.kind));
  const BasisTable ref = tabulate(up.kind, rule);
  SparseBlock block{up.total_dofs, up.total_dofs, {}};
  MappedBasis basis;
  const int nl = ref.ndof;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    map_basis(up, t, ref, rule.size(), basis);
    for (int l = 0; l < nl; ++l) {
      for (int m = 0; m < nl; ++m) {
        double value = 0.0;
        for (std::size_t q = 0; q < rule.size(); ++q) {
          const double w = rule.nodes[q].w * basis.geom.det;
          const double lx = basis.vx[q * nl + l], ly = basis.vy[q * nl + l];
          const double mx = basis.vx[q * nl + m], my = basis.vy[q * nl + m];
          value += w * (lx * (Kinv[0][0] * mx + Kinv[0][1] * my) +
                        ly * (Kinv[1][0] * mx + Kinv[1][1] * my));
        }
        block.triplets.emplace_back(up.elem_dofs[t * up.ndof_local + l],
                                    up.elem_dofs[t * up.ndof_local + m], coef.mu_f * value);
      }
    }
  }
  return block;
}

SparseBlock assemble_mass(const DofMap& space, double density) {
  const SubMesh& mesh = *space.mesh;
  const QuadratureRule rule = triangle_rule(volume_rule_degree(space.kind, space.kind));
  const BasisTable ref = tabulate(space.kind, rule);
  SparseBlock block{space.total_dofs, space.total_dofs, {}};
  if (density == 0.0) return block;
  MappedBasis basis;
  const int nl = ref.ndof;
  const bool hdiv = is_hdiv(space.kind);
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    map_basis(space, t, ref, rule.size(), basis);
    for (int l = 0; l < nl; ++l) {
      for (int m = 0; m < nl; ++m) {
        double value = 0.0;
        for (std::size_t q = 0; q < rule.size(); ++q) {
          const double w = rule.nodes[q].w * basis.geom.det;
          if (hdiv)
            value += w * (basis.vx[q * nl + l] * basis.vx[q * nl + m] +
                          basis.vy[q * nl + l] * basis.vy[q * nl + m]);
          else
            value += w * ref.val[q * nl + l] * ref.val[q * nl + m];
        }
        value *= density;
        const int sl = space.elem_dofs[t * space.ndof_local + l];
        const int sm = space.elem_dofs[t * space.ndof_local + m];
        if (hdiv) {
          block.triplets.emplace_back(sl, sm, value);
        } else {
          for (int c = 0; c < space.components(); ++c)
            block.triplets.emplace_back(space.global(sl, c), space.global(sm, c), value);
        }
      }
    }
  }
  return block;
}

SparseBlock assemble_gradgrad(const DofMap& space, double c) {
  if (is_hdiv(space.kind)) throw std::invalid_argument("assemble_gradgrad: H1 space required");
  const SubMesh& mesh = *space.mesh;
  const QuadratureRule rule = triangle_rule(volume_rule_degree(space.kind, space.kind));
  const BasisTable ref = tabulate(space.kind, rule);
  SparseBlock block{space.total_dofs, space.total_dofs, {}};
  MappedBasis basis;
  const int nl = ref.ndof;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    map_basis(space, t, ref, rule.size(), basis);
    for (int l = 0; l < nl; ++l) {
      for (int m = 0; m < nl; ++m) {
        double value = 0.0;
        for (std::size_t q = 0; q < rule.size(); ++q)
          value += rule.nodes[q].w * basis.geom.det *
                   (basis.gx[q * nl + l] * basis.gx[q * nl + m] +
                    basis.gy[q * nl + l] * basis.gy[q * nl + m]);
        value *= c;
        const int sl = space.elem_dofs[t * space.ndof_local + l];
        const int sm = space.elem_dofs[t * space.ndof_local + m];
        for (int comp = 0; comp < space.components(); ++comp)
          block.triplets.emplace_back(space.global(sl, comp), space.global(sm, comp), value);
      }
    }
  }
  return block;
}

SparseBlock assemble_hdiv_norm(const DofMap& up) {
  if (!is_hdiv(up.kind)) throw std::invalid_argument("assemble_hdiv_norm: H(div) space required");
  const SubMesh& mesh = *up.mesh;
  const QuadratureRule rule = triangle_rule(volume_rule_degree(up.kind, up.kind));
  const BasisTable ref = tabulate(up.kind, rule);
  SparseBlock block{up.total_dofs, up.total_dofs, {}};
  MappedBasis basis;
  const int nl = ref.ndof;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    map_basis(up, t, ref, rule.size(), basis);
    for (int l = 0; l < nl; ++l) {
      for (int m = 0; m < nl; ++m) {
        double value = 0.0;
        for (std::size_t q = 0; q < rule.size(); ++q)
          value += rule.nodes[q].w * basis.geom.det *
                   (basis.vx[q * nl + l] * basis.vx[q * nl + m] +
                    basis.vy[q * nl + l] * basis.vy[q * nl + m] +
                    basis.dv[q * nl + l] * basis.dv[q * nl + m]);
        block.triplets.emplace_back(up.elem_dofs[t * up.ndof_local + l],
                                    up.elem_dofs[t * up.ndof_local + m], value);
      }
    }
  }
  return block;
}

SparseBlock assemble_ape(const DofMap& eta, const ProblemCoefficients& coef) {
  SparseBlock strain = assemble_af(eta, coef.mu_p);  // (2 mu_p D(u), D(v))
  SparseBlock divdiv = assemble_divdiv(eta, coef.lambda_p);
  SparseBlock out{eta.total_dofs, eta.total_dofs, {}};
  out.triplets = std::move(strain.triplets);
  out.triplets.insert(out.triplets.end(), divdiv.triplets.begin(), divdiv.triplets.end());
  if (coef.xi > 0.0) {
    SparseBlock spring = assemble_mass(eta, coef.xi);
    out.triplets.insert(out.triplets.end(), spring.triplets.begin(), spring.triplets.end());
  }
  return out;
}

SparseBlock assemble_b(const DofMap& v_space, const DofMap& w_space) {
  if (v_space.mesh != w_space.mesh)
    throw std::invalid_argument("assemble_b: spaces on different meshes");
  const SubMesh& mesh = *v_space.mesh;
  const int degree =
      std::max(1, polynomial_degree(v_space.kind) + polynomial_degree(w_space.kind));
  const QuadratureRule rule = triangle_rule(degree);
  const BasisTable vref = tabulate(v_space.kind, rule);
  const BasisTable wref = tabulate(w_space.kind, rule);
  SparseBlock block{w_space.total_dofs, v_space.total_dofs, {}};
  MappedBasis vbasis;
  const int nv = vref.ndof, nw = wref.ndof;
  const bool hdiv = is_hdiv(v_space.kind);
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    map_basis(v_space, t, vref, rule.size(), vbasis);
    for (int i = 0; i < nw; ++i) {
      const int wd = w_space.elem_dofs[t * w_space.ndof_local + i];
      if (hdiv) {
        for (int j = 0; j < nv; ++j) {
          double value = 0.0;
          for (std::size_t q = 0; q < rule.size(); ++q)
            value -= rule.nodes[q].w * vbasis.geom.det * wref.val[q * nw + i] *
                     vbasis.dv[q * nv + j];
          block.triplets.emplace_back(wd, v_space.elem_dofs[t * v_space.ndof_local + j], value);
        }
      } else {
        for (int j = 0; j < nv; ++j) {
          double vx = 0.0, vy = 0.0;  // -(int w d_b phi_j) per component b
          for (std::size_t q = 0; q < rule.size(); ++q) {
            const double w = rule.nodes[q].w * vbasis.geom.det * wref.val[q * nw + i];
            vx -= w * vbasis.gx[q * nv + j];
            vy -= w * vbasis.gy[q * nv + j];
          }
          const int sj = v_space.elem_dofs[t * v_space.ndof_local + j];
          block.triplets.emplace_back(wd, v_space.global(sj, 0), vx);
          block.triplets.emplace_back(wd, v_space.global(sj, 1), vy);
        }
      }
    }
  }
  return block;
}

SparseBlock assemble_convection(const DofMap& uf, std::span<const double> w_prev, double rho_f) {
  if (uf.components() != 2) throw std::invalid_argument("assemble_convection: vector H1 space");
  if (static_cast<int>(w_prev.size()) != uf.total_dofs)
    throw std::invalid_argument("assemble_convection: advecting field size mismatch");
  const SubMesh& mesh = *uf.mesh;
  const QuadratureRule rule = triangle_rule(volume_rule_degree(uf.kind, uf.kind));
  const BasisTable ref = tabulate(uf.kind, rule);
  SparseBlock block{uf.total_dofs, uf.total_dofs, {}};
  MappedBasis basis;
  const int nl = ref.ndof;
  std::vector<double> wx(rule.size()), wy(rule.size());
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    map_basis(uf, t, ref, rule.size(), basis);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      double ax = 0.0, ay = 0.0;
      for (int m = 0; m < nl; ++m) {
        const int sm = uf.elem_dofs[t * uf.ndof_local + m];
        ax += w_prev[uf.global(sm, 0)] * ref.val[q * nl + m];
        ay += w_prev[uf.global(sm, 1)] * ref.val[q * nl + m];
      }
      wx[q] = ax;
      wy[q] = ay;
    }
    for (int l = 0; l < nl; ++l) {
      for (int m = 0; m < nl; ++m) {
        double value = 0.0;  // int (w . grad phi_m) phi_l
        for (std::size_t q = 0; q < rule.size(); ++q) {
          const double w = rule.nodes[q].w * basis.geom.det;
          value += w * (wx[q] * basis.gx[q * nl + m] + wy[q] * basis.gy[q * nl + m]) *
                   ref.val[q * nl + l];
        }
        value *= rho_f;
        const int sl = uf.elem_dofs[t * uf.ndof_local + l];
        const int sm = uf.elem_dofs[t * uf.ndof_local + m];
        for (int c = 0; c < 2; ++c)
          block.triplets.emplace_back(uf.global(sl, c), uf.global(sm, c), value);
      }
    }
  }
  return block;
}

// ---------------------------------------------------------------------------
// Interface forms
// ---------------------------------------------------------------------------

namespace {

struct InterfaceQuad {
  std::vector<double> s;   // edge parameter in [0,1], fluid_v0 -> fluid_v1
  std::vector<double> w;   // weights including edge length
  BasisTable fluid_basis;  // fluid-velocity kind traces
  BasisTable eta_basis;    // displacement kind traces
  BasisTable rt_basis;     // Darcy kind traces (reference values)
  ElementGeometry poro_geom;
  int fluid_tri = 0, poro_tri = 0;
};

InterfaceQuad interface_quadrature(const FemSystem& sys, const InterfaceEdge& rec) {
  const QuadratureRule rule = edge_rule(kInterfaceRuleDegree);
  InterfaceQuad out;
  out.fluid_tri = rec.fluid_tri;
  out.poro_tri = rec.poro_tri;
  const SubMesh& fm = sys.mesh->fluid;
  const SubMesh& pm = sys.mesh->poro;
  Point2 a = fm.vertices[rec.fluid_v0], b = fm.vertices[rec.fluid_v1];
  const ElementGeometry fgeom = element_geometry(fm, rec.fluid_tri);
  out.poro_geom = element_geometry(pm, rec.poro_tri);
  std::vector<Point2> fref(rule.size()), pref(rule.size());
  out.s.resize(rule.size());
  out.w.resize(rule.size());
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const double s = rule.nodes[q].x;
    out.s[q] = s;
    out.w[q] = rule.nodes[q].w * rec.length;
    Point2 p = a + s * (b - a);
    fgeom.inv_map(p, fref[q].x, fref[q].y);
    out.poro_geom.inv_map(p, pref[q].x, pref[q].y);
  }
  out.fluid_basis = tabulate_at(sys.uf.kind, fref);
  out.eta_basis = tabulate_at(sys.eta.kind, pref);
  out.rt_basis = tabulate_at(sys.up.kind, pref);
  return out;
}

}  // namespace

BjsBlocks assemble_bjs(const FemSystem& sys, const ProblemCoefficients& coef) {
  BjsBlocks blocks;
  blocks.ff = {sys.uf.total_dofs, sys.uf.total_dofs, {}};
  blocks.fe = {sys.uf.total_dofs, sys.eta.total_dofs, {}};
  blocks.ef = {sys.eta.total_dofs, sys.uf.total_dofs, {}};
  blocks.ee = {sys.eta.total_dofs, sys.eta.total_dofs, {}};
  for (const auto& rec : sys.mesh->interface) {
    const Point2 tau = rec.tangent_f;
    const double k_tau = tau.x * (coef.K[0][0] * tau.x + coef.K[0][1] * tau.y) +
                         tau.y * (coef.K[1][0] * tau.x + coef.K[1][1] * tau.y);
    if (!(k_tau > 0)) throw std::invalid_argument("assemble_bjs: (K tau).tau must be positive");
    const double c = coef.mu_f * coef.alpha_bjs / std::sqrt(k_tau);
    const InterfaceQuad iq = interface_quadrature(sys, rec);
    const int nf = iq.fluid_basis.ndof, ne = iq.eta_basis.ndof;

    auto add = [&](SparseBlock& block, const DofMap& test, int test_tri,
                   const BasisTable& test_basis, const DofMap& trial, int trial_tri,
                   const BasisTable& trial_basis, double scale) {
      const int nt = test_basis.ndof, nr = trial_basis.ndof;
      for (int l = 0; l < nt; ++l) {
        for (int m = 0; m < nr; ++m) {
          double value = 0.0;
          for (std::size_t q = 0; q < iq.s.size(); ++q)
            value += iq.w[q] * test_basis.val[q * nt + l] * trial_basis.val[q * nr + m];
          value *= scale * c;
          const int sl = test.elem_dofs[test_tri * test.ndof_local + l];
          const int sm = trial.elem_dofs[trial_tri * trial.ndof_local + m];
          for (int a = 0; a < 2; ++a) {
            const double ta = (a == 0 ? tau.x : tau.y);
            for (int b = 0; b < 2; ++b) {
              const double tb = (b == 0 ? tau.x : tau.y);
              block.triplets.emplace_back(test.global(sl, a), trial.global(sm, b),
                                          value * ta * tb);
            }
          }
        }
      }
    };
    (void)nf;
    (void)ne;
    add(blocks.ff, sys.uf, iq.fluid_tri, iq.fluid_basis, sys.uf, iq.fluid_tri, iq.fluid_basis, 1.0);
    add(blocks.fe, sys.uf, iq.fluid_tri, iq.fluid_basis, sys.eta, iq.poro_tri, iq.eta_basis, 1.0);
    add(blocks.ef, sys.eta, iq.poro_tri, iq.eta_basis, sys.uf, iq.fluid_tri, iq.fluid_basis, 1.0);
    add(blocks.ee, sys.eta, iq.poro_tri, iq.eta_basis, sys.eta, iq.poro_tri, iq.eta_basis, 1.0);
  }
  return blocks;
}

BGammaBlocks assemble_bgamma(const FemSystem& sys) {
  BGammaBlocks blocks;
  blocks.f = {sys.lam.total, sys.uf.total_dofs, {}};
  blocks.p = {sys.lam.total, sys.up.total_dofs, {}};
  blocks.e = {sys.lam.total, sys.eta.total_dofs, {}};
  for (std::size_t e = 0; e < sys.mesh->interface.size(); ++e) {
    const auto& rec = sys.mesh->interface[e];
    const InterfaceQuad iq = interface_quadrature(sys, rec);
    const int nf = iq.fluid_basis.ndof, ne = iq.eta_basis.ndof, nr = iq.rt_basis.ndof;
    for (int m = 0; m < sys.lam.per_edge; ++m) {
      const int row = sys.lam.dof(static_cast<int>(e), m);
      // fluid velocity . n_f
      for (int l = 0; l < nf; ++l) {
        double vx = 0.0, vy = 0.0;
        for (std::size_t q = 0; q < iq.s.size(); ++q) {
          const double w = iq.w[q] * MultiplierSpace::basis(m, iq.s[q]) *
                           iq.fluid_basis.val[q * nf + l];
          vx += w * rec.normal_f.x;
          vy += w * rec.normal_f.y;
        }
        const int sl = sys.uf.elem_dofs[iq.fluid_tri * sys.uf.ndof_local + l];
        blocks.f.triplets.emplace_back(row, sys.uf.global(sl, 0), vx);
        blocks.f.triplets.emplace_back(row, sys.uf.global(sl, 1), vy);
      }
      // displacement . n_p
      for (int l = 0; l < ne; ++l) {
        double vx = 0.0, vy = 0.0;
        for (std::size_t q = 0; q < iq.s.size(); ++q) {
          const double w = iq.w[q] * MultiplierSpace::basis(m, iq.s[q]) *
                           iq.eta_basis.val[q * ne + l];
          vx += w * rec.normal_p.x;
          vy += w * rec.normal_p.y;
        }
        const int sl = sys.eta.elem_dofs[iq.poro_tri * sys.eta.ndof_local + l];
        blocks.e.triplets.emplace_back(row, sys.eta.global(sl, 0), vx);
        blocks.e.triplets.emplace_back(row, sys.eta.global(sl, 1), vy);
      }
      // Darcy velocity . n_p (physical Piola values)
      const double inv_det = 1.0 / iq.poro_geom.det;
      for (int l = 0; l < nr; ++l) {
        const double sign = sys.up.elem_signs[iq.poro_tri * sys.up.ndof_local + l];
        double value = 0.0;
        for (std::size_t q = 0; q < iq.s.size(); ++q) {
          const double rx = iq.rt_basis.vx[q * nr + l], ry = iq.rt_basis.vy[q * nr + l];
          const double px = inv_det * (iq.poro_geom.jac[0][0] * rx + iq.poro_geom.jac[0][1] * ry);
          const double py = inv_det * (iq.poro_geom.jac[1][0] * rx + iq.poro_geom.jac[1][1] * ry);
          value += iq.w[q] * MultiplierSpace::basis(m, iq.s[q]) *
                   (px * rec.normal_p.x + py * rec.normal_p.y);
        }
        blocks.p.triplets.emplace_back(row, sys.up.elem_dofs[iq.poro_tri * sys.up.ndof_local + l],
                                       sign * value);
      }
    }
  }
  return blocks;
}

SparseBlock assemble_multiplier_mass(const FemSystem& sys) {
  SparseBlock block{sys.lam.total, sys.lam.total, {}};
  const QuadratureRule rule = edge_rule(kInterfaceRuleDegree);
  for (std::size_t e = 0; e < sys.mesh->interface.size(); ++e) {
    const double len = sys.mesh->interface[e].length;
    for (int m = 0; m < sys.lam.per_edge; ++m) {
      for (int n = 0; n < sys.lam.per_edge; ++n) {
        double value = 0.0;
        for (const auto& node : rule.nodes)
          value += node.w * len * MultiplierSpace::basis(m, node.x) *
                   MultiplierSpace::basis(n, node.x);
        block.triplets.emplace_back(sys.lam.dof(static_cast<int>(e), m),
                                    sys.lam.dof(static_cast<int>(e), n), value);
      }
    }
  }
  return block;
}

// ---------------------------------------------------------------------------
// Right-hand side
// ---------------------------------------------------------------------------

std::vector<double> assemble_rhs(const FemSystem& sys, const SourceFunctions& src, double t) {
  std::vector<double> rhs(sys.total, 0.0);

  auto add_vector_load = [&](const DofMap& map, int offset, const VectorFn& f) {
    if (!f) return;
    const QuadratureRule rule = triangle_rule(2 * polynomial_degree(map.kind) + 2);
    const BasisTable ref = tabulate(map.kind, rule);
    const int nl = ref.ndof;
    for (int tri = 0; tri < map.mesh->num_triangles(); ++tri) {
      const ElementGeometry geom = element_geometry(*map.mesh, tri);
      for (std::size_t q = 0; q < rule.size(); ++q) {
        const Point2 p = geom.map(rule.nodes[q].x, rule.nodes[q].y);
        const Point2 fv = f(p, t);
        const double w = rule.nodes[q].w * geom.det;
        for (int l = 0; l < nl; ++l) {
          const int sl = map.elem_dofs[tri * map.ndof_local + l];
          rhs[offset + map.global(sl, 0)] += w * fv.x * ref.val[q * nl + l];
          rhs[offset + map.global(sl, 1)] += w * fv.y * ref.val[q * nl + l];
        }
      }
    }
  };
  auto add_scalar_load = [&](const DofMap& map, int offset, const ScalarSpaceFn& f) {
    if (!f) return;
    const QuadratureRule rule = triangle_rule(2 * polynomial_degree(map.kind) + 2);
    const BasisTable ref = tabulate(map.kind, rule);
    const int nl = ref.ndof;
    for (int tri = 0; tri < map.mesh->num_triangles(); ++tri) {
      const ElementGeometry geom = element_geometry(*map.mesh, tri);
      for (std::size_t q = 0; q < rule.size(); ++q) {
        const Point2 p = geom.map(rule.nodes[q].x, rule.nodes[q].y);
        const double w = rule.nodes[q].w * geom.det * f(p, t);
        for (int l = 0; l < nl; ++l)
          rhs[offset + map.elem_dofs[tri * map.ndof_local + l]] += w * ref.val[q * nl + l];
      }
    }
  };

  add_vector_load(sys.uf, sys.off_uf, src.f_f);
  add_vector_load(sys.eta, sys.off_eta, src.f_p);
  add_scalar_load(sys.pp, sys.off_pp, src.q_p);
  add_scalar_load(sys.pf, sys.off_pf, src.q_f);

  const QuadratureRule erule = edge_rule(kInterfaceRuleDegree);

  // natural fluid stress: sigma_f n = -p_in n on tagged boundary edges
  if (src.p_in && !src.inflow_tags.empty()) {
    const SubMesh& mesh = sys.mesh->fluid;
    for (std::size_t b = 0; b < mesh.boundary_edges.size(); ++b) {
      const auto& be = mesh.boundary_edges[b];
      bool tagged = false;
      for (auto tag : src.inflow_tags) tagged = tagged || (tag == be.tag);
      if (!tagged) continue;
      const auto [tri, local] = sys.uf.edge_owner(sys.uf.boundary_edge_ids[b]);
      const ElementGeometry geom = element_geometry(mesh, tri);
      Point2 a = mesh.vertices[be.a], bb = mesh.vertices[be.b];
      const double len = norm(bb - a);
      Point2 n = {(bb.y - a.y) / len, -(bb.x - a.x) / len};
      if (dot(n, mesh.centroid(tri) - (0.5 * (a + bb))) > 0.0) n = -1.0 * n;  // outward
      std::vector<Point2> ref_pts(erule.size());
      for (std::size_t q = 0; q < erule.size(); ++q) {
        Point2 p = a + erule.nodes[q].x * (bb - a);
        geom.inv_map(p, ref_pts[q].x, ref_pts[q].y);
      }
      const BasisTable basis = tabulate_at(sys.uf.kind, ref_pts);
      const int nl = basis.ndof;
      for (std::size_t q = 0; q < erule.size(); ++q) {
        Point2 p = a + erule.nodes[q].x * (bb - a);
        const double w = -erule.nodes[q].w * len * src.p_in(p, t);
        for (int l = 0; l < nl; ++l) {
          const int sl = sys.uf.elem_dofs[tri * sys.uf.ndof_local + l];
          rhs[sys.off_uf + sys.uf.global(sl, 0)] += w * basis.val[q * nl + l] * n.x;
          rhs[sys.off_uf + sys.uf.global(sl, 1)] += w * basis.val[q * nl + l] * n.y;
        }
      }
    }
  }

  // natural Darcy pressure data: -(p_data, v.n) on tagged boundary edges
  if (src.p_p_natural && !src.darcy_natural_tags.empty()) {
    const SubMesh& mesh = sys.mesh->poro;
    for (std::size_t b = 0; b < mesh.boundary_edges.size(); ++b) {
      const auto& be = mesh.boundary_edges[b];
      bool tagged = false;
      for (auto tag : src.darcy_natural_tags) tagged = tagged || (tag == be.tag);
      if (!tagged) continue;
      const auto [tri, local] = sys.up.edge_owner(sys.up.boundary_edge_ids[b]);
      const ElementGeometry geom = element_geometry(mesh, tri);
      Point2 a = mesh.vertices[be.a], bb = mesh.vertices[be.b];
      const double len = norm(bb - a);
      Point2 n = {(bb.y - a.y) / len, -(bb.x - a.x) / len};
      if (dot(n, mesh.centroid(tri) - (0.5 * (a + bb))) > 0.0) n = -1.0 * n;
      std::vector<Point2> ref_pts(erule.size());
      for (std::size_t q = 0; q < erule.size(); ++q) {
        Point2 p = a + erule.nodes[q].x * (bb - a);
        geom.inv_map(p, ref_pts[q].x, ref_pts[q].y);
      }
      const BasisTable basis = tabulate_at(sys.up.kind, ref_pts);
      const int nl = basis.ndof;
      const double inv_det = 1.0 / geom.det;
      for (std::size_t q = 0; q < erule.size(); ++q) {
        Point2 p = a + erule.nodes[q].x * (bb - a);
        const double w = -erule.nodes[q].w * len * src.p_p_natural(p, t);
        for (int l = 0; l < nl; ++l) {
          const double sign = sys.up.elem_signs[tri * sys.up.ndof_local + l];
          const double rx = basis.vx[q * nl + l], ry = basis.vy[q * nl + l];
          const double px = inv_det * (geom.jac[0][0] * rx + geom.jac[0][1] * ry);
          const double py = inv_det * (geom.jac[1][0] * rx + geom.jac[1][1] * ry);
          rhs[sys.off_up + sys.up.elem_dofs[tri * sys.up.ndof_local + l]] +=
              sign * w * (px * n.x + py * n.y);
        }
      }
    }
  }

  return rhs;
}

// ---------------------------------------------------------------------------
// Step system composition
// ---------------------------------------------------------------------------

StepBlocks assemble_constant_blocks(const FemSystem& sys, const ProblemCoefficients& coef) {
  coef.validate();
  StepBlocks blocks;
  blocks.Mf = assemble_mass(sys.uf, 1.0);
  blocks.Ms = assemble_mass(sys.eta, 1.0);
  blocks.Mp = assemble_mass(sys.pp, 1.0);
  blocks.Af = assemble_af(sys.uf, coef.mu_f);
  blocks.Ad = assemble_apd(sys.up, coef);
  blocks.Ae_strain = assemble_af(sys.eta, coef.mu_p);
  blocks.Ae_div = assemble_divdiv(sys.eta, coef.lambda_p);
  blocks.Ae_spring = coef.xi > 0.0 ? assemble_mass(sys.eta, coef.xi)
                                   : SparseBlock{sys.eta.total_dofs, sys.eta.total_dofs, {}};
  blocks.Bf = assemble_b(sys.uf, sys.pf);
  blocks.Bp = assemble_b(sys.up, sys.pp);
  blocks.Bpe = assemble_b(sys.eta, sys.pp);
  blocks.bjs = assemble_bjs(sys, coef);
  blocks.bg = assemble_bgamma(sys);
  blocks.Mlam = assemble_multiplier_mass(sys);
  return blocks;
}

namespace {

BlockSystem compose_impl(const FemSystem& sys, const StepBlocks& blocks,
                         const SparseBlock& convection, const ProblemCoefficients& coef,
                         double dt, const std::vector<double>& rhs_sources,
                         const PreviousState& prev, const std::vector<char>* masked,
                         const std::vector<double>* bc_values) {
  if (!(dt > 0)) throw std::invalid_argument("compose_step_system: dt must be positive");
  const double inv_dt = 1.0 / dt;

  std::vector<Triplet> trip;
  trip.reserve(blocks.Af.triplets.size() * 4 + convection.triplets.size() + 64);

  auto add_block = [&](const SparseBlock& block, int row_off, int col_off, double scale,
                       bool transpose = false) {
    for (const auto& t : block.triplets) {
      const int r = transpose ? t.col() : t.row();
      const int c = transpose ? t.row() : t.col();
      trip.emplace_back(row_off + r, col_off + c, scale * t.value());
    }
  };

  // momentum rows (test v_f)
  add_block(blocks.Mf, sys.off_uf, sys.off_uf, coef.rho_f * inv_dt);
  add_block(blocks.Af, sys.off_uf, sys.off_uf, 1.0);
  add_block(convection, sys.off_uf, sys.off_uf, 1.0);
  add_block(blocks.bjs.ff, sys.off_uf, sys.off_uf, 1.0);
  add_block(blocks.bjs.fe, sys.off_uf, sys.off_eta, -inv_dt);
  add_block(blocks.Bf, sys.off_uf, sys.off_pf, 1.0, /*transpose=*/true);
  add_block(blocks.bg.f, sys.off_uf, sys.off_lam, 1.0, /*transpose=*/true);

  // elasticity rows (test xi_p)
  add_block(blocks.Ms, sys.off_eta, sys.off_eta, coef.rho_p * inv_dt * inv_dt);
  add_block(blocks.Ae_strain, sys.off_eta, sys.off_eta, 1.0);
  add_block(blocks.Ae_div, sys.off_eta, sys.off_eta, 1.0);
  add_block(blocks.Ae_spring, sys.off_eta, sys.off_eta, 1.0);
  add_block(blocks.bjs.ef, sys.off_eta, sys.off_uf, -1.0);
  add_block(blocks.bjs.ee, sys.off_eta, sys.off_eta, inv_dt);
  add_block(blocks.Bpe, sys.off_eta, sys.off_pp, coef.alpha, /*transpose=*/true);
  add_block(blocks.bg.e, sys.off_eta, sys.off_lam, 1.0, /*transpose=*/true);

  // Darcy rows (test v_p)
  add_block(blocks.Ad, sys.off_up, sys.off_up, 1.0);
  add_block(blocks.Bp, sys.off_up, sys.off_pp, 1.0, /*transpose=*/true);
  add_block(blocks.bg.p, sys.off_up, sys.off_lam, 1.0, /*transpose=*/true);

  // Darcy mass rows (test w_p)
  add_block(blocks.Mp, sys.off_pp, sys.off_pp, coef.s0 * inv_dt);
  add_block(blocks.Bpe, sys.off_pp, sys.off_eta, -coef.alpha * inv_dt);
  add_block(blocks.Bp, sys.off_pp, sys.off_up, -1.0);

  // fluid mass rows (test w_f)
  add_block(blocks.Bf, sys.off_pf, sys.off_uf, -1.0);

  // interface rows (test mu)
  add_block(blocks.bg.f, sys.off_lam, sys.off_uf, 1.0);
  add_block(blocks.bg.p, sys.off_lam, sys.off_up, 1.0);
  add_block(blocks.bg.e, sys.off_lam, sys.off_eta, inv_dt);

  // right-hand side
  std::vector<double> rhs = rhs_sources;
  rhs.resize(sys.total, 0.0);
  auto axpy_block = [&](const SparseBlock& block, int row_off, double scale,
                        std::span<const double> x) {
    for (const auto& t : block.triplets) rhs[row_off + t.row()] += scale * t.value() * x[t.col()];
  };
  axpy_block(blocks.Mf, sys.off_uf, coef.rho_f * inv_dt, prev.uf);
  axpy_block(blocks.bjs.fe, sys.off_uf, -inv_dt, prev.eta);
  std::vector<double> eta_comb(prev.eta.size());
  for (std::size_t i = 0; i < eta_comb.size(); ++i)
    eta_comb[i] = 2.0 * prev.eta[i] - prev.eta_prev[i];
  axpy_block(blocks.Ms, sys.off_eta, coef.rho_p * inv_dt * inv_dt, eta_comb);
  axpy_block(blocks.bjs.ee, sys.off_eta, inv_dt, prev.eta);
  axpy_block(blocks.Mp, sys.off_pp, coef.s0 * inv_dt, prev.pp);
  axpy_block(blocks.Bpe, sys.off_pp, -coef.alpha * inv_dt, prev.eta);
  axpy_block(blocks.bg.e, sys.off_lam, inv_dt, prev.eta);

  BlockSystem out;
  if (masked) {
    std::vector<Triplet> constrained;
    constrained.reserve(trip.size());
    for (const auto& t : trip) {
      const bool rm = (*masked)[t.row()], cm = (*masked)[t.col()];
      if (rm) continue;
      if (cm) {
        rhs[t.row()] -= t.value() * (*bc_values)[t.col()];
        continue;
      }
      constrained.push_back(t);
    }
    for (int k = 0; k < sys.total; ++k) {
      if ((*masked)[k]) {
        constrained.emplace_back(k, k, 1.0);
        rhs[k] = (*bc_values)[k];
      }
    }
    out.A = SparseMatrix(sys.total, sys.total, constrained);
  } else {
    out.A = SparseMatrix(sys.total, sys.total, trip);
  }
  out.rhs = std::move(rhs);
  return out;
}

}  // namespace

BlockSystem compose_step_system(const FemSystem& sys, const StepBlocks& blocks,
                                const SparseBlock& convection, const ProblemCoefficients& coef,
                                double dt, const std::vector<double>& rhs_sources,
                                const PreviousState& prev, const std::vector<char>& masked,
                                const std::vector<double>& bc_values) {
  return compose_impl(sys, blocks, convection, coef, dt, rhs_sources, prev, &masked, &bc_values);
}

BlockSystem compose_step_system_raw(const FemSystem& sys, const StepBlocks& blocks,
                                    const SparseBlock& convection,
                                    const ProblemCoefficients& coef, double dt,
                                    const std::vector<double>& rhs_sources,
                                    const PreviousState& prev) {
  return compose_impl(sys, blocks, convection, coef, dt, rhs_sources, prev, nullptr, nullptr);
}

}  // namespace fpsi
