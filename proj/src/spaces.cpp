#include "fpsi/spaces.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace fpsi {

ElementGeometry element_geometry(const SubMesh& mesh, int tri) {
  const auto& t = mesh.triangles[tri];
  Point2 a = mesh.vertices[t[0]], b = mesh.vertices[t[1]], c = mesh.vertices[t[2]];
  ElementGeometry g;
  g.origin = a;
  g.jac[0][0] = b.x - a.x;
  g.jac[0][1] = c.x - a.x;
  g.jac[1][0] = b.y - a.y;
  g.jac[1][1] = c.y - a.y;
  g.det = g.jac[0][0] * g.jac[1][1] - g.jac[0][1] * g.jac[1][0];
  if (g.det <= 0.0) throw std::runtime_error("degenerate or inverted element");
  const double inv_det = 1.0 / g.det;
  g.inv[0][0] = g.jac[1][1] * inv_det;
  g.inv[0][1] = -g.jac[0][1] * inv_det;
  g.inv[1][0] = -g.jac[1][0] * inv_det;
  g.inv[1][1] = g.jac[0][0] * inv_det;
  return g;
}

void piola_map(const ElementGeometry& g, Point2 ref_value, double ref_div,
               Point2& phys_value, double& phys_div) {
  const double inv_det = 1.0 / g.det;
  phys_value = {(g.jac[0][0] * ref_value.x + g.jac[0][1] * ref_value.y) * inv_det,
                (g.jac[1][0] * ref_value.x + g.jac[1][1] * ref_value.y) * inv_det};
  phys_div = ref_div * inv_det;
}

namespace {

void build_edge_tables(DofMap& map) {
  const SubMesh& mesh = *map.mesh;
  std::map<std::pair<int, int>, int> edge_id;
  map.tri_edges.resize(mesh.num_triangles());
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tri = mesh.triangles[t];
    for (int k = 0; k < 3; ++k) {
      int a = tri[(k + 1) % 3], b = tri[(k + 2) % 3];
      auto key = std::make_pair(std::min(a, b), std::max(a, b));
      auto it = edge_id.find(key);
      int id;
      if (it == edge_id.end()) {
        id = static_cast<int>(map.edges.size());
        map.edges.push_back({key.first, key.second});
        map.edge_owners.push_back({-1, -1, -1, -1});
        edge_id[key] = id;
      } else {
        id = it->second;
      }
      auto& owners = map.edge_owners[id];
      if (owners[0] < 0) {
        owners[0] = t;
        owners[1] = k;
      } else {
        owners[2] = t;
        owners[3] = k;
      }
      map.tri_edges[t][k] = id;
    }
  }
  map.boundary_edge_ids.reserve(mesh.boundary_edges.size());
  for (const auto& be : mesh.boundary_edges) {
    auto key = std::make_pair(std::min(be.a, be.b), std::max(be.a, be.b));
    auto it = edge_id.find(key);
    if (it == edge_id.end()) throw std::runtime_error("boundary edge not in mesh");
    map.boundary_edge_ids.push_back(it->second);
  }
}

}  // namespace

DofMap build_space(const SubMesh& mesh, ElementKind kind, bool vector) {
  if (is_hdiv(kind) && !vector)
    throw std::invalid_argument("build_space: RT kinds are intrinsically vector valued");
  DofMap map;
  map.kind = kind;
  map.vector = vector;
  map.mesh = &mesh;
  map.ndof_local = local_dof_count(kind);
  build_edge_tables(map);

  const int nv = mesh.num_vertices();
  const int nt = mesh.num_triangles();
  const int ne = map.num_edges();
  map.elem_dofs.assign(static_cast<std::size_t>(nt) * map.ndof_local, -1);
  map.elem_signs.assign(static_cast<std::size_t>(nt) * map.ndof_local, 1.0);

  auto ld = [&](int t, int l) -> int& { return map.elem_dofs[t * map.ndof_local + l]; };

  switch (kind) {
    case ElementKind::P0:
      map.scalar_dofs = nt;
      for (int t = 0; t < nt; ++t) ld(t, 0) = t;
      break;
    case ElementKind::P1:
      map.scalar_dofs = nv;
      for (int t = 0; t < nt; ++t)
        for (int k = 0; k < 3; ++k) ld(t, k) = mesh.triangles[t][k];
      break;
    case ElementKind::P1dc:
      map.scalar_dofs = 3 * nt;
      for (int t = 0; t < nt; ++t)
        for (int k = 0; k < 3; ++k) ld(t, k) = 3 * t + k;
      break;
    case ElementKind::P1Bubble:
      map.scalar_dofs = nv + nt;
      for (int t = 0; t < nt; ++t) {
        for (int k = 0; k < 3; ++k) ld(t, k) = mesh.triangles[t][k];
        ld(t, 3) = nv + t;
      }
      break;
    case ElementKind::P2:
      map.scalar_dofs = nv + ne;
      for (int t = 0; t < nt; ++t) {
        for (int k = 0; k < 3; ++k) ld(t, k) = mesh.triangles[t][k];
        for (int k = 0; k < 3; ++k) ld(t, 3 + k) = nv + map.tri_edges[t][k];
      }
      break;
    case ElementKind::RT0:
    case ElementKind::RT1: {
      const int per_edge = (kind == ElementKind::RT0) ? 1 : 2;
      const int per_cell = (kind == ElementKind::RT0) ? 0 : 2;
      map.scalar_dofs = per_edge * ne + per_cell * nt;
      for (int t = 0; t < nt; ++t) {
        const auto& tri = mesh.triangles[t];
        for (int k = 0; k < 3; ++k) {
          int a = tri[(k + 1) % 3], b = tri[(k + 2) % 3];
          const double sign = (a < b) ? 1.0 : -1.0;  // local traversal vs global (min->max)
          const int e = map.tri_edges[t][k];
          if (per_edge == 1) {
            ld(t, k) = e;
            map.elem_signs[t * map.ndof_local + k] = sign;
          } else {
            ld(t, 2 * k) = 2 * e;
            ld(t, 2 * k + 1) = 2 * e + 1;
            map.elem_signs[t * map.ndof_local + 2 * k] = sign;
            // odd moment is traversal-invariant
            map.elem_signs[t * map.ndof_local + 2 * k + 1] = 1.0;
          }
        }
        for (int m = 0; m < per_cell; ++m) ld(t, 3 * per_edge + m) = per_edge * ne + per_cell * t + m;
      }
      break;
    }
  }
  map.total_dofs = map.components() == 2 ? 2 * map.scalar_dofs : map.scalar_dofs;
  return map;
}

BasisTable tabulate_at(ElementKind kind, std::span<const Point2> pts) {
  BasisTable table;
  table.ndof = local_dof_count(kind);
  const std::size_t nq = pts.size();
  if (is_hdiv(kind)) {
    HdivElement elem(kind);
    table.vx.resize(nq * table.ndof);
    table.vy.resize(nq * table.ndof);
    table.dv.resize(nq * table.ndof);
    for (std::size_t q = 0; q < nq; ++q) {
      elem.eval(pts[q].x, pts[q].y, &table.vx[q * table.ndof], &table.vy[q * table.ndof]);
      elem.div(pts[q].x, pts[q].y, &table.dv[q * table.ndof]);
    }
  } else {
    ScalarElement elem(kind);
    table.val.resize(nq * table.ndof);
    table.gx.resize(nq * table.ndof);
    table.gy.resize(nq * table.ndof);
    for (std::size_t q = 0; q < nq; ++q) {
      elem.eval(pts[q].x, pts[q].y, &table.val[q * table.ndof]);
      elem.grad(pts[q].x, pts[q].y, &table.gx[q * table.ndof], &table.gy[q * table.ndof]);
    }
  }
  return table;
}

BasisTable tabulate(ElementKind kind, const QuadratureRule& rule) {
  std::vector<Point2> pts(rule.size());
  for (std::size_t q = 0; q < rule.size(); ++q) pts[q] = {rule.nodes[q].x, rule.nodes[q].y};
  return tabulate_at(kind, pts);
}

// ---------------------------------------------------------------------------
// Essential boundary conditions
// ---------------------------------------------------------------------------

namespace {

Point2 edge_unit_normal(const SubMesh& mesh, std::array<int, 2> edge) {
  Point2 a = mesh.vertices[edge[0]], b = mesh.vertices[edge[1]];
  Point2 t = b - a;
  const double len = norm(t);
  return {t.y / len, -t.x / len};  // traversal rotated by -90
}

}  // namespace

EssentialBc essential_bc(const DofMap& map, std::span<const BoundaryTag> tags, int component) {
  const SubMesh& mesh = *map.mesh;
  EssentialBc bc;
  auto tagged = [&](BoundaryTag tag) {
    return std::find(tags.begin(), tags.end(), tag) != tags.end();
  };

  if (is_hdiv(map.kind)) {
    const int per_edge = (map.kind == ElementKind::RT0) ? 1 : 2;
    for (std::size_t b = 0; b < mesh.boundary_edges.size(); ++b) {
      if (!tagged(mesh.boundary_edges[b].tag)) continue;
      const int e = map.boundary_edge_ids[b];
      for (int m = 0; m < per_edge; ++m) {
        EssentialBc::Entry entry;
        entry.dof = per_edge * e + m;
        entry.edge = e;
        entry.moment = m;
        bc.entries.push_back(entry);
      }
    }
  } else {
    // gather nodal scalar dofs sitting on tagged edges
    std::vector<char> seen(map.scalar_dofs, 0);
    std::vector<std::pair<int, Point2>> nodes;
    const int nv = mesh.num_vertices();
    for (std::size_t b = 0; b < mesh.boundary_edges.size(); ++b) {
      if (!tagged(mesh.boundary_edges[b].tag)) continue;
      const auto& be = mesh.boundary_edges[b];
      for (int v : {be.a, be.b}) {
        if (map.kind == ElementKind::P0 || map.kind == ElementKind::P1dc)
          throw std::invalid_argument("essential_bc: space has no boundary dof functionals");
        if (!seen[v]) {
          seen[v] = 1;
          nodes.push_back({v, mesh.vertices[v]});
        }
      }
      if (map.kind == ElementKind::P2) {
        const int dof = nv + map.boundary_edge_ids[b];
        if (!seen[dof]) {
          seen[dof] = 1;
          nodes.push_back({dof, 0.5 * (mesh.vertices[be.a] + mesh.vertices[be.b])});
        }
      }
    }
    for (const auto& [sdof, node] : nodes) {
      for (int c = 0; c < map.components(); ++c) {
        if (component >= 0 && c != component) continue;
        EssentialBc::Entry entry;
        entry.dof = map.global(sdof, c);
        entry.comp = c;
        entry.node = node;
        bc.entries.push_back(entry);
      }
    }
  }
  bc.values.assign(bc.entries.size(), 0.0);
  return bc;
}

void set_bc_values(EssentialBc& bc, const DofMap& map, const VectorFn& g, double t) {
  bc.values.assign(bc.entries.size(), 0.0);
  if (!g) return;
  std::vector<double> gp, gw;
  gauss_legendre_unit(4, gp, gw);
  for (std::size_t i = 0; i < bc.entries.size(); ++i) {
    const auto& entry = bc.entries[i];
    if (entry.edge >= 0) {
      const auto& edge = map.edges[entry.edge];
      Point2 a = map.mesh->vertices[edge[0]], b = map.mesh->vertices[edge[1]];
      Point2 n = edge_unit_normal(*map.mesh, edge);
      const double len = norm(b - a);
      double moment = 0.0;
      for (std::size_t q = 0; q < gp.size(); ++q) {
        Point2 p = a + gp[q] * (b - a);
        const double poly = entry.moment == 0 ? 1.0 : 2.0 * gp[q] - 1.0;
        moment += gw[q] * len * dot(g(p, t), n) * poly;
      }
      bc.values[i] = moment;
    } else {
      Point2 value = g(entry.node, t);
      bc.values[i] = entry.comp == 0 ? value.x : value.y;
    }
  }
}

// ---------------------------------------------------------------------------
// Interpolation
// ---------------------------------------------------------------------------

std::vector<double> interpolate_scalar(const DofMap& map, const ScalarSpaceFn& g, double t) {
  if (is_hdiv(map.kind)) throw std::invalid_argument("interpolate_scalar: RT space");
  const SubMesh& mesh = *map.mesh;
  std::vector<double> out(map.scalar_dofs, 0.0);
  const int nv = mesh.num_vertices();
  switch (map.kind) {
    case ElementKind::P0:
      for (int c = 0; c < mesh.num_triangles(); ++c) out[c] = g(mesh.centroid(c), t);
      break;
    case ElementKind::P1dc:
      for (int c = 0; c < mesh.num_triangles(); ++c)
        for (int k = 0; k < 3; ++k) out[3 * c + k] = g(mesh.vertices[mesh.triangles[c][k]], t);
      break;
    case ElementKind::P1:
      for (int v = 0; v < nv; ++v) out[v] = g(mesh.vertices[v], t);
      break;
    case ElementKind::P1Bubble:
      for (int v = 0; v < nv; ++v) out[v] = g(mesh.vertices[v], t);
      for (int c = 0; c < mesh.num_triangles(); ++c) {
        const auto& tri = mesh.triangles[c];
        const double mean = (out[tri[0]] + out[tri[1]] + out[tri[2]]) / 3.0;
        out[nv + c] = g(mesh.centroid(c), t) - mean;
      }
      break;
    case ElementKind::P2:
      for (int v = 0; v < nv; ++v) out[v] = g(mesh.vertices[v], t);
      for (int e = 0; e < map.num_edges(); ++e) {
        Point2 mid = 0.5 * (mesh.vertices[map.edges[e][0]] + mesh.vertices[map.edges[e][1]]);
        out[nv + e] = g(mid, t);
      }
      break;
    default:
      throw std::logic_error("interpolate_scalar");
  }
  return out;
}

std::vector<double> interpolate(const DofMap& map, const VectorFn& g, double t) {
  if (!is_hdiv(map.kind)) {
    if (map.components() != 2) throw std::invalid_argument("interpolate: expected vector space");
    auto cx = interpolate_scalar(map, [&](Point2 p, double tt) { return g(p, tt).x; }, t);
    auto cy = interpolate_scalar(map, [&](Point2 p, double tt) { return g(p, tt).y; }, t);
    std::vector<double> out(map.total_dofs);
    for (int s = 0; s < map.scalar_dofs; ++s) {
      out[2 * s] = cx[s];
      out[2 * s + 1] = cy[s];
    }
    return out;
  }
  const SubMesh& mesh = *map.mesh;
  std::vector<double> out(map.total_dofs, 0.0);
  const int per_edge = (map.kind == ElementKind::RT0) ? 1 : 2;
  std::vector<double> gp, gw;
  gauss_legendre_unit(5, gp, gw);
  for (int e = 0; e < map.num_edges(); ++e) {
    Point2 a = mesh.vertices[map.edges[e][0]], b = mesh.vertices[map.edges[e][1]];
    Point2 n = edge_unit_normal(mesh, map.edges[e]);
    const double len = norm(b - a);
    for (int m = 0; m < per_edge; ++m) {
      double moment = 0.0;
      for (std::size_t q = 0; q < gp.size(); ++q) {
        Point2 p = a + gp[q] * (b - a);
        const double poly = m == 0 ? 1.0 : 2.0 * gp[q] - 1.0;
        moment += gw[q] * len * dot(g(p, t), n) * poly;
      }
      out[per_edge * e + m] = moment;
    }
  }
  if (map.kind == ElementKind::RT1) {
    const QuadratureRule rule = triangle_rule(6);
    for (int c = 0; c < mesh.num_triangles(); ++c) {
      const ElementGeometry geom = element_geometry(mesh, c);
      double mx = 0.0, my = 0.0;  // reference cell moments of the pullback
      for (const auto& node : rule.nodes) {
        Point2 p = geom.map(node.x, node.y);
        Point2 v = g(p, t);
        // pullback: v_ref = det * J^{-1} v
        const double rx = geom.det * (geom.inv[0][0] * v.x + geom.inv[0][1] * v.y);
        const double ry = geom.det * (geom.inv[1][0] * v.x + geom.inv[1][1] * v.y);
        mx += node.w * rx;
        my += node.w * ry;
      }
      out[2 * map.num_edges() + 2 * c] = mx;
      out[2 * map.num_edges() + 2 * c + 1] = my;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Point evaluation
// ---------------------------------------------------------------------------

namespace {

void reference_coords(const DofMap& map, int tri, Point2 p, double& xr, double& yr) {
  const ElementGeometry geom = element_geometry(*map.mesh, tri);
  geom.inv_map(p, xr, yr);
  const double tol = 1e-10;
  if (xr < -tol || yr < -tol || xr + yr > 1.0 + tol)
    throw std::invalid_argument("eval: point outside the stated element");
}

}  // namespace

double eval_scalar(const DofMap& map, std::span<const double> coeffs, int tri, Point2 p) {
  double xr, yr;
  reference_coords(map, tri, p, xr, yr);
  ScalarElement elem(map.kind);
  std::vector<double> val(elem.ndof);
  elem.eval(xr, yr, val.data());
  double out = 0.0;
  for (int l = 0; l < elem.ndof; ++l) out += coeffs[map.elem_dofs[tri * map.ndof_local + l]] * val[l];
  return out;
}

Point2 eval_scalar_grad(const DofMap& map, std::span<const double> coeffs, int tri, Point2 p) {
  double xr, yr;
  reference_coords(map, tri, p, xr, yr);
  const ElementGeometry geom = element_geometry(*map.mesh, tri);
  ScalarElement elem(map.kind);
  std::vector<double> gx(elem.ndof), gy(elem.ndof);
  elem.grad(xr, yr, gx.data(), gy.data());
  Point2 out{0.0, 0.0};
  for (int l = 0; l < elem.ndof; ++l) {
    const double c = coeffs[map.elem_dofs[tri * map.ndof_local + l]];
    // physical gradient = J^{-T} reference gradient
    out.x += c * (geom.inv[0][0] * gx[l] + geom.inv[1][0] * gy[l]);
    out.y += c * (geom.inv[0][1] * gx[l] + geom.inv[1][1] * gy[l]);
  }
  return out;
}

Point2 eval_vector(const DofMap& map, std::span<const double> coeffs, int tri, Point2 p) {
  double xr, yr;
  reference_coords(map, tri, p, xr, yr);
  if (is_hdiv(map.kind)) {
    const ElementGeometry geom = element_geometry(*map.mesh, tri);
    HdivElement elem(map.kind);
    std::vector<double> vx(elem.ndof), vy(elem.ndof);
    elem.eval(xr, yr, vx.data(), vy.data());
    Point2 out{0.0, 0.0};
    for (int l = 0; l < elem.ndof; ++l) {
      const double c = coeffs[map.elem_dofs[tri * map.ndof_local + l]] *
                       map.elem_signs[tri * map.ndof_local + l];
      Point2 phys;
      double dummy;
      piola_map(geom, {vx[l], vy[l]}, 0.0, phys, dummy);
      out = out + c * phys;
    }
    return out;
  }
  ScalarElement elem(map.kind);
  std::vector<double> val(elem.ndof);
  elem.eval(xr, yr, val.data());
  Point2 out{0.0, 0.0};
  for (int l = 0; l < elem.ndof; ++l) {
    const int s = map.elem_dofs[tri * map.ndof_local + l];
    out.x += coeffs[map.global(s, 0)] * val[l];
    out.y += coeffs[map.global(s, 1)] * val[l];
  }
  return out;
}

double eval_vector_div(const DofMap& map, std::span<const double> coeffs, int tri, Point2 p) {
  double xr, yr;
  reference_coords(map, tri, p, xr, yr);
  const ElementGeometry geom = element_geometry(*map.mesh, tri);
  if (is_hdiv(map.kind)) {
    HdivElement elem(map.kind);
    std::vector<double> dv(elem.ndof);
    elem.div(xr, yr, dv.data());
    double out = 0.0;
    for (int l = 0; l < elem.ndof; ++l) {
      const double c = coeffs[map.elem_dofs[tri * map.ndof_local + l]] *
                       map.elem_signs[tri * map.ndof_local + l];
      out += c * dv[l] / geom.det;
    }
    return out;
  }
  ScalarElement elem(map.kind);
  std::vector<double> gx(elem.ndof), gy(elem.ndof);
  elem.grad(xr, yr, gx.data(), gy.data());
  double out = 0.0;
  for (int l = 0; l < elem.ndof; ++l) {
    const int s = map.elem_dofs[tri * map.ndof_local + l];
    const double px = geom.inv[0][0] * gx[l] + geom.inv[1][0] * gy[l];
    const double py = geom.inv[0][1] * gx[l] + geom.inv[1][1] * gy[l];
    out += coeffs[map.global(s, 0)] * px + coeffs[map.global(s, 1)] * py;
  }
  return out;
}

MultiplierSpace build_multiplier_space(const CoupledMesh& mesh, int degree) {
  if (degree < 0 || degree > 1)
    throw std::invalid_argument("build_multiplier_space: degree must be 0 or 1");
  MultiplierSpace space;
  space.degree = degree;
  space.per_edge = degree + 1;
  space.total = space.per_edge * static_cast<int>(mesh.interface.size());
  space.mesh = &mesh;
  return space;
}

}  // namespace fpsi
