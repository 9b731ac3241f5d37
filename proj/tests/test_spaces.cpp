#include <doctest.h>

#include <random>

#include "fpsi/spaces.hpp"

using namespace fpsi;

namespace {

// unit square split into two triangles, all-boundary tag GammaF
SubMesh unit_square_mesh() {
  SubMesh mesh;
  mesh.subdomain = Subdomain::Fluid;
  mesh.vertices = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  mesh.triangles = {{0, 1, 2}, {0, 2, 3}};
  mesh.boundary_edges = {{0, 1, BoundaryTag::GammaF},
                         {1, 2, BoundaryTag::GammaF},
                         {2, 3, BoundaryTag::GammaF},
                         {3, 0, BoundaryTag::GammaF}};
  return mesh;
}

SubMesh refined_fluid_mesh(int n) {
  CoupledMesh coupled = build_rectangle_coupled_mesh(0, 1, -1, 1, 0.0, n, n, n);
  return coupled.fluid;
}

}  // namespace

TEST_CASE("space dimension formulas") {
  SubMesh mesh = unit_square_mesh();
  CHECK(build_space(mesh, ElementKind::P1, false).total_dofs == 4);
  CHECK(build_space(mesh, ElementKind::RT0, true).total_dofs == 5);
  CHECK(build_space(mesh, ElementKind::P2, false).total_dofs == 4 + 5);
  CHECK(build_space(mesh, ElementKind::P0, false).total_dofs == 2);
  CHECK(build_space(mesh, ElementKind::P1dc, false).total_dofs == 6);
  CHECK(build_space(mesh, ElementKind::P1Bubble, false).total_dofs == 4 + 2);
  CHECK(build_space(mesh, ElementKind::P1, true).total_dofs == 8);
  CHECK(build_space(mesh, ElementKind::RT1, true).total_dofs == 2 * 5 + 2 * 2);
  CHECK_THROWS(build_space(mesh, ElementKind::RT0, false));
}

TEST_CASE("dimension formulas hold under refinement") {
  for (int n : {2, 3}) {
    SubMesh mesh = refined_fluid_mesh(n);
    const int nv = mesh.num_vertices(), nt = mesh.num_triangles();
    DofMap rt0 = build_space(mesh, ElementKind::RT0, true);
    const int ne = rt0.num_edges();
    CHECK(rt0.total_dofs == ne);
    CHECK(build_space(mesh, ElementKind::P2, false).total_dofs == nv + ne);
    CHECK(build_space(mesh, ElementKind::P1Bubble, false).total_dofs == nv + nt);
    CHECK(build_space(mesh, ElementKind::RT1, true).total_dofs == 2 * ne + 2 * nt);
    CHECK(build_space(mesh, ElementKind::P1dc, false).total_dofs == 3 * nt);
  }
}

TEST_CASE("piola map: identity and scaling") {
  SubMesh mesh;
  mesh.vertices = {{0, 0}, {1, 0}, {0, 1}};
  mesh.triangles = {{0, 1, 2}};
  mesh.boundary_edges = {};
  ElementGeometry geom = element_geometry(mesh, 0);
  Point2 value;
  double div;
  piola_map(geom, {0.3, 0.7}, 2.0, value, div);
  CHECK(value.x == doctest::Approx(0.3));
  CHECK(value.y == doctest::Approx(0.7));
  CHECK(div == doctest::Approx(2.0));

  SubMesh scaled;
  scaled.vertices = {{0, 0}, {2, 0}, {0, 2}};
  scaled.triangles = {{0, 1, 2}};
  ElementGeometry geom2 = element_geometry(scaled, 0);
  piola_map(geom2, {0.3, 0.7}, 2.0, value, div);
  CHECK(geom2.det == doctest::Approx(4.0));
  CHECK(value.x == doctest::Approx(0.15));
  CHECK(value.y == doctest::Approx(0.35));
  CHECK(div == doctest::Approx(0.5));
}

TEST_CASE("RT0 interpolation reproduces constant fields pointwise") {
  SubMesh mesh = refined_fluid_mesh(3);
  DofMap rt0 = build_space(mesh, ElementKind::RT0, true);
  auto field = [](Point2, double) -> Point2 { return {1.0, 0.0}; };
  std::vector<double> coeffs = interpolate(rt0, field, 0.0);
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> unit(0.1, 0.8);
  for (int t = 0; t < mesh.num_triangles(); t += 3) {
    ElementGeometry geom = element_geometry(mesh, t);
    const double xr = unit(rng), yr = unit(rng) * (0.9 - xr);
    Point2 p = geom.map(xr, yr);
    Point2 value = eval_vector(rt0, coeffs, t, p);
    CHECK(value.x == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(value.y == doctest::Approx(0.0).epsilon(1e-12).scale(1.0));
  }
}

TEST_CASE("RT normal traces are continuous across interior edges") {
  SubMesh mesh = refined_fluid_mesh(2);
  for (ElementKind kind : {ElementKind::RT0, ElementKind::RT1}) {
    DofMap map = build_space(mesh, kind, true);
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    std::vector<double> coeffs(map.total_dofs);
    for (double& c : coeffs) c = coef(rng);
    int checked = 0;
    for (int e = 0; e < map.num_edges(); ++e) {
      const auto owners = map.edge_owners[e];
      if (owners[2] < 0) continue;  // boundary edge
      Point2 a = mesh.vertices[map.edges[e][0]], b = mesh.vertices[map.edges[e][1]];
      Point2 t = b - a;
      Point2 n{t.y, -t.x};
      n = (1.0 / norm(n)) * n;
      for (double s : {0.2, 0.5, 0.8}) {
        Point2 p = a + s * (b - a);
        const double left = dot(eval_vector(map, coeffs, owners[0], p), n);
        const double right = dot(eval_vector(map, coeffs, owners[2], p), n);
        CHECK(left == doctest::Approx(right).epsilon(1e-12));
      }
      ++checked;
    }
    CHECK(checked > 0);
  }
}

TEST_CASE("eval_field basics") {
  SubMesh mesh = refined_fluid_mesh(2);
  DofMap p1 = build_space(mesh, ElementKind::P1, false);
  std::vector<double> zero(p1.total_dofs, 0.0);
  CHECK(eval_scalar(p1, zero, 0, mesh.centroid(0)) == 0.0);

  auto linear = [](Point2 p, double) { return p.x; };
  std::vector<double> coeffs = interpolate_scalar(p1, linear, 0.0);
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> unit(0.05, 0.9);
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    ElementGeometry geom = element_geometry(mesh, t);
    const double xr = unit(rng), yr = unit(rng) * (0.9 - xr);
    Point2 p = geom.map(xr, yr);
    CHECK(eval_scalar(p1, coeffs, t, p) == doctest::Approx(p.x).epsilon(1e-14));
  }

  DofMap p2 = build_space(mesh, ElementKind::P2, false);
  auto quadratic = [](Point2 p, double) { return p.x * p.x; };
  std::vector<double> c2 = interpolate_scalar(p2, quadratic, 0.0);
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    ElementGeometry geom = element_geometry(mesh, t);
    const double xr = unit(rng), yr = unit(rng) * (0.9 - xr);
    Point2 p = geom.map(xr, yr);
    CHECK(eval_scalar(p2, c2, t, p) == doctest::Approx(p.x * p.x).epsilon(1e-13));
    Point2 g = eval_scalar_grad(p2, c2, t, p);
    CHECK(g.x == doctest::Approx(2 * p.x).epsilon(1e-12));
    CHECK(g.y == doctest::Approx(0.0).epsilon(1e-12).scale(1.0));
  }

  CHECK_THROWS(eval_scalar(p1, coeffs, 0, Point2{10.0, 10.0}));
}

TEST_CASE("essential bc: nodal values") {
  SubMesh mesh = unit_square_mesh();
  DofMap vel = build_space(mesh, ElementKind::P1, true);
  // one tagged edge: retag bottom edge only
  mesh.boundary_edges[0].tag = BoundaryTag::FInlet;
  const BoundaryTag tags[] = {BoundaryTag::FInlet};
  EssentialBc bc = essential_bc(vel, tags);
  CHECK(bc.entries.size() == 4);  // 2 vertices x 2 components
  set_bc_values(bc, vel, [](Point2, double) -> Point2 { return {1.0, 0.0}; }, 0.0);
  int x_ones = 0, y_zeros = 0;
  for (std::size_t i = 0; i < bc.entries.size(); ++i) {
    if (bc.entries[i].comp == 0 && bc.values[i] == doctest::Approx(1.0)) ++x_ones;
    if (bc.entries[i].comp == 1 && bc.values[i] == doctest::Approx(0.0)) ++y_zeros;
  }
  CHECK(x_ones == 2);
  CHECK(y_zeros == 2);

  // zero function -> zero values
  set_bc_values(bc, vel, VectorFn{}, 0.0);
  SUBCASE("null function leaves zeros") {
    for (double v : bc.values) CHECK(v == 0.0);
  }
}

TEST_CASE("essential bc: RT edge moments against an analytic oracle") {
  SubMesh mesh;
  mesh.vertices = {{0, 0}, {1, 0}, {0, 1}};
  mesh.triangles = {{0, 1, 2}};
  mesh.boundary_edges = {{0, 1, BoundaryTag::GammaPN},
                         {1, 2, BoundaryTag::GammaPD},
                         {2, 0, BoundaryTag::GammaPD}};
  DofMap rt0 = build_space(mesh, ElementKind::RT0, true);
  const BoundaryTag tags[] = {BoundaryTag::GammaPN};
  EssentialBc bc = essential_bc(rt0, tags);
  REQUIRE(bc.entries.size() == 1);
  // g = (0,-x): on the bottom edge, outward normal (0,-1), so g.n = x and
  // the flux dof is the analytic moment int_0^1 x dx = 1/2.
  set_bc_values(bc, rt0, [](Point2 p, double) -> Point2 { return {0.0, -p.x}; }, 0.0);
  CHECK(bc.values[0] == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("multiplier space dimension") {
  CoupledMesh mesh = build_rectangle_coupled_mesh(0, 1, -1, 1, 0.0, 5, 2, 2);
  MultiplierSpace m0 = build_multiplier_space(mesh, 0);
  MultiplierSpace m1 = build_multiplier_space(mesh, 1);
  CHECK(m0.total == 5);
  CHECK(m1.total == 10);
  CHECK_THROWS(build_multiplier_space(mesh, 2));
}
