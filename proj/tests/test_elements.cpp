#include <doctest.h>

#include <random>

#include "fpsi/elements.hpp"
#include "fpsi/quadrature.hpp"

using namespace fpsi;

namespace {

// Apply the dof functionals of a scalar kind to its own basis.
// Nodes: P1/P1dc vertices; P2 vertices+midpoints; P0 centroid;
// P1Bubble vertices plus the centroid-minus-vertex-mean functional.
void check_scalar_duality(ElementKind kind) {
  ScalarElement elem(kind);
  const double verts[3][2] = {{0, 0}, {1, 0}, {0, 1}};
  std::vector<std::array<double, 2>> nodes;
  switch (kind) {
    case ElementKind::P0:
      nodes = {{1.0 / 3, 1.0 / 3}};
      break;
    case ElementKind::P1:
    case ElementKind::P1dc:
      nodes = {{0, 0}, {1, 0}, {0, 1}};
      break;
    case ElementKind::P2:
      nodes = {{0, 0}, {1, 0}, {0, 1}, {0.5, 0.5}, {0, 0.5}, {0.5, 0}};
      break;
    case ElementKind::P1Bubble:
      nodes = {{0, 0}, {1, 0}, {0, 1}};
      break;
    default:
      return;
  }
  std::vector<double> values(elem.ndof);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    elem.eval(nodes[i][0], nodes[i][1], values.data());
    for (int j = 0; j < elem.ndof; ++j)
      CHECK(values[j] == doctest::Approx(i == static_cast<std::size_t>(j) ? 1.0 : 0.0)
                             .epsilon(1e-12)
                             .scale(1.0));
  }
  if (kind == ElementKind::P1Bubble) {
    // bubble functional: value at centroid minus vertex mean
    std::vector<double> center(elem.ndof), vertex_vals(elem.ndof);
    elem.eval(1.0 / 3, 1.0 / 3, center.data());
    for (int j = 0; j < elem.ndof; ++j) {
      double mean = 0.0;
      for (int v = 0; v < 3; ++v) {
        elem.eval(verts[v][0], verts[v][1], vertex_vals.data());
        mean += vertex_vals[j] / 3.0;
      }
      CHECK(center[j] - mean == doctest::Approx(j == 3 ? 1.0 : 0.0).epsilon(1e-12).scale(1.0));
    }
  }
}

// Edge-moment and interior dof functionals applied to the RT basis.
void check_hdiv_duality(ElementKind kind) {
  HdivElement elem(kind);
  const double verts[3][2] = {{0, 0}, {1, 0}, {0, 1}};
  const int per_edge = kind == ElementKind::RT0 ? 1 : 2;
  std::vector<double> gp, gw;
  gauss_legendre_unit(4, gp, gw);
  std::vector<double> vx(elem.ndof), vy(elem.ndof);
  for (int k = 0; k < 3; ++k) {
    const double* a = verts[(k + 1) % 3];
    const double* b = verts[(k + 2) % 3];
    const double ex = b[0] - a[0], ey = b[1] - a[1];
    const double len = std::hypot(ex, ey);
    const double nx = ey / len, ny = -ex / len;
    for (int m = 0; m < per_edge; ++m) {
      for (int j = 0; j < elem.ndof; ++j) {
        double moment = 0.0;
        for (std::size_t q = 0; q < gp.size(); ++q) {
          elem.eval(a[0] + gp[q] * ex, a[1] + gp[q] * ey, vx.data(), vy.data());
          const double poly = (m == 0) ? 1.0 : 2.0 * gp[q] - 1.0;
          moment += gw[q] * len * (vx[j] * nx + vy[j] * ny) * poly;
        }
        const int dof = per_edge * k + m;
        CHECK(moment == doctest::Approx(dof == j ? 1.0 : 0.0).epsilon(1e-12).scale(1.0));
      }
    }
  }
  if (kind == ElementKind::RT1) {
    const QuadratureRule rule = triangle_rule(4);
    for (int c = 0; c < 2; ++c) {
      for (int j = 0; j < elem.ndof; ++j) {
        double moment = 0.0;
        for (const auto& node : rule.nodes) {
          elem.eval(node.x, node.y, vx.data(), vy.data());
          moment += node.w * (c == 0 ? vx[j] : vy[j]);
        }
        CHECK(moment == doctest::Approx(6 + c == j ? 1.0 : 0.0).epsilon(1e-12).scale(1.0));
      }
    }
  }
}

}  // namespace

TEST_CASE("scalar element duality") {
  check_scalar_duality(ElementKind::P0);
  check_scalar_duality(ElementKind::P1);
  check_scalar_duality(ElementKind::P1dc);
  check_scalar_duality(ElementKind::P2);
  check_scalar_duality(ElementKind::P1Bubble);
}

TEST_CASE("H(div) element duality") {
  check_hdiv_duality(ElementKind::RT0);
  check_hdiv_duality(ElementKind::RT1);
}

TEST_CASE("partition of unity for Lagrange bases") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (ElementKind kind : {ElementKind::P1, ElementKind::P2}) {
    ScalarElement elem(kind);
    std::vector<double> values(elem.ndof);
    for (int trial = 0; trial < 20; ++trial) {
      double x = unit(rng), y = unit(rng) * (1.0 - x);
      elem.eval(x, y, values.data());
      double sum = 0.0;
      for (double v : values) sum += v;
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-13));
    }
  }
}

TEST_CASE("RT0 closed form") {
  HdivElement elem(ElementKind::RT0);
  double vx[3], vy[3], dv[3];
  elem.eval(0.3, 0.2, vx, vy);
  elem.div(0.3, 0.2, dv);
  CHECK(vx[0] == doctest::Approx(0.3));
  CHECK(vy[0] == doctest::Approx(0.2));
  CHECK(vx[1] == doctest::Approx(-0.7));
  CHECK(vy[2] == doctest::Approx(-0.8));
  for (int k = 0; k < 3; ++k) CHECK(dv[k] == doctest::Approx(2.0));
}

TEST_CASE("gradients are consistent with finite differences") {
  std::mt19937 rng(99);
  std::uniform_real_distribution<double> unit(0.05, 0.9);
  const double h = 1e-6;
  for (ElementKind kind : {ElementKind::P1, ElementKind::P1Bubble, ElementKind::P2}) {
    ScalarElement elem(kind);
    std::vector<double> vp(elem.ndof), vm(elem.ndof), gx(elem.ndof), gy(elem.ndof);
    for (int trial = 0; trial < 10; ++trial) {
      double x = unit(rng), y = unit(rng) * (0.95 - x);
      elem.grad(x, y, gx.data(), gy.data());
      elem.eval(x + h, y, vp.data());
      elem.eval(x - h, y, vm.data());
      for (int j = 0; j < elem.ndof; ++j)
        CHECK(gx[j] == doctest::Approx((vp[j] - vm[j]) / (2 * h)).epsilon(1e-6).scale(1.0));
      elem.eval(x, y + h, vp.data());
      elem.eval(x, y - h, vm.data());
      for (int j = 0; j < elem.ndof; ++j)
        CHECK(gy[j] == doctest::Approx((vp[j] - vm[j]) / (2 * h)).epsilon(1e-6).scale(1.0));
    }
  }
}
