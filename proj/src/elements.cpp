#include "fpsi/elements.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

#include "fpsi/quadrature.hpp"

namespace fpsi {

const char* to_string(ElementKind kind) {
  switch (kind) {
    case ElementKind::P0: return "P0";
    case ElementKind::P1: return "P1";
    case ElementKind::P1Bubble: return "P1Bubble";
    case ElementKind::P2: return "P2";
    case ElementKind::P1dc: return "P1dc";
    case ElementKind::RT0: return "RT0";
    case ElementKind::RT1: return "RT1";
  }
  return "?";
}

bool is_hdiv(ElementKind kind) { return kind == ElementKind::RT0 || kind == ElementKind::RT1; }

int polynomial_degree(ElementKind kind) {
  switch (kind) {
    case ElementKind::P0: return 0;
    case ElementKind::P1: return 1;
    case ElementKind::P1Bubble: return 3;
    case ElementKind::P2: return 2;
    case ElementKind::P1dc: return 1;
    case ElementKind::RT0: return 1;
    case ElementKind::RT1: return 2;
  }
  return 0;
}

int local_dof_count(ElementKind kind) {
  switch (kind) {
    case ElementKind::P0: return 1;
    case ElementKind::P1: return 3;
    case ElementKind::P1Bubble: return 4;
    case ElementKind::P2: return 6;
    case ElementKind::P1dc: return 3;
    case ElementKind::RT0: return 3;
    case ElementKind::RT1: return 8;
  }
  return 0;
}

ScalarElement::ScalarElement(ElementKind k) : kind(k), ndof(local_dof_count(k)) {
  if (is_hdiv(k)) throw std::invalid_argument("ScalarElement: RT kind is not scalar");
}

void ScalarElement::eval(double x, double y, double* v) const {
  const double l0 = 1.0 - x - y, l1 = x, l2 = y;
  switch (kind) {
    case ElementKind::P0:
      v[0] = 1.0;
      return;
    case ElementKind::P1:
    case ElementKind::P1dc:
      v[0] = l0;
      v[1] = l1;
      v[2] = l2;
      return;
    case ElementKind::P1Bubble:
      v[0] = l0;
      v[1] = l1;
      v[2] = l2;
      v[3] = 27.0 * l0 * l1 * l2;
      return;
    case ElementKind::P2:
      v[0] = l0 * (2.0 * l0 - 1.0);
      v[1] = l1 * (2.0 * l1 - 1.0);
      v[2] = l2 * (2.0 * l2 - 1.0);
      v[3] = 4.0 * l1 * l2;  // edge 0 (v1-v2)
      v[4] = 4.0 * l2 * l0;  // edge 1 (v2-v0)
      v[5] = 4.0 * l0 * l1;  // edge 2 (v0-v1)
      return;
    default:
      throw std::logic_error("ScalarElement::eval");
  }
}

void ScalarElement::grad(double x, double y, double* gx, double* gy) const {
  const double l0 = 1.0 - x - y, l1 = x, l2 = y;
  // grad l0 = (-1,-1), grad l1 = (1,0), grad l2 = (0,1)
  switch (kind) {
    case ElementKind::P0:
      gx[0] = gy[0] = 0.0;
      return;
    case ElementKind::P1:
    case ElementKind::P1dc:
      gx[0] = -1.0;
      gy[0] = -1.0;
      gx[1] = 1.0;
      gy[1] = 0.0;
      gx[2] = 0.0;
      gy[2] = 1.0;
      return;
    case ElementKind::P1Bubble:
      gx[0] = -1.0;
      gy[0] = -1.0;
      gx[1] = 1.0;
      gy[1] = 0.0;
      gx[2] = 0.0;
      gy[2] = 1.0;
      gx[3] = 27.0 * (-l1 * l2 + l0 * l2);
      gy[3] = 27.0 * (-l1 * l2 + l0 * l1);
      return;
    case ElementKind::P2:
      gx[0] = -(4.0 * l0 - 1.0);
      gy[0] = -(4.0 * l0 - 1.0);
      gx[1] = 4.0 * l1 - 1.0;
      gy[1] = 0.0;
      gx[2] = 0.0;
      gy[2] = 4.0 * l2 - 1.0;
      gx[3] = 4.0 * l2;
      gy[3] = 4.0 * l1;
      gx[4] = -4.0 * l2;
      gy[4] = 4.0 * (l0 - l2);
      gx[5] = 4.0 * (l0 - l1);
      gy[5] = -4.0 * l1;
      return;
    default:
      throw std::logic_error("ScalarElement::grad");
  }
}

namespace {

// Monomial basis spanning RT1 = (P1)^2 + x*P1tilde:
//   m0=(1,0) m1=(0,1) m2=(x,0) m3=(y,0) m4=(0,x) m5=(0,y) m6=(x^2,xy) m7=(xy,y^2)
void rt1_monomials(double x, double y, double* vx, double* vy) {
  vx[0] = 1;
  vy[0] = 0;
  vx[1] = 0;
  vy[1] = 1;
  vx[2] = x;
  vy[2] = 0;
  vx[3] = y;
  vy[3] = 0;
  vx[4] = 0;
  vy[4] = x;
  vx[5] = 0;
  vy[5] = y;
  vx[6] = x * x;
  vy[6] = x * y;
  vx[7] = x * y;
  vy[7] = y * y;
}

void rt1_monomial_div(double x, double y, double* d) {
  d[0] = 0;
  d[1] = 0;
  d[2] = 1;
  d[3] = 0;
  d[4] = 0;
  d[5] = 1;
  d[6] = 3 * x;
  d[7] = 3 * y;
}

// Dof functionals applied to the monomials; inverted once to get the dual basis.
std::array<std::array<double, 8>, 8> rt1_coefficients() {
  const double verts[3][2] = {{0, 0}, {1, 0}, {0, 1}};
  Eigen::Matrix<double, 8, 8> dof = Eigen::Matrix<double, 8, 8>::Zero();

  std::vector<double> gp, gw;
  gauss_legendre_unit(4, gp, gw);
  for (int k = 0; k < 3; ++k) {
    const double* a = verts[(k + 1) % 3];
    const double* b = verts[(k + 2) % 3];
    const double ex = b[0] - a[0], ey = b[1] - a[1];
    const double len = std::hypot(ex, ey);
    const double nx = ey / len, ny = -ex / len;  // traversal rotated by -90
    for (std::size_t q = 0; q < gp.size(); ++q) {
      const double s = gp[q];
      const double x = a[0] + s * ex, y = a[1] + s * ey;
      double vx[8], vy[8];
      rt1_monomials(x, y, vx, vy);
      for (int j = 0; j < 8; ++j) {
        const double vn = vx[j] * nx + vy[j] * ny;
        dof(2 * k, j) += gw[q] * len * vn;
        dof(2 * k + 1, j) += gw[q] * len * vn * (2.0 * s - 1.0);
      }
    }
  }
  const QuadratureRule tri = triangle_rule(4);
  for (const auto& node : tri.nodes) {
    double vx[8], vy[8];
    rt1_monomials(node.x, node.y, vx, vy);
    for (int j = 0; j < 8; ++j) {
      dof(6, j) += node.w * vx[j];
      dof(7, j) += node.w * vy[j];
    }
  }

  Eigen::Matrix<double, 8, 8> coeff = dof.fullPivLu().inverse();
  std::array<std::array<double, 8>, 8> out{};
  for (int m = 0; m < 8; ++m)
    for (int j = 0; j < 8; ++j) out[m][j] = coeff(m, j);  // out[monomial][basis]
  return out;
}

}  // namespace

HdivElement::HdivElement(ElementKind k) : kind(k), ndof(local_dof_count(k)) {
  if (!is_hdiv(k)) throw std::invalid_argument("HdivElement: kind is not H(div)");
  if (kind == ElementKind::RT1) {
    static const auto coeff = rt1_coefficients();
    coeff_ = coeff;
  }
}

void HdivElement::eval(double x, double y, double* vx, double* vy) const {
  if (kind == ElementKind::RT0) {
    // basis k = x - v_k, dual to unit flux over edge k
    vx[0] = x;
    vy[0] = y;
    vx[1] = x - 1.0;
    vy[1] = y;
    vx[2] = x;
    vy[2] = y - 1.0;
    return;
  }
  double mx[8], my[8];
  rt1_monomials(x, y, mx, my);
  for (int j = 0; j < 8; ++j) {
    double sx = 0.0, sy = 0.0;
    for (int m = 0; m < 8; ++m) {
      sx += coeff_[m][j] * mx[m];
      sy += coeff_[m][j] * my[m];
    }
    vx[j] = sx;
    vy[j] = sy;
  }
}

void HdivElement::div(double x, double y, double* d) const {
  if (kind == ElementKind::RT0) {
    d[0] = d[1] = d[2] = 2.0;
    return;
  }
  double md[8];
  rt1_monomial_div(x, y, md);
  for (int j = 0; j < 8; ++j) {
    double s = 0.0;
    for (int m = 0; m < 8; ++m) s += coeff_[m][j] * md[m];
    d[j] = s;
  }
}

}  // namespace fpsi
