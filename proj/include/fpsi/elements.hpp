#pragma once

#include <array>

namespace fpsi {

enum class ElementKind { P0, P1, P1Bubble, P2, P1dc, RT0, RT1 };

const char* to_string(ElementKind kind);

/// True for the H(div) Raviart-Thomas kinds (intrinsically vector valued).
bool is_hdiv(ElementKind kind);

/// Polynomial degree of the local space (bubble counts as 3, used only for
/// quadrature-order selection).
int polynomial_degree(ElementKind kind);

/// Per-element dof count: scalar dofs for scalar kinds, vector dofs for RT.
int local_dof_count(ElementKind kind);

// Reference triangle: vertices (0,0), (1,0), (0,1). Local edge k joins
// vertices (k+1)%3 -> (k+2)%3 (the edge opposite vertex k), and the local
// edge normal is the traversal direction rotated by -90 degrees (outward for
// a positively oriented triangle).

/// Scalar reference element: basis values and gradients at a reference point.
struct ScalarElement {
  explicit ScalarElement(ElementKind kind);
  ElementKind kind;
  int ndof;
  void eval(double x, double y, double* values) const;
  void grad(double x, double y, double* gx, double* gy) const;
};

/// Raviart-Thomas reference element. Degrees of freedom:
///   RT0: flux over each local edge.
///   RT1: per edge, moments of the normal trace against {1, 2s-1}; plus the
///        two componentwise cell averages. Dof order: (e0 m0, e0 m1, e1 m0,
///        e1 m1, e2 m0, e2 m1, cell x, cell y).
struct HdivElement {
  explicit HdivElement(ElementKind kind);
  ElementKind kind;
  int ndof;
  void eval(double x, double y, double* vx, double* vy) const;
  void div(double x, double y, double* d) const;

 private:
  // RT1 coefficients over the monomial basis, dual to the dof functionals.
  std::array<std::array<double, 8>, 8> coeff_{};
};

}  // namespace fpsi
