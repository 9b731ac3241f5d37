#pragma once

#include <functional>
#include <span>
#include <vector>

#include "fpsi/elements.hpp"
#include "fpsi/mesh.hpp"
#include "fpsi/quadrature.hpp"

namespace fpsi {

using VectorFn = std::function<Point2(Point2, double)>;
using ScalarSpaceFn = std::function<double(Point2, double)>;

/// Affine map F(x) = origin + J*x from the reference triangle.
struct ElementGeometry {
  Point2 origin;
  double jac[2][2];
  double inv[2][2];
  double det = 0.0;

  Point2 map(double xr, double yr) const {
    return {origin.x + jac[0][0] * xr + jac[0][1] * yr,
            origin.y + jac[1][0] * xr + jac[1][1] * yr};
  }
  void inv_map(Point2 p, double& xr, double& yr) const {
    const double dx = p.x - origin.x, dy = p.y - origin.y;
    xr = inv[0][0] * dx + inv[0][1] * dy;
    yr = inv[1][0] * dx + inv[1][1] * dy;
  }
};

ElementGeometry element_geometry(const SubMesh& mesh, int tri);

/// Contravariant Piola transform of a reference value/divergence pair.
void piola_map(const ElementGeometry& geom, Point2 ref_value, double ref_div,
               Point2& phys_value, double& phys_div);

/// Global degree-of-freedom map for one finite element space on a submesh.
///
/// Scalar kinds with vector=true are two-component spaces with interleaved
/// numbering: global = 2*scalar_dof + component. RT kinds are intrinsically
/// vector valued; their edge dofs carry orientation signs so that normal
/// traces are continuous across elements.
struct DofMap {
  ElementKind kind = ElementKind::P1;
  bool vector = false;
  const SubMesh* mesh = nullptr;

  int scalar_dofs = 0;  // per-component count (RT: total)
  int total_dofs = 0;
  int ndof_local = 0;  // per-element scalar dofs (RT: total local)

  std::vector<int> elem_dofs;      // [tri*ndof_local + l] -> scalar-global dof
  std::vector<double> elem_signs;  // parallel; +1 except RT edge dofs

  // Global edge structures (shared with other spaces on the same mesh).
  std::vector<std::array<int, 2>> edges;  // vertex pairs, a < b
  std::vector<std::array<int, 3>> tri_edges;
  std::vector<std::array<int, 4>> edge_owners;  // {tri0, local0, tri1, local1}, -1 if absent
  std::vector<int> boundary_edge_ids;  // per mesh.boundary_edges entry

  int num_edges() const { return static_cast<int>(edges.size()); }
  std::pair<int, int> edge_owner(int e) const { return {edge_owners[e][0], edge_owners[e][1]}; }
  int components() const { return vector && !is_hdiv(kind) ? 2 : 1; }
  int global(int scalar_dof, int comp) const {
    return components() == 2 ? 2 * scalar_dof + comp : scalar_dof;
  }
};

DofMap build_space(const SubMesh& mesh, ElementKind kind, bool vector);

/// Reference basis tables at the points of a quadrature rule.
struct BasisTable {
  int ndof = 0;
  std::vector<double> val;      // [q*ndof + l], scalar kinds
  std::vector<double> gx, gy;   // scalar kinds
  std::vector<double> vx, vy;   // RT kinds
  std::vector<double> dv;       // RT kinds
};

BasisTable tabulate(ElementKind kind, const QuadratureRule& rule);
BasisTable tabulate_at(ElementKind kind, std::span<const Point2> ref_points);

/// Essential boundary constraint set: which dofs, plus enough entity data to
/// recompute prescribed values at any time.
struct EssentialBc {
  struct Entry {
    int dof = -1;   // global (vector-expanded)
    int comp = 0;
    Point2 node;    // nodal kinds
    int edge = -1;  // RT kinds: global edge id
    int moment = 0;
  };
  std::vector<Entry> entries;
  std::vector<double> values;  // parallel to entries
};

/// Collect dofs on boundary edges carrying one of the tags. For vector spaces
/// component selects one Cartesian component (-1 = both). RT spaces constrain
/// the normal-trace edge dofs.
EssentialBc essential_bc(const DofMap& map, std::span<const BoundaryTag> tags,
                         int component = -1);

/// Prescribed values from a vector-valued boundary function at time t
/// (nodal values, or edge moments of g.n for RT spaces).
void set_bc_values(EssentialBc& bc, const DofMap& map, const VectorFn& g, double t);

/// Interpolation by dof functionals.
std::vector<double> interpolate(const DofMap& map, const VectorFn& g, double t);
std::vector<double> interpolate_scalar(const DofMap& map, const ScalarSpaceFn& g, double t);

// Point evaluation inside a stated element (reference coordinates are
// recovered from the affine map; points outside by more than 1e-10 throw).
double eval_scalar(const DofMap& map, std::span<const double> coeffs, int tri, Point2 p);
Point2 eval_scalar_grad(const DofMap& map, std::span<const double> coeffs, int tri, Point2 p);
Point2 eval_vector(const DofMap& map, std::span<const double> coeffs, int tri, Point2 p);
double eval_vector_div(const DofMap& map, std::span<const double> coeffs, int tri, Point2 p);

/// Lagrange multiplier space on the interface: one discontinuous polynomial
/// of the given degree per interface edge, matching the normal-trace space of
/// the Darcy velocity.
struct MultiplierSpace {
  int degree = 0;
  int per_edge = 1;
  int total = 0;
  const CoupledMesh* mesh = nullptr;

  int dof(int edge, int m) const { return edge * per_edge + m; }
  /// Basis in the edge arc parameter s in [0,1] (fluid_v0 -> fluid_v1).
  static double basis(int m, double s) { return m == 0 ? 1.0 : 2.0 * s - 1.0; }
};

MultiplierSpace build_multiplier_space(const CoupledMesh& mesh, int degree);

}  // namespace fpsi
