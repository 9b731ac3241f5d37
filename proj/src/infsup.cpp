#include "fpsi/infsup.hpp"

#include <stdexcept>

namespace fpsi {

namespace {

// Remove constrained columns (and rows, for square norm blocks) by renumbering.
std::vector<int> keep_index(int n, const std::vector<char>& constrained) {
  std::vector<int> index(n, -1);
  int next = 0;
  for (int i = 0; i < n; ++i)
    if (!constrained[i]) index[i] = next++;
  return index;
}

SparseMatrix compress(const SparseBlock& block, const std::vector<int>& row_index, int nrows,
                      const std::vector<int>& col_index, int ncols) {
  std::vector<Triplet> trip;
  trip.reserve(block.triplets.size());
  for (const auto& t : block.triplets) {
    const int r = row_index.empty() ? t.row() : row_index[t.row()];
    const int c = col_index.empty() ? t.col() : col_index[t.col()];
    if (r >= 0 && c >= 0) trip.emplace_back(r, c, t.value());
  }
  return SparseMatrix(nrows, ncols, trip);
}

}  // namespace

double stokes_infsup_estimate(const SubMesh& mesh, ElementKind velocity_kind,
                              ElementKind pressure_kind,
                              std::span<const BoundaryTag> essential_tags) {
  DofMap vel = build_space(mesh, velocity_kind, true);
  DofMap pres = build_space(mesh, pressure_kind, false);

  std::vector<char> constrained(vel.total_dofs, 0);
  EssentialBc bc = essential_bc(vel, essential_tags);
  for (const auto& entry : bc.entries) constrained[entry.dof] = 1;
  std::vector<int> col_index = keep_index(vel.total_dofs, constrained);
  int nv = 0;
  for (int i = 0; i < vel.total_dofs; ++i) nv += !constrained[i];

  SparseBlock B = assemble_b(vel, pres);
  SparseBlock grad = assemble_gradgrad(vel, 1.0);
  SparseBlock mass = assemble_mass(vel, 1.0);
  grad.triplets.insert(grad.triplets.end(), mass.triplets.begin(), mass.triplets.end());

  SparseMatrix Bc = compress(B, {}, pres.total_dofs, col_index, nv);
  SparseMatrix Xc = compress(grad, col_index, nv, col_index, nv);
  SparseMatrix W(pres.total_dofs, pres.total_dofs, assemble_mass(pres, 1.0).triplets);
  return smallest_singular_estimate(Bc, Xc, W);
}

double darcy_multiplier_infsup_estimate(const FemSystem& sys,
                                        std::span<const BoundaryTag> essential_up_tags) {
  std::vector<char> constrained(sys.up.total_dofs, 0);
  EssentialBc bc = essential_bc(sys.up, essential_up_tags);
  for (const auto& entry : bc.entries) constrained[entry.dof] = 1;
  std::vector<int> col_index = keep_index(sys.up.total_dofs, constrained);
  int nv = 0;
  for (int i = 0; i < sys.up.total_dofs; ++i) nv += !constrained[i];

  const int nw = sys.pp.total_dofs + sys.lam.total;
  SparseBlock B = assemble_b(sys.up, sys.pp);  // rows 0..npp-1
  BGammaBlocks bg = assemble_bgamma(sys);
  for (const auto& t : bg.p.triplets)
    B.triplets.emplace_back(sys.pp.total_dofs + t.row(), t.col(), t.value());
  B.rows = nw;

  SparseBlock X = assemble_hdiv_norm(sys.up);

  SparseBlock W = assemble_mass(sys.pp, 1.0);
  SparseBlock Ml = assemble_multiplier_mass(sys);
  for (const auto& t : Ml.triplets)
    W.triplets.emplace_back(sys.pp.total_dofs + t.row(), sys.pp.total_dofs + t.col(), t.value());
  W.rows = W.cols = nw;

  SparseMatrix Bc = compress(B, {}, nw, col_index, nv);
  SparseMatrix Xc = compress(X, col_index, nv, col_index, nv);
  SparseMatrix Wc(nw, nw, W.triplets);
  return smallest_singular_estimate(Bc, Xc, Wc);
}

InfSupEstimates infsup_check(const CoupledMesh& mesh, ElementFamily family) {
  FemSystem sys = build_fem_system(mesh, family);
  InfSupEstimates out;
  const BoundaryTag fluid_tags[] = {BoundaryTag::GammaF};
  out.beta_f = stokes_infsup_estimate(mesh.fluid, sys.uf.kind, sys.pf.kind, fluid_tags);
  const BoundaryTag up_tags[] = {BoundaryTag::GammaPN, BoundaryTag::PInlet, BoundaryTag::POutlet};
  out.beta_p = darcy_multiplier_infsup_estimate(sys, up_tags);
  return out;
}

}  // namespace fpsi
