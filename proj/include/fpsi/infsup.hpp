#pragma once

#include <span>

#include "fpsi/assembly.hpp"

namespace fpsi {

/// Discrete Stokes inf-sup constant estimate for a velocity/pressure pair on
/// one submesh, with essential velocity dofs on the tagged boundaries removed.
/// Velocity is measured in H1, pressure in L2. Dense computation.
double stokes_infsup_estimate(const SubMesh& mesh, ElementKind velocity_kind,
                              ElementKind pressure_kind,
                              std::span<const BoundaryTag> essential_tags);

/// Estimate for the mixed Darcy + multiplier pairing: the constraint couples
/// (w_p, mu_h) against v_p in H(div), with rows [b_p; <v.n_p, mu>].
double darcy_multiplier_infsup_estimate(const FemSystem& sys,
                                        std::span<const BoundaryTag> essential_up_tags);

struct InfSupEstimates {
  double beta_f = 0.0;
  double beta_p = 0.0;
};

/// Both estimates for a coupled mesh and element family (coarse meshes only).
InfSupEstimates infsup_check(const CoupledMesh& mesh, ElementFamily family);

}  // namespace fpsi
