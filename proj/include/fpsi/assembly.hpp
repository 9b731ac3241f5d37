#pragma once

#include <span>
#include <vector>

#include "fpsi/linalg.hpp"
#include "fpsi/mesh.hpp"
#include "fpsi/spaces.hpp"

namespace fpsi {

struct ProblemCoefficients {
  double rho_f = 1.0;     // fluid density
  double mu_f = 1.0;      // dynamic viscosity
  double rho_p = 1.0;     // poroelastic density
  double lambda_p = 1.0;  // Lame first parameter
  double mu_p = 1.0;      // Lame second parameter
  double alpha = 1.0;     // Biot-Willis coefficient
  double s0 = 1.0;        // storativity
  double K[2][2] = {{1.0, 0.0}, {0.0, 1.0}};  // permeability tensor
  double alpha_bjs = 1.0;  // slip friction coefficient
  double xi = 0.0;         // spring coefficient (arterial recoil term)

  void validate() const;  // throws std::invalid_argument on violation
  double k_min() const;
  double k_max() const;
};

struct SourceFunctions {
  VectorFn f_f;      // fluid body force
  VectorFn f_p;      // poroelastic body force
  ScalarSpaceFn q_p; // Darcy source
  ScalarSpaceFn q_f; // fluid mass source (manufactured solutions only)

  ScalarSpaceFn p_in;  // inflow pressure data: sigma_f n = -p_in n on inflow_tags
  std::vector<BoundaryTag> inflow_tags;

  ScalarSpaceFn p_p_natural;  // Darcy pressure data on natural boundaries
  std::vector<BoundaryTag> darcy_natural_tags;
};

enum class ElementFamily { LowerOrder, HigherOrder };

/// All discrete spaces for one coupled mesh plus monolithic block offsets,
/// field order (u_f, p_f, u_p, p_p, eta_p, lambda).
struct FemSystem {
  const CoupledMesh* mesh = nullptr;
  ElementFamily family = ElementFamily::LowerOrder;
  DofMap uf, pf, up, pp, eta;
  MultiplierSpace lam;
  int off_uf = 0, off_pf = 0, off_up = 0, off_pp = 0, off_eta = 0, off_lam = 0;
  int total = 0;
};

FemSystem build_fem_system(const CoupledMesh& mesh, ElementFamily family);

struct SparseBlock {
  int rows = 0, cols = 0;
  std::vector<Triplet> triplets;
};

/// Quadratic/bilinear form value v^T A u from a triplet block.
double block_value(const SparseBlock& block, std::span<const double> v,
                   std::span<const double> u);
std::vector<double> block_apply(const SparseBlock& block, std::span<const double> u);

// Volume forms. Vector H1 spaces are two-component scalar kinds.
SparseBlock assemble_af(const DofMap& uf, double mu_f);               // (2mu D(u),D(v))
SparseBlock assemble_divdiv(const DofMap& space, double lambda);      // (lam div u, div v)
SparseBlock assemble_apd(const DofMap& up, const ProblemCoefficients& coef);  // (mu_f K^-1 u, v)
SparseBlock assemble_ape(const DofMap& eta, const ProblemCoefficients& coef); // strain+div+spring
SparseBlock assemble_mass(const DofMap& space, double density);
SparseBlock assemble_gradgrad(const DofMap& space, double c);  // componentwise (c grad u, grad v)
SparseBlock assemble_hdiv_norm(const DofMap& up);              // (u,v) + (div u, div v)
SparseBlock assemble_b(const DofMap& v_space, const DofMap& w_space);  // -(div v, w), rows = w
SparseBlock assemble_convection(const DofMap& uf, std::span<const double> w_prev, double rho_f);

struct BjsBlocks {
  SparseBlock ff, fe, ef, ee;  // fe: trial displacement, test fluid velocity
};
BjsBlocks assemble_bjs(const FemSystem& sys, const ProblemCoefficients& coef);

struct BGammaBlocks {
  SparseBlock f, p, e;  // rows = multiplier dofs; columns per field
};
BGammaBlocks assemble_bgamma(const FemSystem& sys);

/// Multiplier L2(Gamma_fp) mass matrix (diagnostics and error norms).
SparseBlock assemble_multiplier_mass(const FemSystem& sys);

/// Body-force and natural-boundary linear functionals at time t, laid out in
/// the monolithic vector.
std::vector<double> assemble_rhs(const FemSystem& sys, const SourceFunctions& src, double t);

/// Constant-in-time blocks of the step system.
struct StepBlocks {
  SparseBlock Mf, Ms, Mp;                   // unit-density masses
  SparseBlock Af;                           // 2 mu_f D:D
  SparseBlock Ad;                           // mu_f K^-1
  SparseBlock Ae_strain, Ae_div, Ae_spring; // parts of a_p^e
  SparseBlock Bf;   // rows p_f, cols u_f
  SparseBlock Bp;   // rows p_p, cols u_p
  SparseBlock Bpe;  // rows p_p, cols eta
  BjsBlocks bjs;
  BGammaBlocks bg;
  SparseBlock Mlam;
};
StepBlocks assemble_constant_blocks(const FemSystem& sys, const ProblemCoefficients& coef);

struct PreviousState {
  std::span<const double> uf, pp, eta, eta_prev;
};

struct BlockSystem {
  SparseMatrix A;
  std::vector<double> rhs;
};

/// Backward-Euler step matrix and right-hand side. Essential rows/columns are
/// eliminated symmetrically: masked rows become identity with the prescribed
/// value on the right-hand side, and columns are moved to the right-hand side.
BlockSystem compose_step_system(const FemSystem& sys, const StepBlocks& blocks,
                                const SparseBlock& convection,
                                const ProblemCoefficients& coef, double dt,
                                const std::vector<double>& rhs_sources,
                                const PreviousState& prev,
                                const std::vector<char>& masked,
                                const std::vector<double>& bc_values);

/// Same composition without boundary-condition elimination (residual checks).
BlockSystem compose_step_system_raw(const FemSystem& sys, const StepBlocks& blocks,
                                    const SparseBlock& convection,
                                    const ProblemCoefficients& coef, double dt,
                                    const std::vector<double>& rhs_sources,
                                    const PreviousState& prev);

}  // namespace fpsi
