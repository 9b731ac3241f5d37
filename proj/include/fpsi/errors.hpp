#pragma once

#include <string>

#include "fpsi/mms.hpp"
#include "fpsi/stepper.hpp"

namespace fpsi {

/// Relative discrete-in-time error norms, one per reported column.
struct ErrorNorms {
  double uf_l2H1 = 0.0;
  double pf_l2L2 = 0.0;
  double up_l2L2 = 0.0;
  double divup_l2L2 = 0.0;
  double pp_linfL2 = 0.0;
  double eta_linfH1 = 0.0;
  double lam_l2L2 = 0.0;
  bool absolute_fallback = false;  // set if an exact norm vanished

  std::array<double, 7> as_array() const {
    return {uf_l2H1, pf_l2L2, up_l2L2, divup_l2L2, pp_linfL2, eta_linfH1, lam_l2L2};
  }
  static const char* column_name(int i);
};

/// log2(e_coarse / e_fine); both must be positive.
double convergence_rate(double e_coarse, double e_fine);

struct ErrorTable {
  std::vector<double> h;
  std::vector<ErrorNorms> errors;

  /// Rates between consecutive rows; rates[i] pairs rows i and i+1.
  std::vector<std::array<double, 7>> rates() const;
  std::string to_csv() const;
};

/// Streaming accumulator for the seven norms over a time loop.
class ErrorAccumulator {
 public:
  ErrorAccumulator(const FemSystem& sys, const ManufacturedSolution& ms);

  void add_step(const TimeState& state);
  ErrorNorms finalize(double dt) const;

 private:
  const FemSystem& sys_;
  const ManufacturedSolution& ms_;
  QuadratureRule fluid_rule_, poro_rule_, edge_rule_;
  BasisTable uf_basis_, pf_basis_, up_basis_, pp_basis_, eta_basis_;
  // l2-in-time accumulators (error, exact)
  double uf_sq_ = 0, uf_ex_ = 0, pf_sq_ = 0, pf_ex_ = 0, up_sq_ = 0, up_ex_ = 0;
  double divup_sq_ = 0, divup_ex_ = 0, lam_sq_ = 0, lam_ex_ = 0;
  // linf-in-time accumulators
  double pp_max_ = 0, pp_ex_max_ = 0, eta_max_ = 0, eta_ex_max_ = 0;
};

struct MmsRunResult {
  ErrorNorms errors;
  std::vector<StepDiagnostics> series;
};

/// One manufactured-solution run on the given mesh: exact Dirichlet data for
/// u_f and eta on the exterior boundaries, natural pressure data for Darcy,
/// initial state interpolated from the exact solution.
MmsRunResult run_mms(const CoupledMesh& mesh, ElementFamily family,
                     const ManufacturedSolution& ms, const SolverConfig& config);

/// Space-only (single-time) relative errors of the dof interpolant, a
/// solver-independent approximation baseline.
ErrorNorms interpolation_errors(const FemSystem& sys, const ManufacturedSolution& ms, double t,
                                double dt_for_eta = 1e-3);

/// Errors and rates over a sequence of structured meshes of the unit-square
/// convergence geometry; cells = 1/h per unit length.
ErrorTable convergence_study(ElementFamily family, const std::vector<int>& cells_per_unit,
                             double dt, double T,
                             std::vector<MmsRunResult>* runs = nullptr);

}  // namespace fpsi
