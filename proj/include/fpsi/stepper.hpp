#pragma once

#include <functional>
#include <vector>

#include "fpsi/assembly.hpp"

namespace fpsi {

/// Discrete solution at time t_n. eta_prev holds the displacement at t_{n-1}
/// for the second backward difference; it is zero at n = 0.
struct TimeState {
  double t = 0.0;
  int n = 0;
  std::vector<double> uf, pf, up, pp, eta, lam;
  std::vector<double> eta_prev;

  static TimeState zero(const FemSystem& sys);
};

/// Per-step energy/dissipation terms and equation residuals.
struct StepDiagnostics {
  double t = 0.0;
  double uf_l2_sq = 0.0;         // ||u_f||^2
  double Duf_l2_sq = 0.0;        // ||D(u_f)||^2
  double dteta_l2_sq = 0.0;      // ||d_t eta||^2
  double strain_energy = 0.0;    // 2 mu_p ||D(eta)||^2
  double div_energy = 0.0;       // lambda_p ||div eta||^2
  double spring_energy = 0.0;    // xi ||eta||^2
  double pp_l2_sq = 0.0;         // ||p_p||^2
  double upK_l2_sq = 0.0;        // ||K^{-1/2} u_p||^2
  double bjs_seminorm_sq = 0.0;  // |u_f - d_t eta|^2_BJS
  double lam_l2_sq = 0.0;        // ||lambda||^2_{L2(Gamma_fp)}
  double residual_mass = 0.0;       // l2 residual of the mass-balance rows
  double residual_interface = 0.0;  // l2 residual of the interface rows
  double rhs_norm = 0.0;
  double solver_residual = 0.0;

  double ape_energy() const { return strain_energy + div_energy + spring_energy; }
};

struct SolverConfig {
  double dt = 1e-2;
  double T = 1.0;
  double solver_rtol = 1e-9;
  int output_every = 1;

  void validate() const;
  int num_steps() const;
};

/// Essential constraints per constrained field; value functions may be null
/// (homogeneous). Values are recomputed at every time level.
struct BoundaryConditions {
  EssentialBc uf;
  VectorFn uf_fn;
  EssentialBc eta;
  VectorFn eta_fn;
  EssentialBc up;
  VectorFn up_fn;
};

class TimeStepper {
 public:
  TimeStepper(const FemSystem& sys, const ProblemCoefficients& coef, const SourceFunctions& src,
              BoundaryConditions bcs, SolverConfig config);

  /// Advance one backward-Euler step; the state is updated in place.
  StepDiagnostics step(TimeState& state);

  using Observer = std::function<void(const TimeState&, const StepDiagnostics&)>;

  /// Run num_steps() steps from the given state.
  std::vector<StepDiagnostics> run(TimeState& state, const std::vector<Observer>& observers = {});

  const StepBlocks& blocks() const { return blocks_; }
  const SolverConfig& config() const { return config_; }

  /// Diagnostics of a state without stepping (initial-energy reporting).
  StepDiagnostics measure(const TimeState& state) const;

 private:
  const FemSystem& sys_;
  ProblemCoefficients coef_;
  SourceFunctions src_;
  BoundaryConditions bcs_;
  SolverConfig config_;
  StepBlocks blocks_;
  std::vector<char> masked_;
  LuSolver solver_;
};

struct SmallDataReport {
  std::vector<double> C1, C2;  // C1[j], C2[j] at t_j, j = 1..N
  double C4 = 0.0;
  std::vector<double> lhs;  // per step n = 0..N-1
  double rhs = 0.0;         // mu_f^3 / (4 rho_f^2 S_f^4 K_f^6)
  bool satisfied = false;
};

/// Discrete small-data condition with user-supplied embedding constants.
SmallDataReport small_data_check(const FemSystem& sys, const SourceFunctions& src,
                                 const ProblemCoefficients& coef, const SolverConfig& config,
                                 double S_f, double K_f, double beta_p);

struct EnergyReport {
  double max_uf_energy = 0.0;       // rho_f/2 max ||u_f||^2
  double sum_Duf = 0.0;             // 3 mu_f dt sum ||D(u_f)||^2
  double sum_bjs = 0.0;             // 2 dt sum |.|^2_BJS
  double max_dteta_energy = 0.0;    // rho_p/2 max ||d_t eta||^2
  double max_elastic_energy = 0.0;  // max (2mu_p||D||^2 + lam_p||div||^2 + xi||eta||^2)
  double max_pp_storage = 0.0;      // s0 max ||p_p||^2
  double sum_upK = 0.0;             // dt sum ||K^{-1/2}u_p||^2
  double sum_pp = 0.0;              // (k_min beta^2/2) dt sum ||p_p||^2
  double sum_lam = 0.0;             // k_min beta^2 dt sum ||lambda||^2
  double lhs = 0.0;
  double rhs = 0.0;  // exp(T) dt sum C1^{j+1}
  bool holds = false;
};

/// Evaluate the discrete stability bound for a completed run.
EnergyReport energy_report(const std::vector<StepDiagnostics>& series,
                           const ProblemCoefficients& coef, double dt, double beta_p,
                           const std::vector<double>& C1);

}  // namespace fpsi
