#pragma once

#include <array>

#include "fpsi/assembly.hpp"

namespace fpsi {

using Mat2 = std::array<std::array<double, 2>, 2>;

/// Closed-form solution of the coupled system with hand-derived sources.
/// The fields solve the strong equations only for the stored coefficient set.
struct ManufacturedSolution {
  ProblemCoefficients coefficients;

  VectorFn u_f, u_p, eta, dt_eta;
  ScalarSpaceFn p_f, p_p;
  ScalarSpaceFn lambda;  // trace of p_p on the interface

  std::function<Mat2(Point2, double)> grad_u_f, grad_eta;
  ScalarSpaceFn div_u_p;

  VectorFn f_f, f_p;
  ScalarSpaceFn q_f, q_p;
};

/// The convergence-test solution: fluid on (0,1)x(0,1), poroelastic region on
/// (0,1)x(-1,0), interface at y = 0.
ManufacturedSolution make_mms_solution();

/// Residuals of the four interface conditions at (x, 0): mass conservation,
/// normal-stress balance, momentum balance (two components), and the
/// slip-with-friction condition. All vanish for the manufactured fields.
std::array<double, 5> mms_interface_residuals(const ManufacturedSolution& ms, double x, double t);

/// Residuals of the strong equations at an interior point, with all
/// derivatives approximated by central differences of the closed-form fields
/// (independent check of the hand-derived sources).
struct StrongResiduals {
  double momentum_f[2];
  double mass_f;
  double momentum_p[2];
  double darcy[2];
  double mass_p;
};
StrongResiduals mms_strong_residuals_fd(const ManufacturedSolution& ms, Point2 p, double t,
                                        bool fluid_side, double fd_step = 1e-5);

}  // namespace fpsi
