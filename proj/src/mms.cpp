#include "fpsi/mms.hpp"

#include <cmath>

namespace fpsi {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

ManufacturedSolution make_mms_solution() {
  ManufacturedSolution ms;
  // The interface conditions hold for this parameter set (mu_f = 1, alpha = 1,
  // lambda_p = mu_p) and the Darcy law holds with K = I.
  ms.coefficients = ProblemCoefficients{};  // all ones, K = I, xi = 0

  ms.u_f = [](Point2 p, double t) -> Point2 {
    const double c = kPi * std::cos(kPi * t);
    return {c * (-3.0 * p.x + std::cos(p.y)), c * (p.y + 1.0)};
  };
  ms.grad_u_f = [](Point2 p, double t) -> Mat2 {
    const double c = kPi * std::cos(kPi * t);
    return {{{-3.0 * c, -c * std::sin(p.y)}, {0.0, c}}};
  };
  ms.p_f = [](Point2 p, double t) {
    return std::exp(t) * std::sin(kPi * p.x) * std::cos(kPi * p.y / 2.0) +
           2.0 * kPi * std::cos(kPi * t);
  };
  ms.u_p = [](Point2 p, double t) -> Point2 {
    const double e = kPi * std::exp(t);
    return {-e * std::cos(kPi * p.x) * std::cos(kPi * p.y / 2.0),
            0.5 * e * std::sin(kPi * p.x) * std::sin(kPi * p.y / 2.0)};
  };
  ms.div_u_p = [](Point2 p, double t) {
    return 1.25 * kPi * kPi * std::exp(t) * std::sin(kPi * p.x) * std::cos(kPi * p.y / 2.0);
  };
  ms.p_p = [](Point2 p, double t) {
    return std::exp(t) * std::sin(kPi * p.x) * std::cos(kPi * p.y / 2.0);
  };
  ms.lambda = [](Point2 p, double t) { return std::exp(t) * std::sin(kPi * p.x); };
  ms.eta = [](Point2 p, double t) -> Point2 {
    const double s = std::sin(kPi * t);
    return {s * (-3.0 * p.x + std::cos(p.y)), s * (p.y + 1.0)};
  };
  ms.dt_eta = [](Point2 p, double t) -> Point2 {
    const double c = kPi * std::cos(kPi * t);
    return {c * (-3.0 * p.x + std::cos(p.y)), c * (p.y + 1.0)};
  };
  ms.grad_eta = [](Point2 p, double t) -> Mat2 {
    const double s = std::sin(kPi * t);
    return {{{-3.0 * s, -s * std::sin(p.y)}, {0.0, s}}};
  };

  const ProblemCoefficients coef = ms.coefficients;
  ms.f_f = [coef](Point2 p, double t) -> Point2 {
    const double c = kPi * std::cos(kPi * t);
    const double st = -kPi * kPi * std::sin(kPi * t);  // d/dt of pi cos(pi t)
    const double u1 = c * (-3.0 * p.x + std::cos(p.y));
    const double u2 = c * (p.y + 1.0);
    const double px = std::exp(t) * kPi * std::cos(kPi * p.x) * std::cos(kPi * p.y / 2.0);
    const double py = -std::exp(t) * kPi / 2.0 * std::sin(kPi * p.x) * std::sin(kPi * p.y / 2.0);
    Point2 f;
    // rho_f du/dt + grad p - 2 mu_f div D(u) + rho_f (u.grad)u
    f.x = coef.rho_f * st * (-3.0 * p.x + std::cos(p.y)) + px +
          coef.mu_f * c * std::cos(p.y) +
          coef.rho_f * (u1 * (-3.0 * c) + u2 * (-c * std::sin(p.y)));
    f.y = coef.rho_f * st * (p.y + 1.0) + py + coef.rho_f * u2 * c;
    return f;
  };
  ms.q_f = [](Point2, double t) { return -2.0 * kPi * std::cos(kPi * t); };
  ms.f_p = [coef](Point2 p, double t) -> Point2 {
    const double stt = -kPi * kPi * std::sin(kPi * t);  // d2/dt2 of sin(pi t)
    const double px = std::exp(t) * kPi * std::cos(kPi * p.x) * std::cos(kPi * p.y / 2.0);
    const double py = -std::exp(t) * kPi / 2.0 * std::sin(kPi * p.x) * std::sin(kPi * p.y / 2.0);
    Point2 f;
    // rho_p d2eta/dt2 - div sigma_p, with div sigma_e = (-mu_p sin(pi t) cos y, 0)
    f.x = coef.rho_p * stt * (-3.0 * p.x + std::cos(p.y)) +
          coef.mu_p * std::sin(kPi * t) * std::cos(p.y) + coef.alpha * px;
    f.y = coef.rho_p * stt * (p.y + 1.0) + coef.alpha * py;
    return f;
  };
  ms.q_p = [coef](Point2 p, double t) {
    const double shape = std::sin(kPi * p.x) * std::cos(kPi * p.y / 2.0);
    return coef.s0 * std::exp(t) * shape - 2.0 * coef.alpha * kPi * std::cos(kPi * t) +
           1.25 * kPi * kPi * std::exp(t) * shape;
  };
  return ms;
}

std::array<double, 5> mms_interface_residuals(const ManufacturedSolution& ms, double x,
                                              double t) {
  const ProblemCoefficients& coef = ms.coefficients;
  const Point2 p{x, 0.0};
  const Point2 uf = ms.u_f(p, t), up = ms.u_p(p, t), deta = ms.dt_eta(p, t);
  const Mat2 guf = ms.grad_u_f(p, t), geta = ms.grad_eta(p, t);
  const double pf = ms.p_f(p, t), pp = ms.p_p(p, t);

  // n_f = (0,-1), n_p = (0,1), tau_f = (1,0)
  const double mass = -uf.y + deta.y + up.y;

  const double sf_yy = -pf + 2.0 * coef.mu_f * guf[1][1];
  const double stress_n = -sf_yy - pp;

  const double sf_xy = coef.mu_f * (guf[0][1] + guf[1][0]);
  const double div_eta = geta[0][0] + geta[1][1];
  const double sp_xy = coef.mu_p * (geta[0][1] + geta[1][0]);
  const double sp_yy = coef.lambda_p * div_eta + 2.0 * coef.mu_p * geta[1][1] - coef.alpha * pp;
  const double momentum_x = sp_xy - sf_xy;
  const double momentum_y = sp_yy - sf_yy;

  const double k_tau = coef.K[0][0];  // tau = (1,0)
  const double bjs = sf_xy - coef.mu_f * coef.alpha_bjs / std::sqrt(k_tau) * (uf.x - deta.x);

  return {mass, stress_n, momentum_x, momentum_y, bjs};
}

StrongResiduals mms_strong_residuals_fd(const ManufacturedSolution& ms, Point2 p, double t,
                                        bool fluid_side, double h) {
  const ProblemCoefficients& coef = ms.coefficients;
  StrongResiduals r{};

  if (fluid_side) {
    // momentum: rho(du/dt + (u.grad)u) - div sigma_f - f_f
    Point2 ut1 = ms.u_f(p, t + h), ut0 = ms.u_f(p, t - h);
    Point2 dudt = (0.5 / h) * (ut1 - ut0);
    auto sigma = [&](Point2 q) -> Mat2 {
      // 2nd-order FD gradient of u_f, assembled into sigma_f
      Point2 uxp = ms.u_f({q.x + h, q.y}, t), uxm = ms.u_f({q.x - h, q.y}, t);
      Point2 uyp = ms.u_f({q.x, q.y + h}, t), uym = ms.u_f({q.x, q.y - h}, t);
      const double dux_dx = (uxp.x - uxm.x) * (0.5 / h), dux_dy = (uyp.x - uym.x) * (0.5 / h);
      const double duy_dx = (uxp.y - uxm.y) * (0.5 / h), duy_dy = (uyp.y - uym.y) * (0.5 / h);
      const double pf = ms.p_f(q, t);
      Mat2 s;
      s[0][0] = -pf + 2.0 * coef.mu_f * dux_dx;
      s[0][1] = coef.mu_f * (dux_dy + duy_dx);
      s[1][0] = s[0][1];
      s[1][1] = -pf + 2.0 * coef.mu_f * duy_dy;
      return s;
    };
    Mat2 sxp = sigma({p.x + h, p.y}), sxm = sigma({p.x - h, p.y});
    Mat2 syp = sigma({p.x, p.y + h}), sym = sigma({p.x, p.y - h});
    const double div_s[2] = {(sxp[0][0] - sxm[0][0]) * (0.5 / h) + (syp[0][1] - sym[0][1]) * (0.5 / h),
                             (sxp[1][0] - sxm[1][0]) * (0.5 / h) + (syp[1][1] - sym[1][1]) * (0.5 / h)};
    Point2 u = ms.u_f(p, t);
    Point2 uxp = ms.u_f({p.x + h, p.y}, t), uxm = ms.u_f({p.x - h, p.y}, t);
    Point2 uyp = ms.u_f({p.x, p.y + h}, t), uym = ms.u_f({p.x, p.y - h}, t);
    const double conv[2] = {
        u.x * (uxp.x - uxm.x) * (0.5 / h) + u.y * (uyp.x - uym.x) * (0.5 / h),
        u.x * (uxp.y - uxm.y) * (0.5 / h) + u.y * (uyp.y - uym.y) * (0.5 / h)};
    Point2 ff = ms.f_f(p, t);
    r.momentum_f[0] = coef.rho_f * (dudt.x + conv[0]) - div_s[0] - ff.x;
    r.momentum_f[1] = coef.rho_f * (dudt.y + conv[1]) - div_s[1] - ff.y;
    const double div_u = (uxp.x - uxm.x) * (0.5 / h) + (uyp.y - uym.y) * (0.5 / h);
    r.mass_f = div_u - ms.q_f(p, t);
    return r;
  }

  // poroelastic side
  Point2 ep1 = ms.eta(p, t + h), em1 = ms.eta(p, t - h), e0 = ms.eta(p, t);
  const double d2e[2] = {(ep1.x - 2 * e0.x + em1.x) / (h * h), (ep1.y - 2 * e0.y + em1.y) / (h * h)};
  auto sigma_p = [&](Point2 q) -> Mat2 {
    Point2 exp_ = ms.eta({q.x + h, q.y}, t), exm = ms.eta({q.x - h, q.y}, t);
    Point2 eyp = ms.eta({q.x, q.y + h}, t), eym = ms.eta({q.x, q.y - h}, t);
    const double dex_dx = (exp_.x - exm.x) * (0.5 / h), dex_dy = (eyp.x - eym.x) * (0.5 / h);
    const double dey_dx = (exp_.y - exm.y) * (0.5 / h), dey_dy = (eyp.y - eym.y) * (0.5 / h);
    const double div_e = dex_dx + dey_dy;
    const double pp = ms.p_p(q, t);
    Mat2 s;
    s[0][0] = coef.lambda_p * div_e + 2.0 * coef.mu_p * dex_dx - coef.alpha * pp;
    s[0][1] = coef.mu_p * (dex_dy + dey_dx);
    s[1][0] = s[0][1];
    s[1][1] = coef.lambda_p * div_e + 2.0 * coef.mu_p * dey_dy - coef.alpha * pp;
    return s;
  };
  Mat2 sxp = sigma_p({p.x + h, p.y}), sxm = sigma_p({p.x - h, p.y});
  Mat2 syp = sigma_p({p.x, p.y + h}), sym = sigma_p({p.x, p.y - h});
  const double div_s[2] = {(sxp[0][0] - sxm[0][0]) * (0.5 / h) + (syp[0][1] - sym[0][1]) * (0.5 / h),
                           (sxp[1][0] - sxm[1][0]) * (0.5 / h) + (syp[1][1] - sym[1][1]) * (0.5 / h)};
  Point2 fp = ms.f_p(p, t);
  r.momentum_p[0] = coef.rho_p * d2e[0] + (coef.xi > 0 ? coef.xi * e0.x : 0.0) - div_s[0] - fp.x;
  r.momentum_p[1] = coef.rho_p * d2e[1] + (coef.xi > 0 ? coef.xi * e0.y : 0.0) - div_s[1] - fp.y;

  // Darcy law: mu_f K^{-1} u_p + grad p_p = 0 (K = I for the provided fields)
  const double ppx = (ms.p_p({p.x + h, p.y}, t) - ms.p_p({p.x - h, p.y}, t)) * (0.5 / h);
  const double ppy = (ms.p_p({p.x, p.y + h}, t) - ms.p_p({p.x, p.y - h}, t)) * (0.5 / h);
  Point2 up = ms.u_p(p, t);
  r.darcy[0] = coef.mu_f * up.x + ppx;
  r.darcy[1] = coef.mu_f * up.y + ppy;

  // storage: d/dt(s0 p_p + alpha div eta) + div u_p - q_p
  const double pp_t = (ms.p_p(p, t + h) - ms.p_p(p, t - h)) * (0.5 / h);
  auto div_eta_at = [&](double tt) {
    Point2 exp_ = ms.eta({p.x + h, p.y}, tt), exm = ms.eta({p.x - h, p.y}, tt);
    Point2 eyp = ms.eta({p.x, p.y + h}, tt), eym = ms.eta({p.x, p.y - h}, tt);
    return (exp_.x - exm.x) * (0.5 / h) + (eyp.y - eym.y) * (0.5 / h);
  };
  const double dive_t = (div_eta_at(t + h) - div_eta_at(t - h)) * (0.5 / h);
  Point2 upxp = ms.u_p({p.x + h, p.y}, t), upxm = ms.u_p({p.x - h, p.y}, t);
  Point2 upyp = ms.u_p({p.x, p.y + h}, t), upym = ms.u_p({p.x, p.y - h}, t);
  const double div_up = (upxp.x - upxm.x) * (0.5 / h) + (upyp.y - upym.y) * (0.5 / h);
  r.mass_p = coef.s0 * pp_t + coef.alpha * dive_t + div_up - ms.q_p(p, t);
  return r;
}

}  // namespace fpsi
