#include "fpsi/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace fpsi {

// Newton iteration on Legendre polynomials; nodes on (-1,1) mapped to (0,1).
void gauss_legendre_unit(int n, std::vector<double>& points, std::vector<double>& weights) {
  if (n < 1) throw std::invalid_argument("gauss_legendre_unit: n must be >= 1");
  points.assign(n, 0.0);
  weights.assign(n, 0.0);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    // Chebyshev-like initial guess for the i-th root of P_n.
    double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (z * p0 - p1) / (z * z - 1.0);
      double dz = p0 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    double w = 2.0 / ((1.0 - z * z) * pp * pp);
    points[i] = 0.5 * (1.0 - z);
    points[n - 1 - i] = 0.5 * (1.0 + z);
    weights[i] = 0.5 * w;
    weights[n - 1 - i] = 0.5 * w;
  }
}

QuadratureRule edge_rule(int degree) {
  if (degree < 1 || degree > 30) throw std::invalid_argument("edge_rule: unsupported degree");
  const int n = (degree + 2) / 2;  // 2n-1 >= degree
  std::vector<double> p, w;
  gauss_legendre_unit(n, p, w);
  QuadratureRule rule;
  rule.exact_degree = 2 * n - 1;
  rule.nodes.resize(n);
  for (int i = 0; i < n; ++i) rule.nodes[i] = {p[i], 0.0, w[i]};
  return rule;
}

// Collapsed-square (conical product) rule: x = u(1-v), y = v with the (1-v)
// Jacobian folded into the weights. A degree-d integrand becomes degree d in u
// and degree d+1 in v, so plain Gauss-Legendre in both directions suffices and
// every weight stays positive.
QuadratureRule triangle_rule(int degree) {
  if (degree < 1 || degree > 30) throw std::invalid_argument("triangle_rule: unsupported degree");
  const int nu = (degree + 2) / 2;
  const int nv = (degree + 3) / 2;
  std::vector<double> pu, wu, pv, wv;
  gauss_legendre_unit(nu, pu, wu);
  gauss_legendre_unit(nv, pv, wv);
  QuadratureRule rule;
  rule.exact_degree = std::min(2 * nu - 1, 2 * nv - 2);
  rule.nodes.reserve(static_cast<std::size_t>(nu) * nv);
  for (int j = 0; j < nv; ++j) {
    for (int i = 0; i < nu; ++i) {
      QuadratureRule::Node node;
      node.x = pu[i] * (1.0 - pv[j]);
      node.y = pv[j];
      node.w = wu[i] * wv[j] * (1.0 - pv[j]);
      rule.nodes.push_back(node);
    }
  }
  return rule;
}

}  // namespace fpsi
