#pragma once

#include <vector>

namespace fpsi {

/// Integration rule on the reference triangle {(0,0),(1,0),(0,1)}
/// or on the reference edge [0,1].
struct QuadratureRule {
  struct Node {
    double x = 0.0;  // for edge rules only x is used (arc parameter)
    double y = 0.0;
    double w = 0.0;
  };
  std::vector<Node> nodes;
  int exact_degree = 0;

  std::size_t size() const { return nodes.size(); }
};

/// Conical-product Gauss rule on the reference triangle, exact for all
/// polynomials of total degree <= degree. All weights positive.
QuadratureRule triangle_rule(int degree);

/// Gauss-Legendre rule on [0,1], exact through the given degree.
QuadratureRule edge_rule(int degree);

/// Gauss-Legendre nodes/weights on [0,1] for n points (exact degree 2n-1).
void gauss_legendre_unit(int n, std::vector<double>& points, std::vector<double>& weights);

}  // namespace fpsi
