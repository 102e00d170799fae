#pragma once

#include <vector>

namespace cbod {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [a, b].
QuadratureRule gauss_legendre(int n, double a, double b);

/// n-point generalized Gauss-Laguerre rule for the weight x^alpha e^{-x} on [0, inf).
QuadratureRule gauss_laguerre(int n, double alpha = 0.0);

} // namespace cbod
