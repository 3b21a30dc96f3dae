#pragma once

#include <array>
#include <vector>

namespace cascadic {

/// Quadrature on the reference triangle (0,0), (1,0), (0,1) expressed in
/// barycentric coordinates. Weights sum to 1, so the integral over a
/// physical triangle T is |T| * sum_q w_q f(x_q).
struct TriangleRule {
  std::vector<std::array<double, 3>> barycentric;
  std::vector<double> weights;

  std::size_t size() const { return weights.size(); }
};

/// Symmetric 12-point rule, exact for polynomials of degree 6.
const TriangleRule& degree6_rule();

/// Collapsed (Duffy) Gauss-Legendre product rule with n points per
/// direction; exact for polynomials of degree 2n - 2.
TriangleRule collapsed_gauss_rule(int n);

/// Gauss-Legendre nodes and weights on [0, 1].
void gauss_legendre_unit(int n, std::vector<double>& nodes, std::vector<double>& weights);

}  // namespace cascadic
