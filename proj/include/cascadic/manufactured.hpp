#pragma once

#include <array>
#include <functional>

#include "cascadic/mesh.hpp"

namespace cascadic {

using Vec2 = std::array<double, 2>;
/// Row c holds the gradient of velocity component c.
using Mat2 = std::array<Vec2, 2>;

/// Exact Stokes solution with the data that produces it:
/// f = -Laplace(u) + grad(p) and g = div(u).
struct ManufacturedSolution {
  std::function<Vec2(double, double)> velocity;
  std::function<Mat2(double, double)> velocity_gradient;
  std::function<double(double, double)> pressure;
  std::function<Vec2(double, double)> force;
  std::function<double(double, double)> divergence;
};

/// Unit square: u1 = u2 = sin(pi x) sin(pi y) / (2 pi^2), p = 2/3 - x^2 - y^2.
/// L-shape: u1 = u2 = r^{2/3} sin(2 theta / 3) (1 - x^2)(1 - y^2) with theta in
/// [0, 3 pi / 2] measured from the edge {x > 0, y = 0}; same p.
ManufacturedSolution builtin_solution(Domain domain);

}  // namespace cascadic
