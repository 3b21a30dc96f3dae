#include "cascadic/manufactured.hpp"

#include <cmath>
#include <numbers>

namespace cascadic {

namespace {

double pressure(double x, double y) { return 2.0 / 3.0 - x * x - y * y; }

ManufacturedSolution square_solution() {
  constexpr double pi = std::numbers::pi;
  constexpr double scale = 1.0 / (2.0 * pi * pi);
  ManufacturedSolution ms;
  ms.velocity = [](double x, double y) {
    const double u = scale * std::sin(pi * x) * std::sin(pi * y);
    return Vec2{u, u};
  };
  ms.velocity_gradient = [](double x, double y) {
    const double ux = std::cos(pi * x) * std::sin(pi * y) / (2.0 * pi);
    const double uy = std::sin(pi * x) * std::cos(pi * y) / (2.0 * pi);
    return Mat2{Vec2{ux, uy}, Vec2{ux, uy}};
  };
  ms.pressure = pressure;
  ms.force = [](double x, double y) {
    // -Laplace(u_c) = sin(pi x) sin(pi y)
    const double lap = std::sin(pi * x) * std::sin(pi * y);
    return Vec2{lap - 2.0 * x, lap - 2.0 * y};
  };
  ms.divergence = [](double x, double y) {
    return (std::cos(pi * x) * std::sin(pi * y) + std::sin(pi * x) * std::cos(pi * y)) / (2.0 * pi);
  };
  return ms;
}

// u = s * w with s = r^{2/3} sin(2 theta / 3) harmonic and
// w = (1 - x^2)(1 - y^2) vanishing on the outer square.
struct LShapeParts {
  double s, sx, sy;
  double w, wx, wy, lap_w;
};

LShapeParts lshape_parts(double x, double y) {
  LShapeParts parts{};
  const double r = std::hypot(x, y);
  double theta = std::atan2(y, x);
  if (theta < 0.0) theta += 2.0 * std::numbers::pi;
  if (r > 0.0) {
    const double r13 = std::cbrt(r);
    parts.s = r13 * r13 * std::sin(2.0 * theta / 3.0);
    parts.sx = -(2.0 / 3.0) / r13 * std::sin(theta / 3.0);
    parts.sy = (2.0 / 3.0) / r13 * std::cos(theta / 3.0);
  }
  parts.w = (1.0 - x * x) * (1.0 - y * y);
  parts.wx = -2.0 * x * (1.0 - y * y);
  parts.wy = -2.0 * y * (1.0 - x * x);
  parts.lap_w = -2.0 * (1.0 - y * y) - 2.0 * (1.0 - x * x);
  return parts;
}

ManufacturedSolution lshape_solution() {
  ManufacturedSolution ms;
  ms.velocity = [](double x, double y) {
    const auto q = lshape_parts(x, y);
    return Vec2{q.s * q.w, q.s * q.w};
  };
  ms.velocity_gradient = [](double x, double y) {
    const auto q = lshape_parts(x, y);
    const Vec2 grad{q.sx * q.w + q.s * q.wx, q.sy * q.w + q.s * q.wy};
    return Mat2{grad, grad};
  };
  ms.pressure = pressure;
  ms.force = [](double x, double y) {
    const auto q = lshape_parts(x, y);
    const double lap = 2.0 * (q.sx * q.wx + q.sy * q.wy) + q.s * q.lap_w;
    return Vec2{-lap - 2.0 * x, -lap - 2.0 * y};
  };
  ms.divergence = [](double x, double y) {
    const auto q = lshape_parts(x, y);
    return (q.sx * q.w + q.s * q.wx) + (q.sy * q.w + q.s * q.wy);
  };
  return ms;
}

}  // namespace

ManufacturedSolution builtin_solution(Domain domain) {
  return domain == Domain::UnitSquare ? square_solution() : lshape_solution();
}

}  // namespace cascadic
