#include "cascadic/quadrature.hpp"

#include <cmath>
#include <numbers>

namespace cascadic {

namespace {

TriangleRule make_degree6_rule() {
  TriangleRule rule;
  auto add3 = [&](double a, double w) {
    const double b = 1.0 - 2.0 * a;
    rule.barycentric.push_back({b, a, a});
    rule.barycentric.push_back({a, b, a});
    rule.barycentric.push_back({a, a, b});
    for (int i = 0; i < 3; ++i) rule.weights.push_back(w);
  };
  auto add6 = [&](double a, double b, double w) {
    const double c = 1.0 - a - b;
    rule.barycentric.push_back({a, b, c});
    rule.barycentric.push_back({a, c, b});
    rule.barycentric.push_back({b, a, c});
    rule.barycentric.push_back({b, c, a});
    rule.barycentric.push_back({c, a, b});
    rule.barycentric.push_back({c, b, a});
    for (int i = 0; i < 6; ++i) rule.weights.push_back(w);
  };
  add3(0.063089014491502228340331602870819, 0.050844906370206816920936809106869);
  add3(0.24928674517091042129163855310702, 0.11678627572637936602528961138558);
  add6(0.053145049844816947353249671631398, 0.31035245103378440541660773395655,
       0.082851075618373575193553456420442);
  return rule;
}

}  // namespace

const TriangleRule& degree6_rule() {
  static const TriangleRule rule = make_degree6_rule();
  return rule;
}

void gauss_legendre_unit(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.assign(static_cast<std::size_t>(n), 0.0);
  weights.assign(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) {
    // Newton on P_n starting from the Chebyshev-like guess.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute the derivative at the converged node.
    double p0 = 1.0;
    double p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = pk;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    nodes[static_cast<std::size_t>(i)] = 0.5 * (1.0 - x);
    weights[static_cast<std::size_t>(i)] = 1.0 / ((1.0 - x * x) * dp * dp);
  }
}

TriangleRule collapsed_gauss_rule(int n) {
  std::vector<double> xs, ws;
  gauss_legendre_unit(n, xs, ws);
  TriangleRule rule;
  // (s, t) in [0,1]^2 -> (x, y) = (s, t (1 - s)), Jacobian (1 - s); area of
  // the reference triangle is 1/2, so weights are scaled by 2.
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double s = xs[static_cast<std::size_t>(i)];
      const double t = xs[static_cast<std::size_t>(j)];
      const double x = s;
      const double y = t * (1.0 - s);
      rule.barycentric.push_back({1.0 - x - y, x, y});
      rule.weights.push_back(2.0 * ws[static_cast<std::size_t>(i)] * ws[static_cast<std::size_t>(j)] * (1.0 - s));
    }
  }
  return rule;
}

}  // namespace cascadic
