#pragma once

/// \file quadrature.hpp
/// Positive-weight quadrature on the reference tetrahedron
/// {(0,0,0), (1,0,0), (0,1,0), (0,0,1)}, built as a collapsed (Duffy)
/// product of Gauss-Legendre rules.

#include <array>
#include <cmath>
#include <numbers>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "epe/errors.hpp"

namespace epe {

/// Gauss-Legendre nodes and weights on [0, 1].
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;
};

namespace detail {

// (P_m(x), P_m'(x)) by the three-term recurrence, m >= 1.
inline std::pair<double, double> legendre_with_derivative(int m, double x) {
  double p0 = 1.0, p1 = x;
  for (int k = 2; k <= m; ++k) {
    const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = pk;
  }
  return {p1, m * (x * p1 - p0) / (x * x - 1.0)};
}

}  // namespace detail

inline GaussLegendre gauss_legendre(int m) {
  GaussLegendre g;
  g.nodes.resize(static_cast<std::size_t>(m));
  g.weights.resize(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (m + 0.5));
    for (int it = 0; it < 100; ++it) {
      const auto [p, dp] = detail::legendre_with_derivative(m, x);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double dp = detail::legendre_with_derivative(m, x).second;
    const auto slot = static_cast<std::size_t>(m - 1 - i);
    g.nodes[slot] = 0.5 * (x + 1.0);
    g.weights[slot] = 1.0 / ((1.0 - x * x) * dp * dp);
  }
  return g;
}

struct QuadraturePoint {
  Eigen::Vector3d ref;  // reference coordinates (xi1, xi2, xi3)
  double weight;
};

struct QuadratureRule {
  int degree = 0;
  std::vector<QuadraturePoint> points;

  std::size_t size() const { return points.size(); }

  /// Barycentric coordinates (lambda_0 .. lambda_3) of point q.
  std::array<double, 4> barycentric(std::size_t q) const {
    const auto& r = points[q].ref;
    return {1.0 - r[0] - r[1] - r[2], r[0], r[1], r[2]};
  }
};

inline constexpr int kMaxQuadratureDegree = 6;

/// Rule exact for polynomials of total degree <= `degree` (1..6).
inline QuadratureRule quadrature_rule(int degree) {
  if (degree < 1 || degree > kMaxQuadratureDegree) throw UnsupportedDegree(degree);
  // The collapsed map xi1 = u, xi2 = v(1-u), xi3 = w(1-u)(1-v) has Jacobian
  // (1-u)^2 (1-v), raising the polynomial degree in u by 2 and in v by 1.
  const auto gu = gauss_legendre((degree + 4) / 2);
  const auto gv = gauss_legendre((degree + 3) / 2);
  const auto gw = gauss_legendre((degree + 2) / 2);
  QuadratureRule rule;
  rule.degree = degree;
  rule.points.reserve(gu.nodes.size() * gv.nodes.size() * gw.nodes.size());
  for (std::size_t a = 0; a < gu.nodes.size(); ++a)
    for (std::size_t b = 0; b < gv.nodes.size(); ++b)
      for (std::size_t c = 0; c < gw.nodes.size(); ++c) {
        const double u = gu.nodes[a], v = gv.nodes[b], w = gw.nodes[c];
        const double jac = (1.0 - u) * (1.0 - u) * (1.0 - v);
        rule.points.push_back({Eigen::Vector3d(u, v * (1.0 - u), w * (1.0 - u) * (1.0 - v)),
                               gu.weights[a] * gv.weights[b] * gw.weights[c] * jac});
      }
  return rule;
}

/// Gauss rule on the reference triangle {(0,0), (1,0), (0,1)} (weights sum to 1/2),
/// used for face traces.
struct TriangleRule {
  std::vector<std::array<double, 3>> barycentric;
  std::vector<double> weights;
};

inline TriangleRule triangle_rule(int degree) {
  const auto gu = gauss_legendre((degree + 3) / 2);
  const auto gv = gauss_legendre((degree + 2) / 2);
  TriangleRule r;
  for (std::size_t a = 0; a < gu.nodes.size(); ++a)
    for (std::size_t b = 0; b < gv.nodes.size(); ++b) {
      const double s = gu.nodes[a], t = gv.nodes[b] * (1.0 - s);
      r.barycentric.push_back({1.0 - s - t, s, t});
      r.weights.push_back(gu.weights[a] * gv.weights[b] * (1.0 - s));
    }
  return r;
}

}  // namespace epe
