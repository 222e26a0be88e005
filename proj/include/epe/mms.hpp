#pragma once

/// \file mms.hpp
/// Manufactured solution of the benchmark problem on the unit cube and the
/// error norms used by the convergence studies.
///
/// With w = sin(pi x) sin(pi y) sin(pi z) and 1 = (1, 1, 1):
///   E = sin(t) w 1,  H = cos(t)/mu curl(w 1),  u = e^{-t} w 1,  p = e^{-t} w.
/// The sources j, f, g are the closed-form residuals of the strong equations
///   eps E_t + sigma E - curl H - L grad p = j
///   mu H_t + curl E = 0
///   -lambda_c grad div u - G lap u + alpha grad p = f
///   (c0 p + alpha div u)_t - kappa lap p + L div E = g.

#include <cmath>
#include <functional>
#include <numbers>
#include <string>

#include "epe/core.hpp"
#include "epe/fields.hpp"

namespace epe {

/// Closed forms of the manufactured fields and sources, templated on the
/// scalar type so that tests can evaluate them in extended precision.
template <class Real>
struct ManufacturedFields {
  using V3 = Eigen::Matrix<Real, 3, 1>;
  using M3 = Eigen::Matrix<Real, 3, 3>;
  static constexpr Real pi = std::numbers::pi_v<Real>;

  Real epsilon, mu, sigma, L, lambda_c, G, alpha, c0, kappa;

  explicit ManufacturedFields(const PhysicalParams& p)
      : epsilon(p.epsilon), mu(p.mu), sigma(p.sigma), L(p.L), lambda_c(p.lambda_c), G(p.G), alpha(p.alpha),
        c0(p.c0), kappa(p.kappa) {}

  static Real w(const V3& x) {
    using std::sin;
    return sin(pi * x[0]) * sin(pi * x[1]) * sin(pi * x[2]);
  }

  static V3 grad_w(const V3& x) {
    using std::cos;
    using std::sin;
    const Real s0 = sin(pi * x[0]), s1 = sin(pi * x[1]), s2 = sin(pi * x[2]);
    const Real k0 = cos(pi * x[0]), k1 = cos(pi * x[1]), k2 = cos(pi * x[2]);
    return pi * V3(k0 * s1 * s2, s0 * k1 * s2, s0 * s1 * k2);
  }

  static M3 hess_w(const V3& x) {
    using std::cos;
    using std::sin;
    const Real s0 = sin(pi * x[0]), s1 = sin(pi * x[1]), s2 = sin(pi * x[2]);
    const Real k0 = cos(pi * x[0]), k1 = cos(pi * x[1]), k2 = cos(pi * x[2]);
    const Real pp = pi * pi;
    M3 Hs;
    Hs(0, 0) = Hs(1, 1) = Hs(2, 2) = -pp * s0 * s1 * s2;
    Hs(0, 1) = Hs(1, 0) = pp * k0 * k1 * s2;
    Hs(0, 2) = Hs(2, 0) = pp * k0 * s1 * k2;
    Hs(1, 2) = Hs(2, 1) = pp * s0 * k1 * k2;
    return Hs;
  }

  // curl(w 1) = (w_y - w_z, w_z - w_x, w_x - w_y)
  static V3 curl_w1(const V3& x) {
    const V3 g = grad_w(x);
    return V3(g[1] - g[2], g[2] - g[0], g[0] - g[1]);
  }

  V3 E(Real t, const V3& x) const { return V3::Constant(std::sin(t) * w(x)); }
  V3 H(Real t, const V3& x) const { return (std::cos(t) / mu) * curl_w1(x); }
  V3 u(Real t, const V3& x) const { return V3::Constant(std::exp(-t) * w(x)); }
  Real p(Real t, const V3& x) const { return std::exp(-t) * w(x); }

  // Row k is grad(u_k).
  M3 grad_u(Real t, const V3& x) const { return std::exp(-t) * V3::Ones() * grad_w(x).transpose(); }
  V3 grad_p(Real t, const V3& x) const { return std::exp(-t) * grad_w(x); }

  V3 j(Real t, const V3& x) const {
    const M3 Hs = hess_w(x);
    const V3 curl_curl = Hs * V3::Ones() - Hs.trace() * V3::Ones();
    return V3::Constant((epsilon * std::cos(t) + sigma * std::sin(t)) * w(x)) - (std::cos(t) / mu) * curl_curl -
           L * std::exp(-t) * grad_w(x);
  }

  V3 f(Real t, const V3& x) const {
    const M3 Hs = hess_w(x);
    return std::exp(-t) * (-lambda_c * (Hs * V3::Ones()) - G * Hs.trace() * V3::Ones() + alpha * grad_w(x));
  }

  Real g(Real t, const V3& x) const {
    const Real div_w1 = grad_w(x).sum();
    return -std::exp(-t) * (c0 * w(x) + alpha * div_w1) - kappa * std::exp(-t) * hess_w(x).trace() +
           L * std::sin(t) * div_w1;
  }
};

using VectorField = std::function<Vec3(double, const Vec3&)>;
using ScalarField = std::function<double(double, const Vec3&)>;
using TensorField = std::function<Mat3(double, const Vec3&)>;

/// Exact fields with their sources, in double precision. A null source
/// means zero.
struct ExactSolution {
  std::string name;
  VectorField E, H, u;
  ScalarField p;
  TensorField grad_u;
  VectorField j, f;
  ScalarField g;

  /// The identically-zero solution (all fields and sources zero).
  static ExactSolution zero() {
    ExactSolution s;
    s.name = "zero";
    s.E = s.H = s.u = [](double, const Vec3&) { return Vec3::Zero().eval(); };
    s.p = [](double, const Vec3&) { return 0.0; };
    s.grad_u = [](double, const Vec3&) { return Mat3::Zero().eval(); };
    return s;
  }
};

inline ExactSolution example61(const PhysicalParams& params) {
  const ManufacturedFields<double> m(params);
  ExactSolution s;
  s.name = "example61";
  s.E = [m](double t, const Vec3& x) { return m.E(t, x); };
  s.H = [m](double t, const Vec3& x) { return m.H(t, x); };
  s.u = [m](double t, const Vec3& x) { return m.u(t, x); };
  s.p = [m](double t, const Vec3& x) { return m.p(t, x); };
  s.grad_u = [m](double t, const Vec3& x) { return m.grad_u(t, x); };
  s.j = [m](double t, const Vec3& x) { return m.j(t, x); };
  s.f = [m](double t, const Vec3& x) { return m.f(t, x); };
  s.g = [m](double t, const Vec3& x) { return m.g(t, x); };
  return s;
}

struct ErrorNorms {
  double E_L2 = 0.0;
  double H_L2 = 0.0;
  double u_L2 = 0.0;
  double u_H1 = 0.0;  // includes the L2 part
  double p_L2 = 0.0;
};

/// Quadrature evaluation of |exact(t) - discrete| in L2 (and H1 for u).
inline ErrorNorms error_norms(const TetMesh& mesh, const State& state, const ExactSolution& exact, double t,
                              int quad_degree) {
  if (quad_degree < 4) throw ValidationError("error quadrature degree must be >= 4");
  const QuadratureRule rule = quadrature_rule(quad_degree);
  double e2 = 0, h2 = 0, u2 = 0, gu2 = 0, p2 = 0;
  for (std::size_t cell = 0; cell < mesh.num_cells(); ++cell) {
    const CellGeometry geo(mesh, cell);
    const Vec3 Hh = eval_H(state.H, cell);
    const Mat3 Guh = grad_u(mesh, state.u, cell, geo);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const auto lam = rule.barycentric(q);
      const Vec3 x = geo.map(rule.points[q].ref);
      const double w = rule.points[q].weight * geo.jacobian_det();
      e2 += w * (exact.E(t, x) - eval_E(mesh, state.E, cell, geo, lam)).squaredNorm();
      h2 += w * (exact.H(t, x) - Hh).squaredNorm();
      u2 += w * (exact.u(t, x) - eval_u(mesh, state.u, cell, lam)).squaredNorm();
      gu2 += w * (exact.grad_u(t, x) - Guh).squaredNorm();
      const double dp = exact.p(t, x) - eval_p(mesh, state.p, cell, lam);
      p2 += w * dp * dp;
    }
  }
  return {std::sqrt(e2), std::sqrt(h2), std::sqrt(u2), std::sqrt(u2 + gu2), std::sqrt(p2)};
}

/// Norms of the field-wise difference a - b.
inline ErrorNorms difference_norms(const TetMesh& mesh, const State& a, const State& b, int quad_degree) {
  return error_norms(mesh, difference(b, a), ExactSolution::zero(), 0.0, quad_degree);
}

}  // namespace epe
