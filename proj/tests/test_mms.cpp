#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <type_traits>

#include "epe/schemes.hpp"

using namespace epe;

namespace {

using LD = long double;
using MF = ManufacturedFields<LD>;
using V3 = MF::V3;

// Central differences in extended precision.
// Return types are pinned so Eigen expressions never outlive their operands.
template <class F>
auto d_dx(F f, const V3& x, int k, LD h) -> std::invoke_result_t<F, const V3&> {
  V3 a = x, b = x;
  a[k] += h;
  b[k] -= h;
  return (f(a) - f(b)) / (2 * h);
}

template <class F>
auto d_dt(F f, LD t, LD h) -> std::invoke_result_t<F, LD> {
  return (f(t + h) - f(t - h)) / (2 * h);
}

template <class F>
V3 curl(F f, const V3& x, LD h) {
  const V3 dx = d_dx(f, x, 0, h), dy = d_dx(f, x, 1, h), dz = d_dx(f, x, 2, h);
  return V3(dy[2] - dz[1], dz[0] - dx[2], dx[1] - dy[0]);
}

template <class F>
LD div(F f, const V3& x, LD h) {
  LD s = 0;
  for (int k = 0; k < 3; ++k) s += d_dx(f, x, k, h)[k];
  return s;
}

template <class F>
V3 grad(F f, const V3& x, LD h) {
  V3 g;
  for (int k = 0; k < 3; ++k) g[k] = d_dx(f, x, k, h);
  return g;
}

// Strong-form residuals of the four equations at (t, x).
std::array<LD, 4> residuals(const MF& m, LD t, const V3& x, LD h) {
  auto E = [&](const V3& y) { return m.E(t, y); };
  auto H = [&](const V3& y) { return m.H(t, y); };
  auto u = [&](const V3& y) { return m.u(t, y); };
  auto p = [&](const V3& y) { return m.p(t, y); };

  const V3 Et = d_dt([&](LD s) { return m.E(s, x); }, t, h);
  const V3 Ht = d_dt([&](LD s) { return m.H(s, x); }, t, h);
  const V3 r1 = m.epsilon * Et + m.sigma * E(x) - curl(H, x, h) - m.L * grad(p, x, h) - m.j(t, x);
  const V3 r2 = m.mu * Ht + curl(E, x, h);

  const V3 grad_div = grad([&](const V3& y) { return div(u, y, h); }, x, h);
  V3 lap_u = V3::Zero();
  for (int k = 0; k < 3; ++k) lap_u += d_dx([&](const V3& y) { return d_dx(u, y, k, h); }, x, k, h);
  const V3 r3 = -m.lambda_c * grad_div - m.G * lap_u + m.alpha * grad(p, x, h) - m.f(t, x);

  const LD storage_t = d_dt([&](LD s) { return m.c0 * m.p(s, x) + m.alpha * div([&](const V3& y) { return m.u(s, y); }, x, h); }, t, h);
  LD lap_p = 0;
  for (int k = 0; k < 3; ++k) lap_p += d_dx([&](const V3& y) { return d_dx(p, y, k, h); }, x, k, h);
  const LD r4 = storage_t - m.kappa * lap_p + m.L * div(E, x, h) - m.g(t, x);
  return {r1.cwiseAbs().maxCoeff(), r2.cwiseAbs().maxCoeff(), r3.cwiseAbs().maxCoeff(), std::abs(r4)};
}

}  // namespace

TEST(Manufactured, FiniteDifferenceResidual) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  PhysicalParams prm;
  const MF m(prm);
  LD worst = 0;
  for (int k = 0; k < 200; ++k) {
    const V3 x(U(rng), U(rng), U(rng));
    const LD t = 0.1L * U(rng) + 1e-4L;
    for (LD r : residuals(m, t, x, 1e-5L)) worst = std::max(worst, r);
  }
  EXPECT_LE(static_cast<double>(worst), 1e-5);
}

TEST(Manufactured, FiniteDifferenceResidualOtherParameters) {
  PhysicalParams prm{1.7, 0.6, 3.0, 0.4, 5.0, 0.8, 0.3, 2.2, 1.1};
  validate_params(prm);
  const MF m(prm);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  LD worst = 0;
  for (int k = 0; k < 50; ++k) {
    const V3 x(U(rng), U(rng), U(rng));
    for (LD r : residuals(m, 2 * U(rng) + 0.01, x, 1e-5L)) worst = std::max(worst, r);
  }
  EXPECT_LE(static_cast<double>(worst), 1e-5);
}

// mu dH/dt + curl E = 0; fourth-order differences keep the oracle below 1e-12.
TEST(Manufactured, FaradayLawHoldsPointwise) {
  PhysicalParams prm;
  prm.mu = 0.7;
  const MF m(prm);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const LD h = 2e-4L;
  auto d4 = [&](auto f, LD s) { return (8 * (f(s + h) - f(s - h)) - (f(s + 2 * h) - f(s - 2 * h))) / (12 * h); };
  for (int k = 0; k < 50; ++k) {
    const V3 x(U(rng), U(rng), U(rng));
    const LD t = U(rng);
    V3 Ht;
    for (int c = 0; c < 3; ++c) Ht[c] = d4([&](LD s) { return m.H(s, x)[c]; }, t);
    V3 D[3];
    for (int i = 0; i < 3; ++i)
      for (int c = 0; c < 3; ++c)
        D[i][c] = d4([&](LD s) { V3 y = x; y[i] = s; return m.E(t, y)[c]; }, x[i]);
    const V3 curlE(D[1][2] - D[2][1], D[2][0] - D[0][2], D[0][1] - D[1][0]);
    EXPECT_LE(static_cast<double>((m.mu * Ht + curlE).cwiseAbs().maxCoeff()), 1e-12);
  }
}

TEST(Manufactured, InitialValues) {
  const ExactSolution s = example61(PhysicalParams{});
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int k = 0; k < 20; ++k) {
    const Vec3 x(U(rng), U(rng), U(rng));
    const double w = std::sin(M_PI * x[0]) * std::sin(M_PI * x[1]) * std::sin(M_PI * x[2]);
    EXPECT_EQ(s.E(0.0, x).norm(), 0.0);
    EXPECT_NEAR(s.p(0.0, x), w, 1e-15);
  }
}

TEST(Manufactured, BoundaryValuesVanish) {
  const ExactSolution s = example61(PhysicalParams{});
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int k = 0; k < 60; ++k) {
    Vec3 x(U(rng), U(rng), U(rng));
    x[k % 3] = (k / 3) % 2;
    const double t = U(rng);
    EXPECT_LE(s.E(t, x).norm(), 1e-15);
    EXPECT_LE(s.u(t, x).norm(), 1e-15);
    EXPECT_LE(std::abs(s.p(t, x)), 1e-15);
  }
}

TEST(Manufactured, AmplitudeEnvelopes) {
  const ExactSolution s = example61(PhysicalParams{});
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const double T = 0.1;
  for (int k = 0; k < 500; ++k) {
    const Vec3 x(U(rng), U(rng), U(rng));
    const double t = T * U(rng);
    EXPECT_LE(s.E(t, x).norm(), std::sqrt(3.0) * std::sin(T) + 1e-15);
    EXPECT_LE(std::abs(s.p(t, x)), 1.0);
  }
}

TEST(Manufactured, FluidSourceLimit) {
  PhysicalParams prm;
  prm.L = 0.0;
  prm.alpha = 1e-14;
  const MF m(prm);
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int k = 0; k < 20; ++k) {
    const V3 x(U(rng), U(rng), U(rng));
    const LD t = U(rng);
    // d/dt(c0 p) - kappa lap p with lap w = -3 pi^2 w.
    const LD expect = (-m.c0 + 3 * MF::pi * MF::pi * m.kappa) * std::exp(-t) * MF::w(x);
    EXPECT_NEAR(static_cast<double>(m.g(t, x)), static_cast<double>(expect), 1e-12);
  }
}

TEST(Manufactured, SourcesArePureFunctions) {
  const ExactSolution a = example61(PhysicalParams{}), b = example61(PhysicalParams{});
  const Vec3 x(0.3, 0.6, 0.2);
  EXPECT_EQ(a.j(0.05, x), b.j(0.05, x));
  EXPECT_EQ(a.f(0.05, x), b.f(0.05, x));
  EXPECT_EQ(a.g(0.05, x), b.g(0.05, x));
}

TEST(ErrorNorms, ZeroStateGivesExactNorms) {
  const TetMesh m = build_unit_cube_mesh(4);
  const ExactSolution s = example61(PhysicalParams{});
  const State zero = State::zeros(m);
  const double expected = 1.0 / (2.0 * std::sqrt(2.0));
  // The mesh-based rule is not exact for sin^2; degree 5 on n=4 is close.
  EXPECT_NEAR(error_norms(m, zero, s, 0.0, 5).p_L2, expected, 1e-4);
  EXPECT_NEAR(error_norms(m, zero, s, 0.3, 6).p_L2, std::exp(-0.3) * expected, 1e-4);
  EXPECT_NEAR(error_norms(m, zero, s, 0.0, 5).E_L2, 0.0, 0.0);
}

TEST(ErrorNorms, DegreeBelowFourRejected) {
  const TetMesh m = build_unit_cube_mesh(1);
  EXPECT_THROW(error_norms(m, State::zeros(m), example61(PhysicalParams{}), 0.0, 3), ValidationError);
}

TEST(ErrorNorms, QuadratureDegreeStability) {
  const TetMesh m = build_unit_cube_mesh(4);
  const PhysicalParams prm;
  const ExactSolution s = example61(prm);
  const DiscreteOperators ops(m, prm, QuadratureDegrees{});
  const State proj = initial_state(ops, InitialData::from(s, 0.1), SolverOptions{});
  const auto e4 = error_norms(m, proj, s, 0.1, 4), e6 = error_norms(m, proj, s, 0.1, 6);
  auto rel = [](double a, double b) { return std::abs(a - b) / b; };
  EXPECT_LT(rel(e4.E_L2, e6.E_L2), 1e-3);
  EXPECT_LT(rel(e4.H_L2, e6.H_L2), 1e-3);
  EXPECT_LT(rel(e4.u_L2, e6.u_L2), 1e-3);
  EXPECT_LT(rel(e4.u_H1, e6.u_H1), 1e-3);
  EXPECT_LT(rel(e4.p_L2, e6.p_L2), 1e-3);
  EXPECT_GT(e6.p_L2, 0.0);
}

TEST(ErrorNorms, DifferenceIsSymmetric) {
  const TetMesh m = build_unit_cube_mesh(2);
  State a = State::zeros(m), b = State::zeros(m);
  a.p.setConstant(1.0);
  b.E.setConstant(0.5);
  const auto d1 = difference_norms(m, a, b, 5), d2 = difference_norms(m, b, a, 5);
  EXPECT_NEAR(d1.p_L2, 1.0, 1e-13);
  EXPECT_DOUBLE_EQ(d1.E_L2, d2.E_L2);
  EXPECT_DOUBLE_EQ(d1.p_L2, d2.p_L2);
}
