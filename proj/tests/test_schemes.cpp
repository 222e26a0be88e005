#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "epe/selfcheck.hpp"

using namespace epe;

namespace {

double rel_diff(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const double s = std::max(a.norm(), b.norm());
  return s > 0 ? (a - b).norm() / s : 0.0;
}

double state_rel_diff(const State& a, const State& b) {
  return std::max({rel_diff(a.E, b.E), rel_diff(a.H, b.H), rel_diff(a.u, b.u), rel_diff(a.p, b.p)});
}

RunConfig config(int n, double T, std::int64_t N, Scheme s = Scheme::Splitting) {
  RunConfig c;
  c.mesh_n = n;
  c.grid = make_time_grid(T, N);
  c.scheme = s;
  return c;
}

Sources scaled(const Sources& s, double a) {
  return {[=](double t, const Vec3& x) { return Vec3(a * s.j(t, x)); },
          [=](double t, const Vec3& x) { return Vec3(a * s.f(t, x)); },
          [=](double t, const Vec3& x) { return a * s.g(t, x); }};
}

Sources sum(const Sources& a, const Sources& b) {
  return {[=](double t, const Vec3& x) { return Vec3(a.j(t, x) + b.j(t, x)); },
          [=](double t, const Vec3& x) { return Vec3(a.f(t, x) + b.f(t, x)); },
          [=](double t, const Vec3& x) { return a.g(t, x) + b.g(t, x); }};
}

Sources polynomial_sources() {
  return {[](double t, const Vec3& x) { return Vec3(1 + t * x[1], x[0] * x[2], -x[1]); },
          [](double t, const Vec3& x) { return Vec3(x[2] - t, 2 * x[0], x[0] * x[1]); },
          [](double t, const Vec3& x) { return 1 + x[0] * x[1] * x[2] * (1 - t); }};
}

}  // namespace

TEST(Schemes, ZeroInZeroOut) {
  const TetMesh m = build_unit_cube_mesh(3);
  for (Scheme s : {Scheme::Splitting, Scheme::Monolithic}) {
    const RunResult r = run(config(3, 0.1, 5, s), m, Sources{}, InitialData{});
    EXPECT_EQ(r.final_state.E.cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ(r.final_state.H.cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ(r.final_state.u.cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ(r.final_state.p.cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ(r.final_state.step, 5);
    EXPECT_NEAR(r.final_state.time, 0.1, 0.0);
  }
}

TEST(Schemes, NoStepsReturnsInitialState) {
  const TetMesh m = build_unit_cube_mesh(2);
  const PhysicalParams prm;
  const DiscreteOperators ops(m, prm, QuadratureDegrees{});
  const ExactSolution ex = example61(prm);
  const State s0 = initial_state(ops, InitialData::from(ex), SolverOptions{});
  int calls = 0;
  const RunResult r = run_with_operators(Scheme::Splitting, ops, make_time_grid(0.1, 4), SolverOptions{}, false,
                                         Sources::from(ex), s0, {[&](const StepInfo&) { ++calls; }}, {}, 0);
  EXPECT_EQ(calls, 1);
  EXPECT_TRUE(r.step_seconds.empty());
  EXPECT_EQ(state_rel_diff(r.final_state, s0), 0.0);
  EXPECT_EQ(r.final_state.step, 0);
}

TEST(Schemes, CondensedMatchesUncondensed) {
  const TetMesh m = build_unit_cube_mesh(2);
  const PhysicalParams prm;
  const ExactSolution ex = example61(prm);
  RunConfig c = config(2, 0.1, 10);
  std::vector<State> a, b;
  run(c, m, Sources::from(ex), InitialData::from(ex), {[&](const StepInfo& i) { a.push_back(i.state); }});
  c.uncondensed_em = true;
  run(c, m, Sources::from(ex), InitialData::from(ex), {[&](const StepInfo& i) { b.push_back(i.state); }});
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    EXPECT_LE(rel_diff(a[k].E, b[k].E), 10 * c.solver.spd_tol) << "step " << k;
    EXPECT_LE(rel_diff(a[k].H, b[k].H), 10 * c.solver.spd_tol) << "step " << k;
  }
}

TEST(Schemes, MagneticUpdateResidual) {
  for (int n : {2, 4}) {
    const TetMesh m = build_unit_cube_mesh(n);
    const ExactSolution ex = example61(PhysicalParams{});
    const RunResult r = run(config(n, 0.1, 40), m, Sources::from(ex), InitialData::from(ex), {}, {false, true});
    EXPECT_LE(r.max_h_residual, 1e-13) << "n=" << n;
  }
}

TEST(Schemes, DecoupledSchemesAgree) {
  const TetMesh m = build_unit_cube_mesh(3);
  RunConfig c = config(3, 0.1, 10);
  c.params.L = 0.0;
  c.allow_decoupled = true;
  const ExactSolution ex = example61(c.params);
  std::vector<State> a, b;
  run(c, m, Sources::from(ex), InitialData::from(ex), {[&](const StepInfo& i) { a.push_back(i.state); }});
  c.scheme = Scheme::Monolithic;
  run(c, m, Sources::from(ex), InitialData::from(ex), {[&](const StepInfo& i) { b.push_back(i.state); }});
  for (std::size_t k = 0; k < a.size(); ++k) EXPECT_LE(state_rel_diff(a[k], b[k]), 10 * c.solver.saddle_tol);
}

// The splitting perturbation is O(tau).
TEST(Schemes, SplittingGapHalvesWithTau) {
  const TetMesh m = build_unit_cube_mesh(4);
  const ExactSolution ex = example61(PhysicalParams{});
  auto gap = [&](std::int64_t N) {
    const State s = run(config(4, 0.1, N, Scheme::Splitting), m, Sources::from(ex), InitialData::from(ex)).final_state;
    const State t = run(config(4, 0.1, N, Scheme::Monolithic), m, Sources::from(ex), InitialData::from(ex)).final_state;
    return (s.E - t.E).norm();
  };
  const double order = std::log2(gap(10) / gap(20));
  EXPECT_NEAR(order, 1.0, 0.3);
}

TEST(Schemes, Linearity) {
  const TetMesh m = build_unit_cube_mesh(3);
  const Sources s1 = Sources::from(example61(PhysicalParams{}));
  const Sources s2 = polynomial_sources();
  for (Scheme sc : {Scheme::Splitting, Scheme::Monolithic}) {
    const RunConfig c = config(3, 0.05, 5, sc);
    const State a = run(c, m, s1, InitialData{}).final_state;
    const State b = run(c, m, s2, InitialData{}).final_state;
    const State ab = run(c, m, sum(scaled(s1, 2.0), scaled(s2, -0.5)), InitialData{}).final_state;
    State combo = a;
    combo.E = 2.0 * a.E - 0.5 * b.E;
    combo.H = 2.0 * a.H - 0.5 * b.H;
    combo.u = 2.0 * a.u - 0.5 * b.u;
    combo.p = 2.0 * a.p - 0.5 * b.p;
    EXPECT_LE(state_rel_diff(ab, combo), 10 * c.solver.saddle_tol);
  }
}

TEST(Schemes, BoundaryDofsStayZero) {
  const TetMesh m = build_unit_cube_mesh(3);
  const DofLayout E(m, Space::E), U(m, Space::U), P(m, Space::P);
  for (Scheme sc : {Scheme::Splitting, Scheme::Monolithic}) {
    int checked = 0;
    run(config(3, 0.1, 8, sc), m, polynomial_sources(), InitialData::from(example61(PhysicalParams{})),
        {[&](const StepInfo& i) {
          for (int k = 0; k < E.size(); ++k)
            if (E.is_constrained(k)) {
              ASSERT_EQ(i.state.E[k], 0.0);
            }
          for (int k = 0; k < U.size(); ++k)
            if (U.is_constrained(k)) {
              ASSERT_EQ(i.state.u[k], 0.0);
            }
          for (int k = 0; k < P.size(); ++k)
            if (P.is_constrained(k)) {
              ASSERT_EQ(i.state.p[k], 0.0);
            }
          ++checked;
        }});
    EXPECT_EQ(checked, 9);
  }
}

TEST(Energy, ZeroState) {
  const TetMesh m = build_unit_cube_mesh(2);
  const DiscreteOperators ops(m, PhysicalParams{}, QuadratureDegrees{});
  const PressureDilationOperator bh(ops, SolverOptions{});
  EXPECT_EQ(discrete_energy(State::zeros(m), ops, bh, 0.01).total(), 0.0);
}

TEST(Energy, DominatesMassTerms) {
  const TetMesh m = build_unit_cube_mesh(3);
  const PhysicalParams prm;
  const DiscreteOperators ops(m, prm, QuadratureDegrees{});
  const PressureDilationOperator bh(ops, SolverOptions{});
  std::mt19937_64 rng(1);
  for (int k = 0; k < 10; ++k) {
    const State s = random_admissible_state(ops, bh, rng);
    const auto e = discrete_energy(s, ops, bh, 0.01);
    EXPECT_GE(e.total(), prm.c0 * p_inner(ops, s.p, s.p) + prm.epsilon * s.E.dot(ops.mass_E * s.E));
    EXPECT_GE(e.magnetic, 0.0);
    EXPECT_GE(e.gradient, 0.0);
  }
}

TEST(Energy, NonIncreasingWithoutForcing) {
  for (int n : {2, 3}) {
    const auto r = check_energy_decay(n, 0.01, 100);
    EXPECT_TRUE(r.passed) << r.detail;
  }
}

TEST(PressureDilation, ZeroMapsToZero) {
  const TetMesh m = build_unit_cube_mesh(3);
  const DiscreteOperators ops(m, PhysicalParams{}, QuadratureDegrees{});
  const PressureDilationOperator bh(ops, SolverOptions{});
  EXPECT_EQ(bh.apply(Eigen::VectorXd::Zero(ops.layout_P().size())).cwiseAbs().maxCoeff(), 0.0);
}

TEST(PressureDilation, SymmetricAndMonotone) {
  for (int n : {2, 3, 4}) {
    for (const auto& c : check_pressure_dilation(n, 20, 100 + n)) EXPECT_TRUE(c.passed) << "n=" << n << " " << c.detail;
  }
}

TEST(PressureDilation, MonotoneOnManySamples) {
  for (int n : {2, 3}) {
    const TetMesh m = build_unit_cube_mesh(n);
    const DiscreteOperators ops(m, PhysicalParams{}, QuadratureDegrees{});
    const PressureDilationOperator bh(ops, SolverOptions{});
    std::mt19937_64 rng(5);
    std::normal_distribution<double> N01;
    for (int k = 0; k < 100; ++k) {
      Eigen::VectorXd p(ops.layout_P().size());
      for (auto& v : p) v = N01(rng);
      ops.layout_P().zero_constrained(p);
      EXPECT_GE(p_inner(ops, bh.apply(p), p), -1e-12);
    }
  }
}

// On n=2 the single interior hat function has zero discrete divergence
// coupling, so B_h vanishes there; n=3 exercises a nontrivial operator.
TEST(PressureDilation, NontrivialFromThreeCells) {
  const TetMesh m = build_unit_cube_mesh(3);
  const DiscreteOperators ops(m, PhysicalParams{}, QuadratureDegrees{});
  const PressureDilationOperator bh(ops, SolverOptions{});
  Eigen::VectorXd p = Eigen::VectorXd::Ones(ops.layout_P().size());
  ops.layout_P().zero_constrained(p);
  EXPECT_GT(bh.quadratic_form(p), 1e-6);
  EXPECT_NEAR(bh.quadratic_form(p), p_inner(ops, bh.apply(p), p), 1e-12);
}

TEST(Projection, ZeroData) {
  const TetMesh m = build_unit_cube_mesh(2);
  const DiscreteOperators ops(m, PhysicalParams{}, QuadratureDegrees{});
  const State s = initial_state(ops, InitialData{}, SolverOptions{});
  EXPECT_EQ(s.E.norm() + s.H.norm() + s.u.norm() + s.p.norm(), 0.0);
}

TEST(Projection, ReproducesDiscreteFunctions) {
  const TetMesh m = build_unit_cube_mesh(3);
  const DiscreteOperators ops(m, PhysicalParams{}, QuadratureDegrees{});
  InitialData d;
  d.p = [](const Vec3& x) { return 1.0 + 2.0 * x[0] - x[2]; };
  d.u = [](const Vec3& x) { return Vec3(x[1], 1.0 - x[0], 3.0 * x[2]); };
  d.H = [](const Vec3&) { return Vec3(1.0, -2.0, 0.5); };
  const State s = initial_state(ops, d, SolverOptions{});
  const DofLayout& P = ops.layout_P();
  for (int v = 0; v < P.size(); ++v) {
    const double expect = P.is_constrained(v) ? 0.0 : d.p(m.vertices[v]);
    EXPECT_NEAR(s.p[v], expect, 1e-10);
    const Vec3 uv = P.is_constrained(v) ? Vec3::Zero() : d.u(m.vertices[v]);
    EXPECT_LE((s.u.segment<3>(3 * v) - uv).norm(), 1e-10);
  }
  for (std::size_t c = 0; c < m.num_cells(); ++c) EXPECT_LE((eval_H(s.H, c) - Vec3(1.0, -2.0, 0.5)).norm(), 1e-13);
}

TEST(Projection, PressureErrorShrinksQuadratically) {
  const PhysicalParams prm;
  const ExactSolution ex = example61(prm);
  double err[2];
  int i = 0;
  for (int n : {4, 8}) {
    const TetMesh m = build_unit_cube_mesh(n);
    const DiscreteOperators ops(m, prm, QuadratureDegrees{});
    const State s = initial_state(ops, InitialData::from(ex), SolverOptions{});
    err[i++] = error_norms(m, s, ex, 0.0, 5).p_L2;
  }
  EXPECT_GT(err[0] / err[1], 3.0);
  EXPECT_LT(err[0] / err[1], 5.0);
}

TEST(Timing, PerStepCostIsFlat) {
  const TetMesh m = build_unit_cube_mesh(6);
  const ExactSolution ex = example61(PhysicalParams{});
  double spread = 1e300;
  for (int attempt = 0; attempt < 3 && spread >= 2.0; ++attempt) {
    const RunResult r = run(config(6, 0.1, 12), m, Sources::from(ex), InitialData::from(ex));
    const auto first = r.step_seconds.begin() + 1;
    spread = *std::max_element(first, r.step_seconds.end()) / *std::min_element(first, r.step_seconds.end());
  }
  EXPECT_LT(spread, 2.0);
}

TEST(Timing, LoopTimeScalesWithSteps) {
  const TetMesh m = build_unit_cube_mesh(8);
  const ExactSolution ex = example61(PhysicalParams{});
  const double t20 = run(config(8, 0.1, 20), m, Sources::from(ex), InitialData::from(ex)).timings.loop;
  const double t40 = run(config(8, 0.1, 40), m, Sources::from(ex), InitialData::from(ex)).timings.loop;
  EXPECT_GT(t40 / t20, 1.0);
  EXPECT_LT(t40 / t20, 3.0);
}
