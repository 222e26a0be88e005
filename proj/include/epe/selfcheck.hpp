#pragma once

/// \file selfcheck.hpp
/// Fast invariant checks run by `epe self-check`: mesh Euler characteristic
/// and volume, Nedelec edge-moment duality, symmetry and monotonicity of the
/// pressure-to-dilation operator, and energy decay of the splitting scheme
/// on a coarse mesh.

#include <cmath>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "epe/schemes.hpp"

namespace epe {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Random tetrahedron with volume bounded away from zero.
template <class Rng>
std::array<Vec3, 4> random_tetrahedron(Rng& rng) {
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (;;) {
    std::array<Vec3, 4> x;
    for (auto& v : x) v = Vec3(U(rng), U(rng), U(rng));
    const double det = (x[1] - x[0]).dot((x[2] - x[0]).cross(x[3] - x[0]));
    if (std::abs(det) < 0.05) continue;
    if (det < 0) std::swap(x[2], x[3]);
    return x;
  }
}

/// Random state with zero constrained DOFs whose displacement is in
/// equilibrium with its pressure (a(u, v) = (p, alpha div v)).
template <class Rng>
State random_admissible_state(const DiscreteOperators& ops, const PressureDilationOperator& bh, Rng& rng) {
  std::normal_distribution<double> N01;
  State s = State::zeros(ops.mesh());
  for (auto* v : {&s.E, &s.H, &s.p})
    for (Eigen::Index i = 0; i < v->size(); ++i) (*v)[i] = N01(rng);
  ops.layout_E().zero_constrained(s.E);
  ops.layout_P().zero_constrained(s.p);
  s.u = ops.layout_U().extend_vector(bh.displacement(s.p));
  return s;
}

inline CheckResult check_mesh_topology(int n) {
  const auto st = mesh_stats(build_unit_cube_mesh(n));
  std::ostringstream d;
  d << "n=" << n << " chi=" << st.euler_characteristic() << " volume=" << st.total_volume;
  return {"mesh euler/volume n=" + std::to_string(n),
          st.euler_characteristic() == 1 && std::abs(st.total_volume - 1.0) <= 1e-12, d.str()};
}

/// Edge moments: integral over edge j of phi_i . t_j = delta_ij, with the
/// unnormalised tangent t_j = x_b - x_a. phi_i . t_j is linear along the
/// edge, so the midpoint rule is exact.
inline CheckResult check_nedelec_duality(int cells, unsigned seed = 7) {
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  for (int c = 0; c < cells; ++c) {
    const CellGeometry g(random_tetrahedron(rng));
    for (int j = 0; j < 6; ++j) {
      const auto [a, b] = kLocalEdges[static_cast<std::size_t>(j)];
      std::array<double, 4> lam{};
      lam[static_cast<std::size_t>(a)] = lam[static_cast<std::size_t>(b)] = 0.5;
      const auto phi = NedelecElement::values(g, lam);
      const Vec3 t = g.vertex(b) - g.vertex(a);
      for (int i = 0; i < 6; ++i)
        worst = std::max(worst, std::abs(phi[static_cast<std::size_t>(i)].dot(t) - (i == j ? 1.0 : 0.0)));
    }
  }
  std::ostringstream d;
  d << cells << " cells, max defect " << worst;
  return {"nedelec duality", worst <= 1e-12, d.str()};
}

inline std::vector<CheckResult> check_pressure_dilation(int n, int pairs, unsigned seed = 11) {
  const TetMesh mesh = build_unit_cube_mesh(n);
  const DiscreteOperators ops(mesh, PhysicalParams{}, QuadratureDegrees{});
  const PressureDilationOperator bh(ops, SolverOptions{});
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> N01;
  auto random_p = [&] {
    Eigen::VectorXd p(ops.layout_P().size());
    for (auto& v : p) v = N01(rng);
    ops.layout_P().zero_constrained(p);
    return p;
  };
  double sym = 0.0, min_form = INFINITY;
  for (int k = 0; k < pairs; ++k) {
    const Eigen::VectorXd p = random_p(), q = random_p();
    const double np = std::sqrt(p_inner(ops, p, p)), nq = std::sqrt(p_inner(ops, q, q));
    const double defect = std::abs(p_inner(ops, bh.apply(p), q) - p_inner(ops, p, bh.apply(q)));
    sym = std::max(sym, defect / (np * nq));
    min_form = std::min(min_form, p_inner(ops, bh.apply(p), p));
  }
  std::ostringstream d1, d2;
  d1 << pairs << " pairs, max relative defect " << sym;
  d2 << "min (B_h p, p) = " << min_form;
  return {{"B_h symmetry", sym <= 1e-9, d1.str()}, {"B_h monotone", min_form >= -1e-12, d2.str()}};
}

/// Splitting scheme with zero sources and random admissible data; S^n must
/// not increase by more than rel_tol * S^{n-1} per step.
inline CheckResult check_energy_decay(int n, double tau, int steps, unsigned seed = 3, double rel_tol = 1e-12) {
  const TetMesh mesh = build_unit_cube_mesh(n);
  const PhysicalParams prm;
  const SolverOptions opts;
  const DiscreteOperators ops(mesh, prm, QuadratureDegrees{});
  const PressureDilationOperator bh(ops, opts);
  std::mt19937_64 rng(seed);
  const State s0 = random_admissible_state(ops, bh, rng);
  const RunResult r = run_with_operators(Scheme::Splitting, ops, make_time_grid(tau * steps, steps), opts, false,
                                         Sources{}, s0, {}, RunOptions{true, false});
  double worst = -INFINITY;
  for (std::size_t k = 1; k < r.energy.size(); ++k)
    worst = std::max(worst, (r.energy[k] - r.energy[k - 1]) / r.energy[k - 1]);
  std::ostringstream d;
  d << steps << " steps, S0=" << r.energy.front() << " SN=" << r.energy.back() << " max relative increase "
    << worst;
  return {"energy decay n=" + std::to_string(n), worst <= rel_tol, d.str()};
}

inline std::vector<CheckResult> self_check() {
  std::vector<CheckResult> out;
  for (int n : {1, 2}) out.push_back(check_mesh_topology(n));
  out.push_back(check_nedelec_duality(100));
  for (auto& c : check_pressure_dilation(2, 20)) out.push_back(std::move(c));
  out.push_back(check_energy_decay(2, 0.01, 100));
  return out;
}

}  // namespace epe
