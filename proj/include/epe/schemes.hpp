#pragma once

/// \file schemes.hpp
/// Backward-Euler time stepping for the coupled Maxwell/Biot system.
///
/// SplittingStepper advances one step as two decoupled solves: the
/// electromagnetic pair (E, H) driven by the previous pressure, then the
/// Biot pair (u, p) driven by the new electric field. H lives in piecewise
/// constants and curl E_h is cellwise constant, so H is condensed out
/// exactly and the electromagnetic solve is SPD:
///   [(eps/tau) M_E + M_sigma + (tau/mu) C^T M_H^{-1} C] E^n
///       = (eps/tau) M_E E^{n-1} + C^T H^{n-1} + G_L p^{n-1} + j^n,
///   H^n = H^{n-1} - (tau/mu) curl E^n.
/// The Biot solve is the quasi-definite saddle system
///   A u^n - B^T p^n = f^n,
///   B u^n + (c0 M_P + tau K_P) p^n = c0 M_P p^{n-1} + B u^{n-1} + tau L_E E^n + tau g^n.
/// MonolithicStepper solves all four equations of the same backward-Euler
/// step in one nonsymmetric sparse LU system.

#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <vector>

#include "epe/assembly.hpp"
#include "epe/core.hpp"
#include "epe/fields.hpp"
#include "epe/linalg.hpp"
#include "epe/mms.hpp"

namespace epe {

/// Volume sources; a null function means zero.
struct Sources {
  VectorField j;  // electric current
  VectorField f;  // body force
  ScalarField g;  // fluid source

  static Sources from(const ExactSolution& s) { return {s.j, s.f, s.g}; }
};

/// All time-independent Galerkin matrices on one mesh, on full DOF numbering.
/// The mesh must outlive this object.
class DiscreteOperators {
 public:
  DiscreteOperators(const TetMesh& mesh, const PhysicalParams& params, const QuadratureDegrees& quad)
      : mesh_(&mesh),
        params_(params),
        quad_(quad),
        E_(mesh, Space::E),
        H_(mesh, Space::H),
        U_(mesh, Space::U),
        P_(mesh, Space::P) {
    const int d = quad.assembly;
    mass_E = assemble_matrix(mesh, E_, E_, Form::MassE, 1.0, d);
    mass_E_sigma = assemble_matrix(mesh, E_, E_, Form::MassE, params.sigma, d);
    curl_to_h = assemble_matrix(mesh, H_, E_, Form::CurlToH, 1.0, d);
    h_curl_test = assemble_matrix(mesh, E_, H_, Form::HCurlTest, 1.0, d);
    h_mass = assemble_matrix(mesh, H_, H_, Form::HMass, 1.0, d);
    grad_p_to_e = assemble_matrix(mesh, E_, P_, Form::GradPToE, params.L, d);
    e_to_grad_q = assemble_matrix(mesh, P_, E_, Form::EToGradQ, params.L, d);
    elasticity = assemble_matrix(mesh, U_, U_, Form::Elasticity, FormCoefficient::lame(params.lambda_c, params.G), d);
    div_coupling = assemble_matrix(mesh, P_, U_, Form::DivCoupling, params.alpha, d);
    p_mass = assemble_matrix(mesh, P_, P_, Form::PMass, 1.0, d);
    p_stiff = assemble_matrix(mesh, P_, P_, Form::PStiff, params.kappa, d);

    // Cellwise curl: M_H^{-1} C, exact because M_H is diagonal.
    Eigen::VectorXd inv_h_mass(h_mass.rows());
    for (int i = 0; i < h_mass.rows(); ++i) inv_h_mass[i] = 1.0 / h_mass.coeff(i, i);
    cell_curl = inv_h_mass.asDiagonal() * curl_to_h;
    cell_curl.makeCompressed();
  }

  const TetMesh& mesh() const { return *mesh_; }
  const PhysicalParams& params() const { return params_; }
  const QuadratureDegrees& quad() const { return quad_; }
  const DofLayout& layout_E() const { return E_; }
  const DofLayout& layout_H() const { return H_; }
  const DofLayout& layout_U() const { return U_; }
  const DofLayout& layout_P() const { return P_; }

  CsrMatrix mass_E, mass_E_sigma;
  CsrMatrix curl_to_h, h_curl_test, h_mass, cell_curl;
  CsrMatrix grad_p_to_e, e_to_grad_q;
  CsrMatrix elasticity, div_coupling;
  CsrMatrix p_mass, p_stiff;

 private:
  const TetMesh* mesh_;
  PhysicalParams params_;
  QuadratureDegrees quad_;
  DofLayout E_, H_, U_, P_;
};

/// Source load vectors at one time, on full numbering.
struct SourceLoads {
  Eigen::VectorXd j, f, g;
};

inline SourceLoads assemble_sources(const DiscreteOperators& ops, const Sources& src, double t) {
  const auto& mesh = ops.mesh();
  const int d = ops.quad().load;
  SourceLoads l;
  l.j = src.j ? assemble_load(mesh, ops.layout_E(), src.j, t, d) : Eigen::VectorXd::Zero(ops.layout_E().size());
  l.f = src.f ? assemble_load(mesh, ops.layout_U(), src.f, t, d) : Eigen::VectorXd::Zero(ops.layout_U().size());
  l.g = src.g ? assemble_load(mesh, ops.layout_P(), src.g, t, d) : Eigen::VectorXd::Zero(ops.layout_P().size());
  return l;
}

/// Initial fields; null members are zero.
struct InitialData {
  std::function<Vec3(const Vec3&)> E, H, u;
  std::function<double(const Vec3&)> p;

  static InitialData from(const ExactSolution& s, double t0 = 0.0) {
    return {[s, t0](const Vec3& x) { return s.E(t0, x); }, [s, t0](const Vec3& x) { return s.H(t0, x); },
            [s, t0](const Vec3& x) { return s.u(t0, x); }, [s, t0](const Vec3& x) { return s.p(t0, x); }};
  }
};

/// L2-orthogonal projection of the initial data onto the discrete spaces:
/// the full mass system is solved, then constrained DOFs are set to zero.
inline State initial_state(const DiscreteOperators& ops, const InitialData& data, const SolverOptions& opts) {
  const auto& mesh = ops.mesh();
  const int d = ops.quad().load;
  State s = State::zeros(mesh);
  auto wrap_vec = [](const std::function<Vec3(const Vec3&)>& f) {
    return [&f](double, const Vec3& x) { return f(x); };
  };
  if (data.E) {
    const Eigen::VectorXd b = assemble_load(mesh, ops.layout_E(), wrap_vec(data.E), 0.0, d);
    s.E = LdltSolver(ops.mass_E).solve(b, opts.spd_tol).x;
    ops.layout_E().zero_constrained(s.E);
  }
  if (data.H) {
    const Eigen::VectorXd b = assemble_load(mesh, ops.layout_H(), wrap_vec(data.H), 0.0, d);
    for (int i = 0; i < b.size(); ++i) s.H[i] = b[i] / ops.h_mass.coeff(i, i);
  }
  if (data.u || data.p) {
    const LdltSolver p_mass(ops.p_mass);
    if (data.u) {
      // Vector P1 mass is the scalar mass on each component.
      const Eigen::VectorXd b = assemble_load(mesh, ops.layout_U(), wrap_vec(data.u), 0.0, d);
      for (int k = 0; k < 3; ++k) {
        Eigen::VectorXd bk(ops.layout_P().size());
        for (int v = 0; v < bk.size(); ++v) bk[v] = b[3 * v + k];
        const Eigen::VectorXd xk = p_mass.solve(bk, opts.spd_tol).x;
        for (int v = 0; v < bk.size(); ++v) s.u[3 * v + k] = xk[v];
      }
      ops.layout_U().zero_constrained(s.u);
    }
    if (data.p) {
      const Eigen::VectorXd b =
          assemble_load(mesh, ops.layout_P(), [&](double, const Vec3& x) { return data.p(x); }, 0.0, d);
      s.p = p_mass.solve(b, opts.spd_tol).x;
      ops.layout_P().zero_constrained(s.p);
    }
  }
  return s;
}

/// Discrete pressure-to-dilation operator: for p_h, solve
/// a(u_h, v) = (p_h, alpha div v) for all v and return the P_h
/// representative of alpha div u_h.
class PressureDilationOperator {
 public:
  PressureDilationOperator(const DiscreteOperators& ops, const SolverOptions& opts)
      : ops_(&ops),
        opts_(opts),
        A_(restrict_matrix(ops.elasticity, ops.layout_U(), ops.layout_U())),
        B_(restrict_matrix(ops.div_coupling, ops.layout_P(), ops.layout_U())),
        elasticity_(A_),
        p_mass_(restrict_matrix(ops.p_mass, ops.layout_P(), ops.layout_P())) {}

  /// Displacement u_h(p) on the free U DOFs.
  Eigen::VectorXd displacement(const Eigen::VectorXd& p_full) const {
    const Eigen::VectorXd p = ops_->layout_P().restrict_vector(p_full);
    return elasticity_.solve(B_.transpose() * p, opts_.spd_tol).x;
  }

  Eigen::VectorXd apply(const Eigen::VectorXd& p_full) const {
    const Eigen::VectorXd functional = B_ * displacement(p_full);
    return ops_->layout_P().extend_vector(p_mass_.solve(functional, opts_.spd_tol).x);
  }

  /// (B_h p, p) = a(u_h(p), u_h(p)) >= 0.
  double quadratic_form(const Eigen::VectorXd& p_full) const {
    const Eigen::VectorXd p = ops_->layout_P().restrict_vector(p_full);
    return p.dot(B_ * displacement(p_full));
  }

 private:
  const DiscreteOperators* ops_;
  SolverOptions opts_;
  CsrMatrix A_, B_;
  LdltSolver elasticity_;
  LdltSolver p_mass_;
};

/// The L2 inner product on P_h of two full coefficient vectors.
inline double p_inner(const DiscreteOperators& ops, const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return a.dot(ops.p_mass * b);
}

struct DiscreteEnergy {
  double electric = 0.0;   // eps |E|^2
  double magnetic = 0.0;   // mu |H|^2
  double pressure = 0.0;   // ((c0 + B_h) p, p)
  double gradient = 0.0;   // tau kappa |grad p|^2
  double total() const { return electric + magnetic + pressure + gradient; }
};

inline DiscreteEnergy discrete_energy(const State& s, const DiscreteOperators& ops,
                                      const PressureDilationOperator& bh, double tau) {
  const auto& prm = ops.params();
  DiscreteEnergy e;
  e.electric = prm.epsilon * s.E.dot(ops.mass_E * s.E);
  e.magnetic = prm.mu * s.H.dot(ops.h_mass * s.H);
  e.pressure = prm.c0 * p_inner(ops, s.p, s.p) + bh.quadratic_form(s.p);
  e.gradient = tau * s.p.dot(ops.p_stiff * s.p);  // p_stiff carries kappa
  return e;
}

/// L2 norm of the piecewise-constant residual mu (H^n - H^{n-1}) / tau + curl E^n.
inline double h_update_residual(const DiscreteOperators& ops, const State& prev, const State& next, double tau) {
  const Eigen::VectorXd r = ops.params().mu * (next.H - prev.H) / tau + ops.cell_curl * next.E;
  return std::sqrt(r.dot(ops.h_mass * r));
}

struct StepReport {
  LinearSolveReport em;    // electromagnetic (or the whole coupled system)
  LinearSolveReport biot;  // empty for the monolithic scheme
};

namespace detail {

// Places reduced blocks into one matrix; offsets index block rows/columns.
struct BlockBuilder {
  Triplets t;
  void add(const CsrMatrix& block, int row_offset, int col_offset, double scale = 1.0) {
    for (int r = 0; r < block.outerSize(); ++r)
      for (CsrMatrix::InnerIterator it(block, r); it; ++it)
        if (it.value() != 0.0) t.emplace_back(row_offset + r, col_offset + static_cast<int>(it.col()), scale * it.value());
  }
};

}  // namespace detail

class SplittingStepper {
 public:
  SplittingStepper(const DiscreteOperators& ops, double tau, const SolverOptions& opts, bool uncondensed = false)
      : ops_(&ops), tau_(tau), opts_(opts), uncondensed_(uncondensed) {
    const auto& prm = ops.params();
    const auto& E = ops.layout_E();
    const auto& H = ops.layout_H();
    const auto& U = ops.layout_U();
    const auto& P = ops.layout_P();

    em_lhs_full_ = (prm.epsilon / tau) * ops.mass_E + ops.mass_E_sigma;
    if (!uncondensed_) {
      const CsrMatrix curl_curl = ops.h_curl_test * ops.cell_curl;
      const CsrMatrix K = em_lhs_full_ + (tau / prm.mu) * curl_curl;
      em_solver_ = std::make_unique<SpdSolver>(restrict_matrix(K, E, E), opts);
    } else {
      const int ne = E.num_free(), nh = H.size();
      detail::BlockBuilder b;
      b.add(restrict_matrix(em_lhs_full_, E, E), 0, 0);
      b.add(restrict_matrix(ops.h_curl_test, E, H), 0, ne, -1.0);
      b.add(restrict_matrix(ops.curl_to_h, H, E), ne, 0);
      b.add(ops.h_mass, ne, ne, prm.mu / tau);
      em_block_solver_ = std::make_unique<LuSolver>(csr_from_triplets(ne + nh, ne + nh, b.t));
    }

    SaddleBlocks blocks{restrict_matrix(ops.elasticity, U, U), restrict_matrix(ops.div_coupling, P, U),
                        restrict_matrix(CsrMatrix(prm.c0 * ops.p_mass + tau * ops.p_stiff), P, P)};
    biot_solver_ = std::make_unique<SaddleSolver>(std::move(blocks), opts);
  }

  double tau() const { return tau_; }
  const StepReport& last_report() const { return report_; }

  State step(const State& prev, const SourceLoads& loads) {
    const auto& ops = *ops_;
    const auto& prm = ops.params();
    const auto& E = ops.layout_E();
    const auto& U = ops.layout_U();
    const auto& P = ops.layout_P();

    State next;
    next.step = prev.step + 1;

    // Electromagnetic sub-step, driven by p^{n-1}.
    Eigen::VectorXd rhs_e = (prm.epsilon / tau_) * (ops.mass_E * prev.E) + ops.grad_p_to_e * prev.p + loads.j;
    if (!uncondensed_) {
      rhs_e += ops.h_curl_test * prev.H;
      const auto r = em_solver_->solve(E.restrict_vector(rhs_e));
      report_.em = r.report;
      next.E = E.extend_vector(r.x);
      next.H = prev.H - (tau_ / prm.mu) * (ops.cell_curl * next.E);
    } else {
      const int ne = E.num_free();
      Eigen::VectorXd rhs(ne + prev.H.size());
      rhs << E.restrict_vector(rhs_e), (prm.mu / tau_) * (ops.h_mass * prev.H);
      const auto r = em_block_solver_->solve(rhs, opts_.spd_tol);
      report_.em = r.report;
      next.E = E.extend_vector(r.x.head(ne));
      next.H = r.x.tail(prev.H.size());
    }

    // Biot sub-step, driven by E^n.
    const Eigen::VectorXd rhs_p = prm.c0 * (ops.p_mass * prev.p) + ops.div_coupling * prev.u +
                                  tau_ * (ops.e_to_grad_q * next.E) + tau_ * loads.g;
    const auto sol = biot_solver_->solve(U.restrict_vector(loads.f), P.restrict_vector(rhs_p));
    report_.biot = sol.report;
    next.u = U.extend_vector(sol.u);
    next.p = P.extend_vector(sol.p);
    return next;
  }

 private:
  const DiscreteOperators* ops_;
  double tau_;
  SolverOptions opts_;
  bool uncondensed_;
  CsrMatrix em_lhs_full_;
  std::unique_ptr<SpdSolver> em_solver_;
  std::unique_ptr<LuSolver> em_block_solver_;
  std::unique_ptr<SaddleSolver> biot_solver_;
  StepReport report_;
};

class MonolithicStepper {
 public:
  MonolithicStepper(const DiscreteOperators& ops, double tau, const SolverOptions& opts)
      : ops_(&ops), tau_(tau), opts_(opts) {
    const auto& prm = ops.params();
    const auto& E = ops.layout_E();
    const auto& H = ops.layout_H();
    const auto& U = ops.layout_U();
    const auto& P = ops.layout_P();
    ne_ = E.num_free();
    nh_ = H.size();
    nu_ = U.num_free();
    np_ = P.num_free();
    const int oh = ne_, ou = ne_ + nh_, op = ne_ + nh_ + nu_;

    detail::BlockBuilder b;
    // E row
    b.add(restrict_matrix(CsrMatrix((prm.epsilon / tau) * ops.mass_E + ops.mass_E_sigma), E, E), 0, 0);
    b.add(restrict_matrix(ops.h_curl_test, E, H), 0, oh, -1.0);
    b.add(restrict_matrix(ops.grad_p_to_e, E, P), 0, op, -1.0);
    // H row
    b.add(restrict_matrix(ops.curl_to_h, H, E), oh, 0);
    b.add(ops.h_mass, oh, oh, prm.mu / tau);
    // U row
    b.add(restrict_matrix(ops.elasticity, U, U), ou, ou);
    b.add(restrict_matrix(CsrMatrix(ops.div_coupling.transpose()), U, P), ou, op, -1.0);
    // P row, scaled by tau
    b.add(restrict_matrix(ops.e_to_grad_q, P, E), op, 0, -tau);
    b.add(restrict_matrix(ops.div_coupling, P, U), op, ou);
    b.add(restrict_matrix(CsrMatrix(prm.c0 * ops.p_mass + tau * ops.p_stiff), P, P), op, op);
    const int n = op + np_;
    solver_ = std::make_unique<LuSolver>(csr_from_triplets(n, n, b.t));
  }

  double tau() const { return tau_; }
  int size() const { return solver_->size(); }
  const StepReport& last_report() const { return report_; }

  State step(const State& prev, const SourceLoads& loads) {
    const auto& ops = *ops_;
    const auto& prm = ops.params();
    const auto& E = ops.layout_E();
    const auto& U = ops.layout_U();
    const auto& P = ops.layout_P();

    Eigen::VectorXd rhs(ne_ + nh_ + nu_ + np_);
    rhs << E.restrict_vector((prm.epsilon / tau_) * (ops.mass_E * prev.E) + loads.j),
        (prm.mu / tau_) * (ops.h_mass * prev.H), U.restrict_vector(loads.f),
        P.restrict_vector(tau_ * loads.g + prm.c0 * (ops.p_mass * prev.p) + ops.div_coupling * prev.u);
    const auto r = solver_->solve(rhs, opts_.saddle_tol);
    report_.em = r.report;
    report_.biot = {};

    State next;
    next.step = prev.step + 1;
    next.E = E.extend_vector(r.x.segment(0, ne_));
    next.H = r.x.segment(ne_, nh_);
    next.u = U.extend_vector(r.x.segment(ne_ + nh_, nu_));
    next.p = P.extend_vector(r.x.segment(ne_ + nh_ + nu_, np_));
    return next;
  }

 private:
  const DiscreteOperators* ops_;
  double tau_;
  SolverOptions opts_;
  int ne_ = 0, nh_ = 0, nu_ = 0, np_ = 0;
  std::unique_ptr<LuSolver> solver_;
  StepReport report_;
};

// ---------------------------------------------------------------------------
// Time loop

struct StepInfo {
  std::int64_t n;
  double t;
  const State& state;
  double energy;  // NaN unless energy tracking is on
  double step_seconds;
};

using Observer = std::function<void(const StepInfo&)>;

struct RunOptions {
  bool track_energy = false;
  bool track_h_residual = false;
};

struct RunTimings {
  double assemble = 0.0;
  double factor = 0.0;
  double loop = 0.0;
  double total() const { return assemble + factor + loop; }
};

struct RunResult {
  State final_state;
  RunTimings timings;
  std::vector<double> step_seconds;
  std::vector<double> energy;  // S^0 .. S^N when tracked
  std::vector<StepReport> reports;
  double max_h_residual = 0.0;
};

namespace detail {
inline double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}
}  // namespace detail

/// Runs backward-Euler steps on `grid` from `initial` with operators already
/// assembled (assembly time is the caller's to record). `max_steps` >= 0 stops
/// early; 0 returns the initial state.
inline RunResult run_with_operators(Scheme scheme, const DiscreteOperators& ops, const TimeGrid& grid,
                                    const SolverOptions& solver, bool uncondensed_em, const Sources& sources,
                                    const State& initial, const std::vector<Observer>& observers = {},
                                    const RunOptions& options = {}, std::int64_t max_steps = -1) {
  using clock = std::chrono::steady_clock;
  RunResult out;
  const double tau = grid.tau();

  auto t0 = clock::now();
  std::optional<SplittingStepper> split;
  std::optional<MonolithicStepper> mono;
  if (scheme == Scheme::Splitting) split.emplace(ops, tau, solver, uncondensed_em);
  else mono.emplace(ops, tau, solver);
  std::optional<PressureDilationOperator> bh;
  if (options.track_energy) bh.emplace(ops, solver);
  out.timings.factor = detail::seconds_since(t0);

  auto energy_of = [&](const State& s) {
    return bh ? discrete_energy(s, ops, *bh, tau).total() : std::numeric_limits<double>::quiet_NaN();
  };

  t0 = clock::now();
  State current = initial;
  current.step = 0;
  current.time = grid.node(0);
  const double e0 = energy_of(current);
  if (bh) out.energy.push_back(e0);
  for (const auto& obs : observers) obs({0, current.time, current, e0, 0.0});

  const std::int64_t last = max_steps < 0 ? grid.steps() : std::min(max_steps, grid.steps());
  for (std::int64_t n = 1; n <= last; ++n) {
    const auto ts = clock::now();
    const double tn = grid.node(n);
    const SourceLoads loads = assemble_sources(ops, sources, tn);
    State next = split ? split->step(current, loads) : mono->step(current, loads);
    next.time = tn;
    out.reports.push_back(split ? split->last_report() : mono->last_report());
    const double dt = detail::seconds_since(ts);
    out.step_seconds.push_back(dt);
    if (options.track_h_residual) out.max_h_residual = std::max(out.max_h_residual, h_update_residual(ops, current, next, tau));
    const double en = energy_of(next);
    if (bh) out.energy.push_back(en);
    for (const auto& obs : observers) obs({n, tn, next, en, dt});
    current = std::move(next);
  }
  out.timings.loop = detail::seconds_since(t0);
  out.final_state = std::move(current);
  return out;
}

/// Full run: assemble, project initial data (if no initial state is given),
/// factorize, step.
inline RunResult run(const RunConfig& cfg, const TetMesh& mesh, const Sources& sources, const InitialData& init,
                     const std::vector<Observer>& observers = {}, const RunOptions& options = {},
                     std::int64_t max_steps = -1) {
  const auto t0 = std::chrono::steady_clock::now();
  const DiscreteOperators ops(mesh, cfg.params, cfg.quad);
  const State initial = initial_state(ops, init, cfg.solver);
  const double assemble = detail::seconds_since(t0);
  RunResult r = run_with_operators(cfg.scheme, ops, cfg.grid, cfg.solver, cfg.uncondensed_em, sources, initial,
                                   observers, options, max_steps);
  r.timings.assemble = assemble;
  return r;
}

}  // namespace epe
