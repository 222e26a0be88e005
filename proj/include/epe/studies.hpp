#pragma once

/// \file studies.hpp
/// Spatial and temporal convergence studies and the splitting vs monolithic
/// benchmark. Orders between consecutive rows use the two-point formula
///   order = log(e_prev / e_curr) / log(x_prev / x_curr)
/// with x = h = 1/n for spatial rows and x = tau for temporal rows.

#include <cmath>
#include <cstdint>
#include <future>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "epe/schemes.hpp"

namespace epe {

enum class StudyKind { Spatial, Temporal, Benchmark };

inline std::string_view to_string(StudyKind k) {
  switch (k) {
    case StudyKind::Spatial: return "spatial";
    case StudyKind::Temporal: return "temporal";
    case StudyKind::Benchmark: return "benchmark";
  }
  return "?";
}

struct StudyRow {
  Scheme scheme = Scheme::Splitting;
  int n = 0;
  double h = 0.0;  // 1/n
  double tau = 0.0;
  ErrorNorms errors;
  std::optional<ErrorNorms> orders;
  RunTimings timings;
  std::string fingerprint;
};

struct StudyReport {
  StudyKind kind = StudyKind::Spatial;
  std::vector<StudyRow> rows;

  /// Benchmark fairness: rows with the same n carry equal fingerprints.
  bool fingerprints_match() const {
    for (const auto& a : rows)
      for (const auto& b : rows)
        if (a.n == b.n && a.fingerprint != b.fingerprint) return false;
    return true;
  }
};

inline double convergence_order(double e_prev, double e_curr, double x_prev, double x_curr) {
  return std::log(e_prev / e_curr) / std::log(x_prev / x_curr);
}

inline ErrorNorms convergence_orders(const ErrorNorms& prev, const ErrorNorms& curr, double x_prev, double x_curr) {
  auto o = [&](double a, double b) { return convergence_order(a, b, x_prev, x_curr); };
  return {o(prev.E_L2, curr.E_L2), o(prev.H_L2, curr.H_L2), o(prev.u_L2, curr.u_L2), o(prev.u_H1, curr.u_H1),
          o(prev.p_L2, curr.p_L2)};
}

/// Fills orders between consecutive rows of the same scheme; the first row
/// of each scheme gets none.
inline void fill_orders(StudyReport& report) {
  const bool temporal = report.kind == StudyKind::Temporal;
  for (std::size_t i = 0; i < report.rows.size(); ++i) {
    auto& row = report.rows[i];
    row.orders.reset();
    for (std::size_t k = i; k-- > 0;) {
      const auto& prev = report.rows[k];
      if (prev.scheme != row.scheme) continue;
      const double xp = temporal ? prev.tau : prev.h;
      const double xc = temporal ? row.tau : row.h;
      if (xp != xc) row.orders = convergence_orders(prev.errors, row.errors, xp, xc);
      break;
    }
  }
}

/// Canonical text of every configuration value that affects the numbers,
/// except the scheme tag and the mesh size, hashed (FNV-1a, 64 bit).
inline std::string config_fingerprint(const RunConfig& c) {
  std::ostringstream s;
  s << std::setprecision(17);
  const auto& p = c.params;
  s << p.epsilon << ',' << p.mu << ',' << p.sigma << ',' << p.L << ',' << p.lambda_c << ',' << p.G << ','
    << p.alpha << ',' << p.c0 << ',' << p.kappa << ';' << c.grid.final_time() << ',' << c.grid.steps() << ';'
    << c.solver.spd_tol << ',' << c.solver.saddle_tol << ',' << c.solver.direct_threshold << ','
    << c.solver.max_iterations << ';' << c.quad.assembly << ',' << c.quad.load << ',' << c.quad.error << ';'
    << c.uncondensed_em;
  std::uint64_t h = 14695981039346656037ull;
  for (const unsigned char ch : s.str()) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  std::ostringstream hex;
  hex << std::hex << std::setw(16) << std::setfill('0') << h;
  return hex.str();
}

namespace detail {

inline StudyRow exact_error_row(const RunConfig& cfg, const TetMesh& mesh, const ExactSolution& exact) {
  const RunResult r = run(cfg, mesh, Sources::from(exact), InitialData::from(exact));
  StudyRow row;
  row.scheme = cfg.scheme;
  row.n = cfg.mesh_n;
  row.h = 1.0 / cfg.mesh_n;
  row.tau = cfg.grid.tau();
  row.errors = error_norms(mesh, r.final_state, exact, cfg.grid.final_time(), cfg.quad.error);
  row.timings = r.timings;
  row.fingerprint = config_fingerprint(cfg);
  return row;
}

}  // namespace detail

/// One run per n at the base configuration's time grid; errors against the
/// manufactured solution at t = T. Rows may be computed by up to `workers`
/// threads; row order follows `ns`.
inline StudyReport spatial_convergence(const RunConfig& base, const std::vector<int>& ns, int workers = 1) {
  if (ns.empty()) throw ValidationError("spatial study needs at least one mesh size");
  validate_run_config(base);
  const ExactSolution exact = example61(base.params);
  auto one = [&](int n) {
    RunConfig cfg = base;
    cfg.mesh_n = n;
    const TetMesh mesh = build_unit_cube_mesh(n);
    return detail::exact_error_row(cfg, mesh, exact);
  };
  StudyReport report;
  report.kind = StudyKind::Spatial;
  if (workers <= 1) {
    for (int n : ns) report.rows.push_back(one(n));
  } else {
    std::vector<std::future<StudyRow>> pending;
    std::size_t next = 0;
    while (next < ns.size() || !pending.empty()) {
      while (next < ns.size() && static_cast<int>(pending.size()) < workers)
        pending.push_back(std::async(std::launch::async, one, ns[next++]));
      report.rows.push_back(pending.front().get());
      pending.erase(pending.begin());
    }
  }
  fill_orders(report);
  return report;
}

/// Runs at each tau on a fixed mesh and measures the final-time difference
/// to a same-mesh run at tau_ref (which must be <= min(taus) / 8).
inline StudyReport temporal_convergence(const RunConfig& base, int n, const std::vector<double>& taus,
                                        double tau_ref) {
  if (taus.empty()) throw ValidationError("temporal study needs at least one time step");
  double tau_min = taus.front();
  for (double t : taus) tau_min = std::min(tau_min, t);
  if (!(tau_ref > 0.0) || tau_ref > tau_min / 8.0 * (1.0 + 1e-12))
    throw ValidationError("reference time step must satisfy 0 < tau_ref <= min(tau) / 8");
  const double T = base.grid.final_time();
  const ExactSolution exact = example61(base.params);
  const TetMesh mesh = build_unit_cube_mesh(n);

  auto solve = [&](double tau) {
    RunConfig cfg = base;
    cfg.mesh_n = n;
    cfg.grid = time_grid_from_step(T, tau);
    validate_run_config(cfg);
    return std::pair{cfg, run(cfg, mesh, Sources::from(exact), InitialData::from(exact))};
  };

  const RunResult ref = solve(tau_ref).second;
  StudyReport report;
  report.kind = StudyKind::Temporal;
  for (double tau : taus) {
    const auto [cfg, r] = solve(tau);
    StudyRow row;
    row.scheme = cfg.scheme;
    row.n = n;
    row.h = 1.0 / n;
    row.tau = cfg.grid.tau();
    row.errors = difference_norms(mesh, r.final_state, ref.final_state, cfg.quad.error);
    row.timings = r.timings;
    row.fingerprint = config_fingerprint(cfg);
    report.rows.push_back(row);
  }
  fill_orders(report);
  return report;
}

/// Both schemes on each mesh, serially, with identical configuration apart
/// from the scheme tag. Rows alternate splitting, monolithic per n.
inline StudyReport benchmark(const RunConfig& base, const std::vector<int>& ns) {
  if (ns.empty()) throw ValidationError("benchmark needs at least one mesh size");
  validate_run_config(base);
  const ExactSolution exact = example61(base.params);
  StudyReport report;
  report.kind = StudyKind::Benchmark;
  for (int n : ns) {
    const TetMesh mesh = build_unit_cube_mesh(n);
    for (Scheme s : {Scheme::Splitting, Scheme::Monolithic}) {
      RunConfig cfg = base;
      cfg.mesh_n = n;
      cfg.scheme = s;
      report.rows.push_back(detail::exact_error_row(cfg, mesh, exact));
    }
  }
  fill_orders(report);
  return report;
}

/// Monolithic total time over splitting total time for mesh n, if both rows exist.
inline std::optional<double> speedup(const StudyReport& report, int n) {
  const StudyRow* split = nullptr;
  const StudyRow* mono = nullptr;
  for (const auto& r : report.rows) {
    if (r.n != n) continue;
    (r.scheme == Scheme::Splitting ? split : mono) = &r;
  }
  if (!split || !mono || !(split->timings.total() > 0.0)) return std::nullopt;
  return mono->timings.total() / split->timings.total();
}

}  // namespace epe
