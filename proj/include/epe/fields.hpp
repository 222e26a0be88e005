#pragma once

/// \file fields.hpp
/// The discrete state (E, H, u, p) and pointwise evaluation of its fields.

#include <array>
#include <cstdint>

#include "epe/elements.hpp"

namespace epe {

/// Coefficient vectors of the four fields at one time level, on the full
/// (unconstrained) DOF numbering. Constrained entries are exactly zero.
struct State {
  Eigen::VectorXd E;  // one coefficient per edge
  Eigen::VectorXd H;  // 3 per cell
  Eigen::VectorXd u;  // 3 per vertex
  Eigen::VectorXd p;  // 1 per vertex
  std::int64_t step = 0;
  double time = 0.0;

  static State zeros(const TetMesh& mesh) {
    State s;
    s.E = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(mesh.num_edges()));
    s.H = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(3 * mesh.num_cells()));
    s.u = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(3 * mesh.num_vertices()));
    s.p = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(mesh.num_vertices()));
    return s;
  }
};

/// Field-wise a - b (time metadata taken from a).
inline State difference(const State& a, const State& b) {
  State d = a;
  d.E -= b.E;
  d.H -= b.H;
  d.u -= b.u;
  d.p -= b.p;
  return d;
}

inline Vec3 eval_E(const TetMesh& mesh, const Eigen::VectorXd& E, std::size_t cell, const CellGeometry& g,
                   const std::array<double, 4>& lambda) {
  const auto phi = oriented_nedelec_values(mesh, cell, g, lambda);
  Vec3 v = Vec3::Zero();
  for (int i = 0; i < 6; ++i) v += E[mesh.cell_edges[cell][i].edge] * phi[i];
  return v;
}

inline Vec3 eval_curl_E(const TetMesh& mesh, const Eigen::VectorXd& E, std::size_t cell, const CellGeometry& g) {
  const auto curl = oriented_nedelec_curls(mesh, cell, g);
  Vec3 v = Vec3::Zero();
  for (int i = 0; i < 6; ++i) v += E[mesh.cell_edges[cell][i].edge] * curl[i];
  return v;
}

inline Vec3 eval_H(const Eigen::VectorXd& H, std::size_t cell) {
  const auto c = static_cast<Eigen::Index>(3 * cell);
  return {H[c], H[c + 1], H[c + 2]};
}

inline Vec3 eval_u(const TetMesh& mesh, const Eigen::VectorXd& u, std::size_t cell,
                   const std::array<double, 4>& lambda) {
  Vec3 v = Vec3::Zero();
  for (int a = 0; a < 4; ++a) {
    const auto base = static_cast<Eigen::Index>(3 * mesh.cells[cell][a]);
    v += lambda[a] * Vec3(u[base], u[base + 1], u[base + 2]);
  }
  return v;
}

/// Row k is the gradient of component k.
inline Mat3 grad_u(const TetMesh& mesh, const Eigen::VectorXd& u, std::size_t cell, const CellGeometry& g) {
  Mat3 G = Mat3::Zero();
  for (int a = 0; a < 4; ++a) {
    const auto base = static_cast<Eigen::Index>(3 * mesh.cells[cell][a]);
    for (int k = 0; k < 3; ++k) G.row(k) += u[base + k] * g.grad_lambda(a).transpose();
  }
  return G;
}

inline double eval_p(const TetMesh& mesh, const Eigen::VectorXd& p, std::size_t cell,
                     const std::array<double, 4>& lambda) {
  double v = 0.0;
  for (int a = 0; a < 4; ++a) v += lambda[a] * p[mesh.cells[cell][a]];
  return v;
}

inline Vec3 grad_p(const TetMesh& mesh, const Eigen::VectorXd& p, std::size_t cell, const CellGeometry& g) {
  Vec3 v = Vec3::Zero();
  for (int a = 0; a < 4; ++a) v += p[mesh.cells[cell][a]] * g.grad_lambda(a);
  return v;
}

}  // namespace epe
