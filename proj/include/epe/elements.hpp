#pragma once

/// \file elements.hpp
/// Affine cell geometry plus the two reference elements used at lowest order:
/// P1 hat functions and first-kind Nedelec (Whitney) edge functions.

#include <array>
#include <cmath>

#include "epe/mesh.hpp"
#include "epe/quadrature.hpp"

namespace epe {

/// Affine map x = x0 + J xi from the reference tetrahedron, with constant
/// barycentric gradients.
class CellGeometry {
 public:
  explicit CellGeometry(const std::array<Vec3, 4>& x) : x_(x) {
    J_.col(0) = x[1] - x[0];
    J_.col(1) = x[2] - x[0];
    J_.col(2) = x[3] - x[0];
    det_ = J_.determinant();
    if (!(det_ > 0.0)) throw DegenerateCell("cell has non-positive volume");
    const Mat3 Jinv = J_.inverse();
    for (int i = 0; i < 3; ++i) grad_[i + 1] = Jinv.row(i).transpose();
    grad_[0] = -(grad_[1] + grad_[2] + grad_[3]);
  }

  CellGeometry(const TetMesh& mesh, std::size_t cell) : CellGeometry(mesh.cell_vertices(cell)) {}

  double volume() const { return det_ / 6.0; }
  double jacobian_det() const { return det_; }
  const Vec3& vertex(int i) const { return x_[static_cast<std::size_t>(i)]; }
  const Vec3& grad_lambda(int i) const { return grad_[static_cast<std::size_t>(i)]; }

  Vec3 map(const Eigen::Vector3d& ref) const { return x_[0] + J_ * ref; }

  Vec3 map(const std::array<double, 4>& lambda) const {
    return lambda[0] * x_[0] + lambda[1] * x_[1] + lambda[2] * x_[2] + lambda[3] * x_[3];
  }

  std::array<double, 4> barycentric(const Vec3& x) const {
    const Vec3 r = J_.partialPivLu().solve(x - x_[0]);
    return {1.0 - r[0] - r[1] - r[2], r[0], r[1], r[2]};
  }

 private:
  std::array<Vec3, 4> x_;
  Mat3 J_;
  double det_ = 0.0;
  std::array<Vec3, 4> grad_;
};

/// Lowest-order Lagrange element on one cell.
struct P1Element {
  static std::array<double, 4> values(const std::array<double, 4>& lambda) { return lambda; }

  static std::array<Vec3, 4> gradients(const CellGeometry& g) {
    return {g.grad_lambda(0), g.grad_lambda(1), g.grad_lambda(2), g.grad_lambda(3)};
  }
};

/// Lowest-order first-kind Nedelec element on one cell. Local function i
/// belongs to local edge (a, b) = kLocalEdges[i] and is
///   phi_i = lambda_a grad(lambda_b) - lambda_b grad(lambda_a),
/// with constant curl 2 grad(lambda_a) x grad(lambda_b). Its tangential
/// moment along a->b is 1. Callers multiply by the mesh's cell-edge sign to
/// obtain the globally oriented basis function.
struct NedelecElement {
  static std::array<Vec3, 6> values(const CellGeometry& g, const std::array<double, 4>& lambda) {
    std::array<Vec3, 6> phi;
    for (int i = 0; i < 6; ++i) {
      const int a = kLocalEdges[i][0], b = kLocalEdges[i][1];
      phi[i] = lambda[a] * g.grad_lambda(b) - lambda[b] * g.grad_lambda(a);
    }
    return phi;
  }

  static std::array<Vec3, 6> curls(const CellGeometry& g) {
    std::array<Vec3, 6> c;
    for (int i = 0; i < 6; ++i) {
      const int a = kLocalEdges[i][0], b = kLocalEdges[i][1];
      c[i] = 2.0 * g.grad_lambda(a).cross(g.grad_lambda(b));
    }
    return c;
  }
};

/// Globally oriented Nedelec values on a mesh cell (local values times sign).
inline std::array<Vec3, 6> oriented_nedelec_values(const TetMesh& mesh, std::size_t cell, const CellGeometry& g,
                                                   const std::array<double, 4>& lambda) {
  auto phi = NedelecElement::values(g, lambda);
  for (int i = 0; i < 6; ++i) phi[i] *= mesh.cell_edges[cell][i].sign;
  return phi;
}

inline std::array<Vec3, 6> oriented_nedelec_curls(const TetMesh& mesh, std::size_t cell, const CellGeometry& g) {
  auto c = NedelecElement::curls(g);
  for (int i = 0; i < 6; ++i) c[i] *= mesh.cell_edges[cell][i].sign;
  return c;
}

}  // namespace epe
