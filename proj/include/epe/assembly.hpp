#pragma once

/// \file assembly.hpp
/// Galerkin matrices and load vectors for the lowest-order spaces, and
/// elimination of homogeneous Dirichlet constraints.
///
/// Every form is assembled cell by cell in cell-index order into triplets,
/// so the resulting matrices do not depend on anything but the mesh.

#include <string_view>
#include <type_traits>

#include "epe/dof.hpp"
#include "epe/elements.hpp"
#include "epe/sparse.hpp"

namespace epe {

/// Bilinear forms; the comment gives (test space rows) x (trial space cols).
enum class Form {
  MassE,        // (c E, D)                         E x E
  CurlToH,      // (curl E, B)                      H x E
  HMass,        // (c H, B)                         H x H
  HCurlTest,    // (H, curl D)                      E x H
  GradPToE,     // (c grad p, D)                    E x P
  EToGradQ,     // (c E, grad q)                    P x E
  Elasticity,   // (lambda_c div w, div v) + (G grad w, grad v)   U x U
  DivCoupling,  // (chi, c div v)                   P x U
  PMass,        // (c p, q)                         P x P
  PStiff,       // (c grad chi, grad q)             P x P
};

inline std::string_view to_string(Form f) {
  switch (f) {
    case Form::MassE: return "MASS_E";
    case Form::CurlToH: return "CURL_TO_H";
    case Form::HMass: return "H_MASS";
    case Form::HCurlTest: return "H_CURL_TEST";
    case Form::GradPToE: return "GRAD_P_TO_E";
    case Form::EToGradQ: return "E_TO_GRAD_Q";
    case Form::Elasticity: return "ELASTICITY";
    case Form::DivCoupling: return "DIV_COUPLING";
    case Form::PMass: return "P_MASS";
    case Form::PStiff: return "P_STIFF";
  }
  return "?";
}

inline std::pair<Space, Space> form_spaces(Form f) {
  switch (f) {
    case Form::MassE: return {Space::E, Space::E};
    case Form::CurlToH: return {Space::H, Space::E};
    case Form::HMass: return {Space::H, Space::H};
    case Form::HCurlTest: return {Space::E, Space::H};
    case Form::GradPToE: return {Space::E, Space::P};
    case Form::EToGradQ: return {Space::P, Space::E};
    case Form::Elasticity: return {Space::U, Space::U};
    case Form::DivCoupling: return {Space::P, Space::U};
    case Form::PMass: return {Space::P, Space::P};
    case Form::PStiff: return {Space::P, Space::P};
  }
  return {Space::E, Space::E};
}

inline bool form_is_symmetric(Form f) {
  return f == Form::MassE || f == Form::HMass || f == Form::Elasticity || f == Form::PMass || f == Form::PStiff;
}

/// Scalar coefficient of a form. ELASTICITY takes the pair (lambda_c, G).
struct FormCoefficient {
  double value = 1.0;
  double shear = 0.0;

  FormCoefficient(double v = 1.0) : value(v) {}  // NOLINT(google-explicit-constructor)
  static FormCoefficient lame(double lambda_c, double G) {
    FormCoefficient c(lambda_c);
    c.shear = G;
    return c;
  }
};

namespace detail {

// Global DOF of local basis function `i` of `space` on `cell`.
inline int global_dof(const TetMesh& mesh, Space space, std::size_t cell, int i) {
  switch (space) {
    case Space::E: return mesh.cell_edges[cell][i].edge;
    case Space::H: return 3 * static_cast<int>(cell) + i;
    case Space::U: return 3 * mesh.cells[cell][i / 3] + i % 3;
    case Space::P: return mesh.cells[cell][i];
  }
  return -1;
}

inline int local_count(Space space) {
  switch (space) {
    case Space::E: return 6;
    case Space::H: return 3;
    case Space::U: return 12;
    case Space::P: return 4;
  }
  return 0;
}

}  // namespace detail

inline CsrMatrix assemble_matrix(const TetMesh& mesh, const DofLayout& rows, const DofLayout& cols, Form form,
                                 FormCoefficient coef = {}, int quad_degree = 2) {
  const auto [row_space, col_space] = form_spaces(form);
  if (rows.space() != row_space || cols.space() != col_space)
    throw LayoutMismatch(std::string(to_string(form)) + " expects " + std::string(to_string(row_space)) + " x " +
                         std::string(to_string(col_space)) + " layouts, got " + std::string(to_string(rows.space())) +
                         " x " + std::string(to_string(cols.space())));

  const QuadratureRule rule = quadrature_rule(quad_degree);
  const int nr = detail::local_count(row_space), nc = detail::local_count(col_space);
  const double c = coef.value;

  Triplets trip;
  trip.reserve(mesh.num_cells() * static_cast<std::size_t>(nr * nc));
  Eigen::MatrixXd local(nr, nc);

  for (std::size_t cell = 0; cell < mesh.num_cells(); ++cell) {
    const CellGeometry g(mesh, cell);
    const double vol = g.volume();
    local.setZero();

    switch (form) {
      case Form::MassE:
        for (std::size_t q = 0; q < rule.size(); ++q) {
          const auto phi = oriented_nedelec_values(mesh, cell, g, rule.barycentric(q));
          const double w = rule.points[q].weight * g.jacobian_det() * c;
          for (int i = 0; i < 6; ++i)
            for (int j = 0; j < 6; ++j) local(i, j) += w * phi[i].dot(phi[j]);
        }
        break;
      case Form::CurlToH: {
        const auto curl = oriented_nedelec_curls(mesh, cell, g);
        double wsum = 0.0;
        for (const auto& qp : rule.points) wsum += qp.weight * g.jacobian_det();
        for (int k = 0; k < 3; ++k)
          for (int j = 0; j < 6; ++j) local(k, j) = c * wsum * curl[j][k];
        break;
      }
      case Form::HCurlTest: {
        const auto curl = oriented_nedelec_curls(mesh, cell, g);
        for (std::size_t q = 0; q < rule.size(); ++q) {
          const double w = rule.points[q].weight * g.jacobian_det() * c;
          for (int i = 0; i < 6; ++i)
            for (int k = 0; k < 3; ++k) local(i, k) += w * curl[i][k];
        }
        break;
      }
      case Form::HMass:
        for (int k = 0; k < 3; ++k) local(k, k) = c * vol;
        break;
      case Form::GradPToE:
        for (std::size_t q = 0; q < rule.size(); ++q) {
          const auto phi = oriented_nedelec_values(mesh, cell, g, rule.barycentric(q));
          const double w = rule.points[q].weight * g.jacobian_det() * c;
          for (int i = 0; i < 6; ++i)
            for (int v = 0; v < 4; ++v) local(i, v) += w * phi[i].dot(g.grad_lambda(v));
        }
        break;
      case Form::EToGradQ:
        for (std::size_t q = 0; q < rule.size(); ++q) {
          const auto phi = oriented_nedelec_values(mesh, cell, g, rule.barycentric(q));
          const double w = rule.points[q].weight * g.jacobian_det() * c;
          for (int v = 0; v < 4; ++v)
            for (int j = 0; j < 6; ++j) local(v, j) += w * g.grad_lambda(v).dot(phi[j]);
        }
        break;
      case Form::Elasticity: {
        // Basis function 3v+k is lambda_v e_k: div = d_k lambda_v,
        // grad:grad = delta_kl grad(lambda_v).grad(lambda_w).
        const double lambda_c = coef.value, G = coef.shear;
        for (int v = 0; v < 4; ++v)
          for (int w = 0; w < 4; ++w) {
            const Vec3& gv = g.grad_lambda(v);
            const Vec3& gw = g.grad_lambda(w);
            const double gg = gv.dot(gw);
            for (int k = 0; k < 3; ++k)
              for (int l = 0; l < 3; ++l)
                local(3 * v + k, 3 * w + l) = vol * (lambda_c * gv[k] * gw[l] + (k == l ? G * gg : 0.0));
          }
        break;
      }
      case Form::DivCoupling:
        for (std::size_t q = 0; q < rule.size(); ++q) {
          const auto lam = rule.barycentric(q);
          const double w = rule.points[q].weight * g.jacobian_det() * c;
          for (int r = 0; r < 4; ++r)
            for (int v = 0; v < 4; ++v)
              for (int k = 0; k < 3; ++k) local(r, 3 * v + k) += w * lam[r] * g.grad_lambda(v)[k];
        }
        break;
      case Form::PMass:
        for (std::size_t q = 0; q < rule.size(); ++q) {
          const auto lam = rule.barycentric(q);
          const double w = rule.points[q].weight * g.jacobian_det() * c;
          for (int r = 0; r < 4; ++r)
            for (int s = 0; s < 4; ++s) local(r, s) += w * lam[r] * lam[s];
        }
        break;
      case Form::PStiff:
        for (int r = 0; r < 4; ++r)
          for (int s = 0; s < 4; ++s) local(r, s) = c * vol * g.grad_lambda(r).dot(g.grad_lambda(s));
        break;
    }

    for (int i = 0; i < nr; ++i) {
      const int gi = detail::global_dof(mesh, row_space, cell, i);
      for (int j = 0; j < nc; ++j) {
        if (local(i, j) == 0.0) continue;
        trip.emplace_back(gi, detail::global_dof(mesh, col_space, cell, j), local(i, j));
      }
    }
  }
  return csr_from_triplets(rows.size(), cols.size(), trip);
}

/// Load vector (f(t, .), basis_i). Vector-valued f (returning Vec3) pairs with
/// the E, H and U layouts; scalar f with P.
template <class F>
Eigen::VectorXd assemble_load(const TetMesh& mesh, const DofLayout& layout, F&& f, double t, int quad_degree) {
  using R = std::decay_t<std::invoke_result_t<F&, double, const Vec3&>>;
  constexpr bool scalar = std::is_arithmetic_v<R>;
  if (scalar != (layout.space() == Space::P))
    throw LayoutMismatch("load function value type does not match layout " + std::string(to_string(layout.space())));

  const QuadratureRule rule = quadrature_rule(quad_degree);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(layout.size());
  const Space space = layout.space();
  for (std::size_t cell = 0; cell < mesh.num_cells(); ++cell) {
    const CellGeometry g(mesh, cell);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const auto lam = rule.barycentric(q);
      const Vec3 x = g.map(rule.points[q].ref);
      const double w = rule.points[q].weight * g.jacobian_det();
      if constexpr (scalar) {
        const double fx = static_cast<double>(f(t, x));
        for (int v = 0; v < 4; ++v) b[mesh.cells[cell][v]] += w * fx * lam[v];
      } else {
        const Vec3 fx = f(t, x);
        if (space == Space::E) {
          const auto phi = oriented_nedelec_values(mesh, cell, g, lam);
          for (int i = 0; i < 6; ++i) b[mesh.cell_edges[cell][i].edge] += w * fx.dot(phi[i]);
        } else if (space == Space::H) {
          for (int k = 0; k < 3; ++k) b[3 * static_cast<int>(cell) + k] += w * fx[k];
        } else {
          for (int v = 0; v < 4; ++v)
            for (int k = 0; k < 3; ++k) b[3 * mesh.cells[cell][v] + k] += w * fx[k] * lam[v];
        }
      }
    }
  }
  return b;
}

/// Submatrix on the free rows of `rows` and free columns of `cols`.
inline CsrMatrix restrict_matrix(const CsrMatrix& A, const DofLayout& rows, const DofLayout& cols) {
  if (A.rows() != rows.size() || A.cols() != cols.size())
    throw LayoutMismatch("matrix dimensions do not match layouts");
  Triplets trip;
  trip.reserve(static_cast<std::size_t>(A.nonZeros()));
  for (int r = 0; r < A.outerSize(); ++r) {
    const int ri = rows.reduced_index(r);
    if (ri < 0) continue;
    for (CsrMatrix::InnerIterator it(A, r); it; ++it) {
      const int cj = cols.reduced_index(static_cast<int>(it.col()));
      if (cj >= 0) trip.emplace_back(ri, cj, it.value());
    }
  }
  return csr_from_triplets(rows.num_free(), cols.num_free(), trip);
}

struct ConstrainedSystem {
  CsrMatrix matrix;
  Eigen::VectorXd rhs;
  bool symmetric = false;
};

/// Homogeneous Dirichlet constraints by elimination: constrained rows and
/// columns are dropped. Solutions are mapped back with
/// DofLayout::extend_vector, which places zeros on constrained DOFs.
inline ConstrainedSystem apply_dirichlet(const CsrMatrix& A, const Eigen::VectorXd& rhs, const DofLayout& layout,
                                         bool symmetric = false) {
  return {restrict_matrix(A, layout, layout), layout.restrict_vector(rhs), symmetric};
}

}  // namespace epe
