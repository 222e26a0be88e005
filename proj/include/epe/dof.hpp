#pragma once

#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "epe/mesh.hpp"

namespace epe {

/// The four discrete spaces: Nedelec edges (E), piecewise-constant vectors
/// (H), continuous P1 vectors (U) and continuous P1 scalars (P).
enum class Space { E, H, U, P };

inline std::string_view to_string(Space s) {
  switch (s) {
    case Space::E: return "E";
    case Space::H: return "H";
    case Space::U: return "U";
    case Space::P: return "P";
  }
  return "?";
}

/// Global numbering of one space's degrees of freedom and the subset fixed
/// to zero by the boundary conditions.
///   E: one DOF per edge; boundary edges constrained (tangential trace).
///   H: DOF 3*cell + k is component k on that cell; nothing constrained.
///   U: DOF 3*vertex + k; boundary vertices constrained.
///   P: DOF = vertex; boundary vertices constrained.
class DofLayout {
 public:
  DofLayout(const TetMesh& mesh, Space space) : space_(space) {
    switch (space) {
      case Space::E:
        constrained_ = mesh.boundary_edge;
        break;
      case Space::H:
        constrained_.assign(3 * mesh.num_cells(), 0);
        break;
      case Space::U:
        constrained_.resize(3 * mesh.num_vertices());
        for (std::size_t v = 0; v < mesh.num_vertices(); ++v)
          for (int k = 0; k < 3; ++k) constrained_[3 * v + k] = mesh.boundary_vertex[v];
        break;
      case Space::P:
        constrained_ = mesh.boundary_vertex;
        break;
    }
    reduced_index_.assign(constrained_.size(), -1);
    for (std::size_t i = 0; i < constrained_.size(); ++i)
      if (!constrained_[i]) {
        reduced_index_[i] = static_cast<int>(free_.size());
        free_.push_back(static_cast<int>(i));
      }
  }

  Space space() const { return space_; }
  int size() const { return static_cast<int>(constrained_.size()); }
  int num_free() const { return static_cast<int>(free_.size()); }
  int num_constrained() const { return size() - num_free(); }
  bool is_constrained(int dof) const { return constrained_[static_cast<std::size_t>(dof)] != 0; }
  const std::vector<int>& free_dofs() const { return free_; }
  // -1 for constrained DOFs.
  int reduced_index(int dof) const { return reduced_index_[static_cast<std::size_t>(dof)]; }

  Eigen::VectorXd restrict_vector(const Eigen::VectorXd& full) const {
    Eigen::VectorXd r(num_free());
    for (int i = 0; i < num_free(); ++i) r[i] = full[free_[static_cast<std::size_t>(i)]];
    return r;
  }

  /// Zero extension of a reduced vector.
  Eigen::VectorXd extend_vector(const Eigen::VectorXd& reduced) const {
    Eigen::VectorXd full = Eigen::VectorXd::Zero(size());
    for (int i = 0; i < num_free(); ++i) full[free_[static_cast<std::size_t>(i)]] = reduced[i];
    return full;
  }

  void zero_constrained(Eigen::VectorXd& full) const {
    for (int i = 0; i < size(); ++i)
      if (constrained_[static_cast<std::size_t>(i)]) full[i] = 0.0;
  }

 private:
  Space space_;
  std::vector<char> constrained_;
  std::vector<int> free_;
  std::vector<int> reduced_index_;
};

}  // namespace epe
