#pragma once

/// \file mesh.hpp
/// Structured tetrahedral mesh of the unit cube.
///
/// Every lattice sub-cube is split into six tetrahedra along its main
/// diagonal (Kuhn/Freudenthal subdivision): each tetrahedron follows a
/// monotone lattice path corner -> +e_a -> +e_b -> +e_c for one permutation
/// (a, b, c) of the axes. Cells are stored positively oriented. Edges are
/// globally oriented from the lower to the higher vertex index.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "epe/errors.hpp"

namespace epe {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Local edge (a, b) numbering shared by every per-cell routine.
inline constexpr std::array<std::array<int, 2>, 6> kLocalEdges = {
    {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}};

/// Local face i is opposite local vertex i.
inline constexpr std::array<std::array<int, 3>, 4> kLocalFaces = {
    {{1, 2, 3}, {0, 2, 3}, {0, 1, 3}, {0, 1, 2}}};

struct CellEdge {
  int edge;  // global edge index
  int sign;  // +1 when local direction a->b matches the global orientation
};

struct TetMesh {
  int n = 0;
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 4>> cells;
  std::vector<std::array<int, 2>> edges;  // (a, b) with a < b
  std::vector<std::array<CellEdge, 6>> cell_edges;
  std::vector<std::array<int, 3>> faces;  // sorted vertex triples
  std::vector<std::array<int, 4>> cell_faces;
  std::vector<char> boundary_vertex;
  std::vector<char> boundary_edge;
  std::vector<char> boundary_face;
  double h = 0.0;

  std::size_t num_vertices() const { return vertices.size(); }
  std::size_t num_edges() const { return edges.size(); }
  std::size_t num_faces() const { return faces.size(); }
  std::size_t num_cells() const { return cells.size(); }

  std::array<Vec3, 4> cell_vertices(std::size_t c) const {
    const auto& v = cells[c];
    return {vertices[v[0]], vertices[v[1]], vertices[v[2]], vertices[v[3]]};
  }

  double signed_volume(std::size_t c) const {
    const auto x = cell_vertices(c);
    Mat3 J;
    J.col(0) = x[1] - x[0];
    J.col(1) = x[2] - x[0];
    J.col(2) = x[3] - x[0];
    return J.determinant() / 6.0;
  }
};

namespace detail {

// Coplanarity on one of the six boundary planes, decided on lattice indices.
inline bool on_common_boundary_plane(const std::array<int, 3>* idx, int count, int n) {
  for (int axis = 0; axis < 3; ++axis) {
    for (int side : {0, n}) {
      bool all = true;
      for (int i = 0; i < count && all; ++i) all = idx[i][axis] == side;
      if (all) return true;
    }
  }
  return false;
}

}  // namespace detail

inline TetMesh build_unit_cube_mesh(int n) {
  if (n < 1) throw InvalidSubdivision("unit cube subdivision n must be >= 1, got " + std::to_string(n));

  TetMesh m;
  m.n = n;
  const int np = n + 1;
  auto vid = [np](int i, int j, int k) { return i + np * (j + np * k); };

  std::vector<std::array<int, 3>> lattice;
  lattice.reserve(static_cast<std::size_t>(np) * np * np);
  m.vertices.reserve(lattice.capacity());
  for (int k = 0; k < np; ++k)
    for (int j = 0; j < np; ++j)
      for (int i = 0; i < np; ++i) {
        lattice.push_back({i, j, k});
        m.vertices.emplace_back(static_cast<double>(i) / n, static_cast<double>(j) / n,
                                static_cast<double>(k) / n);
      }

  m.boundary_vertex.resize(m.vertices.size());
  for (std::size_t v = 0; v < lattice.size(); ++v)
    m.boundary_vertex[v] = detail::on_common_boundary_plane(&lattice[v], 1, n) ? 1 : 0;

  static constexpr std::array<std::array<int, 3>, 6> perms = {
      {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};
  m.cells.reserve(static_cast<std::size_t>(6) * n * n * n);
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i)
        for (const auto& perm : perms) {
          std::array<int, 3> p = {i, j, k};
          std::array<int, 4> cell{};
          cell[0] = vid(p[0], p[1], p[2]);
          for (int s = 0; s < 3; ++s) {
            ++p[perm[s]];
            cell[s + 1] = vid(p[0], p[1], p[2]);
          }
          m.cells.push_back(cell);
          if (m.signed_volume(m.cells.size() - 1) < 0.0) std::swap(m.cells.back()[2], m.cells.back()[3]);
        }

  // Edges: deduplicated, sorted, globally oriented low -> high.
  std::vector<std::array<int, 2>> all_edges;
  all_edges.reserve(m.cells.size() * 6);
  for (const auto& c : m.cells)
    for (const auto& le : kLocalEdges) {
      const int a = c[le[0]], b = c[le[1]];
      all_edges.push_back({std::min(a, b), std::max(a, b)});
    }
  std::sort(all_edges.begin(), all_edges.end());
  all_edges.erase(std::unique(all_edges.begin(), all_edges.end()), all_edges.end());
  m.edges = std::move(all_edges);

  m.cell_edges.resize(m.cells.size());
  for (std::size_t c = 0; c < m.cells.size(); ++c)
    for (int l = 0; l < 6; ++l) {
      const int a = m.cells[c][kLocalEdges[l][0]], b = m.cells[c][kLocalEdges[l][1]];
      const std::array<int, 2> key = {std::min(a, b), std::max(a, b)};
      const auto it = std::lower_bound(m.edges.begin(), m.edges.end(), key);
      m.cell_edges[c][l] = {static_cast<int>(it - m.edges.begin()), a < b ? 1 : -1};
    }

  m.boundary_edge.resize(m.edges.size());
  for (std::size_t e = 0; e < m.edges.size(); ++e) {
    const std::array<int, 3> idx[2] = {lattice[m.edges[e][0]], lattice[m.edges[e][1]]};
    m.boundary_edge[e] = detail::on_common_boundary_plane(idx, 2, n) ? 1 : 0;
  }

  // Faces are only needed for diagnostics (Euler characteristic, conformity).
  std::vector<std::array<int, 3>> all_faces;
  all_faces.reserve(m.cells.size() * 4);
  auto face_key = [](const std::array<int, 4>& c, const std::array<int, 3>& lf) {
    std::array<int, 3> f = {c[lf[0]], c[lf[1]], c[lf[2]]};
    std::sort(f.begin(), f.end());
    return f;
  };
  for (const auto& c : m.cells)
    for (const auto& lf : kLocalFaces) all_faces.push_back(face_key(c, lf));
  std::sort(all_faces.begin(), all_faces.end());
  all_faces.erase(std::unique(all_faces.begin(), all_faces.end()), all_faces.end());
  m.faces = std::move(all_faces);

  m.cell_faces.resize(m.cells.size());
  for (std::size_t c = 0; c < m.cells.size(); ++c)
    for (int l = 0; l < 4; ++l) {
      const auto it = std::lower_bound(m.faces.begin(), m.faces.end(), face_key(m.cells[c], kLocalFaces[l]));
      m.cell_faces[c][l] = static_cast<int>(it - m.faces.begin());
    }

  m.boundary_face.resize(m.faces.size());
  for (std::size_t f = 0; f < m.faces.size(); ++f) {
    const std::array<int, 3> idx[3] = {lattice[m.faces[f][0]], lattice[m.faces[f][1]], lattice[m.faces[f][2]]};
    m.boundary_face[f] = detail::on_common_boundary_plane(idx, 3, n) ? 1 : 0;
  }

  double h = 0.0;
  for (const auto& c : m.cells)
    for (const auto& le : kLocalEdges) h = std::max(h, (m.vertices[c[le[1]]] - m.vertices[c[le[0]]]).norm());
  m.h = h;
  return m;
}

struct MeshStats {
  std::size_t V = 0, E = 0, F = 0, C = 0;
  double h = 0.0;
  std::size_t boundary_vertices = 0, boundary_edges = 0, boundary_faces = 0;
  double min_cell_volume = 0.0, max_cell_volume = 0.0, total_volume = 0.0;

  long long euler_characteristic() const {
    return static_cast<long long>(V) - static_cast<long long>(E) + static_cast<long long>(F) -
           static_cast<long long>(C);
  }
};

inline MeshStats mesh_stats(const TetMesh& m) {
  MeshStats s;
  s.V = m.num_vertices();
  s.E = m.num_edges();
  s.F = m.num_faces();
  s.C = m.num_cells();
  s.h = m.h;
  auto count = [](const std::vector<char>& flags) {
    return static_cast<std::size_t>(std::count(flags.begin(), flags.end(), 1));
  };
  s.boundary_vertices = count(m.boundary_vertex);
  s.boundary_edges = count(m.boundary_edge);
  s.boundary_faces = count(m.boundary_face);
  s.min_cell_volume = m.cells.empty() ? 0.0 : std::numeric_limits<double>::max();
  for (std::size_t c = 0; c < m.num_cells(); ++c) {
    const double vol = m.signed_volume(c);
    s.min_cell_volume = std::min(s.min_cell_volume, vol);
    s.max_cell_volume = std::max(s.max_cell_volume, vol);
    s.total_volume += vol;
  }
  return s;
}

}  // namespace epe
