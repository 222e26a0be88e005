#pragma once

/// \file vtk.hpp
/// Legacy ASCII VTK snapshots of a state: E and H as cell vectors (E at the
/// cell barycenter), u as point vectors, p as point scalars.

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>

#include "epe/schemes.hpp"

namespace epe {

inline void write_vtk(const std::filesystem::path& path, const TetMesh& mesh, const State& s) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot open " + path.string() + " for writing");
  f << std::setprecision(10);
  f << "# vtk DataFile Version 3.0\nstate step " << s.step << " t " << s.time << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  f << "POINTS " << mesh.num_vertices() << " double\n";
  for (const auto& v : mesh.vertices) f << v[0] << ' ' << v[1] << ' ' << v[2] << '\n';
  f << "CELLS " << mesh.num_cells() << ' ' << 5 * mesh.num_cells() << '\n';
  for (const auto& c : mesh.cells) f << "4 " << c[0] << ' ' << c[1] << ' ' << c[2] << ' ' << c[3] << '\n';
  f << "CELL_TYPES " << mesh.num_cells() << '\n';
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) f << "10\n";

  f << "CELL_DATA " << mesh.num_cells() << "\nVECTORS E double\n";
  const std::array<double, 4> center = {0.25, 0.25, 0.25, 0.25};
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    const Vec3 e = eval_E(mesh, s.E, c, CellGeometry(mesh, c), center);
    f << e[0] << ' ' << e[1] << ' ' << e[2] << '\n';
  }
  f << "VECTORS H double\n";
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    const Vec3 h = eval_H(s.H, c);
    f << h[0] << ' ' << h[1] << ' ' << h[2] << '\n';
  }
  f << "POINT_DATA " << mesh.num_vertices() << "\nVECTORS u double\n";
  for (std::size_t v = 0; v < mesh.num_vertices(); ++v)
    f << s.u[3 * v] << ' ' << s.u[3 * v + 1] << ' ' << s.u[3 * v + 2] << '\n';
  f << "SCALARS p double 1\nLOOKUP_TABLE default\n";
  for (std::size_t v = 0; v < mesh.num_vertices(); ++v) f << s.p[v] << '\n';
  if (!f) throw IoError("write failed: " + path.string());
}

/// Observer writing <dir>/state_<step>.vtk every `every` steps (and step 0).
inline Observer vtk_observer(const TetMesh& mesh, std::filesystem::path dir, int every) {
  return [&mesh, dir = std::move(dir), every](const StepInfo& info) {
    if (every <= 0 || info.n % every != 0) return;
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create directory " + dir.string());
    std::ostringstream name;
    name << "state_" << std::setw(6) << std::setfill('0') << info.n << ".vtk";
    write_vtk(dir / name.str(), mesh, info.state);
  };
}

}  // namespace epe
