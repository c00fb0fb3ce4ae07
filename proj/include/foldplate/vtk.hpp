// Legacy ASCII VTK writers: quadratic-triangle mesh export and solution
// fields with one red subdivision per element so curved geometry and
// inter-element jumps stay visible.

#ifndef FOLDPLATE_VTK_HPP
#define FOLDPLATE_VTK_HPP

#include "foldplate/analysis.hpp"
#include "foldplate/mesh.hpp"
#include "foldplate/space.hpp"
#include "foldplate/types.hpp"

#include <fstream>
#include <string>
#include <vector>

namespace foldplate {

/// Mesh export as VTK quadratic triangles (cell type 22). For cubic
/// geometry the quadratic lattice points are evaluated through the exact map.
inline void write_mesh_vtk(const std::string& path, const Mesh& mesh) {
  std::ofstream out(path);
  detail::require(out.good(), "write_mesh_vtk: cannot open " + path);
  out.precision(15);

  const Lattice& lat2 = ReferenceBasis::get(2).lattice();
  const ReferenceBasis& geo = ReferenceBasis::get(mesh.geometry_degree);
  // VTK_QUADRATIC_TRIANGLE order: v0 v1 v2, then midpoints of (v0,v1),
  // (v1,v2), (v2,v0); as lattice ids: 0 2 5 1 4 3.
  static const int vtk_order[6] = {0, 2, 5, 1, 4, 3};

  std::vector<Vec2> points;
  std::vector<std::array<int, 6>> cells;
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const auto nodes = mesh.element_nodes(e);
    std::array<int, 6> cell;
    for (int c = 0; c < 6; ++c) {
      const Vec2 ref = lat2.nodes[vtk_order[c]];
      const auto shapes = geo.evaluate(ref);
      Vec2 x = Vec2::Zero();
      for (int m = 0; m < geo.size(); ++m) x += shapes[m].value * nodes[m];
      cell[c] = static_cast<int>(points.size());
      points.push_back(x);
    }
    cells.push_back(cell);
  }

  out << "# vtk DataFile Version 3.0\nfoldplate mesh\nASCII\n"
      << "DATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << points.size() << " double\n";
  for (const auto& p : points) out << p.x() << " " << p.y() << " 0\n";
  out << "CELLS " << cells.size() << " " << cells.size() * 7 << "\n";
  for (const auto& c : cells) {
    out << 6;
    for (int id : c) out << " " << id;
    out << "\n";
  }
  out << "CELL_TYPES " << cells.size() << "\n";
  for (std::size_t i = 0; i < cells.size(); ++i) out << 22 << "\n";
}

/// Solution export: each element is split once into 4 linear sub-triangles
/// through its quadratic lattice points, with the deflection as point data
/// (duplicated per element, so jumps render faithfully) and optionally the
/// bending energy density as cell data.
inline void write_solution_vtk(const std::string& path,
                               const SolutionField& field,
                               const std::vector<double>* density = nullptr) {
  const Mesh& mesh = *field.mesh;
  std::ofstream out(path);
  detail::require(out.good(), "write_solution_vtk: cannot open " + path);
  out.precision(15);

  const Lattice& lat2 = ReferenceBasis::get(2).lattice();
  const ReferenceBasis& geo = ReferenceBasis::get(mesh.geometry_degree);
  static const int children[4][3] = {{0, 1, 3}, {1, 2, 4}, {3, 4, 5}, {1, 4, 3}};

  std::vector<Vec2> points;
  std::vector<double> values;
  std::vector<std::array<int, 3>> cells;
  std::vector<double> cell_density;
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const auto nodes = mesh.element_nodes(e);
    std::array<int, 6> ids;
    for (int c = 0; c < 6; ++c) {
      const Vec2 ref = lat2.nodes[c];
      const auto shapes = geo.evaluate(ref);
      Vec2 x = Vec2::Zero();
      for (int m = 0; m < geo.size(); ++m) x += shapes[m].value * nodes[m];
      ids[c] = static_cast<int>(points.size());
      points.push_back(x);
      values.push_back(evaluate_field(field, e, ref).value);
    }
    for (const auto& ch : children) {
      cells.push_back({ids[ch[0]], ids[ch[1]], ids[ch[2]]});
      if (density) cell_density.push_back((*density)[e]);
    }
  }

  out << "# vtk DataFile Version 3.0\nfoldplate solution\nASCII\n"
      << "DATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << points.size() << " double\n";
  for (const auto& p : points) out << p.x() << " " << p.y() << " 0\n";
  out << "CELLS " << cells.size() << " " << cells.size() * 4 << "\n";
  for (const auto& c : cells)
    out << 3 << " " << c[0] << " " << c[1] << " " << c[2] << "\n";
  out << "CELL_TYPES " << cells.size() << "\n";
  for (std::size_t i = 0; i < cells.size(); ++i) out << 5 << "\n";
  out << "POINT_DATA " << points.size() << "\n"
      << "SCALARS deflection double 1\nLOOKUP_TABLE default\n";
  for (double v : values) out << v << "\n";
  if (density) {
    out << "CELL_DATA " << cells.size() << "\n"
        << "SCALARS energy_density double 1\nLOOKUP_TABLE default\n";
    for (double v : cell_density) out << v << "\n";
  }
}

}  // namespace foldplate

#endif
