#include "fpsi/vtk.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace fpsi {

namespace {

void write_fields(std::ofstream& out, const std::vector<VtkField>& fields, std::size_t count) {
  char buf[96];
  for (const auto& field : fields) {
    if (field.data.size() != count * field.components)
      throw std::invalid_argument("vtk: field '" + field.name + "' has wrong size");
    if (field.components == 1) {
      out << "SCALARS " << field.name << " double 1\nLOOKUP_TABLE default\n";
      for (std::size_t i = 0; i < count; ++i) {
        std::snprintf(buf, sizeof buf, "%.9g", field.data[i]);
        out << buf << "\n";
      }
    } else {
      out << "VECTORS " << field.name << " double\n";
      for (std::size_t i = 0; i < count; ++i) {
        std::snprintf(buf, sizeof buf, "%.9g %.9g 0", field.data[2 * i], field.data[2 * i + 1]);
        out << buf << "\n";
      }
    }
  }
}

}  // namespace

void write_vtk(const SubMesh& mesh, const std::string& path,
               const std::vector<VtkField>& point_fields,
               const std::vector<VtkField>& cell_fields,
               const std::vector<Point2>* point_override) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  const auto& points = point_override ? *point_override : mesh.vertices;
  if (points.size() != mesh.vertices.size())
    throw std::invalid_argument("vtk: point override size mismatch");

  out << "# vtk DataFile Version 3.0\nfpsi snapshot\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << points.size() << " double\n";
  char buf[96];
  for (const auto& p : points) {
    std::snprintf(buf, sizeof buf, "%.9g %.9g 0", p.x, p.y);
    out << buf << "\n";
  }
  out << "CELLS " << mesh.num_triangles() << " " << 4 * mesh.num_triangles() << "\n";
  for (const auto& tri : mesh.triangles)
    out << "3 " << tri[0] << " " << tri[1] << " " << tri[2] << "\n";
  out << "CELL_TYPES " << mesh.num_triangles() << "\n";
  for (int t = 0; t < mesh.num_triangles(); ++t) out << "5\n";

  if (!point_fields.empty()) {
    out << "POINT_DATA " << points.size() << "\n";
    write_fields(out, point_fields, points.size());
  }
  if (!cell_fields.empty()) {
    out << "CELL_DATA " << mesh.num_triangles() << "\n";
    write_fields(out, cell_fields, mesh.num_triangles());
  }
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

}  // namespace fpsi
