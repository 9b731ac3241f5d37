#pragma once

#include <string>
#include <vector>

#include "fpsi/mesh.hpp"

namespace fpsi {

struct VtkField {
  std::string name;
  int components = 1;         // 1 scalar, 2 vector (padded to 3 on write)
  std::vector<double> data;   // per point or per cell, interleaved components
};

/// Legacy ASCII VTK unstructured grid for one submesh.
void write_vtk(const SubMesh& mesh, const std::string& path,
               const std::vector<VtkField>& point_fields,
               const std::vector<VtkField>& cell_fields = {},
               const std::vector<Point2>* point_override = nullptr);

}  // namespace fpsi
