#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "fpsi/mesh.hpp"

using namespace fpsi;

namespace {
std::string temp_path(const char* name) {
  return (std::filesystem::temp_directory_path() / name).string();
}
}  // namespace

TEST_CASE("minimal two-subdomain split") {
  CoupledMesh mesh = build_rectangle_coupled_mesh(0, 1, -1, 1, 0.0, 1, 1, 1);
  CHECK(mesh.fluid.num_triangles() == 2);
  CHECK(mesh.poro.num_triangles() == 2);
  REQUIRE(mesh.interface.size() == 1);
  CHECK(mesh.interface[0].length == doctest::Approx(1.0));
  CHECK(validate(mesh).empty());
}

TEST_CASE("interface orientation convention") {
  CoupledMesh mesh = build_rectangle_coupled_mesh(0, 1, -1, 1, 0.0, 4, 4, 4);
  for (const auto& rec : mesh.interface) {
    // fluid above: outward fluid normal points down
    CHECK(rec.normal_f.x == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(rec.normal_f.y == doctest::Approx(-1.0).epsilon(1e-15));
    CHECK(norm(rec.normal_f + rec.normal_p) <= 1e-14);
    CHECK(std::abs(norm(rec.normal_f) - 1.0) <= 1e-14);
    // tau = rot90(n_f) points right
    Point2 tau = rot90(rec.normal_f);
    CHECK(norm(tau - rec.tangent_f) <= 1e-14);
    CHECK(rec.tangent_f.x == doctest::Approx(1.0));
    // endpoint order follows the tangent
    Point2 a = mesh.fluid.vertices[rec.fluid_v0], b = mesh.fluid.vertices[rec.fluid_v1];
    CHECK(dot(b - a, rec.tangent_f) > 0.0);
  }
}

TEST_CASE("subdomain areas match the analytic values") {
  CoupledMesh mesh = build_rectangle_coupled_mesh(0, 1, -1, 1, 0.0, 8, 8, 8);
  CHECK(mesh.fluid.total_area() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(mesh.poro.total_area() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(validate(mesh).empty());
}

TEST_CASE("uniform refinement: counts, area, diameter") {
  CoupledMesh mesh = build_rectangle_coupled_mesh(0, 1, -1, 1, 0.0, 2, 2, 2);
  const double area = mesh.fluid.total_area();
  const double hmax = mesh.fluid.max_diameter();
  CoupledMesh fine = uniform_refine(mesh);
  CHECK(fine.fluid.num_triangles() == 4 * mesh.fluid.num_triangles());
  CHECK(fine.poro.num_triangles() == 4 * mesh.poro.num_triangles());
  CHECK(fine.fluid.total_area() == doctest::Approx(area).epsilon(1e-15));
  CHECK(fine.fluid.max_diameter() == doctest::Approx(0.5 * hmax).epsilon(1e-15));
  CHECK(fine.interface.size() == 2 * mesh.interface.size());
  CHECK(validate(fine).empty());
}

TEST_CASE("five refinements of the h=1/8 mesh reach h=1/256") {
  CoupledMesh mesh = build_rectangle_coupled_mesh(0, 1, -1, 1, 0.0, 8, 8, 8);
  for (int i = 0; i < 5; ++i) mesh = uniform_refine(mesh);
  CHECK(mesh.fluid.max_diameter() == doctest::Approx(std::sqrt(2.0) / 256.0).epsilon(1e-12));
  CHECK(mesh.interface.size() == 256);
}

TEST_CASE("channel geometry for the arterial benchmark") {
  CoupledMesh mesh = build_channel_coupled_mesh(6.0, 0.5, 0.1, 12, 4, 2);
  CHECK(mesh.fluid.total_area() == doctest::Approx(6.0).epsilon(1e-12));
  CHECK(mesh.poro.total_area() == doctest::Approx(2 * 6.0 * 0.1).epsilon(1e-12));
  CHECK(mesh.interface.size() == 24);  // both walls
  CHECK(validate(mesh).empty());
  int top = 0, bottom = 0;
  for (const auto& rec : mesh.interface) {
    if (rec.normal_f.y > 0.5) ++top;
    if (rec.normal_f.y < -0.5) ++bottom;
  }
  CHECK(top == 12);
  CHECK(bottom == 12);
}

TEST_CASE("mesh file round trip is exact") {
  CoupledMesh mesh = build_rectangle_coupled_mesh(0, 1, -1, 1, 0.0, 3, 2, 4);
  const std::string path = temp_path("fpsi_roundtrip.mesh");
  write_mesh(mesh, path);
  CoupledMesh loaded = read_mesh(path);
  REQUIRE(loaded.fluid.num_vertices() == mesh.fluid.num_vertices());
  for (int v = 0; v < mesh.fluid.num_vertices(); ++v) {
    CHECK(loaded.fluid.vertices[v].x == mesh.fluid.vertices[v].x);
    CHECK(loaded.fluid.vertices[v].y == mesh.fluid.vertices[v].y);
  }
  CHECK(loaded.fluid.triangles == mesh.fluid.triangles);
  CHECK(loaded.poro.triangles == mesh.poro.triangles);
  CHECK(loaded.interface.size() == mesh.interface.size());
  std::filesystem::remove(path);
}

TEST_CASE("negatively oriented triangle is rejected on read") {
  CoupledMesh mesh = build_rectangle_coupled_mesh(0, 1, -1, 1, 0.0, 1, 1, 1);
  std::swap(mesh.fluid.triangles[0][1], mesh.fluid.triangles[0][2]);
  const std::string path = temp_path("fpsi_bad_orientation.mesh");
  write_mesh(mesh, path);
  CHECK_THROWS_WITH_AS(read_mesh(path), doctest::Contains("oriented"), std::runtime_error);
  std::filesystem::remove(path);
}

TEST_CASE("interface offset is a matching-trace error") {
  CoupledMesh mesh = build_rectangle_coupled_mesh(0, 1, -1, 1, 0.0, 2, 1, 1);
  // shift one poro interface vertex by 1e-6
  const int v = mesh.interface[0].poro_v0;
  mesh.poro.vertices[v].x += 1e-6;
  const std::string path = temp_path("fpsi_offset.mesh");
  write_mesh(mesh, path);
  CHECK_THROWS_WITH_AS(read_mesh(path), doctest::Contains("match"), std::runtime_error);
  std::filesystem::remove(path);
}

TEST_CASE("validate reports violations as data") {
  CoupledMesh mesh = build_rectangle_coupled_mesh(0, 1, -1, 1, 0.0, 2, 2, 2);
  CHECK(validate(mesh).empty());
  CoupledMesh broken = mesh;
  std::swap(broken.poro.triangles[0][0], broken.poro.triangles[0][1]);
  const auto violations = validate(broken);
  CHECK(!violations.empty());
  bool found = false;
  for (const auto& v : violations) found = found || v.rule.find("oriented") != std::string::npos;
  CHECK(found);
}

TEST_CASE("builder rejects invalid arguments") {
  CHECK_THROWS(build_rectangle_coupled_mesh(0, 1, -1, 1, 0.0, 0, 1, 1));
  CHECK_THROWS(build_rectangle_coupled_mesh(0, 1, -1, 1, 2.0, 1, 1, 1));  // interface outside
  CHECK_THROWS(build_channel_coupled_mesh(6.0, 0.5, -0.1, 4, 2, 1));
}

TEST_CASE("malformed mesh file reports the line") {
  const std::string path = temp_path("fpsi_malformed.mesh");
  {
    std::ofstream out(path);
    out << "fpsi-mesh v1\nvertices 2\n0 0\nnot-a-number 1\n";
  }
  try {
    read_mesh(path);
    CHECK(false);
  } catch (const std::runtime_error& err) {
    CHECK(std::string(err.what()).find(":4") != std::string::npos);
  }
  std::filesystem::remove(path);
}
