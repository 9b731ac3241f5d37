#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace fpsi {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

inline Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
inline Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
inline Point2 operator*(double s, Point2 a) { return {s * a.x, s * a.y}; }
inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline double norm(Point2 a) { return std::sqrt(dot(a, a)); }
/// Rotation by +90 degrees: (x,y) -> (-y,x).
inline Point2 rot90(Point2 a) { return {-a.y, a.x}; }

enum class BoundaryTag {
  GammaF,   // exterior fluid boundary (essential velocity)
  GammaPD,  // exterior poroelastic boundary, pressure-data (natural Darcy)
  GammaPN,  // exterior poroelastic boundary, no-flux (essential u_p.n)
  GammaFP,  // fluid/poroelastic interface
  FInlet,
  FOutlet,
  PInlet,
  POutlet,
  PExt,
};

const char* to_string(BoundaryTag tag);
std::optional<BoundaryTag> boundary_tag_from_string(const std::string& name);

enum class Subdomain { Fluid, Poroelastic };

struct BoundaryEdge {
  int a = -1;
  int b = -1;
  BoundaryTag tag = BoundaryTag::GammaF;
};

struct SubMesh {
  Subdomain subdomain = Subdomain::Fluid;
  std::vector<Point2> vertices;
  std::vector<std::array<int, 3>> triangles;  // positively oriented
  std::vector<BoundaryEdge> boundary_edges;

  int num_vertices() const { return static_cast<int>(vertices.size()); }
  int num_triangles() const { return static_cast<int>(triangles.size()); }
  double triangle_area(int t) const;
  Point2 centroid(int t) const;
  double max_diameter() const;
  double total_area() const;
};

/// One interface edge, present in both submeshes with coinciding endpoints.
/// Endpoints are ordered so that fluid_v0->fluid_v1 points along tangent_f,
/// with tangent_f = rot90(normal_f) and normal_f the outward fluid normal.
struct InterfaceEdge {
  int fluid_v0 = -1, fluid_v1 = -1;  // fluid submesh vertex ids
  int poro_v0 = -1, poro_v1 = -1;    // poroelastic submesh vertex ids
  int fluid_tri = -1, fluid_local_edge = -1;
  int poro_tri = -1, poro_local_edge = -1;
  Point2 normal_f, normal_p, tangent_f;
  double length = 0.0;
};

struct CoupledMesh {
  SubMesh fluid;
  SubMesh poro;
  std::vector<InterfaceEdge> interface;
};

struct MeshViolation {
  std::string entity;
  std::string rule;
};

/// Structured crossed-diagonal mesh of (x0,x1) x (y0,y1) split at interface_y:
/// fluid above, poroelastic below. nx columns, ny_f fluid rows, ny_p poro rows.
/// exterior_fluid / exterior_poro tag the outer boundaries of each subdomain.
CoupledMesh build_rectangle_coupled_mesh(double x0, double x1, double y0, double y1,
                                         double interface_y, int nx, int ny_f, int ny_p,
                                         BoundaryTag exterior_fluid = BoundaryTag::GammaF,
                                         BoundaryTag exterior_poro = BoundaryTag::GammaPD);

/// Channel with poroelastic wall strips above and below the fluid lumen:
/// fluid (0,L) x (-R,R), walls (0,L) x (R, R+r_p) and (0,L) x (-R-r_p, -R).
/// Tags: FInlet/FOutlet on the fluid ends, PInlet/POutlet on the wall ends,
/// PExt on the outer wall boundaries. Both wall strips live in one poro submesh.
CoupledMesh build_channel_coupled_mesh(double length, double radius, double wall_thickness,
                                       int nx, int ny_f, int ny_wall);

CoupledMesh uniform_refine(const CoupledMesh& mesh);

std::vector<MeshViolation> validate(const CoupledMesh& mesh);

void write_mesh(const CoupledMesh& mesh, const std::string& path);
CoupledMesh read_mesh(const std::string& path);

/// Pair up GammaFP-tagged boundary edges of the two submeshes geometrically
/// and fill the interface records. Throws if traces do not match.
void rebuild_interface(CoupledMesh& mesh);

}  // namespace fpsi
