#include "fpsi/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace fpsi {

const char* to_string(BoundaryTag tag) {
  switch (tag) {
    case BoundaryTag::GammaF: return "GammaF";
    case BoundaryTag::GammaPD: return "GammaPD";
    case BoundaryTag::GammaPN: return "GammaPN";
    case BoundaryTag::GammaFP: return "GammaFP";
    case BoundaryTag::FInlet: return "FInlet";
    case BoundaryTag::FOutlet: return "FOutlet";
    case BoundaryTag::PInlet: return "PInlet";
    case BoundaryTag::POutlet: return "POutlet";
    case BoundaryTag::PExt: return "PExt";
  }
  return "?";
}

std::optional<BoundaryTag> boundary_tag_from_string(const std::string& name) {
  static const std::map<std::string, BoundaryTag> table = {
      {"GammaF", BoundaryTag::GammaF},   {"GammaPD", BoundaryTag::GammaPD},
      {"GammaPN", BoundaryTag::GammaPN}, {"GammaFP", BoundaryTag::GammaFP},
      {"FInlet", BoundaryTag::FInlet},   {"FOutlet", BoundaryTag::FOutlet},
      {"PInlet", BoundaryTag::PInlet},   {"POutlet", BoundaryTag::POutlet},
      {"PExt", BoundaryTag::PExt},
  };
  auto it = table.find(name);
  if (it == table.end()) return std::nullopt;
  return it->second;
}

double SubMesh::triangle_area(int t) const {
  const auto& tri = triangles[t];
  Point2 a = vertices[tri[0]], b = vertices[tri[1]], c = vertices[tri[2]];
  return 0.5 * ((b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x));
}

Point2 SubMesh::centroid(int t) const {
  const auto& tri = triangles[t];
  Point2 a = vertices[tri[0]], b = vertices[tri[1]], c = vertices[tri[2]];
  return {(a.x + b.x + c.x) / 3.0, (a.y + b.y + c.y) / 3.0};
}

double SubMesh::max_diameter() const {
  double hmax = 0.0;
  for (const auto& tri : triangles) {
    for (int e = 0; e < 3; ++e) {
      Point2 d = vertices[tri[(e + 1) % 3]] - vertices[tri[e]];
      hmax = std::max(hmax, norm(d));
    }
  }
  return hmax;
}

double SubMesh::total_area() const {
  double area = 0.0;
  for (int t = 0; t < num_triangles(); ++t) area += triangle_area(t);
  return area;
}

namespace {

struct SideTags {
  BoundaryTag left, right, bottom, top;
};

// Structured block of nx x ny cells on (x0,x1) x (y0,y1), each cell split by
// one diagonal with direction alternating on cell parity.
void append_structured_block(SubMesh& mesh, double x0, double x1, double y0, double y1,
                             int nx, int ny, SideTags tags) {
  if (nx < 1 || ny < 1) throw std::invalid_argument("mesh block: subdivision counts must be >= 1");
  if (!(x1 > x0) || !(y1 > y0)) throw std::invalid_argument("mesh block: empty extents");
  const int base = mesh.num_vertices();
  auto vid = [&](int i, int j) { return base + j * (nx + 1) + i; };
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i <= nx; ++i) {
      double x = x0 + (x1 - x0) * i / nx;
      double y = y0 + (y1 - y0) * j / ny;
      mesh.vertices.push_back({x, y});
    }
  }
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      int v00 = vid(i, j), v10 = vid(i + 1, j), v01 = vid(i, j + 1), v11 = vid(i + 1, j + 1);
      if ((i + j) % 2 == 0) {
        mesh.triangles.push_back({v00, v10, v11});
        mesh.triangles.push_back({v00, v11, v01});
      } else {
        mesh.triangles.push_back({v00, v10, v01});
        mesh.triangles.push_back({v10, v11, v01});
      }
    }
  }
  for (int i = 0; i < nx; ++i) {
    mesh.boundary_edges.push_back({vid(i, 0), vid(i + 1, 0), tags.bottom});
    mesh.boundary_edges.push_back({vid(i, ny), vid(i + 1, ny), tags.top});
  }
  for (int j = 0; j < ny; ++j) {
    mesh.boundary_edges.push_back({vid(0, j), vid(0, j + 1), tags.left});
    mesh.boundary_edges.push_back({vid(nx, j), vid(nx, j + 1), tags.right});
  }
}

double mesh_scale(const CoupledMesh& mesh) {
  double s = 1.0;
  for (const auto* sub : {&mesh.fluid, &mesh.poro}) {
    for (const auto& v : sub->vertices) s = std::max({s, std::abs(v.x), std::abs(v.y)});
  }
  return s;
}

struct TaggedEdge {
  int v0, v1;
  int tri, local_edge;
};

// Boundary edges carrying the interface tag, with their owning triangle.
// Local edge k of triangle (t0,t1,t2) is (t_{k+1}, t_{k+2}) mod 3 (opposite vertex k).
std::vector<TaggedEdge> interface_edges_of(const SubMesh& mesh) {
  std::map<std::pair<int, int>, std::pair<int, int>> owner;  // edge -> (tri, local)
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tri = mesh.triangles[t];
    for (int k = 0; k < 3; ++k) {
      int a = tri[(k + 1) % 3], b = tri[(k + 2) % 3];
      owner[{std::min(a, b), std::max(a, b)}] = {t, k};
    }
  }
  std::vector<TaggedEdge> result;
  for (const auto& be : mesh.boundary_edges) {
    if (be.tag != BoundaryTag::GammaFP) continue;
    auto it = owner.find({std::min(be.a, be.b), std::max(be.a, be.b)});
    if (it == owner.end()) throw std::runtime_error("interface edge not found in any triangle");
    result.push_back({be.a, be.b, it->second.first, it->second.second});
  }
  return result;
}

}  // namespace

void rebuild_interface(CoupledMesh& mesh) {
  mesh.interface.clear();
  auto fedges = interface_edges_of(mesh.fluid);
  auto pedges = interface_edges_of(mesh.poro);
  if (fedges.size() != pedges.size())
    throw std::runtime_error("interface traces do not match: edge counts differ");
  const double tol = 1e-9 * mesh_scale(mesh);

  auto midpoint = [](const SubMesh& m, const TaggedEdge& e) {
    return 0.5 * (m.vertices[e.v0] + m.vertices[e.v1]);
  };
  std::vector<bool> used(pedges.size(), false);
  for (const auto& fe : fedges) {
    Point2 fm = midpoint(mesh.fluid, fe);
    int match = -1;
    for (std::size_t j = 0; j < pedges.size(); ++j) {
      if (used[j]) continue;
      if (norm(midpoint(mesh.poro, pedges[j]) - fm) <= tol) {
        match = static_cast<int>(j);
        break;
      }
    }
    if (match < 0)
      throw std::runtime_error("interface traces do not match: no poroelastic edge paired");
    used[match] = true;
    const auto& pe = pedges[match];

    InterfaceEdge rec;
    rec.fluid_v0 = fe.v0;
    rec.fluid_v1 = fe.v1;
    rec.fluid_tri = fe.tri;
    rec.fluid_local_edge = fe.local_edge;
    rec.poro_tri = pe.tri;
    rec.poro_local_edge = pe.local_edge;

    Point2 p0 = mesh.fluid.vertices[fe.v0], p1 = mesh.fluid.vertices[fe.v1];
    rec.length = norm(p1 - p0);
    if (rec.length <= 0.0) throw std::runtime_error("degenerate interface edge");
    Point2 t = (1.0 / rec.length) * (p1 - p0);
    Point2 n = rot90(t);
    // outward from the fluid triangle
    if (dot(n, mesh.fluid.centroid(fe.tri) - midpoint(mesh.fluid, fe)) > 0.0) n = -1.0 * n;
    Point2 tau = rot90(n);
    if (dot(p1 - p0, tau) < 0.0) {
      std::swap(rec.fluid_v0, rec.fluid_v1);
      std::swap(p0, p1);
    }
    rec.normal_f = n;
    rec.normal_p = -1.0 * n;
    rec.tangent_f = tau;

    // pair poro endpoints with the (possibly swapped) fluid endpoints
    Point2 q0 = mesh.poro.vertices[pe.v0], q1 = mesh.poro.vertices[pe.v1];
    if (norm(q0 - p0) <= tol && norm(q1 - p1) <= tol) {
      rec.poro_v0 = pe.v0;
      rec.poro_v1 = pe.v1;
    } else if (norm(q1 - p0) <= tol && norm(q0 - p1) <= tol) {
      rec.poro_v0 = pe.v1;
      rec.poro_v1 = pe.v0;
    } else {
      throw std::runtime_error("interface traces do not match: endpoints differ");
    }
    if (dot(rec.normal_p, mesh.poro.centroid(pe.tri) - midpoint(mesh.poro, pe)) > 0.0)
      throw std::runtime_error("interface normals inconsistent: subdomains overlap");
    mesh.interface.push_back(rec);
  }
  std::sort(mesh.interface.begin(), mesh.interface.end(),
            [&](const InterfaceEdge& a, const InterfaceEdge& b) {
              Point2 ma = 0.5 * (mesh.fluid.vertices[a.fluid_v0] + mesh.fluid.vertices[a.fluid_v1]);
              Point2 mb = 0.5 * (mesh.fluid.vertices[b.fluid_v0] + mesh.fluid.vertices[b.fluid_v1]);
              if (ma.y != mb.y) return ma.y < mb.y;
              return ma.x < mb.x;
            });
}

CoupledMesh build_rectangle_coupled_mesh(double x0, double x1, double y0, double y1,
                                         double interface_y, int nx, int ny_f, int ny_p,
                                         BoundaryTag exterior_fluid, BoundaryTag exterior_poro) {
  if (nx < 1 || ny_f < 1 || ny_p < 1)
    throw std::invalid_argument("build_rectangle_coupled_mesh: subdivision counts must be >= 1");
  if (!(interface_y > y0 && interface_y < y1))
    throw std::invalid_argument("build_rectangle_coupled_mesh: interface outside extents");
  CoupledMesh mesh;
  mesh.fluid.subdomain = Subdomain::Fluid;
  mesh.poro.subdomain = Subdomain::Poroelastic;
  append_structured_block(mesh.fluid, x0, x1, interface_y, y1, nx, ny_f,
                          {exterior_fluid, exterior_fluid, BoundaryTag::GammaFP, exterior_fluid});
  append_structured_block(mesh.poro, x0, x1, y0, interface_y, nx, ny_p,
                          {exterior_poro, exterior_poro, exterior_poro, BoundaryTag::GammaFP});
  rebuild_interface(mesh);
  return mesh;
}

CoupledMesh build_channel_coupled_mesh(double length, double radius, double wall_thickness,
                                       int nx, int ny_f, int ny_wall) {
  if (nx < 1 || ny_f < 1 || ny_wall < 1)
    throw std::invalid_argument("build_channel_coupled_mesh: subdivision counts must be >= 1");
  if (!(length > 0 && radius > 0 && wall_thickness > 0))
    throw std::invalid_argument("build_channel_coupled_mesh: nonpositive geometry");
  CoupledMesh mesh;
  mesh.fluid.subdomain = Subdomain::Fluid;
  mesh.poro.subdomain = Subdomain::Poroelastic;
  append_structured_block(mesh.fluid, 0.0, length, -radius, radius, nx, ny_f,
                          {BoundaryTag::FInlet, BoundaryTag::FOutlet, BoundaryTag::GammaFP,
                           BoundaryTag::GammaFP});
  // bottom wall strip, interface on its top side
  append_structured_block(mesh.poro, 0.0, length, -radius - wall_thickness, -radius, nx, ny_wall,
                          {BoundaryTag::PInlet, BoundaryTag::POutlet, BoundaryTag::PExt,
                           BoundaryTag::GammaFP});
  // top wall strip, interface on its bottom side
  append_structured_block(mesh.poro, 0.0, length, radius, radius + wall_thickness, nx, ny_wall,
                          {BoundaryTag::PInlet, BoundaryTag::POutlet, BoundaryTag::GammaFP,
                           BoundaryTag::PExt});
  rebuild_interface(mesh);
  return mesh;
}

namespace {

SubMesh refine_submesh(const SubMesh& mesh) {
  SubMesh out;
  out.subdomain = mesh.subdomain;
  out.vertices = mesh.vertices;
  std::map<std::pair<int, int>, int> edge_mid;
  auto mid_of = [&](int a, int b) {
    auto key = std::make_pair(std::min(a, b), std::max(a, b));
    auto it = edge_mid.find(key);
    if (it != edge_mid.end()) return it->second;
    int id = out.num_vertices();
    out.vertices.push_back(0.5 * (mesh.vertices[a] + mesh.vertices[b]));
    edge_mid[key] = id;
    return id;
  };
  for (const auto& tri : mesh.triangles) {
    int a = tri[0], b = tri[1], c = tri[2];
    int ab = mid_of(a, b), bc = mid_of(b, c), ca = mid_of(c, a);
    out.triangles.push_back({a, ab, ca});
    out.triangles.push_back({ab, b, bc});
    out.triangles.push_back({ca, bc, c});
    out.triangles.push_back({ab, bc, ca});
  }
  for (const auto& be : mesh.boundary_edges) {
    int m = mid_of(be.a, be.b);
    out.boundary_edges.push_back({be.a, m, be.tag});
    out.boundary_edges.push_back({m, be.b, be.tag});
  }
  return out;
}

}  // namespace

CoupledMesh uniform_refine(const CoupledMesh& mesh) {
  CoupledMesh out;
  out.fluid = refine_submesh(mesh.fluid);
  out.poro = refine_submesh(mesh.poro);
  rebuild_interface(out);
  return out;
}

namespace {

void validate_submesh(const SubMesh& mesh, const char* name, std::vector<MeshViolation>& out) {
  for (std::size_t v = 0; v < mesh.vertices.size(); ++v) {
    if (!std::isfinite(mesh.vertices[v].x) || !std::isfinite(mesh.vertices[v].y))
      out.push_back({std::string(name) + " vertex " + std::to_string(v), "non-finite coordinates"});
  }
  std::map<std::pair<int, int>, int> edge_count;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tri = mesh.triangles[t];
    for (int k = 0; k < 3; ++k) {
      if (tri[k] < 0 || tri[k] >= mesh.num_vertices()) {
        out.push_back({std::string(name) + " triangle " + std::to_string(t), "vertex index out of range"});
        return;
      }
    }
    if (mesh.triangle_area(t) <= 0.0)
      out.push_back({std::string(name) + " triangle " + std::to_string(t),
                     "not positively oriented"});
    for (int k = 0; k < 3; ++k) {
      int a = tri[k], b = tri[(k + 1) % 3];
      edge_count[{std::min(a, b), std::max(a, b)}]++;
    }
  }
  std::set<std::pair<int, int>> boundary;
  for (std::size_t e = 0; e < mesh.boundary_edges.size(); ++e) {
    const auto& be = mesh.boundary_edges[e];
    auto key = std::make_pair(std::min(be.a, be.b), std::max(be.a, be.b));
    if (!boundary.insert(key).second)
      out.push_back({std::string(name) + " bedge " + std::to_string(e), "duplicate tag on boundary edge"});
    auto it = edge_count.find(key);
    if (it == edge_count.end() || it->second != 1)
      out.push_back({std::string(name) + " bedge " + std::to_string(e),
                     "boundary edge not owned by exactly one triangle"});
  }
  for (const auto& [edge, count] : edge_count) {
    if (count > 2)
      out.push_back({std::string(name) + " edge (" + std::to_string(edge.first) + "," +
                         std::to_string(edge.second) + ")",
                     "shared by more than two triangles (non-conforming)"});
    if (count == 1 && !boundary.count(edge))
      out.push_back({std::string(name) + " edge (" + std::to_string(edge.first) + "," +
                         std::to_string(edge.second) + ")",
                     "boundary edge carries no tag"});
  }
}

}  // namespace

std::vector<MeshViolation> validate(const CoupledMesh& mesh) {
  std::vector<MeshViolation> out;
  validate_submesh(mesh.fluid, "fluid", out);
  validate_submesh(mesh.poro, "poro", out);
  if (!out.empty()) return out;  // interface checks assume sane submeshes

  const double tol = 1e-9 * mesh_scale(mesh);
  std::size_t tagged = 0;
  for (const auto& be : mesh.fluid.boundary_edges)
    if (be.tag == BoundaryTag::GammaFP) ++tagged;
  if (tagged != mesh.interface.size())
    out.push_back({"interface", "record count differs from tagged GammaFP edge count"});

  for (std::size_t e = 0; e < mesh.interface.size(); ++e) {
    const auto& rec = mesh.interface[e];
    std::string ent = "interface edge " + std::to_string(e);
    Point2 f0 = mesh.fluid.vertices[rec.fluid_v0], f1 = mesh.fluid.vertices[rec.fluid_v1];
    Point2 q0 = mesh.poro.vertices[rec.poro_v0], q1 = mesh.poro.vertices[rec.poro_v1];
    if (norm(f0 - q0) > tol || norm(f1 - q1) > tol)
      out.push_back({ent, "traces do not match vertex-for-vertex"});
    if (std::abs(norm(rec.normal_f) - 1.0) > 1e-14)
      out.push_back({ent, "fluid normal not unit"});
    if (norm(rec.normal_f + rec.normal_p) > 1e-14)
      out.push_back({ent, "normals do not satisfy n_f = -n_p"});
    if (std::abs(dot(rec.tangent_f, rec.normal_f)) > 1e-14 ||
        std::abs(norm(rec.tangent_f) - 1.0) > 1e-14)
      out.push_back({ent, "tangent not unit or not orthogonal to normal"});
  }
  return out;
}

// ---------------------------------------------------------------------------
// ASCII mesh file io
// ---------------------------------------------------------------------------

namespace {

class LineReader {
 public:
  LineReader(std::istream& in, const std::string& path) : in_(in), path_(path) {}

  std::istringstream next() {
    std::string line;
    while (std::getline(in_, line)) {
      ++lineno_;
      if (line.find_first_not_of(" \t\r\n") != std::string::npos) return std::istringstream(line);
    }
    fail("unexpected end of file");
    return std::istringstream();
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw std::runtime_error(path_ + ":" + std::to_string(lineno_) + ": " + what);
  }

  int lineno() const { return lineno_; }

 private:
  std::istream& in_;
  std::string path_;
  int lineno_ = 0;
};

SubMesh read_submesh(LineReader& reader, Subdomain subdomain) {
  SubMesh mesh;
  mesh.subdomain = subdomain;
  std::string kw;
  int n = 0;

  auto section = reader.next();
  if (!(section >> kw >> n) || kw != "vertices" || n < 0) reader.fail("expected 'vertices N'");
  mesh.vertices.resize(n);
  for (int i = 0; i < n; ++i) {
    auto line = reader.next();
    if (!(line >> mesh.vertices[i].x >> mesh.vertices[i].y)) reader.fail("expected 'x y'");
  }

  section = reader.next();
  if (!(section >> kw >> n) || kw != "triangles" || n < 0) reader.fail("expected 'triangles M'");
  mesh.triangles.resize(n);
  for (int i = 0; i < n; ++i) {
    auto line = reader.next();
    if (!(line >> mesh.triangles[i][0] >> mesh.triangles[i][1] >> mesh.triangles[i][2]))
      reader.fail("expected 'i j k'");
  }

  section = reader.next();
  if (!(section >> kw >> n) || kw != "bedges" || n < 0) reader.fail("expected 'bedges B'");
  mesh.boundary_edges.resize(n);
  for (int i = 0; i < n; ++i) {
    auto line = reader.next();
    std::string tag;
    if (!(line >> mesh.boundary_edges[i].a >> mesh.boundary_edges[i].b >> tag))
      reader.fail("expected 'i j TAG'");
    auto parsed = boundary_tag_from_string(tag);
    if (!parsed) reader.fail("unknown boundary tag '" + tag + "'");
    mesh.boundary_edges[i].tag = *parsed;
  }
  return mesh;
}

}  // namespace

void write_mesh(const CoupledMesh& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << "fpsi-mesh v1\n";
  char buf[64];
  for (const auto* sub : {&mesh.fluid, &mesh.poro}) {
    out << "vertices " << sub->num_vertices() << "\n";
    for (const auto& v : sub->vertices) {
      std::snprintf(buf, sizeof buf, "%.17g %.17g", v.x, v.y);
      out << buf << "\n";
    }
    out << "triangles " << sub->num_triangles() << "\n";
    for (const auto& t : sub->triangles) out << t[0] << " " << t[1] << " " << t[2] << "\n";
    out << "bedges " << sub->boundary_edges.size() << "\n";
    for (const auto& be : sub->boundary_edges)
      out << be.a << " " << be.b << " " << to_string(be.tag) << "\n";
  }
  out << "interface " << mesh.interface.size() << "\n";
  for (const auto& rec : mesh.interface)
    out << rec.fluid_v0 << " " << rec.fluid_v1 << " " << rec.poro_v0 << " " << rec.poro_v1 << "\n";
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

CoupledMesh read_mesh(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  LineReader reader(in, path);

  auto header = reader.next();
  std::string magic, version;
  if (!(header >> magic >> version) || magic != "fpsi-mesh" || version != "v1")
    reader.fail("expected header 'fpsi-mesh v1'");

  CoupledMesh mesh;
  mesh.fluid = read_submesh(reader, Subdomain::Fluid);
  mesh.poro = read_submesh(reader, Subdomain::Poroelastic);

  auto section = reader.next();
  std::string kw;
  int n = 0;
  if (!(section >> kw >> n) || kw != "interface" || n < 0) reader.fail("expected 'interface E'");
  std::set<std::array<int, 4>> recorded;
  for (int i = 0; i < n; ++i) {
    auto line = reader.next();
    std::array<int, 4> rec{};
    if (!(line >> rec[0] >> rec[1] >> rec[2] >> rec[3])) reader.fail("expected 'fv0 fv1 pv0 pv1'");
    if (rec[0] > rec[1]) {
      std::swap(rec[0], rec[1]);
      std::swap(rec[2], rec[3]);
    }
    recorded.insert(rec);
  }

  auto violations = validate(CoupledMesh{mesh.fluid, mesh.poro, {}});
  // drop the interface-count complaint; records are rebuilt below
  std::erase_if(violations, [](const MeshViolation& v) { return v.entity == "interface"; });
  if (!violations.empty())
    throw std::runtime_error(path + ": invalid mesh: " + violations.front().entity + ": " +
                             violations.front().rule);

  rebuild_interface(mesh);
  if (static_cast<int>(mesh.interface.size()) != n)
    throw std::runtime_error(path + ": interface record count does not match tagged edges");
  for (const auto& rec : mesh.interface) {
    std::array<int, 4> key{rec.fluid_v0, rec.fluid_v1, rec.poro_v0, rec.poro_v1};
    if (key[0] > key[1]) {
      std::swap(key[0], key[1]);
      std::swap(key[2], key[3]);
    }
    if (!recorded.count(key))
      throw std::runtime_error(path + ": interface records inconsistent with tagged edges");
  }
  return mesh;
}

}  // namespace fpsi
