#include "cascadic/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <unordered_map>

#include "cascadic/error.hpp"

namespace cascadic {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonConformingInput: return "NonConformingInput";
    case ErrorCode::SingularPointNotVertex: return "SingularPointNotVertex";
    case ErrorCode::QuadratureFailure: return "QuadratureFailure";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NotSpd: return "NotSpd";
    case ErrorCode::Stagnation: return "Stagnation";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::ZeroCurvature: return "ZeroCurvature";
    case ErrorCode::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorCode::HierarchyMismatch: return "HierarchyMismatch";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::UsageError: return "UsageError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

namespace {

constexpr double kGeomTol = 1e-12;

std::uint64_t edge_key(int a, int b) {
  const auto lo = static_cast<std::uint64_t>(std::min(a, b));
  const auto hi = static_cast<std::uint64_t>(std::max(a, b));
  return (lo << 32) | hi;
}

int find_or_add(std::vector<Point>& vertices, Point p) {
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    if (vertices[i] == p) return static_cast<int>(i);
  }
  vertices.push_back(p);
  return static_cast<int>(vertices.size() - 1);
}

// Union Jack split of the axis-aligned square [x0, x0+1] x [y0, y0+1].
void add_union_jack_square(Mesh& mesh, double x0, double y0) {
  const int c0 = find_or_add(mesh.vertices, {x0, y0});
  const int c1 = find_or_add(mesh.vertices, {x0 + 1.0, y0});
  const int c2 = find_or_add(mesh.vertices, {x0 + 1.0, y0 + 1.0});
  const int c3 = find_or_add(mesh.vertices, {x0, y0 + 1.0});
  const int m = find_or_add(mesh.vertices, {x0 + 0.5, y0 + 0.5});
  mesh.triangles.push_back({c0, c1, m});
  mesh.triangles.push_back({c1, c2, m});
  mesh.triangles.push_back({c2, c3, m});
  mesh.triangles.push_back({c3, c0, m});
}

double distance(const Point& a, const Point& b) { return std::hypot(b.x - a.x, b.y - a.y); }

}  // namespace

double signed_area(const Point& a, const Point& b, const Point& c) {
  return 0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
}

double triangle_area(const Mesh& mesh, std::size_t t) {
  const auto& tri = mesh.triangles[t];
  return signed_area(mesh.vertices[tri[0]], mesh.vertices[tri[1]], mesh.vertices[tri[2]]);
}

// Neumaier summation: fine meshes have millions of tiny terms.
double total_area(const Mesh& mesh) {
  double sum = 0.0;
  double carry = 0.0;
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const double a = triangle_area(mesh, t);
    const double next = sum + a;
    carry += std::abs(sum) >= std::abs(a) ? (sum - next) + a : (a - next) + sum;
    sum = next;
  }
  return sum + carry;
}

double domain_area(Domain domain) { return domain == Domain::UnitSquare ? 1.0 : 3.0; }

bool on_domain_boundary(Domain domain, const Point& p) {
  auto near = [](double a, double b) { return std::abs(a - b) <= kGeomTol; };
  if (domain == Domain::UnitSquare) {
    return near(p.x, 0.0) || near(p.x, 1.0) || near(p.y, 0.0) || near(p.y, 1.0);
  }
  // (-1,1)^2 minus [0,1] x [-1,0]: outer square plus the two re-entrant edges.
  if (near(p.x, -1.0) || near(p.x, 1.0) || near(p.y, -1.0) || near(p.y, 1.0)) return true;
  if (near(p.y, 0.0) && p.x >= -kGeomTol) return true;
  if (near(p.x, 0.0) && p.y <= kGeomTol) return true;
  return false;
}

Mesh build_initial_mesh(Domain domain) {
  Mesh mesh;
  mesh.domain = domain;
  mesh.level = 1;
  if (domain == Domain::UnitSquare) {
    add_union_jack_square(mesh, 0.0, 0.0);
  } else {
    add_union_jack_square(mesh, -1.0, -1.0);
    add_union_jack_square(mesh, -1.0, 0.0);
    add_union_jack_square(mesh, 0.0, 0.0);
  }
  mesh.boundary_vertex.resize(mesh.vertices.size());
  for (std::size_t v = 0; v < mesh.vertices.size(); ++v) {
    mesh.boundary_vertex[v] = on_domain_boundary(domain, mesh.vertices[v]);
  }
  return mesh;
}

EdgeTable build_edge_table(const Mesh& mesh) {
  EdgeTable table;
  table.triangle_edges.resize(mesh.num_triangles());
  table.edges.reserve(mesh.num_vertices() + mesh.num_triangles());
  std::unordered_map<std::uint64_t, int> index;
  index.reserve(2 * (mesh.num_vertices() + mesh.num_triangles()));
  // Orientation of the first use of each edge; a conforming, consistently
  // oriented mesh traverses a shared edge once in each direction.
  std::vector<std::uint8_t> first_forward;

  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tri = mesh.triangles[t];
    for (int e = 0; e < 3; ++e) {
      const int a = tri[e];
      const int b = tri[(e + 1) % 3];
      const bool forward = a < b;
      auto [it, inserted] = index.try_emplace(edge_key(a, b), static_cast<int>(table.edges.size()));
      if (inserted) {
        table.edges.push_back({std::min(a, b), std::max(a, b)});
        table.multiplicity.push_back(1);
        first_forward.push_back(forward ? 1 : 0);
      } else {
        const int id = it->second;
        if (table.multiplicity[id] >= 2) {
          throw Error(ErrorCode::NonConformingInput, "edge shared by more than two triangles");
        }
        if ((first_forward[id] != 0) == forward) {
          throw Error(ErrorCode::NonConformingInput, "inconsistent triangle orientation");
        }
        ++table.multiplicity[id];
      }
      table.triangle_edges[t][e] = it->second;
    }
  }

  // An edge seen once that is not on the domain boundary borders a hanging vertex.
  for (std::size_t id = 0; id < table.edges.size(); ++id) {
    if (table.multiplicity[id] != 1) continue;
    const Point& a = mesh.vertices[table.edges[id][0]];
    const Point& b = mesh.vertices[table.edges[id][1]];
    const Point mid{0.5 * (a.x + b.x), 0.5 * (a.y + b.y)};
    if (!on_domain_boundary(mesh.domain, mid)) {
      throw Error(ErrorCode::NonConformingInput, "interior edge with a single triangle (hanging vertex)");
    }
  }
  return table;
}

Mesh refine(const Mesh& mesh, const RefinementRule& rule) {
  const EdgeTable table = build_edge_table(mesh);

  int singular = -1;
  if (rule.kind == RefinementRule::Kind::Graded) {
    if (!(rule.kappa > 0.0 && rule.kappa <= 1.0)) {
      throw Error(ErrorCode::InvalidConfig, "kappa must lie in (0, 1]");
    }
    for (std::size_t v = 0; v < mesh.num_vertices(); ++v) {
      if (distance(mesh.vertices[v], rule.singular_point) <= kGeomTol) {
        singular = static_cast<int>(v);
        break;
      }
    }
    if (singular < 0) {
      throw Error(ErrorCode::SingularPointNotVertex, "graded refinement point is not a mesh vertex");
    }
  }
  const double graded_ratio = rule.kappa / (1.0 + rule.kappa);

  Mesh fine;
  fine.domain = mesh.domain;
  fine.level = mesh.level + 1;
  fine.vertices = mesh.vertices;
  fine.boundary_vertex = mesh.boundary_vertex;
  fine.vertices.reserve(mesh.num_vertices() + table.edges.size());
  fine.boundary_vertex.reserve(mesh.num_vertices() + table.edges.size());
  fine.edge_splits.reserve(table.edges.size());

  // New vertices are numbered in edge-table order, which is itself fixed by
  // the triangle order, so refinement is deterministic.
  for (std::size_t id = 0; id < table.edges.size(); ++id) {
    EdgeSplit split;
    split.from = table.edges[id][0];
    split.to = table.edges[id][1];
    if (split.to == singular) std::swap(split.from, split.to);
    split.ratio = (split.from == singular) ? graded_ratio : 0.5;
    split.vertex = static_cast<int>(fine.vertices.size());
    const Point& a = mesh.vertices[split.from];
    const Point& b = mesh.vertices[split.to];
    // Symmetric in (a, b) when ratio == 0.5, so kappa = 1 matches Uniform bitwise.
    const double wa = 1.0 - split.ratio;
    fine.vertices.push_back({wa * a.x + split.ratio * b.x, wa * a.y + split.ratio * b.y});
    fine.boundary_vertex.push_back(table.multiplicity[id] == 1);
    fine.edge_splits.push_back(split);
  }

  const int nv = static_cast<int>(mesh.num_vertices());
  fine.triangles.reserve(4 * mesh.num_triangles());
  fine.parent_triangle.reserve(4 * mesh.num_triangles());
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tri = mesh.triangles[t];
    const auto& te = table.triangle_edges[t];
    const int m01 = nv + te[0];
    const int m12 = nv + te[1];
    const int m20 = nv + te[2];
    fine.triangles.push_back({tri[0], m01, m20});
    fine.triangles.push_back({m01, tri[1], m12});
    fine.triangles.push_back({m20, m12, tri[2]});
    fine.triangles.push_back({m01, m12, m20});
    for (int c = 0; c < 4; ++c) fine.parent_triangle.push_back(static_cast<int>(t));
  }
  return fine;
}

std::vector<Mesh> build_hierarchy(Domain domain, const RefinementRule& rule, int levels) {
  std::vector<Mesh> meshes;
  meshes.reserve(static_cast<std::size_t>(std::max(levels, 1)));
  meshes.push_back(build_initial_mesh(domain));
  for (int k = 2; k <= levels; ++k) meshes.push_back(refine(meshes.back(), rule));
  return meshes;
}

double mesh_size(const Mesh& mesh) {
  double h = 0.0;
  for (const auto& tri : mesh.triangles) {
    for (int e = 0; e < 3; ++e) {
      h = std::max(h, distance(mesh.vertices[tri[e]], mesh.vertices[tri[(e + 1) % 3]]));
    }
  }
  return h;
}

void write_mesh(std::ostream& out, const Mesh& mesh) {
  out << mesh.num_vertices() << ' ' << mesh.num_triangles() << '\n';
  out.precision(17);
  for (std::size_t v = 0; v < mesh.num_vertices(); ++v) {
    out << mesh.vertices[v].x << ' ' << mesh.vertices[v].y << ' ' << (mesh.boundary_vertex[v] ? 1 : 0)
        << '\n';
  }
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tri = mesh.triangles[t];
    const int parent = mesh.parent_triangle.empty() ? -1 : mesh.parent_triangle[t];
    out << tri[0] << ' ' << tri[1] << ' ' << tri[2] << ' ' << parent << '\n';
  }
  if (!out) throw Error(ErrorCode::IoError, "failed to write mesh");
}

}  // namespace cascadic
