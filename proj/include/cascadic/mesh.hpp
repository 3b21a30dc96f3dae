#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <vector>

namespace cascadic {

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

enum class Domain { UnitSquare, LShape };

/// A refined parent edge: the inserted vertex sits at
/// (1 - ratio) * from + ratio * to.
struct EdgeSplit {
  int from = -1;
  int to = -1;
  int vertex = -1;
  double ratio = 0.5;
};

/// Conforming, counterclockwise triangulation of one of the built-in domains.
///
/// Refinement keeps the coarse vertex numbering: vertices [0, n_coarse) of a
/// refined mesh are the vertices of its parent mesh, in the same order.
struct Mesh {
  Domain domain = Domain::UnitSquare;
  int level = 1;
  std::vector<Point> vertices;
  std::vector<std::array<int, 3>> triangles;
  std::vector<bool> boundary_vertex;
  /// Index of the parent triangle in the previous level; empty on level 1.
  std::vector<int> parent_triangle;
  /// One record per refined parent edge; empty on level 1.
  std::vector<EdgeSplit> edge_splits;

  std::size_t num_vertices() const { return vertices.size(); }
  std::size_t num_triangles() const { return triangles.size(); }
};

struct RefinementRule {
  enum class Kind { Uniform, Graded };
  Kind kind = Kind::Uniform;
  double kappa = 1.0;
  Point singular_point{};

  static RefinementRule uniform() { return {}; }
  static RefinementRule graded(double kappa, Point singular_point) {
    return {Kind::Graded, kappa, singular_point};
  }
};

/// Unique undirected edges of a mesh plus the triangle-to-edge incidence.
/// Local edge e of a triangle (v0, v1, v2) joins v_e and v_{(e+1)%3}.
struct EdgeTable {
  std::vector<std::array<int, 2>> edges;
  std::vector<std::array<int, 3>> triangle_edges;
  /// Number of triangles sharing each edge (1 on the boundary, 2 inside).
  std::vector<std::uint8_t> multiplicity;
};

Mesh build_initial_mesh(Domain domain);
Mesh refine(const Mesh& mesh, const RefinementRule& rule);

/// Builds the level-1 mesh and `levels - 1` refinements of it.
std::vector<Mesh> build_hierarchy(Domain domain, const RefinementRule& rule, int levels);

/// Maximum edge length over all triangles.
double mesh_size(const Mesh& mesh);

double signed_area(const Point& a, const Point& b, const Point& c);
double triangle_area(const Mesh& mesh, std::size_t t);
double total_area(const Mesh& mesh);
double domain_area(Domain domain);

/// True when the point lies on the boundary of the domain (to 1e-12).
bool on_domain_boundary(Domain domain, const Point& p);

/// Throws NonConformingInput on edges shared by more than two triangles,
/// inconsistent orientation, or hanging vertices.
EdgeTable build_edge_table(const Mesh& mesh);

/// Debug dump: "NV NT", then NV lines "x y flag", then NT lines "i j k parent".
void write_mesh(std::ostream& out, const Mesh& mesh);

}  // namespace cascadic
