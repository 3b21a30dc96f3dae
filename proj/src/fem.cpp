#include "cascadic/fem.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cascadic/error.hpp"
#include "cascadic/spd_solver.hpp"

namespace cascadic {

namespace {

using Bary = std::array<double, 3>;
using Grad = std::array<double, 2>;

struct Geometry {
  double area;
  std::array<Grad, 3> grad_lambda;
};

Geometry triangle_geometry(const Point& a, const Point& b, const Point& c) {
  const double area = signed_area(a, b, c);
  if (!(area > 0.0)) throw Error(ErrorCode::QuadratureFailure, "triangle with nonpositive area");
  const double inv = 1.0 / (2.0 * area);
  Geometry g{area, {}};
  g.grad_lambda[0] = {(b.y - c.y) * inv, (c.x - b.x) * inv};
  g.grad_lambda[1] = {(c.y - a.y) * inv, (a.x - c.x) * inv};
  g.grad_lambda[2] = {(a.y - b.y) * inv, (b.x - a.x) * inv};
  return g;
}

Geometry element_geometry(const Mesh& mesh, std::size_t t) {
  const auto& tri = mesh.triangles[t];
  return triangle_geometry(mesh.vertices[tri[0]], mesh.vertices[tri[1]], mesh.vertices[tri[2]]);
}

Point map_point(const Mesh& mesh, std::size_t t, const Bary& l) {
  const auto& tri = mesh.triangles[t];
  const Point& a = mesh.vertices[tri[0]];
  const Point& b = mesh.vertices[tri[1]];
  const Point& c = mesh.vertices[tri[2]];
  return {l[0] * a.x + l[1] * b.x + l[2] * c.x, l[0] * a.y + l[1] * b.y + l[2] * c.y};
}

// P2 Lagrange basis in barycentric form; local order v0, v1, v2, e01, e12, e20.
std::array<double, 6> p2_values(const Bary& l) {
  return {l[0] * (2.0 * l[0] - 1.0), l[1] * (2.0 * l[1] - 1.0), l[2] * (2.0 * l[2] - 1.0),
          4.0 * l[0] * l[1],        4.0 * l[1] * l[2],        4.0 * l[2] * l[0]};
}

std::array<Grad, 6> p2_gradients(const Bary& l, const std::array<Grad, 3>& gl) {
  std::array<Grad, 6> g{};
  for (int i = 0; i < 3; ++i) {
    const double s = 4.0 * l[i] - 1.0;
    g[i] = {s * gl[i][0], s * gl[i][1]};
  }
  for (int e = 0; e < 3; ++e) {
    const int i = e;
    const int j = (e + 1) % 3;
    g[3 + e] = {4.0 * (l[i] * gl[j][0] + l[j] * gl[i][0]), 4.0 * (l[i] * gl[j][1] + l[j] * gl[i][1])};
  }
  return g;
}

// CSR matrix with a fixed sparsity pattern from element connectivity;
// entries are accumulated in element order.
class CsrAccumulator {
 public:
  template <class RowsOf, class ColsOf>
  CsrAccumulator(std::size_t n_rows, std::size_t n_cols, std::size_t n_elements, RowsOf rows_of, ColsOf cols_of)
      : rows_(n_rows), cols_(n_cols), offsets_(n_rows + 1, 0) {
    std::vector<int> r, c;
    for (std::size_t t = 0; t < n_elements; ++t) {
      rows_of(t, r);
      cols_of(t, c);
      const auto valid_cols = static_cast<std::size_t>(std::count_if(c.begin(), c.end(), [](int x) { return x >= 0; }));
      for (int row : r) {
        if (row >= 0) offsets_[static_cast<std::size_t>(row) + 1] += valid_cols;
      }
    }
    std::partial_sum(offsets_.begin(), offsets_.end(), offsets_.begin());
    std::vector<int> raw(offsets_.back());
    std::vector<std::size_t> next(offsets_.begin(), offsets_.end() - 1);
    for (std::size_t t = 0; t < n_elements; ++t) {
      rows_of(t, r);
      cols_of(t, c);
      for (int row : r) {
        if (row < 0) continue;
        for (int col : c) {
          if (col >= 0) raw[next[static_cast<std::size_t>(row)]++] = col;
        }
      }
    }
    std::vector<std::size_t> compact(n_rows + 1, 0);
    std::size_t out = 0;
    for (std::size_t row = 0; row < n_rows; ++row) {
      auto begin = raw.begin() + static_cast<std::ptrdiff_t>(offsets_[row]);
      auto end = raw.begin() + static_cast<std::ptrdiff_t>(offsets_[row + 1]);
      std::sort(begin, end);
      end = std::unique(begin, end);
      for (auto it = begin; it != end; ++it) raw[out++] = *it;
      compact[row + 1] = out;
    }
    raw.resize(out);
    raw.shrink_to_fit();
    columns_ = std::move(raw);
    offsets_ = std::move(compact);
    values_.assign(columns_.size(), 0.0);
  }

  void add(int row, int col, double value) {
    const auto begin = columns_.begin() + static_cast<std::ptrdiff_t>(offsets_[static_cast<std::size_t>(row)]);
    const auto end = columns_.begin() + static_cast<std::ptrdiff_t>(offsets_[static_cast<std::size_t>(row) + 1]);
    const auto it = std::lower_bound(begin, end, col);
    values_[static_cast<std::size_t>(it - columns_.begin())] += value;
  }

  SparseMatrix finish() && {
    return SparseMatrix(rows_, cols_, std::move(offsets_), std::move(columns_), std::move(values_));
  }

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<std::size_t> offsets_;
  std::vector<int> columns_;
  std::vector<double> values_;
};

int pressure_dof_count(ElementPair pair) { return pair == ElementPair::P2P0 ? 1 : 3; }

void pressure_dofs_of(const Mesh& mesh, ElementPair pair, std::size_t t, std::vector<int>& out) {
  out.clear();
  if (pair == ElementPair::P2P0) {
    out.push_back(static_cast<int>(t));
  } else {
    for (int v : mesh.triangles[t]) out.push_back(v);
  }
}

// Pressure basis values on one element at a barycentric point.
std::array<double, 3> pressure_basis(ElementPair pair, const Bary& l) {
  if (pair == ElementPair::P2P0) return {1.0, 0.0, 0.0};
  return l;
}

}  // namespace

DofSpace build_dofs(const Mesh& mesh, ElementPair pair) {
  DofSpace dofs;
  dofs.pair = pair;
  dofs.edges = build_edge_table(mesh);
  const std::size_t nv = mesh.num_vertices();
  dofs.n_scalar_nodes = nv + dofs.edges.edges.size();
  dofs.free_index.assign(dofs.n_scalar_nodes, -1);
  int next = 0;
  for (std::size_t v = 0; v < nv; ++v) {
    if (!mesh.boundary_vertex[v]) dofs.free_index[v] = next++;
  }
  for (std::size_t e = 0; e < dofs.edges.edges.size(); ++e) {
    if (dofs.edges.multiplicity[e] == 2) dofs.free_index[nv + e] = next++;
  }
  dofs.n_free_nodes = static_cast<std::size_t>(next);
  dofs.element_nodes.resize(mesh.num_triangles());
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tri = mesh.triangles[t];
    const auto& te = dofs.edges.triangle_edges[t];
    dofs.element_nodes[t] = {tri[0], tri[1], tri[2], static_cast<int>(nv) + te[0], static_cast<int>(nv) + te[1],
                             static_cast<int>(nv) + te[2]};
  }
  dofs.n_pressure = pair == ElementPair::P2P0 ? mesh.num_triangles() : nv;
  return dofs;
}

std::array<std::array<double, 3>, 3> p1_stiffness(const Point& a, const Point& b, const Point& c) {
  const Geometry g = triangle_geometry(a, b, c);
  std::array<std::array<double, 3>, 3> k{};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      k[i][j] = g.area * (g.grad_lambda[i][0] * g.grad_lambda[j][0] + g.grad_lambda[i][1] * g.grad_lambda[j][1]);
    }
  }
  return k;
}

StokesDiscretization assemble_stokes(std::shared_ptr<const Mesh> mesh_ptr, ElementPair pair,
                                     const ManufacturedSolution& ms, const TriangleRule& rule) {
  const Mesh& mesh = *mesh_ptr;
  StokesDiscretization disc;
  disc.mesh = std::move(mesh_ptr);
  disc.dofs = build_dofs(mesh, pair);
  const DofSpace& dofs = disc.dofs;
  const std::size_t nt = mesh.num_triangles();
  const std::size_t n_free = dofs.n_free_nodes;
  const std::size_t np = dofs.n_pressure;

  auto scalar_free = [&](std::size_t t, std::vector<int>& out) {
    out.clear();
    for (int node : dofs.element_nodes[t]) out.push_back(dofs.free_index[static_cast<std::size_t>(node)]);
  };
  auto velocity_free = [&](std::size_t t, std::vector<int>& out) {
    out.clear();
    for (int c = 0; c < 2; ++c) {
      for (int node : dofs.element_nodes[t]) out.push_back(dofs.velocity_dof(node, c));
    }
  };
  auto pressure_rows = [&](std::size_t t, std::vector<int>& out) { pressure_dofs_of(mesh, pair, t, out); };

  CsrAccumulator laplace(n_free, n_free, nt, scalar_free, scalar_free);
  CsrAccumulator b(np, 2 * n_free, nt, pressure_rows, velocity_free);
  CsrAccumulator mp(np, np, nt, pressure_rows, pressure_rows);
  disc.f_vec.assign(2 * n_free, 0.0);
  disc.g_vec.assign(np, 0.0);

  const int npl = pressure_dof_count(pair);
  std::vector<int> pdofs;
  for (std::size_t t = 0; t < nt; ++t) {
    const Geometry geo = element_geometry(mesh, t);
    const auto& nodes = dofs.element_nodes[t];
    std::array<std::array<double, 6>, 6> k{};
    std::array<std::array<std::array<double, 6>, 3>, 2> bl{};  // [component][pressure][velocity node]
    std::array<std::array<double, 3>, 3> ml{};
    std::array<std::array<double, 6>, 2> fl{};
    std::array<double, 3> gl{};

    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Bary& l = rule.barycentric[q];
      const double w = geo.area * rule.weights[q];
      const auto phi = p2_values(l);
      const auto grad = p2_gradients(l, geo.grad_lambda);
      const auto chi = pressure_basis(pair, l);
      const Point x = map_point(mesh, t, l);
      const Vec2 f = ms.force(x.x, x.y);
      const double g = ms.divergence(x.x, x.y);
      for (int i = 0; i < 6; ++i) {
        for (int j = 0; j < 6; ++j) k[i][j] += w * (grad[i][0] * grad[j][0] + grad[i][1] * grad[j][1]);
        fl[0][i] += w * f[0] * phi[i];
        fl[1][i] += w * f[1] * phi[i];
      }
      for (int m = 0; m < npl; ++m) {
        for (int i = 0; i < 6; ++i) {
          bl[0][m][i] -= w * chi[m] * grad[i][0];
          bl[1][m][i] -= w * chi[m] * grad[i][1];
        }
        for (int n = 0; n < npl; ++n) ml[m][n] += w * chi[m] * chi[n];
        gl[m] -= w * g * chi[m];
      }
    }

    pressure_dofs_of(mesh, pair, t, pdofs);
    for (int i = 0; i < 6; ++i) {
      const int fi = dofs.free_index[static_cast<std::size_t>(nodes[i])];
      if (fi < 0) continue;
      for (int j = 0; j < 6; ++j) {
        const int fj = dofs.free_index[static_cast<std::size_t>(nodes[j])];
        if (fj >= 0) laplace.add(fi, fj, k[i][j]);
      }
      for (int c = 0; c < 2; ++c) {
        const int dof = dofs.velocity_dof(nodes[i], c);
        disc.f_vec[static_cast<std::size_t>(dof)] += fl[c][i];
        for (int m = 0; m < npl; ++m) b.add(pdofs[static_cast<std::size_t>(m)], dof, bl[c][m][i]);
      }
    }
    for (int m = 0; m < npl; ++m) {
      disc.g_vec[static_cast<std::size_t>(pdofs[static_cast<std::size_t>(m)])] += gl[m];
      for (int n = 0; n < npl; ++n) {
        mp.add(pdofs[static_cast<std::size_t>(m)], pdofs[static_cast<std::size_t>(n)], ml[m][n]);
      }
    }
  }

  disc.laplace = std::move(laplace).finish();
  disc.b = std::move(b).finish();
  disc.mp = std::move(mp).finish();
  return disc;
}

SparseMatrix velocity_stiffness(const StokesDiscretization& disc) {
  const SparseMatrix& l = disc.laplace;
  const std::size_t n = l.rows();
  std::vector<std::size_t> offsets(2 * n + 1, 0);
  std::vector<int> cols;
  std::vector<double> vals;
  cols.reserve(2 * l.nonzeros());
  vals.reserve(2 * l.nonzeros());
  for (int block = 0; block < 2; ++block) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t k = l.row_offsets()[i]; k < l.row_offsets()[i + 1]; ++k) {
        cols.push_back(l.columns()[k] + block * static_cast<int>(n));
        vals.push_back(l.values()[k]);
      }
      offsets[block * n + i + 1] = vals.size();
    }
  }
  return SparseMatrix(2 * n, 2 * n, std::move(offsets), std::move(cols), std::move(vals));
}

double energy_error(std::span<const double> u_h, const StokesDiscretization& disc, const ManufacturedSolution& ms) {
  const Mesh& mesh = *disc.mesh;
  const DofSpace& dofs = disc.dofs;
  if (u_h.size() != dofs.n_velocity()) throw Error(ErrorCode::DimensionMismatch, "velocity vector has wrong length");
  const TriangleRule& rule = degree6_rule();
  double sum = 0.0;
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const Geometry geo = element_geometry(mesh, t);
    const auto& nodes = dofs.element_nodes[t];
    std::array<std::array<double, 6>, 2> coeff{};
    for (int c = 0; c < 2; ++c) {
      for (int i = 0; i < 6; ++i) {
        const int dof = dofs.velocity_dof(nodes[i], c);
        coeff[c][i] = dof < 0 ? 0.0 : u_h[static_cast<std::size_t>(dof)];
      }
    }
    double local = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const auto& l = rule.barycentric[q];
      const auto grad = p2_gradients(l, geo.grad_lambda);
      const Point x = map_point(mesh, t, l);
      const Mat2 exact = ms.velocity_gradient(x.x, x.y);
      double e2 = 0.0;
      for (int c = 0; c < 2; ++c) {
        Grad gh{0.0, 0.0};
        for (int i = 0; i < 6; ++i) {
          gh[0] += coeff[c][i] * grad[i][0];
          gh[1] += coeff[c][i] * grad[i][1];
        }
        const double dx = gh[0] - exact[c][0];
        const double dy = gh[1] - exact[c][1];
        e2 += dx * dx + dy * dy;
      }
      local += rule.weights[q] * e2;
    }
    sum += geo.area * local;
  }
  return std::sqrt(sum);
}

double pressure_at(const StokesDiscretization& disc, std::span<const double> p, std::size_t t, const Bary& l) {
  if (disc.dofs.pair == ElementPair::P2P0) return p[t];
  const auto& tri = disc.mesh->triangles[t];
  return l[0] * p[static_cast<std::size_t>(tri[0])] + l[1] * p[static_cast<std::size_t>(tri[1])] +
         l[2] * p[static_cast<std::size_t>(tri[2])];
}

double l2_pressure_error(std::span<const double> p_h, const StokesDiscretization& disc,
                         const ManufacturedSolution& ms) {
  const Mesh& mesh = *disc.mesh;
  if (p_h.size() != disc.n_pressure()) throw Error(ErrorCode::DimensionMismatch, "pressure vector has wrong length");
  const TriangleRule& rule = degree6_rule();

  auto accumulate = [&](double shift, bool squared) {
    double sum = 0.0;
    for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
      const double area = triangle_area(mesh, t);
      double local = 0.0;
      for (std::size_t q = 0; q < rule.size(); ++q) {
        const auto& l = rule.barycentric[q];
        const Point x = map_point(mesh, t, l);
        const double e = pressure_at(disc, p_h, t, l) - ms.pressure(x.x, x.y) - shift;
        local += rule.weights[q] * (squared ? e * e : e);
      }
      sum += area * local;
    }
    return sum;
  };
  const double mean = accumulate(0.0, false) / total_area(mesh);
  return std::sqrt(std::max(accumulate(mean, true), 0.0));
}

Vector interpolate_velocity(const StokesDiscretization& disc, const ManufacturedSolution& ms) {
  const Mesh& mesh = *disc.mesh;
  const DofSpace& dofs = disc.dofs;
  Vector u(dofs.n_velocity(), 0.0);
  const std::size_t nv = mesh.num_vertices();
  for (std::size_t node = 0; node < dofs.n_scalar_nodes; ++node) {
    if (dofs.free_index[node] < 0) continue;
    Point x;
    if (node < nv) {
      x = mesh.vertices[node];
    } else {
      const auto& e = dofs.edges.edges[node - nv];
      const Point& a = mesh.vertices[static_cast<std::size_t>(e[0])];
      const Point& b = mesh.vertices[static_cast<std::size_t>(e[1])];
      x = {0.5 * (a.x + b.x), 0.5 * (a.y + b.y)};
    }
    const Vec2 value = ms.velocity(x.x, x.y);
    for (int c = 0; c < 2; ++c) u[static_cast<std::size_t>(dofs.velocity_dof(static_cast<int>(node), c))] = value[c];
  }
  return u;
}

Vector project_pressure(const StokesDiscretization& disc, const ManufacturedSolution& ms) {
  const Mesh& mesh = *disc.mesh;
  const TriangleRule& rule = degree6_rule();
  Vector rhs(disc.n_pressure(), 0.0);
  std::vector<int> pdofs;
  const int npl = pressure_dof_count(disc.dofs.pair);
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const double area = triangle_area(mesh, t);
    pressure_dofs_of(mesh, disc.dofs.pair, t, pdofs);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const auto& l = rule.barycentric[q];
      const Point x = map_point(mesh, t, l);
      const double p = ms.pressure(x.x, x.y);
      const auto chi = pressure_basis(disc.dofs.pair, l);
      for (int m = 0; m < npl; ++m) rhs[static_cast<std::size_t>(pdofs[static_cast<std::size_t>(m)])] += area * rule.weights[q] * p * chi[m];
    }
  }
  return SpdSolver(disc.mp).solve(rhs);
}

Vector constant_pressure(const DofSpace& dofs) { return Vector(dofs.n_pressure, 1.0); }

}  // namespace cascadic
