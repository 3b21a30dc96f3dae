#pragma once

#include <array>
#include <memory>
#include <span>
#include <vector>

#include "cascadic/manufactured.hpp"
#include "cascadic/mesh.hpp"
#include "cascadic/quadrature.hpp"
#include "cascadic/sparse.hpp"

namespace cascadic {

enum class ElementPair { P2P0, TaylorHood };

/// Degrees of freedom for continuous P2 velocity and P0 / continuous P1 pressure.
///
/// Scalar P2 nodes are the mesh vertices followed by one node per edge (edge
/// node index = num_vertices + edge id). Velocity dofs are blocked by
/// component: dof(node, c) = c * n_free_nodes + free_index(node).
struct DofSpace {
  ElementPair pair = ElementPair::TaylorHood;
  EdgeTable edges;
  std::size_t n_scalar_nodes = 0;
  /// Free (non-Dirichlet) index of every scalar node, -1 on the boundary.
  std::vector<int> free_index;
  /// Scalar nodes per triangle: v0, v1, v2, edge(v0,v1), edge(v1,v2), edge(v2,v0).
  std::vector<std::array<int, 6>> element_nodes;
  std::size_t n_free_nodes = 0;
  std::size_t n_pressure = 0;

  std::size_t n_velocity() const { return 2 * n_free_nodes; }
  /// N_k: free nodes of the scalar P2 Laplacian.
  std::size_t complexity() const { return n_free_nodes; }
  int velocity_dof(int node, int component) const {
    const int f = free_index[static_cast<std::size_t>(node)];
    return f < 0 ? -1 : component * static_cast<int>(n_free_nodes) + f;
  }
};

DofSpace build_dofs(const Mesh& mesh, ElementPair pair);

/// Assembled Stokes system on free velocity dofs.
///
/// The velocity block A is diag(L, L) with L the scalar P2 stiffness matrix;
/// only L is stored (see velocity_stiffness()).
/// a(u, v) = (grad u, grad v), b(v, q) = -(q, div v), Mp the pressure mass
/// matrix, f_vec_i = (f, phi_i), g_vec_m = -(g, chi_m).
struct StokesDiscretization {
  std::shared_ptr<const Mesh> mesh;
  DofSpace dofs;
  SparseMatrix laplace;
  SparseMatrix b;
  SparseMatrix mp;
  Vector f_vec;
  Vector g_vec;

  std::size_t n_velocity() const { return dofs.n_velocity(); }
  std::size_t n_pressure() const { return dofs.n_pressure; }
};

StokesDiscretization assemble_stokes(std::shared_ptr<const Mesh> mesh, ElementPair pair,
                                     const ManufacturedSolution& ms,
                                     const TriangleRule& rule = degree6_rule());

/// Materializes A = diag(L, L).
SparseMatrix velocity_stiffness(const StokesDiscretization& disc);

/// Local stiffness of the P1 (linear Lagrange) basis on one triangle.
std::array<std::array<double, 3>, 3> p1_stiffness(const Point& a, const Point& b, const Point& c);

/// (sum_T int_T |grad u_h - grad u|^2)^{1/2}
double energy_error(std::span<const double> u_h, const StokesDiscretization& disc, const ManufacturedSolution& ms);

/// L2 norm of (p_h - mean p_h) - (p - mean p).
double l2_pressure_error(std::span<const double> p_h, const StokesDiscretization& disc,
                         const ManufacturedSolution& ms);

/// P2 nodal interpolant of the exact velocity on free dofs.
Vector interpolate_velocity(const StokesDiscretization& disc, const ManufacturedSolution& ms);

/// L2 projection of the exact pressure onto the pressure space.
Vector project_pressure(const StokesDiscretization& disc, const ManufacturedSolution& ms);

/// Value of a discrete pressure on triangle t at the given barycentric point.
double pressure_at(const StokesDiscretization& disc, std::span<const double> p, std::size_t t,
                   const std::array<double, 3>& bary);

/// Coefficient vector of the constant pressure 1.
Vector constant_pressure(const DofSpace& dofs);

}  // namespace cascadic
