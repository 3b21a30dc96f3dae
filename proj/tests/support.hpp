#pragma once

#include <memory>
#include <random>

#include <Eigen/Dense>

#include "cascadic/cascade.hpp"
#include "cascadic/fem.hpp"
#include "cascadic/saddle.hpp"

namespace cascadic::testing {

inline Vector random_vector(std::size_t n, std::mt19937& rng) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Vector v(n);
  for (double& x : v) x = dist(rng);
  return v;
}

inline std::shared_ptr<const StokesDiscretization> discretize(Domain domain, ElementPair pair, int level,
                                                              RefinementRule rule = RefinementRule::uniform()) {
  auto meshes = build_hierarchy(domain, rule, level);
  auto mesh = std::make_shared<const Mesh>(std::move(meshes.back()));
  return std::make_shared<const StokesDiscretization>(assemble_stokes(mesh, pair, builtin_solution(domain)));
}

inline Eigen::MatrixXd to_dense(const SparseMatrix& m) {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m.rows()), static_cast<Eigen::Index>(m.cols()));
  const auto offsets = m.row_offsets();
  const auto cols = m.columns();
  const auto vals = m.values();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t k = offsets[i]; k < offsets[i + 1]; ++k) d(static_cast<Eigen::Index>(i), cols[k]) += vals[k];
  }
  return d;
}

inline Eigen::VectorXd to_eigen(std::span<const double> v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

/// Dense Stokes operators built independently of the library solvers:
/// A = diag(L, L), the Schur matrix K = B A^{-1} B^T and the discrete
/// solution by elimination with the mean fixed through a Lagrange multiplier.
struct DenseStokes {
  Eigen::MatrixXd a;
  Eigen::MatrixXd b;
  Eigen::MatrixXd mp;
  Eigen::MatrixXd schur;  // B A^{-1} B^T
  Eigen::VectorXd f;
  Eigen::VectorXd g;
  Eigen::VectorXd u;
  Eigen::VectorXd p;

  explicit DenseStokes(const StokesDiscretization& disc) {
    const Eigen::MatrixXd l = to_dense(disc.laplace);
    const Eigen::Index n = l.rows();
    a = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    a.topLeftCorner(n, n) = l;
    a.bottomRightCorner(n, n) = l;
    b = to_dense(disc.b);
    mp = to_dense(disc.mp);
    f = to_eigen(disc.f_vec);
    g = to_eigen(disc.g_vec);
    const Eigen::LLT<Eigen::MatrixXd> llt(a);
    schur = b * llt.solve(b.transpose());

    // [K  m; m^T 0] [p; lambda] = [B A^{-1} f - g_c; 0] with m = Mp 1 and g_c
    // the part of g orthogonal to the constant pressure.
    const Eigen::Index np = b.rows();
    const Eigen::VectorXd m = mp * Eigen::VectorXd::Ones(np);
    const Eigen::VectorXd gc = g - m * (g.sum() / m.sum());
    Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(np + 1, np + 1);
    kkt.topLeftCorner(np, np) = schur;
    kkt.block(0, np, np, 1) = m;
    kkt.block(np, 0, 1, np) = m.transpose();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(np + 1);
    rhs.head(np) = b * llt.solve(f) - gc;
    p = kkt.fullPivLu().solve(rhs).head(np);
    u = llt.solve(f - b.transpose() * p);
  }

  double mp_norm(const Eigen::VectorXd& q) const { return std::sqrt(q.dot(mp * q)); }

  /// Mp^{-1} K restricted to mean-zero pressures: generalized eigenvalues of
  /// (K, Mp) without the zero belonging to the constant.
  Eigen::VectorXd schur_spectrum() const {
    const Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(schur, mp);
    const Eigen::VectorXd all = es.eigenvalues();
    return all.tail(all.size() - 1);
  }
};

}  // namespace cascadic::testing
