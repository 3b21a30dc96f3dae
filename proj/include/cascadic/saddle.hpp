#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string_view>

#include "cascadic/dense.hpp"
#include "cascadic/fem.hpp"
#include "cascadic/spd_solver.hpp"

namespace cascadic {

/// Level solver: the three methods differ only in how the step length is chosen.
struct SolverKind {
  enum class Method { Uzawa, UzawaGradient, UzawaCg };
  Method method = Method::UzawaGradient;
  /// Fixed relaxation parameter; Uzawa only.
  double alpha0 = 1.0;

  static SolverKind uzawa(double alpha0) { return {Method::Uzawa, alpha0}; }
  static SolverKind gradient() { return {Method::UzawaGradient, 0.0}; }
  static SolverKind conjugate_gradient() { return {Method::UzawaCg, 0.0}; }
};

std::string_view to_string(SolverKind::Method method);

/// A discretization together with the exact solves the iterations need:
/// A^{-1} (two solves with the scalar Laplacian) and Mp^{-1}.
///
/// Pressure inner products are Mp inner products, so ||q|| is the L2 norm of
/// the pressure function q. The constant pressure spans the kernel of B^T and
/// is removed by Mp-orthogonal projection.
class SaddleSystem {
 public:
  explicit SaddleSystem(std::shared_ptr<const StokesDiscretization> disc, SpdMethod method = SpdMethod::Cholesky);

  const StokesDiscretization& disc() const { return *disc_; }
  const std::shared_ptr<const StokesDiscretization>& disc_ptr() const { return disc_; }
  std::size_t n_velocity() const { return disc_->n_velocity(); }
  std::size_t n_pressure() const { return disc_->n_pressure(); }

  Vector solve_velocity(std::span<const double> rhs) const;
  Vector apply_velocity(std::span<const double> v) const;
  Vector solve_mass(std::span<const double> rhs) const;
  Vector apply_b(std::span<const double> v) const { return matvec(disc_->b, v); }
  Vector apply_bt(std::span<const double> q) const { return matvec_transpose(disc_->b, q); }

  /// a^T Mp b
  double inner(std::span<const double> a, std::span<const double> b) const;
  double norm(std::span<const double> q) const;
  /// q <- q - (1, q) / (1, 1) * 1
  void project_mean_zero(std::span<double> q) const;
  double mean(std::span<const double> q) const;

 private:
  std::shared_ptr<const StokesDiscretization> disc_;
  SpdSolver laplace_solver_;
  std::optional<SpdSolver> mass_solver_;
  Vector mass_diagonal_;
  Vector mass_of_one_;
  double total_mass_ = 0.0;
};

/// One fixed-level iterate: u = u_{j+1} (u_j right after initial_step),
/// p = p_j, q = q_{j+1}, d the conjugate direction (UCG).
struct IterState {
  Vector u;
  Vector p;
  Vector q;
  Vector d;
  int j = 1;
  double alpha = 0.0;
  double beta = 0.0;
};

/// u_1 = A^{-1}(f - B^T p0), q_1 = P0 Mp^{-1}(B u_1 - g), d_1 = q_1, where P0
/// removes the mean. p0 is projected to mean zero first.
IterState initial_step(const SaddleSystem& sys, std::span<const double> p0);

/// One iteration of Uzawa, Uzawa-gradient or Uzawa-CG. Throws ZeroCurvature
/// when the step length would divide by a nonpositive (dir, q)_S.
void step(const SaddleSystem& sys, IterState& state, const SolverKind& kind);

/// ||q|| = (q^T Mp q)^{1/2}
double residual_norm(const SaddleSystem& sys, const IterState& state);

/// S q = P0 Mp^{-1} B A^{-1} B^T q, self-adjoint in the Mp inner product.
Vector apply_schur(const SaddleSystem& sys, std::span<const double> q);

struct SpectrumBounds {
  double m_h = 0.0;  ///< sqrt of the smallest eigenvalue of S on mean-zero pressures
  double M_h = 0.0;  ///< sqrt of the largest
  int iterations = 0;
};

struct SpectrumOptions {
  double relative_tolerance = 1e-6;
  int max_iterations = 600;
  /// When false only m_h is converged; M_h is then a Ritz lower bound.
  bool resolve_upper = true;
};

/// Extreme eigenvalues of S restricted to mean-zero pressures by Lanczos in
/// the Mp inner product with full reorthogonalization, started from a fixed
/// pseudo-random vector. Throws ConvergenceFailure at the iteration cap.
SpectrumBounds estimate_spectrum(const SaddleSystem& sys, const SpectrumOptions& options = {});

/// Discrete solution via UCG on the Schur system, driven to
/// ||q|| <= 1e-12 ||q_1||; p is mean zero.
SaddleSolution solve_schur_direct(const SaddleSystem& sys);

}  // namespace cascadic
