#include "cascadic/saddle.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "cascadic/error.hpp"

namespace cascadic {

namespace {

constexpr double kTinyCurvature = 1e-300;

}  // namespace

std::string_view to_string(SolverKind::Method method) {
  switch (method) {
    case SolverKind::Method::Uzawa: return "uzawa";
    case SolverKind::Method::UzawaGradient: return "ug";
    case SolverKind::Method::UzawaCg: return "ucg";
  }
  return "unknown";
}

SaddleSystem::SaddleSystem(std::shared_ptr<const StokesDiscretization> disc, SpdMethod method)
    : disc_(std::move(disc)), laplace_solver_(disc_->laplace, method) {
  const std::size_t np = disc_->n_pressure();
  if (disc_->dofs.pair == ElementPair::P2P0) {
    mass_diagonal_.resize(np);
    for (std::size_t m = 0; m < np; ++m) mass_diagonal_[m] = disc_->mp.coeff(m, m);
  } else {
    mass_solver_.emplace(disc_->mp, method);
  }
  mass_of_one_ = matvec(disc_->mp, constant_pressure(disc_->dofs));
  total_mass_ = 0.0;
  for (double v : mass_of_one_) total_mass_ += v;
}

Vector SaddleSystem::solve_velocity(std::span<const double> rhs) const {
  const std::size_t n = disc_->dofs.n_free_nodes;
  if (rhs.size() != 2 * n) throw Error(ErrorCode::DimensionMismatch, "velocity rhs has wrong length");
  Vector x(2 * n);
  for (std::size_t c = 0; c < 2; ++c) {
    const Vector xc = laplace_solver_.solve(rhs.subspan(c * n, n));
    std::copy(xc.begin(), xc.end(), x.begin() + static_cast<std::ptrdiff_t>(c * n));
  }
  return x;
}

Vector SaddleSystem::apply_velocity(std::span<const double> v) const {
  const std::size_t n = disc_->dofs.n_free_nodes;
  if (v.size() != 2 * n) throw Error(ErrorCode::DimensionMismatch, "velocity vector has wrong length");
  Vector y(2 * n);
  for (std::size_t c = 0; c < 2; ++c) {
    const Vector yc = matvec(disc_->laplace, v.subspan(c * n, n));
    std::copy(yc.begin(), yc.end(), y.begin() + static_cast<std::ptrdiff_t>(c * n));
  }
  return y;
}

Vector SaddleSystem::solve_mass(std::span<const double> rhs) const {
  if (mass_solver_) return mass_solver_->solve(rhs);
  if (rhs.size() != mass_diagonal_.size()) throw Error(ErrorCode::DimensionMismatch, "pressure rhs has wrong length");
  Vector x(rhs.size());
  for (std::size_t m = 0; m < rhs.size(); ++m) x[m] = rhs[m] / mass_diagonal_[m];
  return x;
}

double SaddleSystem::inner(std::span<const double> a, std::span<const double> b) const {
  if (mass_solver_) return dot(a, matvec(disc_->mp, b));
  if (a.size() != mass_diagonal_.size() || b.size() != mass_diagonal_.size()) {
    throw Error(ErrorCode::DimensionMismatch, "pressure vector has wrong length");
  }
  double sum = 0.0;
  for (std::size_t m = 0; m < a.size(); ++m) sum += a[m] * mass_diagonal_[m] * b[m];
  return sum;
}

double SaddleSystem::norm(std::span<const double> q) const { return std::sqrt(std::max(inner(q, q), 0.0)); }

double SaddleSystem::mean(std::span<const double> q) const { return dot(mass_of_one_, q) / total_mass_; }

void SaddleSystem::project_mean_zero(std::span<double> q) const {
  const double c = mean(q);
  for (double& v : q) v -= c;
}

IterState initial_step(const SaddleSystem& sys, std::span<const double> p0) {
  const StokesDiscretization& disc = sys.disc();
  if (p0.size() != sys.n_pressure()) throw Error(ErrorCode::DimensionMismatch, "p0 has wrong length");
  IterState state;
  state.p.assign(p0.begin(), p0.end());
  sys.project_mean_zero(state.p);

  Vector rhs = disc.f_vec;
  axpy(-1.0, sys.apply_bt(state.p), rhs);
  state.u = sys.solve_velocity(rhs);

  Vector residual = sys.apply_b(state.u);
  axpy(-1.0, disc.g_vec, residual);
  state.q = sys.solve_mass(residual);
  sys.project_mean_zero(state.q);
  state.d = state.q;
  state.j = 1;
  return state;
}

void step(const SaddleSystem& sys, IterState& state, const SolverKind& kind) {
  const bool conjugate = kind.method == SolverKind::Method::UzawaCg;
  const Vector& dir = conjugate ? state.d : state.q;

  // h = -A^{-1} B^T dir
  Vector h = sys.solve_velocity(sys.apply_bt(dir));
  for (double& v : h) v = -v;

  const double qq = sys.inner(state.q, state.q);
  double alpha = kind.alpha0;
  if (kind.method != SolverKind::Method::Uzawa) {
    // (dir, q)_S = (B^T dir)^T A^{-1} (B^T q) = -q^T B h
    const double curvature = -dot(state.q, sys.apply_b(h));
    if (!(curvature > kTinyCurvature)) {
      throw Error(ErrorCode::ZeroCurvature, "nonpositive Schur curvature (dir, q)_S");
    }
    alpha = qq / curvature;
  }

  axpy(alpha, dir, state.p);
  axpy(alpha, h, state.u);

  // B u_{j+1} - g = (B u_j - g) + alpha B h, so the new residual is updated
  // rather than recomputed; consecutive residuals then stay orthogonal to
  // working precision even when ||q|| is tiny.
  Vector correction = sys.solve_mass(sys.apply_b(h));
  sys.project_mean_zero(correction);
  axpy(alpha, correction, state.q);
  state.alpha = alpha;

  if (conjugate) {
    state.beta = sys.inner(state.q, state.q) / qq;
    for (std::size_t m = 0; m < state.d.size(); ++m) state.d[m] = state.q[m] + state.beta * state.d[m];
    sys.project_mean_zero(state.d);
  }
  ++state.j;
}

double residual_norm(const SaddleSystem& sys, const IterState& state) { return sys.norm(state.q); }

Vector apply_schur(const SaddleSystem& sys, std::span<const double> q) {
  const Vector w = sys.solve_velocity(sys.apply_bt(q));
  Vector r = sys.solve_mass(sys.apply_b(w));
  sys.project_mean_zero(r);
  return r;
}

SpectrumBounds estimate_spectrum(const SaddleSystem& sys, const SpectrumOptions& options) {
  const std::size_t np = sys.n_pressure();
  if (np < 2) throw Error(ErrorCode::ConvergenceFailure, "pressure space has no mean-zero functions");
  const std::size_t dim = np - 1;

  std::mt19937_64 rng(0x5eed2024ULL);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Vector v(np);
  for (double& x : v) x = dist(rng);
  sys.project_mean_zero(v);
  {
    const double nv = sys.norm(v);
    for (double& x : v) x /= nv;
  }

  std::vector<Vector> basis;
  std::vector<double> alphas;
  std::vector<double> betas;
  const int cap = std::min<int>(options.max_iterations, static_cast<int>(dim));

  auto extremes = [&](bool& converged, double beta_last) {
    const auto k = static_cast<Eigen::Index>(alphas.size());
    Eigen::VectorXd diag(k);
    Eigen::VectorXd sub(std::max<Eigen::Index>(k - 1, 0));
    for (Eigen::Index i = 0; i < k; ++i) diag[i] = alphas[static_cast<std::size_t>(i)];
    for (Eigen::Index i = 0; i + 1 < k; ++i) sub[i] = betas[static_cast<std::size_t>(i)];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig;
    eig.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    const double lo = eig.eigenvalues()[0];
    const double hi = eig.eigenvalues()[k - 1];
    // Eigenvalue error bound min(r, r^2 / gap) from the Ritz residual r.
    auto bound = [&](Eigen::Index i, Eigen::Index neighbour) {
      const double r = std::abs(beta_last * eig.eigenvectors()(k - 1, i));
      if (k < 2) return r;
      const double gap = std::abs(eig.eigenvalues()[neighbour] - eig.eigenvalues()[i]);
      return gap > 0.0 ? std::min(r, r * r / gap) : r;
    };
    converged = bound(0, 1) <= options.relative_tolerance * lo &&
                (!options.resolve_upper || bound(k - 1, k - 2) <= options.relative_tolerance * hi);
    return std::pair{lo, hi};
  };

  for (int it = 1; it <= cap; ++it) {
    Vector z = apply_schur(sys, v);
    const double a = sys.inner(z, v);
    axpy(-a, v, z);
    if (!basis.empty()) axpy(-betas.back(), basis.back(), z);
    basis.push_back(v);
    alphas.push_back(a);
    for (int pass = 0; pass < 2; ++pass) {
      for (const Vector& b : basis) axpy(-sys.inner(z, b), b, z);
    }
    sys.project_mean_zero(z);
    const double beta = sys.norm(z);

    const bool exhausted = static_cast<std::size_t>(it) == dim || beta <= 1e-13 * std::abs(alphas.front());
    if (exhausted || it % 5 == 0 || it == cap) {
      bool converged = false;
      const auto [lo, hi] = extremes(converged, exhausted ? 0.0 : beta);
      if (converged || exhausted) {
        if (!(lo > 0.0)) throw Error(ErrorCode::ConvergenceFailure, "Schur complement is not positive definite");
        return {std::sqrt(lo), std::sqrt(hi), it};
      }
    }
    betas.push_back(beta);
    for (std::size_t m = 0; m < np; ++m) v[m] = z[m] / beta;
  }
  throw Error(ErrorCode::ConvergenceFailure, "Lanczos did not resolve the extreme eigenvalues");
}

SaddleSolution solve_schur_direct(const SaddleSystem& sys) {
  const Vector zero(sys.n_pressure(), 0.0);
  IterState state = initial_step(sys, zero);
  const double initial = residual_norm(sys, state);
  const SolverKind ucg = SolverKind::conjugate_gradient();
  const int cap = 10 * static_cast<int>(sys.n_pressure()) + 100;
  int it = 0;
  while (residual_norm(sys, state) > 1e-12 * initial) {
    if (++it > cap) throw Error(ErrorCode::ConvergenceFailure, "Schur CG did not converge");
    step(sys, state, ucg);
  }
  return {std::move(state.u), std::move(state.p)};
}

}  // namespace cascadic
