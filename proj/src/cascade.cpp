#include "cascadic/cascade.hpp"

#include <cmath>

#include "cascadic/error.hpp"

namespace cascadic {

void validate(const CascadeConfig& cfg) {
  if (!(cfg.c_lc > 0.0)) throw Error(ErrorCode::InvalidConfig, "C_lc must be positive");
  if (!(cfg.s > 0.0)) throw Error(ErrorCode::InvalidConfig, "s must be positive");
  if (cfg.start_level < 1 || cfg.levels < cfg.start_level) {
    throw Error(ErrorCode::InvalidConfig, "need levels >= start_level >= 1");
  }
  if (cfg.max_iters_per_level < 1) throw Error(ErrorCode::InvalidConfig, "iteration cap must be positive");
  if (cfg.solver.method == SolverKind::Method::Uzawa && !(cfg.solver.alpha0 > 0.0)) {
    throw Error(ErrorCode::InvalidConfig, "Uzawa alpha0 must be positive");
  }
}

double level_change_threshold(const CascadeConfig& cfg, int /*k*/, double h, std::size_t n_dof) {
  if (cfg.complexity == Complexity::MeshSize) return cfg.c_lc * std::pow(h, cfg.s);
  return cfg.c_lc * std::pow(static_cast<double>(n_dof), -cfg.s);
}

Vector prolong_pressure(std::span<const double> p, const Mesh& coarse, const Mesh& fine, ElementPair pair) {
  if (fine.level != coarse.level + 1 || fine.parent_triangle.size() != fine.num_triangles() ||
      fine.num_triangles() != 4 * coarse.num_triangles() ||
      fine.num_vertices() != coarse.num_vertices() + fine.edge_splits.size()) {
    throw Error(ErrorCode::HierarchyMismatch, "fine mesh is not a refinement of the coarse mesh");
  }
  if (pair == ElementPair::P2P0) {
    if (p.size() != coarse.num_triangles()) throw Error(ErrorCode::DimensionMismatch, "P0 pressure has wrong length");
    Vector out(fine.num_triangles());
    for (std::size_t t = 0; t < fine.num_triangles(); ++t) {
      out[t] = p[static_cast<std::size_t>(fine.parent_triangle[t])];
    }
    return out;
  }
  if (p.size() != coarse.num_vertices()) throw Error(ErrorCode::DimensionMismatch, "P1 pressure has wrong length");
  Vector out(fine.num_vertices());
  std::copy(p.begin(), p.end(), out.begin());
  for (const EdgeSplit& split : fine.edge_splits) {
    out[static_cast<std::size_t>(split.vertex)] = (1.0 - split.ratio) * p[static_cast<std::size_t>(split.from)] +
                                                  split.ratio * p[static_cast<std::size_t>(split.to)];
  }
  return out;
}

Vector prolong_pressure(std::span<const double> p, const Mesh& coarse, const SaddleSystem& fine) {
  Vector out = prolong_pressure(p, coarse, *fine.disc().mesh, fine.disc().dofs.pair);
  fine.project_mean_zero(out);
  return out;
}

void compute_rates(std::vector<LevelReport>& reports, Complexity complexity) {
  for (std::size_t i = 0; i < reports.size(); ++i) {
    reports[i].rate_u.reset();
    reports[i].rate_p.reset();
    if (i == 0) continue;
    const LevelReport& prev = reports[i - 1];
    LevelReport& cur = reports[i];
    double scale = 0.0;
    if (complexity == Complexity::MeshSize) {
      scale = std::log(prev.h / cur.h);
    } else {
      scale = 0.5 * std::log(static_cast<double>(cur.n_dof) / static_cast<double>(prev.n_dof));
    }
    if (!(scale > 0.0)) continue;
    if (prev.err_u > 0.0 && cur.err_u > 0.0) cur.rate_u = std::log(prev.err_u / cur.err_u) / scale;
    if (prev.err_p > 0.0 && cur.err_p > 0.0) cur.rate_p = std::log(prev.err_p / cur.err_p) / scale;
  }
}

Hierarchy::Hierarchy(Domain domain, ElementPair pair, RefinementRule refinement, ManufacturedSolution ms,
                     SpdMethod method)
    : domain_(domain), pair_(pair), refinement_(refinement), ms_(std::move(ms)), method_(method) {}

std::shared_ptr<const Mesh> Hierarchy::mesh_ptr(int k) {
  if (k < 1) throw Error(ErrorCode::InvalidConfig, "levels start at 1");
  if (meshes_.empty()) meshes_.push_back(std::make_shared<const Mesh>(build_initial_mesh(domain_)));
  while (static_cast<int>(meshes_.size()) < k) {
    meshes_.push_back(std::make_shared<const Mesh>(refine(*meshes_.back(), refinement_)));
  }
  return meshes_[static_cast<std::size_t>(k - 1)];
}

const Mesh& Hierarchy::mesh(int k) { return *mesh_ptr(k); }

const SaddleSystem& Hierarchy::system(int k) {
  auto it = systems_.find(k);
  if (it == systems_.end()) {
    auto disc = std::make_shared<const StokesDiscretization>(assemble_stokes(mesh_ptr(k), pair_, ms_));
    it = systems_.emplace(k, std::make_unique<SaddleSystem>(std::move(disc), method_)).first;
  }
  return *it->second;
}

void Hierarchy::release(int k) { systems_.erase(k); }

std::vector<LevelReport> run_cascade(const CascadeConfig& cfg, Hierarchy& hierarchy, const CascadeOptions& options) {
  validate(cfg);
  if (hierarchy.domain() != cfg.domain || hierarchy.pair() != cfg.pair ||
      hierarchy.refinement().kind != cfg.refinement.kind ||
      (cfg.refinement.kind == RefinementRule::Kind::Graded &&
       (hierarchy.refinement().kappa != cfg.refinement.kappa ||
        !(hierarchy.refinement().singular_point == cfg.refinement.singular_point)))) {
    throw Error(ErrorCode::InvalidConfig, "hierarchy does not match the cascade configuration");
  }

  if (cfg.solver.method == SolverKind::Method::Uzawa) {
    const SpectrumBounds bounds = estimate_spectrum(hierarchy.system(1));
    const double upper = 2.0 / (bounds.M_h * bounds.M_h);
    if (!(cfg.solver.alpha0 < upper)) {
      throw Error(ErrorCode::InvalidConfig, "Uzawa alpha0 outside (0, 2/M^2) on the coarsest level");
    }
    if (!options.keep_levels && cfg.start_level > 1) hierarchy.release(1);
  }

  const ManufacturedSolution& ms = hierarchy.solution();
  std::vector<LevelReport> reports;
  Vector p;
  for (int k = cfg.start_level; k <= cfg.levels; ++k) {
    const SaddleSystem& sys = hierarchy.system(k);
    if (k == cfg.start_level) {
      p.assign(sys.n_pressure(), 0.0);
    } else {
      p = prolong_pressure(p, hierarchy.mesh(k - 1), sys);
      if (!options.keep_levels) hierarchy.release(k - 1);
    }

    LevelReport report;
    report.k = k;
    report.h = mesh_size(*sys.disc().mesh);
    report.n_dof = sys.disc().dofs.complexity();
    report.threshold = level_change_threshold(cfg, k, report.h, report.n_dof);

    // CM1 then CM2 at least once; LC is tested on the residual CM2 produces.
    IterState state = initial_step(sys, p);
    double residual = residual_norm(sys, state);
    while (residual > 0.0 && report.iterations < cfg.max_iters_per_level) {
      step(sys, state, cfg.solver);
      ++report.iterations;
      residual = residual_norm(sys, state);
      if (residual <= report.threshold) break;
    }
    report.final_residual = residual;
    report.cap_exceeded = residual > report.threshold;
    report.err_u = energy_error(state.u, sys.disc(), ms);
    report.err_p = l2_pressure_error(state.p, sys.disc(), ms);
    reports.push_back(report);
    p = std::move(state.p);
  }
  if (!options.keep_levels) hierarchy.release(cfg.levels);
  compute_rates(reports, cfg.complexity);
  return reports;
}

std::vector<LevelReport> run_cascade(const CascadeConfig& cfg, const ManufacturedSolution& ms) {
  Hierarchy hierarchy(cfg.domain, cfg.pair, cfg.refinement, ms);
  return run_cascade(cfg, hierarchy);
}

}  // namespace cascadic
