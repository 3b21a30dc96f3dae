#pragma once

#include <map>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "cascadic/fem.hpp"
#include "cascadic/mesh.hpp"
#include "cascadic/saddle.hpp"

namespace cascadic {

/// Which quantity the level-change threshold decays with.
enum class Complexity { MeshSize, DofCount };

struct CascadeConfig {
  Domain domain = Domain::UnitSquare;
  ElementPair pair = ElementPair::TaylorHood;
  RefinementRule refinement = RefinementRule::uniform();
  SolverKind solver = SolverKind::gradient();
  int levels = 8;
  int start_level = 1;
  double c_lc = 1.0 / 16.0;
  double s = 2.0;
  Complexity complexity = Complexity::MeshSize;
  int max_iters_per_level = 500;
};

/// Throws InvalidConfig unless c_lc > 0, s > 0 and levels >= start_level >= 1.
void validate(const CascadeConfig& cfg);

struct LevelReport {
  int k = 0;
  double h = 0.0;
  std::size_t n_dof = 0;
  int iterations = 0;
  double err_u = 0.0;
  double err_p = 0.0;
  std::optional<double> rate_u;
  std::optional<double> rate_p;
  double final_residual = 0.0;
  double threshold = 0.0;
  bool cap_exceeded = false;
};

/// C_lc h^s (MeshSize) or C_lc N^{-s} (DofCount).
double level_change_threshold(const CascadeConfig& cfg, int k, double h, std::size_t n_dof);

/// Embeds a coarse pressure into the next level: P0 children inherit the
/// parent value, P1 split vertices interpolate along the parent edge with the
/// recorded split ratio. Throws HierarchyMismatch if `fine` is not a
/// refinement of `coarse`.
Vector prolong_pressure(std::span<const double> p, const Mesh& coarse, const Mesh& fine, ElementPair pair);

/// Embedding followed by mean-zero projection on the fine level.
Vector prolong_pressure(std::span<const double> p, const Mesh& coarse, const SaddleSystem& fine);

/// Fills rate_u / rate_p from consecutive reports. MeshSize: log(e_{k-1}/e_k) /
/// log(h_{k-1}/h_k); DofCount: 2 log(e_{k-1}/e_k) / log(N_k/N_{k-1}), the
/// h-equivalent rate for quasi-uniform 2D refinement.
void compute_rates(std::vector<LevelReport>& reports, Complexity complexity);

/// Nested meshes, discretizations and factorized level systems, built on
/// first use and cached until released.
class Hierarchy {
 public:
  Hierarchy(Domain domain, ElementPair pair, RefinementRule refinement, ManufacturedSolution ms,
            SpdMethod method = SpdMethod::Cholesky);

  Domain domain() const { return domain_; }
  ElementPair pair() const { return pair_; }
  const RefinementRule& refinement() const { return refinement_; }
  const ManufacturedSolution& solution() const { return ms_; }

  const Mesh& mesh(int k);
  std::shared_ptr<const Mesh> mesh_ptr(int k);
  const SaddleSystem& system(int k);
  /// Drops the cached level system (the mesh stays).
  void release(int k);

 private:
  Domain domain_;
  ElementPair pair_;
  RefinementRule refinement_;
  ManufacturedSolution ms_;
  SpdMethod method_;
  std::vector<std::shared_ptr<const Mesh>> meshes_;
  std::map<int, std::unique_ptr<SaddleSystem>> systems_;
};

struct CascadeOptions {
  /// Keep every level system cached in the hierarchy (for reuse across runs).
  bool keep_levels = false;
};

/// The cascadic multilevel algorithm: on each level run the level solver from
/// the prolongated pressure until ||q|| <= threshold (or the cap), record the
/// errors of the last iterate, then move up. Levels below start_level are
/// only built, not iterated.
std::vector<LevelReport> run_cascade(const CascadeConfig& cfg, Hierarchy& hierarchy,
                                     const CascadeOptions& options = {});
std::vector<LevelReport> run_cascade(const CascadeConfig& cfg, const ManufacturedSolution& ms);

}  // namespace cascadic
