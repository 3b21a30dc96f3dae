#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "cascadic/cascade.hpp"
#include "cascadic/error.hpp"
#include "cascadic/quadrature.hpp"
#include "support.hpp"

namespace cascadic {
namespace {

using testing::random_vector;

CascadeConfig table_config(int table) {
  CascadeConfig cfg;
  switch (table) {
    case 1:
      cfg.pair = ElementPair::P2P0;
      cfg.s = 1.0;
      break;
    case 2:
      break;
    case 3:
      cfg.domain = Domain::LShape;
      cfg.c_lc = 1.0 / 8.0;
      cfg.s = 1.0 / 3.0;
      cfg.complexity = Complexity::DofCount;
      break;
    default:
      cfg.domain = Domain::LShape;
      cfg.refinement = RefinementRule::graded(0.125, {0.0, 0.0});
      cfg.c_lc = 1.0 / 8.0;
      cfg.s = 1.0;
      cfg.complexity = Complexity::DofCount;
      break;
  }
  return cfg;
}

void expect_error(ErrorCode code, const auto& fn) {
  try {
    fn();
    ADD_FAILURE() << "expected " << to_string(code);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), code) << e.what();
  }
}

TEST(Threshold, TableCaptions) {
  EXPECT_DOUBLE_EQ(level_change_threshold(table_config(1), 5, 0.0625, 0), 1.0 / 256.0);
  EXPECT_DOUBLE_EQ(level_change_threshold(table_config(2), 5, 0.0625, 0), std::ldexp(1.0, -12));
  EXPECT_NEAR(level_change_threshold(table_config(4), 5, 0.1, 1000), 1.25e-4, 1e-18);
  EXPECT_NEAR(level_change_threshold(table_config(3), 5, 0.1, 1000), 0.0125, 1e-15);
}

TEST(Validate, RejectsBadConfigs) {
  CascadeConfig cfg;
  cfg.c_lc = 0.0;
  expect_error(ErrorCode::InvalidConfig, [&] { validate(cfg); });
  cfg = {};
  cfg.s = -1.0;
  expect_error(ErrorCode::InvalidConfig, [&] { validate(cfg); });
  cfg = {};
  cfg.start_level = 3;
  cfg.levels = 2;
  expect_error(ErrorCode::InvalidConfig, [&] { validate(cfg); });
  cfg = {};
  cfg.start_level = 0;
  expect_error(ErrorCode::InvalidConfig, [&] { validate(cfg); });
  EXPECT_NO_THROW(validate(CascadeConfig{}));
}

TEST(Prolong, ZeroStaysZero) {
  const auto meshes = build_hierarchy(Domain::LShape, RefinementRule::uniform(), 3);
  for (ElementPair pair : {ElementPair::P2P0, ElementPair::TaylorHood}) {
    const std::size_t n = pair == ElementPair::P2P0 ? meshes[1].num_triangles() : meshes[1].num_vertices();
    const Vector fine = prolong_pressure(Vector(n, 0.0), meshes[1], meshes[2], pair);
    EXPECT_EQ(norm2(fine), 0.0);
  }
}

TEST(Prolong, P0ChildrenInheritParent) {
  const auto meshes = build_hierarchy(Domain::UnitSquare, RefinementRule::uniform(), 3);
  Vector p(meshes[1].num_triangles(), 0.0);
  p[5] = 2.5;
  const Vector fine = prolong_pressure(p, meshes[1], meshes[2], ElementPair::P2P0);
  int carriers = 0;
  for (std::size_t t = 0; t < fine.size(); ++t) {
    const bool child = meshes[2].parent_triangle[t] == 5;
    EXPECT_EQ(fine[t], child ? 2.5 : 0.0);
    carriers += child;
  }
  EXPECT_EQ(carriers, 4);
}

// Barycentric coordinates of x in triangle (a, b, c).
std::array<double, 3> barycentric(Point a, Point b, Point c, Point x) {
  const double det = (b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y);
  const double l1 = ((x.x - a.x) * (c.y - a.y) - (c.x - a.x) * (x.y - a.y)) / det;
  const double l2 = ((b.x - a.x) * (x.y - a.y) - (x.x - a.x) * (b.y - a.y)) / det;
  return {1.0 - l1 - l2, l1, l2};
}

// L2 norm of (fine P1 function - coarse P1 function), integrated on the fine mesh.
double p1_embedding_defect(const Mesh& coarse, const Mesh& fine, const Vector& pc, const Vector& pf) {
  const TriangleRule& rule = degree6_rule();
  double sum = 0.0;
  for (std::size_t t = 0; t < fine.num_triangles(); ++t) {
    const auto& ft = fine.triangles[t];
    const auto& ct = coarse.triangles[static_cast<std::size_t>(fine.parent_triangle[t])];
    const Point& a = fine.vertices[ft[0]];
    const Point& b = fine.vertices[ft[1]];
    const Point& c = fine.vertices[ft[2]];
    double local = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const auto& l = rule.barycentric[q];
      const Point x{l[0] * a.x + l[1] * b.x + l[2] * c.x, l[0] * a.y + l[1] * b.y + l[2] * c.y};
      const double vf = l[0] * pf[ft[0]] + l[1] * pf[ft[1]] + l[2] * pf[ft[2]];
      const auto lc = barycentric(coarse.vertices[ct[0]], coarse.vertices[ct[1]], coarse.vertices[ct[2]], x);
      const double vc = lc[0] * pc[ct[0]] + lc[1] * pc[ct[1]] + lc[2] * pc[ct[2]];
      local += rule.weights[q] * (vf - vc) * (vf - vc);
    }
    sum += triangle_area(fine, t) * local;
  }
  return std::sqrt(sum);
}

TEST(Prolong, P1EmbeddingIsExact) {
  std::mt19937 rng(41);
  for (const RefinementRule& rule : {RefinementRule::uniform(), RefinementRule::graded(0.125, {0.0, 0.0})}) {
    const auto meshes = build_hierarchy(Domain::LShape, rule, 5);
    for (std::size_t k = 1; k < meshes.size(); ++k) {
      const Vector pc = random_vector(meshes[k - 1].num_vertices(), rng);
      const Vector pf = prolong_pressure(pc, meshes[k - 1], meshes[k], ElementPair::TaylorHood);
      EXPECT_LE(p1_embedding_defect(meshes[k - 1], meshes[k], pc, pf), 1e-12) << "level " << k + 1;
    }
  }
}

TEST(Prolong, ProjectedResultHasMeanZero) {
  for (ElementPair pair : {ElementPair::P2P0, ElementPair::TaylorHood}) {
    Hierarchy h(Domain::LShape, pair, RefinementRule::graded(0.25, {0.0, 0.0}), builtin_solution(Domain::LShape));
    std::mt19937 rng(3);
    Vector pc = random_vector(h.system(2).n_pressure(), rng);
    h.system(2).project_mean_zero(pc);
    const Vector raw = prolong_pressure(pc, h.mesh(2), h.mesh(3), pair);
    const Vector pf = prolong_pressure(pc, h.mesh(2), h.system(3));
    EXPECT_LE(std::abs(h.system(3).mean(pf)), 1e-15);
    // The embedding preserves the integral, so projection changes nothing.
    for (std::size_t i = 0; i < pf.size(); ++i) EXPECT_NEAR(pf[i], raw[i], 1e-14);
  }
}

TEST(Prolong, RejectsNonNestedMeshes) {
  const auto meshes = build_hierarchy(Domain::UnitSquare, RefinementRule::uniform(), 3);
  const Vector p(meshes[0].num_triangles(), 1.0);
  expect_error(ErrorCode::HierarchyMismatch, [&] { prolong_pressure(p, meshes[0], meshes[2], ElementPair::P2P0); });
  expect_error(ErrorCode::HierarchyMismatch, [&] { prolong_pressure(p, meshes[1], meshes[0], ElementPair::P2P0); });
  expect_error(ErrorCode::DimensionMismatch,
               [&] { prolong_pressure(Vector(3, 0.0), meshes[0], meshes[1], ElementPair::TaylorHood); });
}

std::vector<LevelReport> synthetic(const std::vector<double>& errors, double h0, std::size_t n0, std::size_t growth) {
  std::vector<LevelReport> reports;
  double h = h0;
  std::size_t n = n0;
  for (double e : errors) {
    LevelReport r;
    r.h = h;
    r.n_dof = n;
    r.err_u = e;
    r.err_p = 2.0 * e;
    reports.push_back(r);
    h *= 0.5;
    n *= growth;
  }
  return reports;
}

TEST(Rates, HalvingAndQuartering) {
  auto halving = synthetic({1.0, 0.5, 0.25, 0.125}, 1.0, 5, 4);
  compute_rates(halving, Complexity::MeshSize);
  EXPECT_FALSE(halving[0].rate_u.has_value());
  EXPECT_FALSE(halving[0].rate_p.has_value());
  for (std::size_t i = 1; i < halving.size(); ++i) {
    EXPECT_NEAR(*halving[i].rate_u, 1.0, 1e-14);
    EXPECT_NEAR(*halving[i].rate_p, 1.0, 1e-14);
  }
  auto quartering = synthetic({1.0, 0.25, 0.0625}, 1.0, 5, 4);
  compute_rates(quartering, Complexity::MeshSize);
  EXPECT_NEAR(*quartering[2].rate_u, 2.0, 1e-14);
}

TEST(Rates, DofCountIsHEquivalent) {
  // N grows 4x per level, as for uniform 2D refinement: the h-equivalent rate
  // of errors that quarter is 2.
  auto reports = synthetic({1.0, 0.25, 0.0625}, 1.0, 10, 4);
  compute_rates(reports, Complexity::DofCount);
  EXPECT_NEAR(*reports[1].rate_u, 2.0, 1e-14);
  EXPECT_NEAR(*reports[2].rate_p, 2.0, 1e-14);
}

TEST(Rates, ZeroErrorLeavesRateEmpty) {
  auto reports = synthetic({1.0, 0.0}, 1.0, 5, 4);
  compute_rates(reports, Complexity::MeshSize);
  EXPECT_FALSE(reports[1].rate_u.has_value());
}

TEST(Hierarchy, CachesAndReleasesSystems) {
  Hierarchy h(Domain::UnitSquare, ElementPair::TaylorHood, RefinementRule::uniform(),
              builtin_solution(Domain::UnitSquare));
  const SaddleSystem* first = &h.system(3);
  EXPECT_EQ(first, &h.system(3));
  EXPECT_EQ(h.mesh(3).level, 3);
  EXPECT_EQ(h.mesh_ptr(3).get(), h.system(3).disc().mesh.get());
  h.release(3);
  EXPECT_EQ(h.system(3).n_pressure(), 41u);
  expect_error(ErrorCode::InvalidConfig, [&] { h.mesh(0); });
}

// One iterated level driven to a tiny threshold reproduces the discrete solution.
TEST(Cascade, OneLevelRunMatchesDenseSolve) {
  for (ElementPair pair : {ElementPair::P2P0, ElementPair::TaylorHood}) {
    CascadeConfig cfg;
    cfg.pair = pair;
    cfg.levels = 3;
    cfg.start_level = 3;
    cfg.c_lc = 1e-12;
    cfg.s = 1e-9;
    const ManufacturedSolution ms = builtin_solution(Domain::UnitSquare);
    Hierarchy h(cfg.domain, pair, cfg.refinement, ms);
    const auto reports = run_cascade(cfg, h, {.keep_levels = true});
    ASSERT_EQ(reports.size(), 1u);
    EXPECT_EQ(reports[0].k, 3);
    EXPECT_FALSE(reports[0].rate_u.has_value());
    const StokesDiscretization& disc = h.system(3).disc();
    const SaddleSolution dense =
        dense_oracle_solve(velocity_stiffness(disc), disc.b, disc.mp, disc.f_vec, disc.g_vec);
    EXPECT_NEAR(reports[0].err_u, energy_error(dense.u, disc, ms), 1e-8);
    EXPECT_NEAR(reports[0].err_p, l2_pressure_error(dense.p, disc, ms), 1e-8);
    EXPECT_LE(reports[0].final_residual, reports[0].threshold);
  }
}

TEST(Cascade, RejectsMismatchedHierarchyAndUzawaWindow) {
  CascadeConfig cfg;
  cfg.levels = 2;
  Hierarchy wrong(Domain::LShape, cfg.pair, cfg.refinement, builtin_solution(Domain::LShape));
  expect_error(ErrorCode::InvalidConfig, [&] { run_cascade(cfg, wrong); });
  cfg.solver = SolverKind::uzawa(5.0);
  expect_error(ErrorCode::InvalidConfig, [&] { run_cascade(cfg, builtin_solution(cfg.domain)); });
  cfg.solver = SolverKind::uzawa(-1.0);
  expect_error(ErrorCode::InvalidConfig, [&] { run_cascade(cfg, builtin_solution(cfg.domain)); });
}

TEST(Cascade, CapIsFlaggedNotFatal) {
  CascadeConfig cfg;
  cfg.levels = 3;
  cfg.c_lc = 1e-14;
  cfg.max_iters_per_level = 1;
  const auto reports = run_cascade(cfg, builtin_solution(cfg.domain));
  ASSERT_EQ(reports.size(), 3u);
  for (const LevelReport& r : reports) {
    EXPECT_EQ(r.iterations, 1);
    EXPECT_TRUE(r.cap_exceeded);
    EXPECT_GT(r.final_residual, r.threshold);
  }
}

// Exit contract and non-spreading for the four table configurations with the
// solvers each table reports. Iterations start at the tables' first printed
// level; the level-1 problems are too small for a meaningful comparison.
class TableConfigs : public ::testing::TestWithParam<int> {};

TEST_P(TableConfigs, ExitContractAndNonSpreading) {
  CascadeConfig cfg = table_config(GetParam());
  cfg.start_level = 4;
  cfg.levels = 7;
  std::vector<SolverKind> solvers = {SolverKind::gradient(), SolverKind::conjugate_gradient()};
  if (GetParam() <= 2) solvers.push_back(SolverKind::uzawa(GetParam() == 1 ? 0.8 : 1.0));
  for (const SolverKind& kind : solvers) {
    cfg.solver = kind;
    const auto reports = run_cascade(cfg, builtin_solution(cfg.domain));
    ASSERT_EQ(reports.size(), 4u);
    for (const LevelReport& r : reports) {
      SCOPED_TRACE(std::string(to_string(kind.method)) + " level " + std::to_string(r.k));
      EXPECT_FALSE(r.cap_exceeded);
      EXPECT_LE(r.final_residual, r.threshold);
      EXPECT_GE(r.iterations, 1);
      EXPECT_LE(r.iterations, 16);
      EXPECT_LE(r.iterations, reports[0].iterations);
    }
    for (std::size_t i = 1; i < reports.size(); ++i) {
      EXPECT_TRUE(reports[i].rate_u.has_value());
      EXPECT_LT(reports[i].err_u, reports[i - 1].err_u);
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Tables, TableConfigs, ::testing::Values(1, 2, 3, 4));

TEST(Cascade, ErrorConstantStableOnSquare) {
  for (int table : {1, 2}) {
    CascadeConfig cfg = table_config(table);
    cfg.levels = 7;
    const auto reports = run_cascade(cfg, builtin_solution(cfg.domain));
    double lo = 1e300, hi = 0.0;
    for (std::size_t i = reports.size() - 3; i < reports.size(); ++i) {
      const double c = (reports[i].err_u + reports[i].err_p) / std::pow(reports[i].h, cfg.s);
      lo = std::min(lo, c);
      hi = std::max(hi, c);
    }
    EXPECT_LT(hi / lo, 3.0) << "table " << table;
  }
}

}  // namespace
}  // namespace cascadic
