#include <gtest/gtest.h>

#include <random>

#include "geoconvex/corpus.hpp"
#include "geoconvex/oracle.hpp"
#include "geoconvex/region.hpp"
#include "test_support.hpp"

namespace geoconvex {
namespace {

using testing::cap_point;
using testing::kHyperbolic;
using testing::kPlane;
using testing::kSphere;
using testing::pt;
using testing::tv;

// Frozen values from an independent dense boundary sweep (1e5 angles plus
// golden-section refinement) of the region boundaries in closed form.
constexpr double kEllipseDistance = 1.9640493175395692;  // x^2/4 + y^2 <= 1 from (3, 2)
constexpr double kLensDistance = 0.6471783073324159;     // two-cap lens on S^2, see below

ConvexRegion ellipse() {
  return ConvexRegion::make(kPlane, {corpus::expr(kPlane, "x1^2/4 + x2^2 - 1")}, pt(kPlane, {0, 0}));
}

// Caps d(x, e1) <= 0.8 and d(x, c2) <= 0.6 with c2 = exp_e1(0.5 e2).
ConvexRegion lens() {
  const Point c2 = cap_point(0.5, 0.0);
  return ConvexRegion::make(kSphere,
                            {corpus::expr(kSphere, "gdist(1, 0, 0) - 0.8"),
                             corpus::expr(kSphere, corpus::gdist_call(c2) + " - 0.6")},
                            cap_point(0.25, 0.0));
}

TEST(Membership, ThreeWayClassification) {
  const ConvexRegion disk = corpus::unit_disk();
  EXPECT_EQ(member(disk, pt(kPlane, {0.5, 0})), Membership::interior);
  EXPECT_EQ(member(disk, pt(kPlane, {1, 0})), Membership::boundary);
  EXPECT_EQ(member(disk, pt(kPlane, {1 + 1e-10, 0})), Membership::boundary);
  EXPECT_EQ(member(disk, pt(kPlane, {1.001, 0})), Membership::exterior);
  EXPECT_THROW(member(disk, pt(kSphere, {1, 0, 0})), Error);
}

TEST(ConvexRegion, RejectsBadDefinitions) {
  EXPECT_THROW(ConvexRegion::make(kPlane, {}, pt(kPlane, {0, 0})), Error);
  // Anchor on the boundary is not strictly feasible.
  EXPECT_THROW(ConvexRegion::make(kPlane, {corpus::expr(kPlane, "x1^2 + x2^2 - 1")},
                                  pt(kPlane, {1, 0})),
               Error);
  // Complement of a disk fails the chord test.
  EXPECT_THROW(ConvexRegion::make(kPlane, {corpus::expr(kPlane, "1 - x1^2 - x2^2")},
                                  pt(kPlane, {2, 0})),
               Error);
}

TEST(WorkingRadius, FormulaCases) {
  EXPECT_DOUBLE_EQ(working_radius(corpus::unit_disk(), pt(kPlane, {0, 0})), 0.1);
  const ConvexRegion ball = corpus::hyperbolic_ball(3.0);
  const Point far = exp_map(tv(corpus::origin(kHyperbolic), {0, 2, 0}));
  EXPECT_DOUBLE_EQ(working_radius(ball, far), 0.5);
  EXPECT_LE(working_radius(corpus::sphere_cap(), cap_point(0.4, 1.0)), M_PI / 4);
}

TEST(SampleInterior, CountAndStrictFeasibility) {
  const ConvexRegion cap = corpus::sphere_cap();
  const auto pts = sample_interior(cap, 50, 9);
  ASSERT_EQ(pts.size(), 50u);
  for (const Point& p : pts) EXPECT_LT(dist(p, corpus::origin(kSphere)), 0.5);
  EXPECT_EQ(sample_interior(cap, 50, 9).front().coords(), pts.front().coords());
}

TEST(Project, DiskClassical) {
  const ProjectionResult r = project(corpus::unit_disk(), pt(kPlane, {2, 0}));
  EXPECT_NEAR(r.q_star[0], 1.0, 1e-7);
  EXPECT_NEAR(r.q_star[1], 0.0, 1e-7);
  EXPECT_NEAR(r.distance, 1.0, 1e-7);
  EXPECT_TRUE(r.converged);
  EXPECT_LE(r.vi_residual, 1e-6);
}

TEST(Project, InteriorPointIsFixed) {
  const Point q = pt(kPlane, {0.3, -0.2});
  const ProjectionResult r = project(corpus::unit_disk(), q);
  EXPECT_TRUE(same_point(r.q_star, q));
  EXPECT_EQ(r.distance, 0.0);
}

TEST(Project, SphereCapRadialSolution) {
  for (double phi : {0.0, 1.1, 2.5, 4.0}) {
    const ProjectionResult r = project(corpus::sphere_cap(0.5), cap_point(1.0, phi));
    EXPECT_NEAR(r.distance, 0.5, 1e-7);
    EXPECT_LE(dist(r.q_star, cap_point(0.5, phi)), 1e-6);
  }
}

TEST(Project, FrozenOracleDistances) {
  EXPECT_NEAR(project(ellipse(), pt(kPlane, {3, 2})).distance, kEllipseDistance, 1e-6);
  EXPECT_NEAR(project(lens(), cap_point(1.2, M_PI / 2)).distance, kLensDistance, 1e-6);
  const Point q = exp_map(tv(corpus::origin(kHyperbolic), {0, 0, 2.5}));
  EXPECT_NEAR(project(corpus::hyperbolic_ball(1.0), q).distance, 1.5, 1e-7);
}

TEST(Oracle, SweepReproducesFrozenDistances) {
  EXPECT_NEAR(oracle::projection_distance(ellipse(), pt(kPlane, {3, 2})), kEllipseDistance, 1e-6);
  EXPECT_NEAR(oracle::projection_distance(lens(), cap_point(1.2, M_PI / 2)), kLensDistance, 1e-6);
}

TEST(Project, OutsideNeighborhoodIsRefused) {
  EXPECT_THROW(project(corpus::sphere_cap(0.5), pt(kSphere, {-1, 0, 0})), Error);
}

TEST(ViCheck, WrongCandidateIsDetected) {
  const Point q = pt(kPlane, {2, 0});
  const std::vector<Point> probes{pt(kPlane, {0.5, 0})};
  EXPECT_GT(vi_residual(q, pt(kPlane, {0, 1}), probes), 0.0);
  EXPECT_LE(vi_residual(q, pt(kPlane, {1, 0}), probes), 0.0);
  EXPECT_THROW(vi_check(corpus::unit_disk(), q, q, 10, 0), Error);
}

TEST(BoundaryBetween, LandsOnBoundary) {
  const ConvexRegion disk = corpus::unit_disk();
  const Point b = boundary_between(disk, pt(kPlane, {0, 0}), pt(kPlane, {3, 4}));
  EXPECT_EQ(member(disk, b), Membership::boundary);
  EXPECT_NEAR(b[0], 0.6, 1e-9);
}

// Certified projections satisfy the variational inequality and never beat
// the brute-force distance.
TEST(ProjectProperty, RandomInstancesAgainstSweep) {
  std::mt19937_64 rng(21);
  for (ManifoldKind kind : {ManifoldKind::euclidean, ManifoldKind::sphere, ManifoldKind::hyperboloid}) {
    for (int i = 0; i < 4; ++i) {
      const corpus::RegionInstance inst = corpus::random_instance(kind, rng);
      const ProjectionResult r = project(inst.region, inst.exterior);
      EXPECT_LE(r.vi_residual, 1e-6) << inst.description;
      EXPECT_NEAR(r.distance, oracle::projection_distance(inst.region, inst.exterior), 1e-4)
          << inst.description;
      EXPECT_NE(member(inst.region, r.q_star), Membership::exterior);
    }
  }
}

}  // namespace
}  // namespace geoconvex
