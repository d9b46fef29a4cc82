#include <gtest/gtest.h>

#include <Eigen/Dense>

#include <random>

#include "geoconvex/corpus.hpp"
#include "geoconvex/kkt.hpp"
#include "test_support.hpp"

namespace geoconvex {
namespace {

using testing::kPlane;
using testing::pt;

// Stationarity along the radial geodesic of the cap: f = (pi/2 - s)^2,
// g = s - 0.5 give 2 (pi/2 - 0.5) = lambda, i.e. lambda = pi - 1.
const double kCapMultiplier = M_PI - 1.0;

TEST(CheckKKT, DiskMultiplierIsOneHalf) {
  const ProblemSpec p = corpus::disk_linear_problem();
  const KKTCertificate c = check_kkt(p, pt(kPlane, {-1, 0}));
  EXPECT_TRUE(c.certified);
  ASSERT_EQ(c.multipliers.size(), 1u);
  EXPECT_NEAR(c.multipliers[0], 0.5, 1e-7);
  EXPECT_EQ(c.active, std::vector<int>{0});
  EXPECT_LE(c.stationarity_residual, 1e-7);
}

TEST(CheckKKT, SphereCapMultiplier) {
  const ProblemSpec p = corpus::sphere_cap_problem();
  const KKTCertificate c = check_kkt(p, corpus::sphere_cap_minimizer());
  EXPECT_TRUE(c.certified);
  EXPECT_NEAR(c.multipliers[0], kCapMultiplier, 1e-5);
  EXPECT_LE(c.stationarity_residual, 1e-5);
}

TEST(CheckKKT, InteriorOptimumHasZeroMultipliers) {
  Point target = corpus::origin(testing::kHyperbolic);
  const ProblemSpec p = corpus::hyperbolic_center_problem(&target);
  const KKTCertificate c = check_kkt(p, target);
  EXPECT_TRUE(c.certified);
  EXPECT_TRUE(c.active.empty());
  EXPECT_EQ(c.multipliers[0], 0.0);
}

TEST(CheckKKT, NonOptimalPointFails) {
  const KKTCertificate c = check_kkt(corpus::disk_linear_problem(), pt(kPlane, {0, -1}));
  EXPECT_FALSE(c.certified);
  EXPECT_GT(c.stationarity_residual, 0.1);
}

TEST(FritzJohn, DegenerateInstance) {
  const ProblemSpec p = corpus::degenerate_fj_problem();
  const KKTCertificate fj = check_fritz_john(p, p.start);
  EXPECT_TRUE(fj.certified);
  EXPECT_NEAR(fj.lambda0, 0.0, 1e-8);
  EXPECT_NEAR(fj.multipliers[0], 1.0, 1e-8);
  EXPECT_LE(fj.stationarity_residual, 1e-8);
  EXPECT_FALSE(check_kkt(p, p.start).certified);
}

TEST(FritzJohn, RescalesKKTMultipliers) {
  const ProblemSpec p = corpus::disk_linear_problem();
  const KKTCertificate fj = check_fritz_john(p, pt(kPlane, {-1, 0}));
  EXPECT_TRUE(fj.certified);
  // (1, 0.5) normalized onto the simplex.
  EXPECT_NEAR(fj.lambda0, 2.0 / 3.0, 1e-8);
  EXPECT_NEAR(fj.multipliers[0], 1.0 / 3.0, 1e-8);
}

TEST(Solve, KnownMinimizers) {
  const SolveResult disk = solve(corpus::disk_linear_problem());
  EXPECT_LE(dist(disk.point, pt(kPlane, {-1, 0})), 1e-4);

  const SolveResult cap = solve(corpus::sphere_cap_problem());
  EXPECT_LE(dist(cap.point, corpus::sphere_cap_minimizer()), 1e-4);
  EXPECT_TRUE(check_kkt(corpus::sphere_cap_problem(), cap.point).certified);

  Point target = corpus::origin(testing::kHyperbolic);
  const ProblemSpec hyp = corpus::hyperbolic_center_problem(&target);
  EXPECT_LE(dist(solve(hyp).point, target), 1e-4);
}

TEST(Solve, TraceIsMonotone) {
  const SolveResult r = solve(corpus::sphere_cap_problem());
  ASSERT_FALSE(r.trace.empty());
  for (std::size_t i = 1; i < r.trace.size(); ++i) {
    EXPECT_LE(r.trace[i].f, r.trace[i - 1].f + 1e-12);
  }
}

TEST(NormalConeProbe, NonpositiveAtMinimizer) {
  EXPECT_LE(normal_cone_probe(corpus::disk_linear_problem(), pt(kPlane, {-1, 0}), 200, 0), 1e-5);
  EXPECT_GT(normal_cone_probe(corpus::disk_linear_problem(), pt(kPlane, {1, 0}), 200, 0), 0.1);
}

TEST(CheckCQ, SmoothBoundaryPassesCuspFails) {
  const ProblemSpec disk = corpus::disk_linear_problem();
  const CQReport ok = check_cq(disk, pt(kPlane, {-1, 0}), 200, 0);
  EXPECT_EQ(ok.counterexamples, 0);
  EXPECT_DOUBLE_EQ(ok.fraction, 1.0);

  const ProblemSpec cusp = corpus::cusp_problem();
  const CQReport bad = check_cq(cusp, cusp.start, 200, 0);
  EXPECT_GT(bad.counterexamples, 0);
  EXPECT_LT(bad.fraction, 1.0);
  EXPECT_THROW(check_cq(disk, pt(kPlane, {0, 0}), 10, 0), Error);
}

// Multipliers on affine instances equal the least-squares solve on the
// exact active normals.
TEST(KKTProperty, AffineInstancesMatchLinearSolve) {
  std::mt19937_64 rng(23);
  for (int i = 0; i < 10; ++i) {
    const corpus::AffineInstance inst = corpus::random_affine_instance(rng);
    const KKTCertificate c = check_kkt(inst.problem, inst.minimizer);
    ASSERT_TRUE(c.certified);
    Eigen::MatrixXd a(3, 2);
    a.col(0) = inst.normals[0];
    a.col(1) = inst.normals[1];
    const Eigen::VectorXd rhs = inst.c - inst.minimizer.coords();
    const Eigen::VectorXd lam = a.colPivHouseholderQr().solve(rhs);
    EXPECT_NEAR(c.multipliers[0], lam[0], 1e-7);
    EXPECT_NEAR(c.multipliers[1], lam[1], 1e-7);
    EXPECT_EQ(c.multipliers[2], 0.0);
  }
}

}  // namespace
}  // namespace geoconvex
