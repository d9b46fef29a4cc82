#include <gtest/gtest.h>

#include <Eigen/Dense>

#include <random>

#include "geoconvex/cones.hpp"
#include "geoconvex/corpus.hpp"
#include "test_support.hpp"

namespace geoconvex {
namespace {

using testing::cap_point;
using testing::kPlane;
using testing::kSphere;
using testing::pt;
using testing::tv;

const Point kDiskEdge = Point::on(testing::kPlane, testing::vec({1, 0}));

TEST(EpsilonOf, MemberOnly) {
  EXPECT_DOUBLE_EQ(epsilon_of(corpus::unit_disk(), pt(kPlane, {0, 0})), 0.1);
  EXPECT_THROW(epsilon_of(corpus::unit_disk(), pt(kPlane, {2, 0})), Error);
}

TEST(TangentCone, InteriorPointSeesWholeSpace) {
  std::mt19937_64 rng(1);
  const Point p = pt(kPlane, {0.2, 0.3});
  for (int i = 0; i < 20; ++i) {
    const ConeProbe probe = tangent_cone_member(corpus::unit_disk(), random_unit_tangent(p, rng));
    EXPECT_EQ(probe.verdict, ConeVerdict::in_tangent_cone);
  }
}

TEST(TangentCone, DiskEdgeInwardAndOutward) {
  const ConvexRegion disk = corpus::unit_disk();
  const ConeProbe in = tangent_cone_member(disk, tv(kDiskEdge, {-1, 0}));
  EXPECT_EQ(in.verdict, ConeVerdict::in_tangent_cone);
  ASSERT_TRUE(in.witness_t.has_value());
  EXPECT_GT(*in.witness_t, 0.0);
  EXPECT_LE(*in.witness_t, epsilon_of(disk, kDiskEdge));
  EXPECT_EQ(tangent_cone_member(disk, tv(kDiskEdge, {1, 0})).verdict,
            ConeVerdict::not_in_tangent_cone);
  EXPECT_EQ(tangent_cone_member_seq(disk, tv(kDiskEdge, {-1, 0})).verdict,
            ConeVerdict::in_tangent_cone);
  EXPECT_EQ(tangent_cone_member_seq(disk, tv(kDiskEdge, {1, 0})).verdict,
            ConeVerdict::not_in_tangent_cone);
}

TEST(TangentCone, ZeroVectorIsMember) {
  const ConeProbe p = tangent_cone_member(corpus::unit_disk(), tv(kDiskEdge, {0, 0}));
  EXPECT_EQ(p.verdict, ConeVerdict::in_tangent_cone);
  EXPECT_FALSE(p.witness_t.has_value());
  EXPECT_EQ(tangent_cone_member_seq(corpus::unit_disk(), tv(kDiskEdge, {0, 0})).verdict,
            ConeVerdict::in_tangent_cone);
}

TEST(TangentCone, SphereCapRadialDirections) {
  const ConvexRegion cap = corpus::sphere_cap(0.5);
  const Point b = cap_point(0.5, 0.7);
  const TangentVector inward = log_map(b, corpus::origin(kSphere));
  const TangentVector outward = -inward;
  for (auto test : {tangent_cone_member, tangent_cone_member_seq}) {
    const ConeProbe in = test(cap, inward);
    EXPECT_EQ(in.verdict, ConeVerdict::in_tangent_cone);
    if (in.witness_t) {
      EXPECT_LT(dist(exp_map(in.direction * *in.witness_t), corpus::origin(kSphere)), 0.5);
    }
    EXPECT_EQ(test(cap, outward).verdict, ConeVerdict::not_in_tangent_cone);
  }
  // Independent check: the outward probe strictly increases d(., e1).
  const Point step = exp_map(outward * (1e-3 / norm(outward)));
  EXPECT_GT(dist(step, corpus::origin(kSphere)), 0.5);
}

TEST(NormalCone, Generators) {
  const GeneratedCone n = normal_cone_generators(corpus::unit_disk(), kDiskEdge);
  ASSERT_EQ(n.generators.size(), 1u);
  EXPECT_NEAR(n.generators[0].coords()[0], 2.0, 1e-6);
  EXPECT_NEAR(n.generators[0].coords()[1], 0.0, 1e-6);
  EXPECT_TRUE(normal_cone_generators(corpus::unit_disk(), pt(kPlane, {0, 0})).generators.empty());
  EXPECT_THROW(normal_cone_generators(corpus::unit_disk(), pt(kPlane, {2, 0})), Error);

  const Point b = cap_point(0.5, 2.0);
  const GeneratedCone cap = normal_cone_generators(corpus::sphere_cap(0.5), b);
  ASSERT_EQ(cap.generators.size(), 1u);
  const TangentVector radial = log_map(b, corpus::origin(kSphere)) * (-1.0 / 0.5);
  EXPECT_LE((cap.generators[0].coords() - radial.coords()).norm(), 1e-6);
}

TEST(PolarMember, GeneratorTests) {
  const Point o = pt(kPlane, {0, 0});
  const GeneratedCone cone{o, {tv(o, {1, 0})}};
  EXPECT_TRUE(polar_member(cone, tv(o, {0, 0}), 1e-9));
  EXPECT_TRUE(polar_member(cone, tv(o, {-1, 5}), 1e-9));
  EXPECT_FALSE(polar_member(cone, tv(o, {1, 0}), 1e-9));
  EXPECT_TRUE(polar_member(GeneratedCone{o, {}}, tv(o, {3, 3}), 1e-9));
  EXPECT_THROW(polar_member(cone, tv(kDiskEdge, {1, 0}), 1e-9), Error);
}

TEST(ConeInCone, HalfSpaceAgainstDoublePolar) {
  const Point o = pt(kPlane, {0, 0});
  // Half-space {x1 <= 0} = cone{(-1,0), (0,1), (0,-1)}; its polar is cone{(1,0)}.
  const GeneratedCone half{o, {tv(o, {-1, 0}), tv(o, {0, 1}), tv(o, {0, -1})}};
  const GeneratedCone normal{o, {tv(o, {1, 0})}};
  const ConeInclusionReport r = cone_in_cone(half, normal, 500, 3);
  EXPECT_TRUE(r.passed);
  EXPECT_LE(r.max_violation, 1e-12);
  EXPECT_EQ(r.samples, 500);
  const ConeInclusionReport bad = cone_in_cone(normal, normal, 10, 3);
  EXPECT_FALSE(bad.passed);
  EXPECT_TRUE(bad.counterexample.has_value());
}

TEST(NonnegCombination, ClosedFormCases) {
  const Point o = pt(kPlane, {0, 0});
  const GeneratedCone axes{o, {tv(o, {1, 0}), tv(o, {0, 1})}};
  const NonnegCombination a = nonneg_combination(axes, tv(o, {3, -2}));
  EXPECT_NEAR(a.coefficients[0], 3.0, 1e-12);
  EXPECT_NEAR(a.coefficients[1], 0.0, 1e-12);
  EXPECT_NEAR(a.residual, 2.0, 1e-12);

  // Cone {x >= y >= 0}: (0, 1) projects onto the ray (1, 1) at (0.5, 0.5).
  const GeneratedCone wedge{o, {tv(o, {1, 0}), tv(o, {1, 1})}};
  const NonnegCombination b = nonneg_combination(wedge, tv(o, {0, 1}));
  EXPECT_NEAR(b.coefficients[0], 0.0, 1e-12);
  EXPECT_NEAR(b.coefficients[1], 0.5, 1e-12);
  EXPECT_NEAR(b.residual, std::sqrt(0.5), 1e-12);

  // Duplicate generators: the combination is not unique, the residual is.
  const GeneratedCone dup{o, {tv(o, {1, 1}), tv(o, {2, 2})}};
  const NonnegCombination c = nonneg_combination(dup, tv(o, {3, 3}));
  EXPECT_NEAR(c.residual, 0.0, 1e-12);
  EXPECT_NEAR(c.coefficients[0] + 2.0 * c.coefficients[1], 3.0, 1e-12);
}

TEST(ProjectOntoPolar, MoreauDecomposition) {
  const Point o = pt(kPlane, {0, 0});
  const GeneratedCone cone{o, {tv(o, {1, 0})}};
  const TangentVector p = project_onto_polar(cone, tv(o, {2, 3}));
  EXPECT_NEAR(p.coords()[0], 0.0, 1e-12);
  EXPECT_NEAR(p.coords()[1], 3.0, 1e-12);
  const TangentVector q = project_onto_polar(cone, tv(o, {-2, 3}));
  EXPECT_NEAR(q.coords()[0], -2.0, 1e-12);
}

// Brute-force NNLS: least squares on every support, keep the best feasible.
Eigen::VectorXd nnls_by_enumeration(const Eigen::MatrixXd& a, const Eigen::VectorXd& b) {
  const int n = static_cast<int>(a.cols());
  Eigen::VectorXd best = Eigen::VectorXd::Zero(n);
  double best_r = b.norm();
  for (int mask = 1; mask < (1 << n); ++mask) {
    std::vector<int> idx;
    for (int j = 0; j < n; ++j) if (mask & (1 << j)) idx.push_back(j);
    Eigen::MatrixXd sub(a.rows(), static_cast<Eigen::Index>(idx.size()));
    for (std::size_t k = 0; k < idx.size(); ++k) sub.col(static_cast<Eigen::Index>(k)) = a.col(idx[k]);
    const Eigen::VectorXd s = sub.colPivHouseholderQr().solve(b);
    if ((s.array() < 0.0).any()) continue;
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    for (std::size_t k = 0; k < idx.size(); ++k) x[idx[k]] = s[static_cast<Eigen::Index>(k)];
    const double r = (a * x - b).norm();
    if (r < best_r) {
      best_r = r;
      best = x;
    }
  }
  return best;
}

TEST(GramNNLS, MatchesEnumerationOnRandomProblems) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const int rows = 3 + trial % 4;
    const int cols = 2 + trial % 5;
    Eigen::MatrixXd a(rows, cols);
    Eigen::VectorXd b(rows);
    for (int i = 0; i < rows; ++i) {
      b[i] = gauss(rng);
      for (int j = 0; j < cols; ++j) a(i, j) = gauss(rng);
    }
    const GramNNLSResult r = gram_nnls(a.transpose() * a, a.transpose() * b);
    ASSERT_TRUE(r.converged);
    EXPECT_GE(r.lambda.minCoeff(), 0.0);
    const Eigen::VectorXd ref = nnls_by_enumeration(a, b);
    EXPECT_NEAR((a * r.lambda - b).norm(), (a * ref - b).norm(), 1e-9) << "trial " << trial;
  }
}

TEST(GramNNLS, NearlyOpposedGeneratorsConverge) {
  const Point o = pt(kPlane, {0, 0});
  const GeneratedCone cone{o, {tv(o, {0, 1}), tv(o, {1e-13, -1})}};
  for (double y : {0.3, -0.3, 0.0}) {
    const NonnegCombination c = nonneg_combination(cone, tv(o, {1, y}));
    EXPECT_NEAR(c.residual, 1.0, 1e-9) << y;
  }
}

TEST(GramNNLS, EmptyProblemConverges) {
  const GramNNLSResult r = gram_nnls(Eigen::MatrixXd(0, 0), Eigen::VectorXd(0));
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.lambda.size(), 0);
}

// Both membership tests agree wherever both are decisive.
TEST(TangentConeProperty, ProbeAndSequenceAgree) {
  std::mt19937_64 rng(13);
  for (ManifoldKind kind : {ManifoldKind::euclidean, ManifoldKind::sphere, ManifoldKind::hyperboloid}) {
    const corpus::RegionInstance inst = corpus::random_instance(kind, rng);
    const Point p = boundary_between(inst.region, inst.region.anchor(), inst.exterior);
    for (int i = 0; i < 100; ++i) {
      const TangentVector v = random_unit_tangent(p, rng);
      const ConeVerdict a = tangent_cone_member(inst.region, v).verdict;
      const ConeVerdict b = tangent_cone_member_seq(inst.region, v).verdict;
      if (a != ConeVerdict::undecided && b != ConeVerdict::undecided) {
        EXPECT_EQ(a, b) << inst.description;
      }
    }
  }
}

}  // namespace
}  // namespace geoconvex
