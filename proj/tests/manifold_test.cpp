#include <gtest/gtest.h>

#include <random>

#include "geoconvex/manifold.hpp"
#include "test_support.hpp"

namespace geoconvex {
namespace {

using testing::kHyperbolic;
using testing::kKinds;
using testing::kPlane;
using testing::kSphere;
using testing::pt;
using testing::tv;
using testing::vec;

const ManifoldSpec kH1{ManifoldKind::hyperboloid, 1};

TEST(ManifoldSpec, AmbientDimension) {
  EXPECT_EQ(kPlane.ambient_dim(), 2);
  EXPECT_EQ(kSphere.ambient_dim(), 3);
  EXPECT_EQ(kHyperbolic.ambient_dim(), 3);
  EXPECT_THROW(ManifoldSpec(ManifoldKind::sphere, 0), Error);
}

TEST(Point, RejectsOffSurfaceCoordinates) {
  EXPECT_THROW(pt(kSphere, {1.0, 0.1, 0.0}), Error);
  EXPECT_THROW(pt(kHyperbolic, {-1.0, 0.0, 0.0}), Error);
  EXPECT_THROW(pt(kPlane, {1.0, 0.0, 0.0}), Error);
  const Point s = Point::snap(kSphere, vec({2.0, 0.0, 0.0}), 10.0);
  EXPECT_NEAR(s[0], 1.0, 1e-15);
}

TEST(ExpMap, HyperbolicLineClosedForm) {
  const Point o = pt(kH1, {1.0, 0.0});
  const Point x = exp_map(tv(o, {0.0, 1.0}));
  EXPECT_NEAR(x[0], 1.5430806348152437, 1e-14);
  EXPECT_NEAR(x[1], 1.1752011936438014, 1e-14);
}

TEST(ExpMap, SphereQuarterTurn) {
  const Point e1 = pt(kSphere, {1.0, 0.0, 0.0});
  const Point x = exp_map(tv(e1, {0.0, M_PI / 2, 0.0}));
  EXPECT_NEAR(x[0], 0.0, 1e-15);
  EXPECT_NEAR(x[1], 1.0, 1e-15);
  EXPECT_THROW(exp_map(tv(e1, {0.0, M_PI, 0.0})), Error);
}

TEST(LogMap, InvertsHyperbolicClosedForm) {
  const Point o = pt(kH1, {1.0, 0.0});
  const Point x = pt(kH1, {std::cosh(1.0), std::sinh(1.0)});
  const TangentVector v = log_map(o, x);
  EXPECT_NEAR(v.coords()[0], 0.0, 1e-12);
  EXPECT_NEAR(v.coords()[1], 1.0, 1e-12);
}

TEST(Dist, ClosedForms) {
  const Point o = pt(kH1, {1.0, 0.0});
  EXPECT_NEAR(dist(o, pt(kH1, {std::cosh(2.0), std::sinh(2.0)})), 2.0, 1e-12);
  EXPECT_NEAR(dist(pt(kSphere, {1, 0, 0}), pt(kSphere, {0, 0, 1})), M_PI / 2, 1e-15);
  EXPECT_NEAR(dist(pt(kPlane, {0, 0}), pt(kPlane, {3, 4})), 5.0, 1e-15);
  // Tiny separations stay accurate where acos/acosh would lose digits.
  const Point e1 = pt(kSphere, {1, 0, 0});
  EXPECT_NEAR(dist(e1, exp_map(tv(e1, {0, 1e-9, 0}))), 1e-9, 1e-22);
}

TEST(TangentBasis, LorentzOrthonormalOnHyperbolicLine) {
  const Point x = pt(kH1, {std::cosh(1.0), std::sinh(1.0)});
  const auto basis = tangent_basis(x);
  ASSERT_EQ(basis.size(), 1u);
  const Vector& e = basis[0].coords();
  EXPECT_NEAR(ambient_inner(ManifoldKind::hyperboloid, x.coords(), e), 0.0, 1e-14);
  EXPECT_NEAR(ambient_inner(ManifoldKind::hyperboloid, e, e), 1.0, 1e-14);
}

TEST(TangentVector, BasePointMismatchAndTangency) {
  const Point e1 = pt(kSphere, {1, 0, 0});
  const Point e2 = pt(kSphere, {0, 1, 0});
  EXPECT_THROW(tv(e1, {1.0, 0.0, 0.0}), Error);
  EXPECT_THROW(tv(e1, {0, 1, 0}) + tv(e2, {1, 0, 0}), Error);
}

TEST(ConvexityRadius, Bounds) {
  EXPECT_DOUBLE_EQ(convexity_radius_bound(pt(kSphere, {1, 0, 0})), M_PI / 2);
  EXPECT_DOUBLE_EQ(convexity_radius_bound(pt(kPlane, {0, 0})), kInfiniteRadius);
  EXPECT_DOUBLE_EQ(convexity_radius_bound(pt(kHyperbolic, {1, 0, 0})), kInfiniteRadius);
}

// log(exp v) = v and dist(p, exp v) = |v| on seeded pairs.
TEST(ManifoldProperty, ExpLogRoundtrip) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> len(0.0, 1.4);
  for (const ManifoldSpec& m : kKinds) {
    Vector base = Vector::Zero(m.ambient_dim());
    base[0] = 1.0;
    const Point p0 = Point::on(m, base);
    for (int i = 0; i < 200; ++i) {
      const Point p = exp_map(random_unit_tangent(p0, rng) * len(rng));
      const TangentVector v = random_unit_tangent(p, rng) * len(rng);
      const Point q = exp_map(v);
      EXPECT_LE((log_map(p, q).coords() - v.coords()).norm(), 1e-8);
      EXPECT_NEAR(dist(p, q), norm(v), 1e-9);
    }
  }
}

TEST(ManifoldProperty, DistanceIsSymmetric) {
  std::mt19937_64 rng(11);
  for (const ManifoldSpec& m : kKinds) {
    Vector base = Vector::Zero(m.ambient_dim());
    base[0] = 1.0;
    const Point o = Point::on(m, base);
    for (int i = 0; i < 100; ++i) {
      const Point a = exp_map(random_unit_tangent(o, rng) * 0.7);
      const Point b = exp_map(random_unit_tangent(o, rng) * 0.9);
      EXPECT_NEAR(dist(a, b), dist(b, a), 1e-12);
    }
  }
}

}  // namespace
}  // namespace geoconvex
