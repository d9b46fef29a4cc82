#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "geoconvex/kkt.hpp"
#include "geoconvex/region.hpp"

/// Built-in problem instances shared by `verify`, the tests and the
/// benchmarks. Every instance is two-dimensional unless stated otherwise.
namespace geoconvex::corpus {

/// Shortest round-trip decimal text for a double.
std::string number(double v);

/// "gdist(c1, ..., cN)" for a point's ambient coordinates.
std::string gdist_call(const Point& c);

ExprAst expr(const ManifoldSpec& m, const std::string& source);

/// Standard base points: the origin of R^n, e1 on S^n, (1, 0, ..) on H^n.
Point origin(const ManifoldSpec& m);

/// Unit basis vector e_i (0-based) in the ambient space, as a point.
Point sphere_axis(int dim, int axis);

/// {x1^2 + x2^2 - 1 <= 0} in R^2 with anchor at the origin.
ConvexRegion unit_disk();

/// {d(x, e1) - radius <= 0} on S^2 with anchor e1.
ConvexRegion sphere_cap(double radius = 0.5);

/// {d(x, o) - radius <= 0} on H^2 with anchor o = (1, 0, 0).
ConvexRegion hyperbolic_ball(double radius = 1.0);

/// Seeded region with one or two constraints around a random center
/// (ellipse plus optional half-plane cut, cap intersections, ball
/// intersections) together with a point that is exterior and inside the
/// projection neighborhood.
struct RegionInstance {
  ConvexRegion region;
  Point exterior;
  std::string description;
};

RegionInstance random_instance(ManifoldKind kind, std::mt19937_64& rng);

/// f = x1 on the unit disk; start (0, 0.5).
ProblemSpec disk_linear_problem();

/// f = d(x, e3)^2 on the cap {d(x, e1) <= 0.5} of S^2; start (0.995, 0.0998, 0).
ProblemSpec sphere_cap_problem();

/// Analytic minimizer of sphere_cap_problem: exp_{e1}(0.5 e3) = (cos 0.5, 0, sin 0.5).
Point sphere_cap_minimizer();

/// f = d(x, a)^2 on a hyperbolic ball with a interior; returns a through `target`.
ProblemSpec hyperbolic_center_problem(Point* target);

/// f = -x1 subject to (x1 - 1)^3 <= 0 in R^2; the active gradient vanishes at (1, 0).
ProblemSpec degenerate_fj_problem();

/// g1 = x2 - x1^3, g2 = -x2 - x1^3 in R^2, anchor (0.5, 0); cusp at the origin.
ProblemSpec cusp_problem();

/// Euclidean affine-constraint problem with a known minimizer and known
/// multipliers: f = 0.5 |x - c|^2, c = xbar + sum lambda_i a_i over the
/// active constraints, plus one inactive constraint.
struct AffineInstance {
  ProblemSpec problem;
  Point minimizer;
  std::vector<Eigen::VectorXd> normals;  // a_i of every constraint
  std::vector<double> offsets;           // b_i, constraint a_i . x - b_i
  Eigen::VectorXd c;                     // objective center
};

AffineInstance random_affine_instance(std::mt19937_64& rng);

}  // namespace geoconvex::corpus
