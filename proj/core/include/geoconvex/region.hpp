#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "geoconvex/error.hpp"
#include "geoconvex/expr.hpp"
#include "geoconvex/manifold.hpp"

namespace geoconvex {

/// How ConvexRegion::make treats the declared convexity of its constraints.
enum class ConvexityCheck {
  spot_check,      // 50 random geodesic chords, slack 1e-7; reject on violation
  trust_declared,  // skip the chord test (instances that are deliberately nonconvex)
};

struct RegionOptions {
  double interior_tol = 1e-9;
  ConvexityCheck convexity = ConvexityCheck::spot_check;
  std::uint64_t check_seed = 0;
};

/// Sublevel set {x : g_i(x) <= 0, i = 1..l} with a strictly feasible anchor.
class ConvexRegion {
 public:
  /// Throws InvalidRegion when l = 0, the anchor is not strictly feasible,
  /// the constraints do not fit the manifold, or a chord test fails.
  static ConvexRegion make(const ManifoldSpec& manifold, std::vector<ExprAst> constraints,
                           const Point& anchor, RegionOptions options = {});

  const ManifoldSpec& manifold() const noexcept { return manifold_; }
  const std::vector<ExprAst>& constraints() const noexcept { return constraints_; }
  const Point& anchor() const noexcept { return anchor_; }
  double interior_tol() const noexcept { return interior_tol_; }

  std::vector<double> constraint_values(const Point& x) const;
  double max_constraint(const Point& x) const;

 private:
  ConvexRegion(ManifoldSpec manifold, std::vector<ExprAst> constraints, Point anchor, double tol)
      : manifold_(manifold), constraints_(std::move(constraints)), anchor_(std::move(anchor)),
        interior_tol_(tol) {}

  ManifoldSpec manifold_;
  std::vector<ExprAst> constraints_;
  Point anchor_;
  double interior_tol_;
};

enum class Membership { interior, boundary, exterior };

std::string_view to_string(Membership m) noexcept;

/// interior iff max g <= -tol, exterior iff max g >= +tol, boundary otherwise.
/// Throws ManifoldMismatch.
Membership member(const ConvexRegion& region, const Point& x);

/// Deterministic working radius used wherever a neighborhood eps(p) is
/// needed: min(0.5 r(p), 0.25 d(p, anchor) + 0.1, 0.5). No membership check.
double working_radius(const ConvexRegion& region, const Point& p);

/// Exactly `count` seeded interior points near the anchor, drawn within
/// 0.9 * working_radius(anchor); infeasible draws are pulled back toward the
/// anchor by bisection. Throws SamplingExhausted after 10^4 draws.
std::vector<Point> sample_interior(const ConvexRegion& region, int count, std::uint64_t seed);

/// Same procedure with an explicit draw radius.
std::vector<Point> sample_interior(const ConvexRegion& region, int count, std::uint64_t seed,
                                   double radius);

struct ProjectionResult {
  Point q_star;
  double distance = 0.0;
  double vi_residual = 0.0;
  int iterations = 0;
  bool converged = false;
};

class ProjectionNotCertified : public Error {
 public:
  ProjectionNotCertified(const std::string& message, ProjectionResult best)
      : Error(ErrorKind::ProjectionNotCertified, message), best_(std::move(best)) {}

  const ProjectionResult& best() const noexcept { return best_; }

 private:
  ProjectionResult best_;
};

struct ProjectOptions {
  std::optional<Point> start;  // initial iterate, defaults to q
  std::uint64_t seed = 0;
  int probes = 64;
  double vi_tol = 1e-6;
  int max_iterations = 10000;
  double gradient_tol = 1e-9;
};

/// Metric projection onto the region. Exterior inputs are solved with
/// Riemannian gradient descent on d(q,.)^2 plus a shifted quadratic
/// penalty, then certified by the variational inequality over sampled
/// interior probes. Throws OutsideProjectionNeighborhood or
/// ProjectionNotCertified.
ProjectionResult project(const ConvexRegion& region, const Point& q, const ProjectOptions& options = {});

/// max over probe points z of <log_{q*} q, log_{q*} z> / (|log_{q*} q| |log_{q*} z|).
/// Nonpositive at the true projection. Throws DegenerateProjection if q* = q.
double vi_check(const ConvexRegion& region, const Point& q, const Point& q_star, int probes,
                std::uint64_t seed);

/// vi_check over an explicit probe set.
double vi_residual(const Point& q, const Point& q_star, const std::vector<Point>& probes);

/// Point where the geodesic anchor -> x leaves the region, by bisection on
/// the parameter (x must be exterior). Used to place points on the boundary.
Point boundary_between(const ConvexRegion& region, const Point& inside, const Point& outside,
                       int steps = 200);

}  // namespace geoconvex
