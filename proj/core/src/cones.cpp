#include "geoconvex/cones.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace geoconvex {
namespace {

constexpr int kProbeLevels = 41;  // t_j = eps 2^-j, j = 0..40
constexpr double kSeqInTol = 1e-8;
constexpr double kSeqOutTol = 1e-3;
// Exterior probes count as decisive only at step lengths below this
// fraction of eps(p); longer exterior probes are also seen along inward
// directions that graze the boundary.
constexpr double kDecisiveScale = 1e-6;
constexpr int kPullbackSteps = 60;

bool is_zero(const TangentVector& v) { return v.coords().squaredNorm() == 0.0; }

// First interior point on the geodesic from x back to the anchor.
Point pull_back(const ConvexRegion& region, const Point& x) {
  const TangentVector toward = log_map(x, region.anchor());
  double lo = 0.0;
  double hi = 1.0;
  for (int i = 0; i < kPullbackSteps; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (member(region, exp_map(toward * mid)) == Membership::interior) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return exp_map(toward * hi);
}

}  // namespace

std::string_view to_string(ConeVerdict v) noexcept {
  switch (v) {
    case ConeVerdict::in_tangent_cone: return "in_tangent_cone";
    case ConeVerdict::not_in_tangent_cone: return "not_in_tangent_cone";
    case ConeVerdict::undecided: return "undecided";
  }
  return "undecided";
}

double epsilon_of(const ConvexRegion& region, const Point& p) {
  if (member(region, p) == Membership::exterior) {
    throw Error(ErrorKind::NotInSet, "point is exterior to the region");
  }
  return working_radius(region, p);
}

ConeProbe tangent_cone_member(const ConvexRegion& region, const TangentVector& v) {
  const Point& p = v.base();
  if (is_zero(v)) {
    return ConeProbe{p, v, ConeVerdict::in_tangent_cone, std::nullopt};
  }
  const double eps = epsilon_of(region, p);
  const TangentVector dir = v * (1.0 / norm(v));
  bool decisive_exterior = false;
  double t = eps;
  for (int j = 0; j < kProbeLevels; ++j, t *= 0.5) {
    const Membership m = member(region, exp_map(dir * t));
    if (m == Membership::interior) {
      return ConeProbe{p, dir, ConeVerdict::in_tangent_cone, t};
    }
    if (m == Membership::exterior && t <= kDecisiveScale * eps) decisive_exterior = true;
  }
  return ConeProbe{p, dir,
                   decisive_exterior ? ConeVerdict::not_in_tangent_cone : ConeVerdict::undecided,
                   std::nullopt};
}

ConeProbe tangent_cone_member_seq(const ConvexRegion& region, const TangentVector& v) {
  const Point& p = v.base();
  if (is_zero(v)) {
    return ConeProbe{p, v, ConeVerdict::in_tangent_cone, std::nullopt};
  }
  const double eps = epsilon_of(region, p);
  const double vnorm = norm(v);
  const TangentVector dir = v * (1.0 / vnorm);

  double best = std::numeric_limits<double>::infinity();
  std::optional<double> witness;
  double t = eps;
  for (int k = 0; k < kProbeLevels; ++k, t *= 0.5) {
    Point x = exp_map(dir * t);
    const bool direct = member(region, x) == Membership::interior;
    if (!direct) x = pull_back(region, x);
    const TangentVector w = log_map(p, x);
    const double ww = metric_inner(w, w);
    if (ww == 0.0) continue;
    const double alpha = std::max(0.0, metric_inner(w, v) / ww);
    const double r = norm(w * alpha - v) / vnorm;
    if (r < best) best = r;
    if (r <= kSeqInTol && direct && !witness) witness = t;
  }
  ConeVerdict verdict = ConeVerdict::undecided;
  if (best <= kSeqInTol) {
    verdict = ConeVerdict::in_tangent_cone;
  } else if (best >= kSeqOutTol) {
    verdict = ConeVerdict::not_in_tangent_cone;
  }
  return ConeProbe{p, dir, verdict, verdict == ConeVerdict::in_tangent_cone ? witness : std::nullopt};
}

std::vector<int> active_set(const ConvexRegion& region, const Point& p) {
  const std::vector<double> g = region.constraint_values(p);
  std::vector<int> active;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (std::abs(g[i]) <= region.interior_tol()) active.push_back(static_cast<int>(i));
  }
  return active;
}

GeneratedCone normal_cone_generators(const ConvexRegion& region, const Point& p) {
  const Membership m = member(region, p);
  if (m == Membership::exterior) {
    throw Error(ErrorKind::NotInSet, "point is exterior to the region");
  }
  GeneratedCone cone{p, {}};
  if (m == Membership::interior) return cone;
  for (int i : active_set(region, p)) {
    cone.generators.push_back(riemannian_grad(region.constraints()[static_cast<std::size_t>(i)], p));
  }
  return cone;
}

bool polar_member(const GeneratedCone& cone, const TangentVector& u, double tol) {
  if (!same_point(cone.base, u.base())) {
    throw Error(ErrorKind::BasePointMismatch, "vector and cone have different base points");
  }
  const double un = norm(u);
  for (const TangentVector& g : cone.generators) {
    if (metric_inner(u, g) > tol * un * norm(g)) return false;
  }
  return true;
}

ConeInclusionReport cone_in_cone(const GeneratedCone& cone_a, const GeneratedCone& polar_of,
                                 int samples, std::uint64_t seed, double tol) {
  if (!same_point(cone_a.base, polar_of.base)) {
    throw Error(ErrorKind::BasePointMismatch, "cones have different base points");
  }
  ConeInclusionReport report;
  std::mt19937_64 rng(seed);
  std::exponential_distribution<double> weight(1.0);
  const std::size_t n = cone_a.generators.size();

  auto test = [&](const TangentVector& u) {
    ++report.samples;
    const double un = norm(u);
    if (un == 0.0) return;
    for (const TangentVector& g : polar_of.generators) {
      const double gn = norm(g);
      if (gn == 0.0) continue;
      const double v = metric_inner(u, g) / (un * gn);
      if (v > report.max_violation) {
        report.max_violation = v;
        if (v > tol) report.counterexample = u;
      }
    }
  };

  for (std::size_t i = 0; i < n && report.samples < samples; ++i) test(cone_a.generators[i]);
  while (report.samples < samples) {
    TangentVector u = TangentVector::zero(cone_a.base);
    for (std::size_t i = 0; i < n; ++i) u = u + cone_a.generators[i] * weight(rng);
    test(u);
    if (n == 0) break;
  }
  report.passed = report.max_violation <= tol;
  return report;
}

}  // namespace geoconvex
