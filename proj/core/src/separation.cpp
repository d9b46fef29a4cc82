#include "geoconvex/separation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace geoconvex {
namespace {

constexpr double kSeparationTol = 1e-8;
constexpr double kSupportTol = 1e-6;
constexpr double kCauchyTol = 1e-7;
constexpr double kBaseTol = 1e-6;
constexpr double kLinearizeTol = 1e-6;
constexpr int kExteriorRedraws = 1000;

double sup_over(const TangentVector& u, const std::vector<Point>& probes) {
  double sup = -std::numeric_limits<double>::infinity();
  for (const Point& z : probes) sup = std::max(sup, metric_inner(u, log_map(u.base(), z)));
  return sup;
}

}  // namespace

QuasiHyperplane QuasiHyperplane::make(const TangentVector& direction, double offset,
                                      std::optional<Point> witness) {
  const double n = norm(direction);
  if (!(n > 0.0) || !std::isfinite(n)) {
    throw Error(ErrorKind::InvalidQuasiHyperplane, "quasi-hyperplane direction must be nonzero");
  }
  if (!std::isfinite(offset)) {
    throw Error(ErrorKind::InvalidQuasiHyperplane, "quasi-hyperplane offset must be finite");
  }
  return QuasiHyperplane(direction, offset, std::move(witness));
}

double QuasiHyperplane::evaluate(const Point& a) const {
  return metric_inner(direction_, log_map(base(), a)) - offset_;
}

SeparationCertificate separate(const ConvexRegion& region, const Point& y, int probes,
                               std::uint64_t seed) {
  if (member(region, y) != Membership::exterior) {
    throw Error(ErrorKind::PointInSet, "point is not exterior to the region");
  }
  ProjectOptions popts;
  popts.seed = seed;
  const ProjectionResult pr = project(region, y, popts);
  const TangentVector u = log_map(pr.q_star, y);

  SeparationCertificate cert{QuasiHyperplane::make(u, 0.0, y), pr};
  cert.point_value = metric_inner(u, log_map(pr.q_star, y));
  const std::vector<Point> zs = sample_interior(region, probes, seed);
  cert.set_sup = sup_over(u, zs);
  cert.probes_used = static_cast<int>(zs.size());
  cert.margin = cert.point_value - std::max(cert.set_sup, 0.0);
  cert.certified = cert.point_value > 0.0 && cert.set_sup <= kSeparationTol * norm(u);
  return cert;
}

SupportResult supporting_plane(const ConvexRegion& region, const Point& p,
                               const SupportOptions& options) {
  if (member(region, p) != Membership::boundary) {
    throw Error(ErrorKind::NotBoundaryPoint, "supporting planes need a boundary point");
  }
  const double eps = epsilon_of(region, p);
  std::mt19937_64 rng(options.seed);

  TangentVector w0 = TangentVector::zero(p);
  for (const TangentVector& g : normal_cone_generators(region, p).generators) w0 = w0 + g;
  const double w0n = norm(w0);
  bool have_normal = w0n > 1e-8;
  if (have_normal) w0 = w0 * (1.0 / w0n);

  ProjectOptions popts;
  popts.seed = options.seed;

  std::optional<Vector> prev_u;
  bool prev_near = false;
  Vector u_amb;
  double change = std::numeric_limits<double>::infinity();
  int steps = 0;
  double delta = 0.1 * eps;
  for (int k = 0; k < options.max_steps; ++k, delta *= 0.5) {
    steps = k + 1;
    std::optional<Point> y;
    if (have_normal) {
      Point cand = exp_map(w0 * (0.9 * delta));
      if (member(region, cand) == Membership::exterior) y = cand;
    }
    for (int r = 0; !y && r < kExteriorRedraws; ++r) {
      Point cand = exp_map(random_unit_tangent(p, rng) * (0.9 * delta));
      if (member(region, cand) == Membership::exterior) y = cand;
    }
    if (!y) break;

    std::optional<ProjectionResult> pr;
    try {
      pr = project(region, *y, popts);
    } catch (const ProjectionNotCertified&) {
      continue;
    }
    const TangentVector uk = log_map(pr->q_star, *y);
    const double ukn = norm(uk);
    if (!(ukn > 0.0)) continue;
    u_amb = uk.coords() / ukn;
    const bool near = dist(pr->q_star, p) <= kBaseTol;
    if (prev_u) {
      change = (u_amb - *prev_u).norm();
      if (near && prev_near && change <= kCauchyTol) break;
    }
    prev_u = u_amb;
    prev_near = near;
  }
  if (u_amb.size() == 0) {
    throw SupportNotCertified("no exterior point near the boundary point could be projected", steps,
                              change, std::numeric_limits<double>::infinity());
  }

  TangentVector u = TangentVector::project(p, u_amb);
  const double un = norm(u);
  if (!(un > 0.0)) {
    throw SupportNotCertified("limiting direction vanished in the tangent space", steps, change,
                              std::numeric_limits<double>::infinity());
  }
  u = u * (1.0 / un);
  const std::vector<Point> zs = sample_interior(region, options.probes, options.seed);
  const double sup = sup_over(u, zs);
  if (sup > kSupportTol) {
    throw SupportNotCertified("supporting inequality violated over interior probes", steps,
                              change, sup);
  }
  SupportResult result{QuasiHyperplane::make(u, 0.0, exp_map(u * (0.5 * eps)))};
  result.steps = steps;
  result.last_change = std::isfinite(change) ? change : 0.0;
  result.sup = sup;
  result.probes_used = static_cast<int>(zs.size());
  return result;
}

LinearizationReport linearize(const QuasiHyperplane& plane, const ConvexRegion& region,
                              int probes, std::uint64_t seed) {
  LinearizationReport report;
  const Point& p = plane.base();
  const TangentVector& u = plane.direction();
  if (plane.witness()) report.point_value = metric_inner(u, log_map(p, *plane.witness()));

  std::mt19937_64 rng(seed);
  report.cone_sup = -std::numeric_limits<double>::infinity();
  const int max_draws = 20 * std::max(probes, 1);
  for (int d = 0; d < max_draws && report.cone_samples < probes; ++d) {
    const TangentVector v = random_unit_tangent(p, rng);
    const ConeProbe probe = tangent_cone_member(region, v);
    if (probe.verdict == ConeVerdict::in_tangent_cone) {
      ++report.cone_samples;
      report.cone_sup = std::max(report.cone_sup, metric_inner(u, probe.direction));
    } else if (probe.verdict == ConeVerdict::undecided) {
      ++report.undecided;
    }
  }
  if (report.cone_samples == 0) report.cone_sup = 0.0;
  report.passed = report.point_value > 0.0 && report.cone_sup <= kLinearizeTol;
  return report;
}

}  // namespace geoconvex
