#include "geoconvex/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace geoconvex::oracle {

double sweep_limit(ManifoldKind kind) {
  switch (kind) {
    case ManifoldKind::euclidean: return 100.0;
    case ManifoldKind::sphere: return 1.5;
    case ManifoldKind::hyperboloid: return 8.0;
  }
  return 1.0;
}

double projection_distance(const ConvexRegion& region, const Point& q, const SweepOptions& options) {
  const Point& anchor = region.anchor();
  if (anchor.manifold().dim() != 2) {
    throw Error(ErrorKind::InvalidArgument, "the sweep oracle handles two-dimensional regions only");
  }
  const auto basis = tangent_basis(anchor);
  const double limit = sweep_limit(anchor.manifold().kind());

  auto boundary_distance = [&](double theta) {
    const TangentVector w = basis[0] * std::cos(theta) + basis[1] * std::sin(theta);
    double lo = 0.0;
    double hi = limit;
    if (region.max_constraint(exp_map(w * hi)) <= 0.0) {
      lo = hi;
    } else {
      for (int i = 0; i < options.bisection_steps; ++i) {
        const double mid = 0.5 * (lo + hi);
        (region.max_constraint(exp_map(w * mid)) <= 0.0 ? lo : hi) = mid;
      }
    }
    return dist(q, exp_map(w * lo));
  };

  const double step = 2.0 * M_PI / options.angles;
  double best = std::numeric_limits<double>::infinity();
  int best_k = 0;
  for (int k = 0; k < options.angles; ++k) {
    const double d = boundary_distance(k * step);
    if (d < best) {
      best = d;
      best_k = k;
    }
  }

  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = (best_k - 1) * step;
  double b = (best_k + 1) * step;
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  double fc = boundary_distance(c);
  double fd = boundary_distance(d);
  for (int i = 0; i < options.golden_steps; ++i) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = boundary_distance(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = boundary_distance(d);
    }
  }
  return std::min({best, fc, fd});
}

}  // namespace geoconvex::oracle
