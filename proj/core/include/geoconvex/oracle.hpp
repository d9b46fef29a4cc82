#pragma once

#include "geoconvex/region.hpp"

/// Brute-force reference computations, independent of the projection solver.
namespace geoconvex::oracle {

struct SweepOptions {
  int angles = 10000;
  int bisection_steps = 60;
  int golden_steps = 100;
};

/// Distance from q to a two-dimensional region: the boundary is swept
/// radially from the anchor (bisection on the feasibility of
/// exp_anchor(r w(theta))), the closest sampled boundary point is refined by
/// golden-section search in theta. Requires dim 2 and an exterior q.
double projection_distance(const ConvexRegion& region, const Point& q, const SweepOptions& options = {});

/// Largest radius the sweep considers: 100 (euclidean), 1.5 (sphere), 8 (hyperboloid).
double sweep_limit(ManifoldKind kind);

}  // namespace geoconvex::oracle
