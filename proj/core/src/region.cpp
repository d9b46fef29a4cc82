#include "geoconvex/region.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace geoconvex {
namespace {

constexpr int kChordChecks = 50;
constexpr double kChordSlack = 1e-7;
constexpr int kMaxSampleDraws = 10000;
constexpr int kShrinkSteps = 50;
constexpr double kArmijoC = 1e-4;
constexpr double kInitialPenalty = 10.0;
constexpr int kFlatStepLimit = 20;

void require_manifold(const ConvexRegion& region, const Point& x) {
  if (!(x.manifold() == region.manifold())) {
    throw Error(ErrorKind::ManifoldMismatch, "point is not on the region's manifold");
  }
}

// Shifted quadratic penalty model of d(q, .)^2 over the region:
//   F(p) = d(q,p)^2 + sum_i rho * max(g_i(p) + mu_i / (2 rho), 0)^2.
// With mu = 0 this is the plain quadratic penalty; the shifts let the
// iterate reach the boundary band without driving rho to 1e9.
class PenaltyModel {
 public:
  PenaltyModel(const ConvexRegion& region, const Point& q)
      : region_(region), q_(q), mu_(region.constraints().size(), 0.0) {}

  double rho() const { return rho_; }
  void double_rho() { rho_ *= 2.0; }
  const std::vector<double>& multipliers() const { return mu_; }

  double value(const Point& p) const {
    const double d = dist(q_, p);
    double v = d * d;
    const auto& cs = region_.constraints();
    for (std::size_t i = 0; i < cs.size(); ++i) {
      const double s = std::max(evaluate(cs[i], p) + mu_[i] / (2.0 * rho_), 0.0);
      v += rho_ * s * s;
    }
    return v;
  }

  TangentVector gradient(const Point& p) const {
    TangentVector g = log_map(p, q_) * (-2.0);
    const auto& cs = region_.constraints();
    for (std::size_t i = 0; i < cs.size(); ++i) {
      const double weight = std::max(2.0 * rho_ * evaluate(cs[i], p) + mu_[i], 0.0);
      if (weight > 0.0) g = g + riemannian_grad(cs[i], p) * weight;
    }
    return g;
  }

  // First-order multiplier update; returns the largest change.
  double update_multipliers(const Point& p) {
    double change = 0.0;
    const auto& cs = region_.constraints();
    for (std::size_t i = 0; i < cs.size(); ++i) {
      const double next = std::max(2.0 * rho_ * evaluate(cs[i], p) + mu_[i], 0.0);
      change = std::max(change, std::abs(next - mu_[i]));
      mu_[i] = next;
    }
    return change;
  }

 private:
  const ConvexRegion& region_;
  const Point& q_;
  std::vector<double> mu_;
  double rho_ = kInitialPenalty;
};

struct DescentState {
  Point x;
  int iterations = 0;
  double gradient_norm = std::numeric_limits<double>::infinity();
  bool stalled = false;
};

// Riemannian gradient descent with Armijo backtracking (c = 1e-4, factor 1/2).
// Trial steps start from a Barzilai-Borwein estimate.
void minimize_penalty(const PenaltyModel& model, DescentState& state, double gradient_tol,
                      int iteration_budget, double max_step) {
  state.stalled = false;
  double fx = model.value(state.x);
  TangentVector g = model.gradient(state.x);
  double step = -1.0;
  Vector prev_x, prev_g;
  int flat_steps = 0;
  for (int it = 0; it < iteration_budget; ++it) {
    const double gn = norm(g);
    state.gradient_norm = gn;
    if (gn <= gradient_tol) return;

    double t = max_step / gn;
    if (step > 0.0 && prev_x.size() > 0) {
      const Vector s = state.x.coords() - prev_x;
      const Vector y = g.coords() - prev_g;
      const double sy = ambient_inner(state.x.manifold().kind(), s, y);
      const double ss = ambient_inner(state.x.manifold().kind(), s, s);
      if (sy > 0.0 && ss > 0.0) t = std::min(t, ss / sy);
    }

    bool accepted = false;
    for (int halving = 0; halving < 60; ++halving, t *= 0.5) {
      Point trial = state.x;
      try {
        trial = exp_map(g * (-t));
      } catch (const Error&) {
        continue;
      }
      double ft = 0.0;
      try {
        ft = model.value(trial);
      } catch (const EvalDomainError&) {
        continue;
      }
      if (ft <= fx - kArmijoC * t * gn * gn) {
        // Decreases at the rounding level of f carry no information.
        const double resolution = 8.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(fx));
        flat_steps = (fx - ft <= resolution) ? flat_steps + 1 : 0;
        prev_x = state.x.coords();
        prev_g = g.coords();
        state.x = std::move(trial);
        fx = ft;
        step = t;
        accepted = true;
        break;
      }
    }
    ++state.iterations;
    if (!accepted || flat_steps >= kFlatStepLimit) {
      state.stalled = true;
      state.gradient_norm = norm(model.gradient(state.x));
      return;
    }
    g = model.gradient(state.x);
  }
  state.gradient_norm = norm(g);
}

}  // namespace

std::string_view to_string(Membership m) noexcept {
  switch (m) {
    case Membership::interior: return "interior";
    case Membership::boundary: return "boundary";
    case Membership::exterior: return "exterior";
  }
  return "unknown";
}

// ------------------------------------------------------------ region

ConvexRegion ConvexRegion::make(const ManifoldSpec& manifold, std::vector<ExprAst> constraints,
                                const Point& anchor, RegionOptions options) {
  if (constraints.empty()) {
    throw Error(ErrorKind::InvalidRegion, "a region needs at least one constraint");
  }
  if (!(anchor.manifold() == manifold)) {
    throw Error(ErrorKind::InvalidRegion, "anchor is not on the region's manifold");
  }
  if (!(options.interior_tol > 0.0)) {
    throw Error(ErrorKind::InvalidRegion, "interior_tol must be positive");
  }
  for (const auto& c : constraints) {
    if (c.ambient_dim() > manifold.ambient_dim()) {
      throw Error(ErrorKind::InvalidRegion, "constraint references coordinates beyond the manifold");
    }
  }
  ConvexRegion region(manifold, std::move(constraints), anchor, options.interior_tol);

  double anchor_max = 0.0;
  try {
    anchor_max = region.max_constraint(anchor);
  } catch (const EvalDomainError& e) {
    throw Error(ErrorKind::InvalidRegion, std::string("anchor: ") + e.what());
  }
  if (anchor_max > -options.interior_tol) {
    std::ostringstream msg;
    msg << "anchor is not strictly feasible (max g = " << anchor_max << ")";
    throw Error(ErrorKind::InvalidRegion, msg.str());
  }

  if (options.convexity == ConvexityCheck::spot_check) {
    std::mt19937_64 rng(options.check_seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double reach = std::min(0.5 * convexity_radius_bound(anchor), 2.0);
    auto draw = [&] { return exp_map(random_unit_tangent(anchor, rng) * (reach * unit(rng))); };
    for (int chord = 0; chord < kChordChecks; ++chord) {
      const Point a = draw();
      const Point b = draw();
      const TangentVector v = log_map(a, b);
      try {
        const auto ga = region.constraint_values(a);
        const auto gb = region.constraint_values(b);
        for (const double t : {0.25, 0.5, 0.75}) {
          const auto gt = region.constraint_values(exp_map(v * t));
          for (std::size_t i = 0; i < gt.size(); ++i) {
            const double bound = (1.0 - t) * ga[i] + t * gb[i] +
                                 kChordSlack * (1.0 + std::abs(ga[i]) + std::abs(gb[i]));
            if (gt[i] > bound) {
              std::ostringstream msg;
              msg << "constraint " << (i + 1) << " is not geodesically convex along a sampled chord ("
                  << gt[i] << " > " << bound << " at t = " << t << ")";
              throw Error(ErrorKind::InvalidRegion, msg.str());
            }
          }
        }
      } catch (const EvalDomainError& e) {
        throw Error(ErrorKind::InvalidRegion, std::string("convexity check: ") + e.what());
      }
    }
  }
  return region;
}

std::vector<double> ConvexRegion::constraint_values(const Point& x) const {
  std::vector<double> out;
  out.reserve(constraints_.size());
  for (const auto& c : constraints_) out.push_back(evaluate(c, x));
  return out;
}

double ConvexRegion::max_constraint(const Point& x) const {
  double m = -std::numeric_limits<double>::infinity();
  for (const auto& c : constraints_) m = std::max(m, evaluate(c, x));
  return m;
}

Membership member(const ConvexRegion& region, const Point& x) {
  require_manifold(region, x);
  const double m = region.max_constraint(x);
  if (m <= -region.interior_tol()) return Membership::interior;
  if (m >= region.interior_tol()) return Membership::exterior;
  return Membership::boundary;
}

double working_radius(const ConvexRegion& region, const Point& p) {
  return std::min({0.5 * convexity_radius_bound(p), 0.25 * dist(p, region.anchor()) + 0.1, 0.5});
}

// ----------------------------------------------------------- sampling

std::vector<Point> sample_interior(const ConvexRegion& region, int count, std::uint64_t seed) {
  return sample_interior(region, count, seed, 0.9 * working_radius(region, region.anchor()));
}

std::vector<Point> sample_interior(const ConvexRegion& region, int count, std::uint64_t seed,
                                   double radius) {
  if (count < 1) throw Error(ErrorKind::InvalidArgument, "sample count must be >= 1");
  const Point& anchor = region.anchor();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double inv_dim = 1.0 / region.manifold().dim();

  auto is_interior = [&](const Point& x) {
    try {
      return member(region, x) == Membership::interior;
    } catch (const EvalDomainError&) {
      return false;
    }
  };

  std::vector<Point> out;
  out.reserve(count);
  int draws = 0;
  while (static_cast<int>(out.size()) < count) {
    if (++draws > kMaxSampleDraws) {
      throw Error(ErrorKind::SamplingExhausted, "could not draw enough interior samples");
    }
    const TangentVector v = random_unit_tangent(anchor, rng) * (radius * std::pow(unit(rng), inv_dim));
    Point x = exp_map(v);
    if (is_interior(x)) {
      out.push_back(std::move(x));
      continue;
    }
    double lo = 0.0;
    double hi = 1.0;
    for (int step = 0; step < kShrinkSteps; ++step) {
      const double mid = 0.5 * (lo + hi);
      (is_interior(exp_map(v * mid)) ? lo : hi) = mid;
    }
    if (lo > 0.0) out.push_back(exp_map(v * lo));
  }
  return out;
}

Point boundary_between(const ConvexRegion& region, const Point& inside, const Point& outside,
                       int steps) {
  const TangentVector v = log_map(inside, outside);
  double lo = 0.0;
  double hi = 1.0;
  for (int step = 0; step < steps; ++step) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    (region.max_constraint(exp_map(v * mid)) <= 0.0 ? lo : hi) = mid;
  }
  return exp_map(v * lo);
}

// --------------------------------------------------------- projection

double vi_residual(const Point& q, const Point& q_star, const std::vector<Point>& probes) {
  const TangentVector u = log_map(q_star, q);
  const double un = norm(u);
  if (un == 0.0) throw Error(ErrorKind::DegenerateProjection, "projection coincides with the projected point");
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& z : probes) {
    const TangentVector v = log_map(q_star, z);
    const double vn = norm(v);
    if (vn == 0.0) continue;
    worst = std::max(worst, metric_inner(u, v) / (un * vn));
  }
  return worst;
}

double vi_check(const ConvexRegion& region, const Point& q, const Point& q_star, int probes,
                std::uint64_t seed) {
  require_manifold(region, q);
  require_manifold(region, q_star);
  if (same_point(q, q_star)) {
    throw Error(ErrorKind::DegenerateProjection, "projection coincides with the projected point");
  }
  return vi_residual(q, q_star, sample_interior(region, probes, seed));
}

ProjectionResult project(const ConvexRegion& region, const Point& q, const ProjectOptions& options) {
  require_manifold(region, q);
  const double radius = convexity_radius_bound(region.anchor());
  if (dist(q, region.anchor()) > 0.9 * radius) {
    throw Error(ErrorKind::OutsideProjectionNeighborhood,
                "point is farther than 0.9 * convexity radius from the anchor");
  }
  if (member(region, q) != Membership::exterior) {
    return ProjectionResult{q, 0.0, 0.0, 0, true};
  }

  const double feasibility_target = 0.1 * region.interior_tol();
  const double max_step = std::min(0.5 * radius, 1.0);
  PenaltyModel model(region, q);
  DescentState state{options.start.value_or(q)};
  require_manifold(region, state.x);

  // Inexact inner solves: the gradient tolerance tightens tenfold per outer
  // round; rho doubles whenever the violation fails to shrink fourfold.
  bool converged = false;
  double inner_tol = 1e-2;
  double prev_violation = std::numeric_limits<double>::infinity();
  for (int outer = 0; outer < 200 && state.iterations < options.max_iterations; ++outer) {
    inner_tol = std::max(options.gradient_tol, 0.1 * inner_tol);
    minimize_penalty(model, state, inner_tol, options.max_iterations - state.iterations, max_step);
    const double violation = std::max(region.max_constraint(state.x), 0.0);
    const bool final_round = inner_tol <= options.gradient_tol;
    if (final_round && violation <= feasibility_target &&
        (state.gradient_norm <= options.gradient_tol || state.stalled)) {
      converged = state.gradient_norm <= options.gradient_tol;
      break;
    }
    model.update_multipliers(state.x);
    if (violation > feasibility_target && violation > 0.25 * prev_violation) model.double_rho();
    prev_violation = violation;
  }
  ProjectionResult result{state.x, dist(q, state.x), 0.0, state.iterations, converged};
  if (member(region, state.x) == Membership::exterior) {
    result.vi_residual = std::numeric_limits<double>::infinity();
    throw ProjectionNotCertified("projection iterate is still outside the region", result);
  }
  const auto probes = sample_interior(region, options.probes, options.seed);
  result.vi_residual = vi_residual(q, state.x, probes);
  if (!(result.vi_residual <= options.vi_tol)) {
    std::ostringstream msg;
    msg << "variational inequality residual " << result.vi_residual << " exceeds " << options.vi_tol;
    throw ProjectionNotCertified(msg.str(), result);
  }
  return result;
}

}  // namespace geoconvex
