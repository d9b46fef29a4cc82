#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "geoconvex/cones.hpp"
#include "geoconvex/expr.hpp"
#include "geoconvex/region.hpp"

namespace geoconvex {

struct SolverTolerances {
  double stationarity_tol = 1e-5;
  double complementarity_tol = 1e-6;
  double step_init = 1.0;
  int max_iters = 5000;
};

/// min f(x) subject to x in the region.
struct ProblemSpec {
  ExprAst objective;
  ConvexRegion region;
  Point start;
  SolverTolerances tolerances;

  const ManifoldSpec& manifold() const noexcept { return region.manifold(); }
};

struct SolveStep {
  int iteration = 0;
  double f = 0.0;
  double step = 0.0;
  double moved = 0.0;
};

enum class SolveStop { small_move, stationary, line_search, max_iters };

std::string_view to_string(SolveStop s) noexcept;

struct SolveResult {
  Point point;
  std::vector<SolveStep> trace;
  SolveStop stop = SolveStop::max_iters;
  double stationarity = 0.0;  // |log_{x_k} x_{k+1}| / t_k at the last step
};

/// Projected Riemannian gradient descent with Armijo backtracking on f.
/// Infeasible starts are projected first. Throws NumericalBreakdown on a
/// non-finite f or gradient; projection errors propagate.
SolveResult solve(const ProblemSpec& problem, std::uint64_t seed = 0);

enum class CertificateMode { fritz_john, kkt };

std::string_view to_string(CertificateMode m) noexcept;

struct KKTCertificate {
  Point point;
  CertificateMode mode = CertificateMode::kkt;
  double lambda0 = 1.0;
  std::vector<double> multipliers;  // length l, zero off the active set
  std::vector<int> active;
  double stationarity_residual = 0.0;
  std::vector<double> complementarity;  // lambda_i g_i(point)
  bool feasible = false;
  bool certified = false;
};

/// Gradients at or below this norm are treated as zero by the certificate
/// checks; it matches the resolution of the finite-difference gradients.
inline constexpr double kFlatGradient = 1e-8;

/// Multipliers from nonnegative least squares on the active gradients.
/// Certified iff feasible, residual <= stationarity_tol and
/// max |lambda_i g_i| <= complementarity_tol. NNLSStalled propagates.
KKTCertificate check_kkt(const ProblemSpec& problem, const Point& point);

/// Minimizes |lambda0 grad f + sum lambda_i grad g_i| over the simplex on
/// {0} u I(point). Certified iff the residual is <= stationarity_tol.
KKTCertificate check_fritz_john(const ProblemSpec& problem, const Point& point);

struct CQReport {
  int probes = 0;
  int inside = 0;
  int counterexamples = 0;
  int undecided = 0;
  double fraction = 0.0;  // inside / probes
  std::optional<TangentVector> counterexample;
};

/// Advisory sampling test of C_S(point) against the tangent cone.
/// Throws NotBoundaryPoint unless point is a boundary member.
CQReport check_cq(const ProblemSpec& problem, const Point& point, int probes, std::uint64_t seed);

/// max over sampled interior z of <-grad f(point), log_point z>; nonpositive
/// at a stationary point of a geodesic convex problem.
double normal_cone_probe(const ProblemSpec& problem, const Point& point, int probes,
                         std::uint64_t seed);

}  // namespace geoconvex
