#include "geoconvex/kkt.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace geoconvex {
namespace {

constexpr double kArmijoC = 1e-4;
constexpr double kMinMove = 1e-10;
constexpr int kMaxHalvings = 60;
constexpr int kSimplexIterations = 1000;
constexpr double kNudge = 1e-3;
constexpr int kSettleRounds = 3;

double checked_value(const ExprAst& f, const Point& x) {
  const double v = evaluate(f, x);
  if (!std::isfinite(v)) throw Error(ErrorKind::NumericalBreakdown, "objective is not finite");
  return v;
}

TangentVector checked_grad(const ExprAst& f, const Point& x) {
  TangentVector g = riemannian_grad(f, x);
  if (!g.coords().allFinite()) {
    throw Error(ErrorKind::NumericalBreakdown, "objective gradient is not finite");
  }
  return g;
}

TangentVector floored(TangentVector g) {
  return norm(g) <= kFlatGradient ? TangentVector::zero(g.base()) : g;
}

// Newton correction onto {g_i = 0 : i active}. Projections land anywhere in
// the +-interior_tol band, and that band noise in f swamps the tangential
// decrease near a boundary minimizer. Kept only when the active values shrink.
Point settle_on_boundary(const ConvexRegion& region, Point x) {
  for (int round = 0; round < kSettleRounds; ++round) {
    if (member(region, x) != Membership::boundary) return x;
    const std::vector<double> gvals = region.constraint_values(x);
    std::vector<TangentVector> grads;
    std::vector<double> vals;
    double before = 0.0;
    for (std::size_t i = 0; i < gvals.size(); ++i) {
      if (std::abs(gvals[i]) > region.interior_tol()) continue;
      TangentVector gi = floored(riemannian_grad(region.constraints()[i], x));
      if (norm(gi) == 0.0) continue;
      grads.push_back(std::move(gi));
      vals.push_back(gvals[i]);
      before = std::max(before, std::abs(gvals[i]));
    }
    if (grads.empty() || before == 0.0) return x;
    const Eigen::Index n = static_cast<Eigen::Index>(grads.size());
    Eigen::MatrixXd gram(n, n);
    Eigen::VectorXd rhs(n);
    for (Eigen::Index a = 0; a < n; ++a) {
      rhs[a] = vals[static_cast<std::size_t>(a)];
      for (Eigen::Index b = 0; b < n; ++b) {
        gram(a, b) = metric_inner(grads[static_cast<std::size_t>(a)], grads[static_cast<std::size_t>(b)]);
      }
    }
    const Eigen::VectorXd mu = gram.completeOrthogonalDecomposition().solve(rhs);
    if (!mu.allFinite()) return x;
    TangentVector step = TangentVector::zero(x);
    for (Eigen::Index a = 0; a < n; ++a) step = step - grads[static_cast<std::size_t>(a)] * mu[a];
    Point y = exp_map(step);
    if (member(region, y) == Membership::exterior) return x;
    const std::vector<double> gy = region.constraint_values(y);
    double after = 0.0;
    for (std::size_t i = 0; i < gvals.size(); ++i) {
      if (std::abs(gvals[i]) <= region.interior_tol()) after = std::max(after, std::abs(gy[i]));
    }
    if (after >= before) return x;
    x = std::move(y);
  }
  return x;
}

Point feasible_start(const ProblemSpec& problem, std::uint64_t seed) {
  if (member(problem.region, problem.start) != Membership::exterior) return problem.start;
  ProjectOptions opts;
  opts.seed = seed;
  return settle_on_boundary(problem.region, project(problem.region, problem.start, opts).q_star);
}

// Trial step along -grad f, halved until it stays inside the injectivity
// limit and the projection neighborhood.
std::optional<Point> trial_point(const ProblemSpec& problem, const TangentVector& g, double t) {
  const Point& anchor = problem.region.anchor();
  const double limit = 0.9 * convexity_radius_bound(anchor);
  const bool sphere = problem.manifold().kind() == ManifoldKind::sphere;
  if (sphere && t * norm(g) >= M_PI) return std::nullopt;
  Point y = exp_map(g * (-t));
  if (dist(y, anchor) > limit) return std::nullopt;
  return y;
}

// Minimizer of |sum lambda_i h_i|^2 over the probability simplex.
Eigen::VectorXd simplex_min(const Eigen::MatrixXd& gram) {
  const Eigen::Index m = gram.rows();
  Eigen::VectorXd lam = Eigen::VectorXd::Constant(m, 1.0 / static_cast<double>(m));
  const double lmax = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(gram, Eigen::EigenvaluesOnly)
                          .eigenvalues()
                          .maxCoeff();
  auto objective = [&](const Eigen::VectorXd& l) { return l.dot(gram * l); };
  auto project_simplex = [](Eigen::VectorXd v) {
    std::vector<double> s(v.data(), v.data() + v.size());
    std::sort(s.begin(), s.end(), std::greater<>());
    double cum = 0.0;
    double theta = 0.0;
    for (std::size_t k = 0; k < s.size(); ++k) {
      cum += s[k];
      const double cand = (cum - 1.0) / static_cast<double>(k + 1);
      if (s[k] - cand > 0.0) theta = cand;
    }
    return Eigen::VectorXd((v.array() - theta).max(0.0));
  };
  if (lmax > 0.0) {
    const double step = 1.0 / (2.0 * lmax);
    for (int it = 0; it < kSimplexIterations; ++it) {
      lam = project_simplex(lam - step * 2.0 * (gram * lam));
    }
  }
  // Exact solve on the support of the iterate; kept only when it stays in
  // the simplex and does not increase the objective.
  std::vector<Eigen::Index> support;
  for (Eigen::Index i = 0; i < m; ++i) if (lam[i] > 1e-12) support.push_back(i);
  const Eigen::Index s = static_cast<Eigen::Index>(support.size());
  Eigen::MatrixXd sys = Eigen::MatrixXd::Zero(s + 1, s + 1);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(s + 1);
  for (Eigen::Index a = 0; a < s; ++a) {
    for (Eigen::Index b = 0; b < s; ++b) sys(a, b) = gram(support[a], support[b]);
    sys(a, s) = sys(s, a) = 1.0;
  }
  rhs[s] = 1.0;
  const Eigen::VectorXd sol = sys.completeOrthogonalDecomposition().solve(rhs);
  Eigen::VectorXd polished = Eigen::VectorXd::Zero(m);
  bool ok = sol.allFinite();
  for (Eigen::Index a = 0; ok && a < s; ++a) {
    if (sol[a] < 0.0) ok = false;
    polished[support[a]] = sol[a];
  }
  if (ok && std::abs(polished.sum() - 1.0) <= 1e-12 && objective(polished) <= objective(lam)) {
    return polished;
  }
  return lam;
}

// Probe verdict, falling back to the sequence test when the probe is undecided.
ConeVerdict combined_verdict(const ConvexRegion& region, const TangentVector& v) {
  const ConeVerdict a = tangent_cone_member(region, v).verdict;
  if (a != ConeVerdict::undecided) return a;
  return tangent_cone_member_seq(region, v).verdict;
}

}  // namespace

std::string_view to_string(SolveStop s) noexcept {
  switch (s) {
    case SolveStop::small_move: return "small_move";
    case SolveStop::stationary: return "stationary";
    case SolveStop::line_search: return "line_search";
    case SolveStop::max_iters: return "max_iters";
  }
  return "max_iters";
}

std::string_view to_string(CertificateMode m) noexcept {
  return m == CertificateMode::kkt ? "kkt" : "fritz_john";
}

SolveResult solve(const ProblemSpec& problem, std::uint64_t seed) {
  const SolverTolerances& tol = problem.tolerances;
  ProjectOptions popts;
  popts.seed = seed;

  Point x = feasible_start(problem, seed);
  double fx = checked_value(problem.objective, x);
  SolveResult result{x, {}};
  for (int it = 0; it < tol.max_iters; ++it) {
    const TangentVector g = checked_grad(problem.objective, x);
    std::optional<Point> next;
    double fnext = 0.0;
    double t = tol.step_init;
    for (int h = 0; h < kMaxHalvings; ++h, t *= 0.5) {
      const std::optional<Point> y = trial_point(problem, g, t);
      if (!y) continue;
      Point cand = settle_on_boundary(problem.region, project(problem.region, *y, popts).q_star);
      const double fc = checked_value(problem.objective, cand);
      if (fc <= fx + kArmijoC * metric_inner(g, log_map(x, cand))) {
        next = std::move(cand);
        fnext = fc;
        break;
      }
    }
    if (!next) {
      result.stop = SolveStop::line_search;
      break;
    }
    const double moved = dist(x, *next);
    result.stationarity = moved / t;
    result.trace.push_back(SolveStep{it, fnext, t, moved});
    x = std::move(*next);
    fx = fnext;
    result.point = x;
    if (moved <= kMinMove) {
      result.stop = SolveStop::small_move;
      break;
    }
    if (result.stationarity <= tol.stationarity_tol) {
      result.stop = SolveStop::stationary;
      break;
    }
  }
  result.point = x;
  return result;
}

KKTCertificate check_kkt(const ProblemSpec& problem, const Point& point) {
  const ConvexRegion& region = problem.region;
  const std::size_t l = region.constraints().size();
  const std::vector<double> gvals = region.constraint_values(point);
  const TangentVector gf = checked_grad(problem.objective, point);

  KKTCertificate cert{point, CertificateMode::kkt, 1.0, {}, {}, 0.0, {}};
  cert.mode = CertificateMode::kkt;
  cert.multipliers.assign(l, 0.0);
  cert.active = active_set(region, point);
  cert.feasible = *std::max_element(gvals.begin(), gvals.end()) <= region.interior_tol();

  GeneratedCone cone{point, {}};
  for (int i : cert.active) {
    cone.generators.push_back(floored(riemannian_grad(region.constraints()[static_cast<std::size_t>(i)], point)));
  }
  const NonnegCombination nc = nonneg_combination(cone, -gf);
  TangentVector combo = gf;
  for (std::size_t k = 0; k < cert.active.size(); ++k) {
    const double lam = norm(cone.generators[k]) == 0.0 ? 0.0 : nc.coefficients[k];
    cert.multipliers[static_cast<std::size_t>(cert.active[k])] = lam;
    combo = combo + cone.generators[k] * lam;
  }
  cert.stationarity_residual = norm(combo);
  double worst = 0.0;
  cert.complementarity.resize(l);
  for (std::size_t i = 0; i < l; ++i) {
    cert.complementarity[i] = cert.multipliers[i] * gvals[i];
    worst = std::max(worst, std::abs(cert.complementarity[i]));
  }
  cert.certified = cert.feasible &&
                   cert.stationarity_residual <= problem.tolerances.stationarity_tol &&
                   worst <= problem.tolerances.complementarity_tol;
  return cert;
}

KKTCertificate check_fritz_john(const ProblemSpec& problem, const Point& point) {
  const ConvexRegion& region = problem.region;
  const std::size_t l = region.constraints().size();
  const std::vector<double> gvals = region.constraint_values(point);

  KKTCertificate cert{point, CertificateMode::kkt, 1.0, {}, {}, 0.0, {}};
  cert.mode = CertificateMode::fritz_john;
  cert.multipliers.assign(l, 0.0);
  cert.active = active_set(region, point);
  cert.feasible = *std::max_element(gvals.begin(), gvals.end()) <= region.interior_tol();

  std::vector<TangentVector> h{floored(checked_grad(problem.objective, point))};
  for (int i : cert.active) {
    h.push_back(floored(riemannian_grad(region.constraints()[static_cast<std::size_t>(i)], point)));
  }
  const Eigen::Index m = static_cast<Eigen::Index>(h.size());
  Eigen::MatrixXd gram(m, m);
  for (Eigen::Index a = 0; a < m; ++a) {
    for (Eigen::Index b = 0; b <= a; ++b) gram(a, b) = gram(b, a) = metric_inner(h[a], h[b]);
  }
  if (!gram.allFinite()) throw Error(ErrorKind::NumericalBreakdown, "gradient Gram matrix is not finite");
  const Eigen::VectorXd lam = simplex_min(gram);

  cert.lambda0 = lam[0];
  TangentVector combo = h[0] * lam[0];
  for (std::size_t k = 0; k < cert.active.size(); ++k) {
    const double v = lam[static_cast<Eigen::Index>(k + 1)];
    cert.multipliers[static_cast<std::size_t>(cert.active[k])] = v;
    combo = combo + h[k + 1] * v;
  }
  cert.stationarity_residual = norm(combo);
  cert.complementarity.resize(l);
  for (std::size_t i = 0; i < l; ++i) cert.complementarity[i] = cert.multipliers[i] * gvals[i];
  cert.certified = cert.stationarity_residual <= problem.tolerances.stationarity_tol;
  return cert;
}

CQReport check_cq(const ProblemSpec& problem, const Point& point, int probes, std::uint64_t seed) {
  const ConvexRegion& region = problem.region;
  if (member(region, point) != Membership::boundary) {
    throw Error(ErrorKind::NotBoundaryPoint, "constraint qualification is checked at boundary points");
  }
  const GeneratedCone cone = normal_cone_generators(region, point);
  TangentVector inward = TangentVector::zero(point);
  for (const TangentVector& g : cone.generators) {
    const double n = norm(g);
    if (n > kFlatGradient) inward = inward - g * (1.0 / n);
  }

  CQReport report;
  std::mt19937_64 rng(seed);
  const int max_draws = 20 * std::max(probes, 1);
  for (int d = 0; d < max_draws && report.probes < probes; ++d) {
    const TangentVector v = project_onto_polar(cone, random_unit_tangent(point, rng));
    const double vn = norm(v);
    if (vn <= 1e-12) continue;
    ++report.probes;
    const ConeVerdict verdict = combined_verdict(region, v);
    if (verdict == ConeVerdict::in_tangent_cone) {
      ++report.inside;
      continue;
    }
    if (norm(inward) > 0.0 &&
        combined_verdict(region, v + inward * (kNudge * vn)) == ConeVerdict::in_tangent_cone) {
      ++report.inside;
      continue;
    }
    if (verdict == ConeVerdict::not_in_tangent_cone) {
      ++report.counterexamples;
      if (!report.counterexample) report.counterexample = v * (1.0 / vn);
    } else {
      ++report.undecided;
    }
  }
  report.fraction = report.probes > 0 ? static_cast<double>(report.inside) / report.probes : 0.0;
  return report;
}

double normal_cone_probe(const ProblemSpec& problem, const Point& point, int probes,
                         std::uint64_t seed) {
  const TangentVector gf = checked_grad(problem.objective, point);
  double sup = -std::numeric_limits<double>::infinity();
  for (const Point& z : sample_interior(problem.region, probes, seed)) {
    sup = std::max(sup, -metric_inner(gf, log_map(point, z)));
  }
  return sup;
}

}  // namespace geoconvex
