#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "geoconvex/manifold.hpp"
#include "geoconvex/region.hpp"

namespace geoconvex {

/// Working radius eps(p) for a member p. Throws NotInSet for exterior p.
double epsilon_of(const ConvexRegion& region, const Point& p);

enum class ConeVerdict { in_tangent_cone, not_in_tangent_cone, undecided };

std::string_view to_string(ConeVerdict v) noexcept;

struct ConeProbe {
  Point base;
  TangentVector direction;  // unit norm (zero for the zero probe)
  ConeVerdict verdict = ConeVerdict::undecided;
  std::optional<double> witness_t;
};

/// Probes exp_p(t_j v/|v|) at t_j = eps(p) 2^-j, j = 0..40. In at the first
/// interior hit; out when no probe is interior and some probe with
/// t <= 1e-6 eps(p) is exterior; undecided otherwise.
ConeProbe tangent_cone_member(const ConvexRegion& region, const TangentVector& v);

/// Sequence characterization: x_k = exp_p(t_k v/|v|), pulled back toward the
/// anchor when not interior, and the best nonnegative scaling alpha_k of
/// log_p x_k against v. In when some relative residual is <= 1e-8 (with the
/// corresponding t as witness), out when every residual is >= 1e-3.
ConeProbe tangent_cone_member_seq(const ConvexRegion& region, const TangentVector& v);

/// Finitely generated cone {sum lambda_i g_i : lambda_i >= 0} in T_base M.
struct GeneratedCone {
  Point base;
  std::vector<TangentVector> generators;
};

/// Active-set indices I(p) = {i : |g_i(p)| <= interior_tol}.
std::vector<int> active_set(const ConvexRegion& region, const Point& p);

/// Riemannian gradients of the active constraints at p (empty for interior p).
/// Throws NotInSet for exterior p.
GeneratedCone normal_cone_generators(const ConvexRegion& region, const Point& p);

/// True iff <u, g_i> <= tol |u| |g_i| for every generator.
bool polar_member(const GeneratedCone& cone, const TangentVector& u, double tol);

struct ConeInclusionReport {
  int samples = 0;
  double max_violation = 0.0;  // largest normalized <u, g> over samples u, polar generators g
  std::optional<TangentVector> counterexample;
  bool passed = true;
};

/// Samples nonnegative combinations of cone_a's generators and tests each
/// against the polar of `polar_of`.
ConeInclusionReport cone_in_cone(const GeneratedCone& cone_a, const GeneratedCone& polar_of,
                                 int samples, std::uint64_t seed, double tol = 1e-8);

struct NonnegCombination {
  std::vector<double> coefficients;
  double residual = 0.0;
  int iterations = 0;
};

class NNLSStalled : public Error {
 public:
  NNLSStalled(const std::string& message, NonnegCombination best)
      : Error(ErrorKind::NNLSStalled, message), best_(std::move(best)) {}

  const NonnegCombination& best() const noexcept { return best_; }

 private:
  NonnegCombination best_;
};

/// min_{lambda >= 0} |sum lambda_i g_i - target| in the metric at the cone's
/// base, by Lawson-Hanson active-set iterations on the Gram matrix
/// (at most 200 outer iterations, else NNLSStalled).
NonnegCombination nonneg_combination(const GeneratedCone& cone, const TangentVector& target);

/// Dense Lawson-Hanson on a Gram system: min lambda' G lambda - 2 c' lambda
/// subject to lambda >= 0. Exposed for the simplex/FJ code and tests.
struct GramNNLSResult {
  Eigen::VectorXd lambda;
  int iterations = 0;
  bool converged = false;
};
GramNNLSResult gram_nnls(const Eigen::MatrixXd& gram, const Eigen::VectorXd& rhs, int max_outer = 200);

/// Euclidean projection of a tangent vector onto {v : <a_i, v> <= 0} via the
/// Moreau decomposition with the cone generated by the a_i.
TangentVector project_onto_polar(const GeneratedCone& cone, const TangentVector& v);

}  // namespace geoconvex
