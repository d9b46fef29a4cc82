#include <Eigen/Dense>

#include <cmath>
#include <vector>

#include "geoconvex/cones.hpp"

namespace geoconvex {

// Lawson-Hanson active-set NNLS expressed through the normal equations.
// `passive` holds the indices allowed to be positive.
GramNNLSResult gram_nnls(const Eigen::MatrixXd& gram, const Eigen::VectorXd& rhs, int max_outer) {
  const Eigen::Index n = rhs.size();
  GramNNLSResult out;
  out.lambda = Eigen::VectorXd::Zero(n);
  if (n == 0) {
    out.converged = true;
    return out;
  }
  const double scale = std::max({1.0, gram.diagonal().cwiseAbs().maxCoeff(), rhs.cwiseAbs().maxCoeff()});
  const double tol = 1e-13 * scale;

  std::vector<bool> passive(n, false);
  // Indices whose entry came out nonpositive right after being freed; they
  // stay out until x changes (the w_j = 0 retry of Lawson-Hanson), which
  // stops cycling on nearly dependent generators.
  std::vector<bool> blocked(n, false);
  Eigen::VectorXd& x = out.lambda;

  auto solve_passive = [&](Eigen::VectorXd& s) {
    std::vector<Eigen::Index> idx;
    for (Eigen::Index i = 0; i < n; ++i) if (passive[i]) idx.push_back(i);
    const Eigen::Index m = static_cast<Eigen::Index>(idx.size());
    Eigen::MatrixXd gpp(m, m);
    Eigen::VectorXd cp(m);
    for (Eigen::Index a = 0; a < m; ++a) {
      cp[a] = rhs[idx[a]];
      for (Eigen::Index b = 0; b < m; ++b) gpp(a, b) = gram(idx[a], idx[b]);
    }
    const Eigen::VectorXd sp = gpp.completeOrthogonalDecomposition().solve(cp);
    s = Eigen::VectorXd::Zero(n);
    for (Eigen::Index a = 0; a < m; ++a) s[idx[a]] = sp[a];
  };

  for (int outer = 0; outer < max_outer; ++outer) {
    out.iterations = outer + 1;
    // w is minus half the gradient of the quadratic.
    const Eigen::VectorXd w = rhs - gram * x;
    Eigen::Index best = -1;
    double best_w = tol;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (!passive[j] && !blocked[j] && w[j] > best_w) {
        best_w = w[j];
        best = j;
      }
    }
    if (best < 0) {
      out.converged = true;
      return out;
    }
    passive[best] = true;
    {
      Eigen::VectorXd s;
      solve_passive(s);
      if (!(s[best] > 0.0)) {
        passive[best] = false;
        blocked[best] = true;
        continue;
      }
    }
    std::fill(blocked.begin(), blocked.end(), false);

    for (int inner = 0; inner < 3 * static_cast<int>(n) + 3; ++inner) {
      Eigen::VectorXd s;
      solve_passive(s);
      bool feasible = true;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (passive[i] && s[i] <= 0.0) feasible = false;
      }
      if (feasible) {
        x = s;
        break;
      }
      // Step toward s until the first passive coefficient hits zero.
      double alpha = 1.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (passive[i] && s[i] <= 0.0) {
          const double denom = x[i] - s[i];
          if (denom > 0.0) alpha = std::min(alpha, x[i] / denom);
        }
      }
      x += alpha * (s - x);
      for (Eigen::Index i = 0; i < n; ++i) {
        if (passive[i] && x[i] <= tol) {
          passive[i] = false;
          x[i] = 0.0;
        }
      }
    }
  }
  return out;
}

NonnegCombination nonneg_combination(const GeneratedCone& cone, const TangentVector& target) {
  const auto& gens = cone.generators;
  const Eigen::Index n = static_cast<Eigen::Index>(gens.size());
  Eigen::MatrixXd gram(n, n);
  Eigen::VectorXd rhs(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    rhs[i] = metric_inner(gens[i], target);
    for (Eigen::Index j = 0; j <= i; ++j) {
      gram(i, j) = gram(j, i) = metric_inner(gens[i], gens[j]);
    }
  }
  const GramNNLSResult solved = gram_nnls(gram, rhs);

  NonnegCombination out;
  out.iterations = solved.iterations;
  out.coefficients.assign(solved.lambda.data(), solved.lambda.data() + n);
  TangentVector combo = -target;
  for (Eigen::Index i = 0; i < n; ++i) combo = combo + gens[i] * solved.lambda[i];
  out.residual = norm(combo);
  if (!solved.converged) {
    throw NNLSStalled("nonnegative least squares did not converge in 200 iterations", out);
  }
  return out;
}

TangentVector project_onto_polar(const GeneratedCone& cone, const TangentVector& v) {
  if (cone.generators.empty()) return v;
  const NonnegCombination nc = nonneg_combination(cone, v);
  TangentVector out = v;
  for (std::size_t i = 0; i < cone.generators.size(); ++i) {
    out = out - cone.generators[i] * nc.coefficients[i];
  }
  return out;
}

}  // namespace geoconvex
