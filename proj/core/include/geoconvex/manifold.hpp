#pragma once

#include <Eigen/Core>

#include <optional>
#include <random>
#include <string_view>
#include <vector>

#include "geoconvex/error.hpp"

namespace geoconvex {

using Vector = Eigen::VectorXd;

enum class ManifoldKind { euclidean, sphere, hyperboloid };

std::string_view to_string(ManifoldKind kind) noexcept;
std::optional<ManifoldKind> parse_manifold_kind(std::string_view name) noexcept;

/// One member of the closed-form catalog: R^n, S^n in R^{n+1}, or the upper
/// sheet of the hyperboloid H^n in R^{n+1} with the Lorentz form.
class ManifoldSpec {
 public:
  /// Throws InvalidManifold when dim < 1.
  ManifoldSpec(ManifoldKind kind, int dim);

  ManifoldKind kind() const noexcept { return kind_; }
  int dim() const noexcept { return dim_; }
  int ambient_dim() const noexcept {
    return kind_ == ManifoldKind::euclidean ? dim_ : dim_ + 1;
  }

  friend bool operator==(const ManifoldSpec&, const ManifoldSpec&) = default;

 private:
  ManifoldKind kind_;
  int dim_;
};

/// Tolerances of the embedding invariants.
inline constexpr double kPointTol = 1e-12;
inline constexpr double kTangentTol = 1e-10;
/// Stand-in for an infinite convexity radius.
inline constexpr double kInfiniteRadius = 1e18;
/// Sphere log refuses pairs this close to antipodal.
inline constexpr double kAntipodalGuard = 1e-9;

/// Bilinear form of the ambient space: Euclidean dot, or Lorentz
/// -x0*y0 + sum_{i>=1} xi*yi for the hyperboloid.
double ambient_inner(ManifoldKind kind, const Vector& x, const Vector& y);

class Point {
 public:
  /// Validates the embedding equation to kPointTol; throws InvalidPoint.
  static Point on(const ManifoldSpec& manifold, Vector coords);

  /// Maps coordinates onto the embedding surface (normalization for the
  /// sphere, lifting the spatial part for the hyperboloid). Inputs whose
  /// defect exceeds `max_defect` are rejected with InvalidPoint.
  static Point snap(const ManifoldSpec& manifold, Vector coords, double max_defect = 1e-3);

  const ManifoldSpec& manifold() const noexcept { return manifold_; }
  const Vector& coords() const noexcept { return coords_; }
  double operator[](Eigen::Index i) const { return coords_[i]; }

  /// Residual of the embedding equation (0 for euclidean).
  double embedding_defect() const;

 private:
  Point(const ManifoldSpec& manifold, Vector coords)
      : manifold_(manifold), coords_(std::move(coords)) {}

  ManifoldSpec manifold_;
  Vector coords_;
};

bool same_point(const Point& a, const Point& b, double tol = kPointTol);

class TangentVector {
 public:
  /// Validates tangency; throws InvalidTangent.
  static TangentVector at(const Point& base, Vector coords);

  /// Orthogonal projection of an ambient vector onto T_base M.
  static TangentVector project(const Point& base, const Vector& ambient);

  static TangentVector zero(const Point& base);

  const Point& base() const noexcept { return base_; }
  const Vector& coords() const noexcept { return coords_; }

  /// Residual of the tangency condition.
  double tangency_defect() const;

  TangentVector operator*(double s) const { return TangentVector(base_, coords_ * s); }
  TangentVector operator-() const { return TangentVector(base_, -coords_); }
  /// Both operands must share the base point (BasePointMismatch).
  TangentVector operator+(const TangentVector& other) const;
  TangentVector operator-(const TangentVector& other) const;

 private:
  TangentVector(Point base, Vector coords) : base_(std::move(base)), coords_(std::move(coords)) {}

  Point base_;
  Vector coords_;
};

inline TangentVector operator*(double s, const TangentVector& v) { return v * s; }

struct Geodesic {
  Point base;
  TangentVector velocity;

  Point at(double t) const;
};

double metric_inner(const TangentVector& u, const TangentVector& v);
double norm(const TangentVector& v);

/// Closed-form exponential map. Sphere inputs with |v| >= pi throw
/// BeyondInjectivityRadius. The zero vector returns the base unchanged.
Point exp_map(const TangentVector& v);

/// Initial velocity of the minimal geodesic p -> q; |log_map(p, q)| = dist(p, q).
TangentVector log_map(const Point& p, const Point& q);

double dist(const Point& p, const Point& q);

/// `dim` metric-orthonormal tangent vectors from Gram-Schmidt over the
/// ambient standard basis.
std::vector<TangentVector> tangent_basis(const Point& p);

/// pi/2 on the sphere, kInfiniteRadius otherwise.
double convexity_radius_bound(const Point& p);

/// Uniformly distributed unit tangent direction.
TangentVector random_unit_tangent(const Point& p, std::mt19937_64& rng);

}  // namespace geoconvex
