#include "geoconvex/manifold.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace geoconvex {
namespace {

void require_same_manifold(const Point& p, const Point& q) {
  if (!(p.manifold() == q.manifold())) {
    throw Error(ErrorKind::ManifoldMismatch, "points live on different manifolds");
  }
}

Vector lift_to_hyperboloid(const Vector& x) {
  Vector out = x;
  out[0] = std::sqrt(1.0 + x.tail(x.size() - 1).squaredNorm());
  return out;
}

// sqrt of a nonnegative form value, clamping round-off below zero.
double safe_sqrt(double x) { return std::sqrt(std::max(x, 0.0)); }

}  // namespace

std::string_view to_string(ManifoldKind kind) noexcept {
  switch (kind) {
    case ManifoldKind::euclidean: return "euclidean";
    case ManifoldKind::sphere: return "sphere";
    case ManifoldKind::hyperboloid: return "hyperboloid";
  }
  return "unknown";
}

std::optional<ManifoldKind> parse_manifold_kind(std::string_view name) noexcept {
  if (name == "euclidean") return ManifoldKind::euclidean;
  if (name == "sphere") return ManifoldKind::sphere;
  if (name == "hyperboloid") return ManifoldKind::hyperboloid;
  return std::nullopt;
}

ManifoldSpec::ManifoldSpec(ManifoldKind kind, int dim) : kind_(kind), dim_(dim) {
  if (dim < 1) {
    throw Error(ErrorKind::InvalidManifold, "manifold dimension must be >= 1");
  }
}

double ambient_inner(ManifoldKind kind, const Vector& x, const Vector& y) {
  if (kind == ManifoldKind::hyperboloid) {
    return -x[0] * y[0] + x.tail(x.size() - 1).dot(y.tail(y.size() - 1));
  }
  return x.dot(y);
}

// ---------------------------------------------------------------- Point

Point Point::on(const ManifoldSpec& manifold, Vector coords) {
  if (coords.size() != manifold.ambient_dim()) {
    throw Error(ErrorKind::InvalidPoint, "coordinate vector length does not match ambient dimension");
  }
  if (!coords.allFinite()) {
    throw Error(ErrorKind::InvalidPoint, "non-finite coordinates");
  }
  Point p(manifold, std::move(coords));
  if (p.embedding_defect() > kPointTol) {
    std::ostringstream msg;
    msg << "point is off the " << to_string(manifold.kind())
        << " (defect " << p.embedding_defect() << ")";
    throw Error(ErrorKind::InvalidPoint, msg.str());
  }
  return p;
}

Point Point::snap(const ManifoldSpec& manifold, Vector coords, double max_defect) {
  if (coords.size() != manifold.ambient_dim()) {
    throw Error(ErrorKind::InvalidPoint, "coordinate vector length does not match ambient dimension");
  }
  if (!coords.allFinite()) {
    throw Error(ErrorKind::InvalidPoint, "non-finite coordinates");
  }
  Point raw(manifold, coords);
  if (raw.embedding_defect() > max_defect) {
    std::ostringstream msg;
    msg << "point is too far off the " << to_string(manifold.kind())
        << " to snap (defect " << raw.embedding_defect() << ")";
    throw Error(ErrorKind::InvalidPoint, msg.str());
  }
  switch (manifold.kind()) {
    case ManifoldKind::euclidean:
      break;
    case ManifoldKind::sphere:
      coords /= coords.norm();
      break;
    case ManifoldKind::hyperboloid:
      coords = lift_to_hyperboloid(coords);
      break;
  }
  return Point(manifold, std::move(coords));
}

double Point::embedding_defect() const {
  switch (manifold_.kind()) {
    case ManifoldKind::euclidean:
      return 0.0;
    case ManifoldKind::sphere:
      return std::abs(coords_.norm() - 1.0);
    case ManifoldKind::hyperboloid: {
      const double form = ambient_inner(ManifoldKind::hyperboloid, coords_, coords_);
      double defect = std::abs(form + 1.0);
      // Lower sheet is never on the manifold.
      if (coords_[0] <= 0.0) defect = std::max(defect, 1.0 + std::abs(coords_[0]));
      return defect;
    }
  }
  return 0.0;
}

bool same_point(const Point& a, const Point& b, double tol) {
  return a.manifold() == b.manifold() &&
         (a.coords() - b.coords()).lpNorm<Eigen::Infinity>() <= tol;
}

// -------------------------------------------------------- TangentVector

TangentVector TangentVector::at(const Point& base, Vector coords) {
  if (coords.size() != base.manifold().ambient_dim()) {
    throw Error(ErrorKind::InvalidTangent, "tangent vector length does not match ambient dimension");
  }
  TangentVector v(base, std::move(coords));
  // The Lorentz form of large hyperboloid coordinates carries proportional
  // round-off, so the bound scales with the operand magnitudes.
  const double scale = std::max(1.0, base.coords().lpNorm<Eigen::Infinity>() *
                                         v.coords_.lpNorm<Eigen::Infinity>());
  if (v.tangency_defect() > kTangentTol * scale) {
    throw Error(ErrorKind::InvalidTangent, "vector is not tangent at its base point");
  }
  return v;
}

TangentVector TangentVector::project(const Point& base, const Vector& ambient) {
  const auto kind = base.manifold().kind();
  const Vector& p = base.coords();
  switch (kind) {
    case ManifoldKind::euclidean:
      return TangentVector(base, ambient);
    case ManifoldKind::sphere:
      return TangentVector(base, ambient - p.dot(ambient) * p);
    case ManifoldKind::hyperboloid:
      // <p,p>_L = -1, so v + <p,v>_L p is Lorentz-orthogonal to p.
      return TangentVector(base, ambient + ambient_inner(kind, p, ambient) * p);
  }
  return TangentVector(base, ambient);
}

TangentVector TangentVector::zero(const Point& base) {
  return TangentVector(base, Vector::Zero(base.manifold().ambient_dim()));
}

double TangentVector::tangency_defect() const {
  const auto kind = base_.manifold().kind();
  if (kind == ManifoldKind::euclidean) return 0.0;
  return std::abs(ambient_inner(kind, base_.coords(), coords_));
}

TangentVector TangentVector::operator+(const TangentVector& other) const {
  if (!same_point(base_, other.base_)) {
    throw Error(ErrorKind::BasePointMismatch, "tangent vectors at different base points");
  }
  return TangentVector(base_, coords_ + other.coords_);
}

TangentVector TangentVector::operator-(const TangentVector& other) const {
  if (!same_point(base_, other.base_)) {
    throw Error(ErrorKind::BasePointMismatch, "tangent vectors at different base points");
  }
  return TangentVector(base_, coords_ - other.coords_);
}

Point Geodesic::at(double t) const { return exp_map(velocity * t); }

// ------------------------------------------------------------ geometry

double metric_inner(const TangentVector& u, const TangentVector& v) {
  if (!same_point(u.base(), v.base())) {
    throw Error(ErrorKind::BasePointMismatch, "metric_inner of vectors at different base points");
  }
  return ambient_inner(u.base().manifold().kind(), u.coords(), v.coords());
}

double norm(const TangentVector& v) { return safe_sqrt(metric_inner(v, v)); }

Point exp_map(const TangentVector& v) {
  const Point& p = v.base();
  const ManifoldSpec& m = p.manifold();
  if (m.kind() == ManifoldKind::euclidean) {
    return Point::on(m, p.coords() + v.coords());
  }
  const double n = norm(v);
  if (n == 0.0) return p;
  if (m.kind() == ManifoldKind::sphere) {
    if (n >= std::numbers::pi) {
      throw Error(ErrorKind::BeyondInjectivityRadius, "sphere exp beyond injectivity radius (|v| >= pi)");
    }
    const Vector x = std::cos(n) * p.coords() + (std::sin(n) / n) * v.coords();
    return Point::snap(m, x, 1e-6);
  }
  const Vector x = std::cosh(n) * p.coords() + (std::sinh(n) / n) * v.coords();
  return Point::snap(m, x, 1e-6 * std::max(1.0, x.squaredNorm()));
}

double dist(const Point& p, const Point& q) {
  require_same_manifold(p, q);
  const Vector& x = p.coords();
  const Vector& y = q.coords();
  switch (p.manifold().kind()) {
    case ManifoldKind::euclidean:
      return (x - y).norm();
    case ManifoldKind::sphere:
      // Same value as arccos(<p,q>) but accurate at both ends of [0, pi].
      return 2.0 * std::atan2((x - y).norm(), (x + y).norm());
    case ManifoldKind::hyperboloid: {
      // <p-q, p-q>_L = 2 cosh(d) - 2 = 4 sinh^2(d/2).
      const Vector w = x - y;
      return 2.0 * std::asinh(0.5 * safe_sqrt(ambient_inner(ManifoldKind::hyperboloid, w, w)));
    }
  }
  return 0.0;
}

TangentVector log_map(const Point& p, const Point& q) {
  require_same_manifold(p, q);
  const ManifoldSpec& m = p.manifold();
  if (p.coords() == q.coords()) return TangentVector::zero(p);
  if (m.kind() == ManifoldKind::euclidean) {
    return TangentVector::project(p, q.coords() - p.coords());
  }
  const double theta = dist(p, q);
  if (m.kind() == ManifoldKind::sphere && theta >= std::numbers::pi - kAntipodalGuard) {
    throw Error(ErrorKind::BeyondInjectivityRadius, "sphere log of (near-)antipodal points");
  }
  // Component of q orthogonal to p in the ambient form.
  const TangentVector u = TangentVector::project(p, q.coords());
  const double un = norm(u);
  if (un == 0.0) return TangentVector::zero(p);
  return u * (theta / un);
}

std::vector<TangentVector> tangent_basis(const Point& p) {
  const ManifoldSpec& m = p.manifold();
  const int n = m.dim();
  const int N = m.ambient_dim();
  std::vector<TangentVector> basis;
  basis.reserve(n);
  for (int i = 0; i < N && static_cast<int>(basis.size()) < n; ++i) {
    Vector e = Vector::Zero(N);
    e[i] = 1.0;
    TangentVector w = TangentVector::project(p, e);
    // Two Gram-Schmidt sweeps keep orthogonality at round-off level.
    for (int sweep = 0; sweep < 2; ++sweep) {
      for (const auto& b : basis) w = w - b * metric_inner(w, b);
      w = TangentVector::project(p, w.coords());
    }
    const double wn = norm(w);
    if (wn < 1e-8) continue;
    basis.push_back(w * (1.0 / wn));
  }
  return basis;
}

double convexity_radius_bound(const Point& p) {
  return p.manifold().kind() == ManifoldKind::sphere ? std::numbers::pi / 2.0 : kInfiniteRadius;
}

TangentVector random_unit_tangent(const Point& p, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  const auto basis = tangent_basis(p);
  for (;;) {
    Vector c = Vector::Zero(p.manifold().ambient_dim());
    for (const auto& b : basis) c += gauss(rng) * b.coords();
    TangentVector v = TangentVector::project(p, c);
    const double n = norm(v);
    if (n > 1e-12) return v * (1.0 / n);
  }
}

}  // namespace geoconvex
