#include "geoconvex/corpus.hpp"

#include <Eigen/Dense>

#include <charconv>
#include <cmath>
#include <sstream>

namespace geoconvex::corpus {
namespace {

const ManifoldSpec kPlane{ManifoldKind::euclidean, 2};
const ManifoldSpec kSphere{ManifoldKind::sphere, 2};
const ManifoldSpec kHyperbolic{ManifoldKind::hyperboloid, 2};

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

bool coin(std::mt19937_64& rng) { return std::bernoulli_distribution(0.5)(rng); }

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

// Center, up to two radii, and anchor for the curved families.
RegionInstance ball_family(const ManifoldSpec& m, std::mt19937_64& rng) {
  const bool sphere = m.kind() == ManifoldKind::sphere;
  const Point o = origin(m);
  Point c = o;
  if (sphere) {
    Vector x(3);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int i = 0; i < 3; ++i) x[i] = gauss(rng);
    c = Point::snap(m, x, 1e18);
  } else {
    c = exp_map(random_unit_tangent(o, rng) * uniform(rng, 0.0, 1.0));
  }
  const double r = sphere ? uniform(rng, 0.3, 1.0) : uniform(rng, 0.3, 1.5);
  std::vector<ExprAst> gs{expr(m, gdist_call(c) + " - " + number(r))};
  std::ostringstream desc;
  desc << (sphere ? "cap" : "ball") << " r=" << number(r);
  if (coin(rng)) {
    const double r2 = sphere ? uniform(rng, 0.3, 1.0) : uniform(rng, 0.3, 1.5);
    const Point c2 = exp_map(random_unit_tangent(c, rng) * (0.5 * r2 * uniform(rng, 0.0, 1.0)));
    gs.push_back(expr(m, gdist_call(c2) + " - " + number(r2)));
    desc << " + second r=" << number(r2);
  }
  const double reach = sphere ? uniform(rng, r + 0.1, 1.3) : uniform(rng, r + 0.1, r + 2.0);
  Point q = exp_map(random_unit_tangent(c, rng) * reach);
  ConvexRegion region = ConvexRegion::make(m, std::move(gs), c);
  return RegionInstance{std::move(region), std::move(q), desc.str()};
}

RegionInstance plane_family(std::mt19937_64& rng) {
  const double c1 = uniform(rng, -1.0, 1.0);
  const double c2 = uniform(rng, -1.0, 1.0);
  const double a = uniform(rng, 0.5, 2.0);
  const double b = uniform(rng, 0.5, 2.0);
  const double phi = uniform(rng, 0.0, M_PI);
  const double cs = std::cos(phi);
  const double sn = std::sin(phi);
  const std::string dx = "(x1 - (" + number(c1) + "))";
  const std::string dy = "(x2 - (" + number(c2) + "))";
  const std::string u = "(" + dx + "*" + number(cs) + " + " + dy + "*" + number(sn) + ")";
  const std::string v = "(" + dy + "*" + number(cs) + " - " + dx + "*" + number(sn) + ")";
  std::vector<ExprAst> gs{
      expr(kPlane, u + "^2/" + number(a * a) + " + " + v + "^2/" + number(b * b) + " - 1")};
  std::ostringstream desc;
  desc << "ellipse a=" << number(a) << " b=" << number(b);
  if (coin(rng)) {
    const double psi = uniform(rng, 0.0, 2.0 * M_PI);
    const double s = uniform(rng, 0.2, 0.8) * std::min(a, b);
    gs.push_back(expr(kPlane, number(std::cos(psi)) + "*" + dx + " + " + number(std::sin(psi)) +
                                  "*" + dy + " - " + number(s)));
    desc << " + cut s=" << number(s);
  }
  const double theta = uniform(rng, 0.0, 2.0 * M_PI);
  const double reach = uniform(rng, 1.2, 3.0) * std::max(a, b);
  Point q = Point::on(kPlane, vec({c1 + reach * std::cos(theta), c2 + reach * std::sin(theta)}));
  ConvexRegion region = ConvexRegion::make(kPlane, std::move(gs), Point::on(kPlane, vec({c1, c2})));
  return RegionInstance{std::move(region), std::move(q), desc.str()};
}

}  // namespace

std::string number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string gdist_call(const Point& c) {
  std::string s = "gdist(";
  for (Eigen::Index i = 0; i < c.coords().size(); ++i) {
    if (i > 0) s += ", ";
    s += number(c[i]);
  }
  return s + ")";
}

ExprAst expr(const ManifoldSpec& m, const std::string& source) {
  return parse(source, m.ambient_dim());
}

Point origin(const ManifoldSpec& m) {
  Vector x = Vector::Zero(m.ambient_dim());
  if (m.kind() != ManifoldKind::euclidean) x[0] = 1.0;
  return Point::on(m, x);
}

Point sphere_axis(int dim, int axis) {
  Vector x = Vector::Zero(dim + 1);
  x[axis] = 1.0;
  return Point::on(ManifoldSpec(ManifoldKind::sphere, dim), x);
}

ConvexRegion unit_disk() {
  return ConvexRegion::make(kPlane, {expr(kPlane, "x1^2 + x2^2 - 1")}, origin(kPlane));
}

ConvexRegion sphere_cap(double radius) {
  return ConvexRegion::make(kSphere, {expr(kSphere, "gdist(1, 0, 0) - " + number(radius))},
                            origin(kSphere));
}

ConvexRegion hyperbolic_ball(double radius) {
  return ConvexRegion::make(kHyperbolic,
                            {expr(kHyperbolic, "gdist(1, 0, 0) - " + number(radius))},
                            origin(kHyperbolic));
}

RegionInstance random_instance(ManifoldKind kind, std::mt19937_64& rng) {
  switch (kind) {
    case ManifoldKind::euclidean: return plane_family(rng);
    case ManifoldKind::sphere: return ball_family(kSphere, rng);
    case ManifoldKind::hyperboloid: return ball_family(kHyperbolic, rng);
  }
  throw Error(ErrorKind::InvalidManifold, "unknown manifold kind");
}

ProblemSpec disk_linear_problem() {
  return ProblemSpec{expr(kPlane, "x1"), unit_disk(), Point::on(kPlane, vec({0.0, 0.5})), {}};
}

ProblemSpec sphere_cap_problem() {
  return ProblemSpec{expr(kSphere, "gdist(0, 0, 1)^2"), sphere_cap(0.5),
                     Point::snap(kSphere, vec({0.995, 0.0998, 0.0})), {}};
}

Point sphere_cap_minimizer() {
  return Point::snap(kSphere, vec({std::cos(0.5), 0.0, std::sin(0.5)}));
}

ProblemSpec hyperbolic_center_problem(Point* target) {
  const Point o = origin(kHyperbolic);
  const Point a = exp_map(TangentVector::at(o, vec({0.0, 0.3, -0.2})));
  if (target != nullptr) *target = a;
  const Point start = exp_map(TangentVector::at(o, vec({0.0, -0.5, 0.6})));
  return ProblemSpec{expr(kHyperbolic, gdist_call(a) + "^2"), hyperbolic_ball(1.0), start, {}};
}

ProblemSpec degenerate_fj_problem() {
  RegionOptions opts;
  opts.convexity = ConvexityCheck::trust_declared;
  ConvexRegion region =
      ConvexRegion::make(kPlane, {expr(kPlane, "(x1 - 1)^3")}, origin(kPlane), opts);
  return ProblemSpec{expr(kPlane, "-x1"), std::move(region), Point::on(kPlane, vec({1.0, 0.0})), {}};
}

ProblemSpec cusp_problem() {
  RegionOptions opts;
  opts.convexity = ConvexityCheck::trust_declared;
  ConvexRegion region = ConvexRegion::make(
      kPlane, {expr(kPlane, "x2 - x1^3"), expr(kPlane, "-x2 - x1^3")},
      Point::on(kPlane, vec({0.5, 0.0})), opts);
  return ProblemSpec{expr(kPlane, "x1"), std::move(region), Point::on(kPlane, vec({0.0, 0.0})), {}};
}

AffineInstance random_affine_instance(std::mt19937_64& rng) {
  const ManifoldSpec m(ManifoldKind::euclidean, 3);
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto rand_vec = [&] {
    Eigen::VectorXd v(3);
    for (int i = 0; i < 3; ++i) v[i] = gauss(rng);
    return v;
  };
  const Eigen::VectorXd xbar = rand_vec();
  std::vector<Eigen::VectorXd> normals{rand_vec().normalized(), rand_vec().normalized(),
                                       rand_vec().normalized()};
  const double slack = uniform(rng, 0.5, 1.5);
  std::vector<double> offsets{normals[0].dot(xbar), normals[1].dot(xbar),
                              normals[2].dot(xbar) + slack};
  const double l1 = uniform(rng, 0.2, 2.0);
  const double l2 = uniform(rng, 0.2, 2.0);
  const Eigen::VectorXd c = xbar + l1 * normals[0] + l2 * normals[1];

  // Anchor: step back from xbar along d with a_1.d = a_2.d = 1.
  Eigen::MatrixXd a(2, 3);
  a.row(0) = normals[0].transpose();
  a.row(1) = normals[1].transpose();
  const Eigen::VectorXd d = a.completeOrthogonalDecomposition().solve(Eigen::VectorXd::Ones(2));
  const double tau = std::min(0.5, 0.5 * slack / (std::abs(normals[2].dot(d)) + 1e-12));
  const Eigen::VectorXd anchor = xbar - tau * d;

  auto affine = [&](int i) {
    std::string s;
    for (int k = 0; k < 3; ++k) {
      if (k > 0) s += " + ";
      s += number(normals[static_cast<std::size_t>(i)][k]) + "*x" + std::to_string(k + 1);
    }
    return s + " - (" + number(offsets[static_cast<std::size_t>(i)]) + ")";
  };
  std::string f = "0.5*(";
  for (int k = 0; k < 3; ++k) {
    if (k > 0) f += " + ";
    f += "(x" + std::to_string(k + 1) + " - (" + number(c[k]) + "))^2";
  }
  f += ")";
  ConvexRegion region = ConvexRegion::make(
      m, {expr(m, affine(0)), expr(m, affine(1)), expr(m, affine(2))}, Point::on(m, anchor));
  Point xb = Point::on(m, xbar);
  return AffineInstance{ProblemSpec{expr(m, f), std::move(region), xb, {}}, xb, normals, offsets, c};
}

}  // namespace geoconvex::corpus
