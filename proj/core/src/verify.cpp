#include "geoconvex/verify.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <sstream>

#include "geoconvex/cones.hpp"
#include "geoconvex/corpus.hpp"
#include "geoconvex/kkt.hpp"
#include "geoconvex/oracle.hpp"
#include "geoconvex/region.hpp"
#include "geoconvex/separation.hpp"

namespace geoconvex {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr ManifoldKind kKinds[] = {ManifoldKind::euclidean, ManifoldKind::sphere,
                                   ManifoldKind::hyperboloid};

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t stream(std::uint64_t seed, int criterion, int sub) {
  return splitmix(splitmix(seed) ^ (static_cast<std::uint64_t>(criterion) << 32) ^
                  static_cast<std::uint64_t>(sub));
}

std::string kind_name(ManifoldKind k) { return std::string(to_string(k)); }

class Recorder {
 public:
  explicit Recorder(const VerifyOptions& options) : options_(options) {}

  void add(int criterion, std::string name, double measured, double tolerance,
           std::string relation = "<=", std::string note = {}) {
    CheckRecord r;
    r.criterion = criterion;
    r.name = std::move(name);
    r.measured = measured;
    r.tolerance = tolerance;
    r.relation = std::move(relation);
    r.note = std::move(note);
    const bool ok = r.relation == ">=" ? measured >= tolerance : measured <= tolerance;
    r.status = ok ? CheckStatus::pass : CheckStatus::fail;
    push(std::move(r));
  }

  void inconclusive(int criterion, std::string name, std::string note) {
    CheckRecord r;
    r.criterion = criterion;
    r.name = std::move(name);
    r.status = CheckStatus::inconclusive;
    r.measured = kInf;
    r.note = std::move(note);
    push(std::move(r));
  }

  std::vector<CheckRecord> take() { return std::move(records_); }

 private:
  void push(CheckRecord r) {
    if (options_.on_record) options_.on_record(r);
    records_.push_back(std::move(r));
  }

  const VerifyOptions& options_;
  std::vector<CheckRecord> records_;
};

Point random_point(const ManifoldSpec& m, std::mt19937_64& rng, double spread) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  if (m.kind() == ManifoldKind::sphere) {
    Vector x(m.ambient_dim());
    for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = gauss(rng);
    return Point::snap(m, x, kInf);
  }
  const Point o = corpus::origin(m);
  std::uniform_real_distribution<double> radius(0.0, spread);
  return exp_map(random_unit_tangent(o, rng) * radius(rng));
}

// Criterion 1.
void geometry_roundtrip(Recorder& rec, std::uint64_t seed) {
  for (ManifoldKind kind : kKinds) {
    const ManifoldSpec m(kind, 3);
    std::mt19937_64 rng(stream(seed, 1, static_cast<int>(kind)));
    const double vmax = kind == ManifoldKind::euclidean ? 5.0 : 3.0;
    std::uniform_real_distribution<double> len(0.0, vmax);
    double log_err = 0.0;
    double dist_err = 0.0;
    for (int i = 0; i < 1000; ++i) {
      const Point p = random_point(m, rng, 2.0);
      const TangentVector v = random_unit_tangent(p, rng) * len(rng);
      const Point q = exp_map(v);
      log_err = std::max(log_err, norm(log_map(p, q) - v));
      dist_err = std::max(dist_err, std::abs(dist(p, q) - norm(v)));
    }
    rec.add(1, "geometry_roundtrip.log." + kind_name(kind), log_err, 1e-8);
    rec.add(1, "geometry_roundtrip.dist." + kind_name(kind), dist_err, 1e-9);
  }
}

// Criterion 2.
void distance_convexity(Recorder& rec, std::uint64_t seed) {
  const double ts[] = {0.25, 0.5, 0.75};
  for (ManifoldKind kind : kKinds) {
    const ManifoldSpec m(kind, 2);
    std::mt19937_64 rng(stream(seed, 2, static_cast<int>(kind)));
    std::uniform_real_distribution<double> len(0.0, 1.0);
    double worst = -kInf;
    double worst_fixed = -kInf;
    for (int i = 0; i < 1000; ++i) {
      const Point p1 = random_point(m, rng, 1.0);
      const Point p2 = exp_map(random_unit_tangent(p1, rng) * len(rng));
      const Geodesic g1{p1, random_unit_tangent(p1, rng) * len(rng)};
      const Geodesic g2{p2, random_unit_tangent(p2, rng) * len(rng)};
      const double d0 = dist(g1.at(0.0), g2.at(0.0));
      const double d1 = dist(g1.at(1.0), g2.at(1.0));
      const double f0 = dist(g1.at(0.0), p2);
      const double f1 = dist(g1.at(1.0), p2);
      for (double t : ts) {
        worst = std::max(worst, dist(g1.at(t), g2.at(t)) - ((1.0 - t) * d0 + t * d1));
        worst_fixed = std::max(worst_fixed, dist(g1.at(t), p2) - ((1.0 - t) * f0 + t * f1));
      }
    }
    rec.add(2, "distance_convexity.pair." + kind_name(kind), worst, 1e-9);
    rec.add(2, "distance_convexity.fixed_point." + kind_name(kind), worst_fixed, 1e-9);
  }
}

// Criteria 3 and 5.
void projection_and_separation(Recorder& rec, std::uint64_t seed) {
  for (ManifoldKind kind : kKinds) {
    std::mt19937_64 rng(stream(seed, 3, static_cast<int>(kind)));
    int certified = 0;
    int errors = 0;
    std::string first_error;
    double worst_vi = -kInf;
    double worst_sup = -kInf;
    double worst_pv = 0.0;
    for (int i = 0; i < 100; ++i) {
      try {
        const corpus::RegionInstance inst = corpus::random_instance(kind, rng);
        ProjectOptions popts;
        popts.seed = static_cast<std::uint64_t>(i);
        std::optional<ProjectionResult> pr;
        try {
          pr = project(inst.region, inst.exterior, popts);
        } catch (const ProjectionNotCertified&) {
          continue;
        }
        ++certified;
        worst_vi = std::max(worst_vi, vi_check(inst.region, inst.exterior, pr->q_star, 64,
                                               static_cast<std::uint64_t>(i) + 7919));
        const SeparationCertificate sc =
            separate(inst.region, inst.exterior, 64, static_cast<std::uint64_t>(i));
        const double un = norm(sc.plane.direction());
        worst_sup = std::max(worst_sup, sc.set_sup / un);
        const double pv_err = sc.point_value > 0.0 ? std::abs(sc.point_value - un * un) : kInf;
        worst_pv = std::max(worst_pv, pv_err);
      } catch (const Error& e) {
        if (errors++ == 0) first_error = std::string(e.kind_name()) + ": " + e.what();
      }
    }
    const std::string k = kind_name(kind);
    if (errors > 0) rec.inconclusive(3, "projection_errors." + k, first_error);
    rec.add(3, "projection_vi." + k, worst_vi, 1e-6);
    rec.add(3, "projection_certified." + k, certified, 95, ">=");
    rec.add(5, "separation_sup_over_norm." + k, worst_sup, 1e-8);
    rec.add(5, "separation_point_value." + k, worst_pv, 1e-9);
  }
}

// Criterion 4.
void projection_vs_oracle(Recorder& rec, std::uint64_t seed) {
  for (ManifoldKind kind : kKinds) {
    std::mt19937_64 rng(stream(seed, 4, static_cast<int>(kind)));
    double worst = 0.0;
    std::string note;
    for (int i = 0; i < 10; ++i) {
      try {
        const corpus::RegionInstance inst = corpus::random_instance(kind, rng);
        ProjectOptions popts;
        popts.seed = static_cast<std::uint64_t>(i);
        const ProjectionResult pr = project(inst.region, inst.exterior, popts);
        const double ref = oracle::projection_distance(inst.region, inst.exterior);
        worst = std::max(worst, std::abs(pr.distance - ref));
      } catch (const Error& e) {
        worst = kInf;
        if (note.empty()) note = std::string(e.kind_name()) + ": " + e.what();
      }
    }
    rec.add(4, "projection_vs_oracle." + kind_name(kind), worst, 1e-4, "<=", note);
  }
}

// Criterion 6.
void supporting_planes(Recorder& rec, std::uint64_t seed) {
  std::mt19937_64 rng(stream(seed, 6, 0));
  int certified = 0;
  int other = 0;
  double worst_sup = -kInf;
  double worst_contain = 0.0;
  std::string note;
  for (int i = 0; i < 50; ++i) {
    const ManifoldKind kind = kKinds[i % 3];
    try {
      const corpus::RegionInstance inst = corpus::random_instance(kind, rng);
      const Point p = boundary_between(inst.region, inst.region.anchor(), inst.exterior);
      SupportOptions sopts;
      sopts.seed = static_cast<std::uint64_t>(i);
      const SupportResult sr = supporting_plane(inst.region, p, sopts);
      ++certified;
      worst_sup = std::max(worst_sup, sr.sup);
      worst_contain = std::max(worst_contain, std::abs(sr.plane.evaluate(p)));
    } catch (const SupportNotCertified& e) {
      if (note.empty()) {
        std::ostringstream os;
        os << "not certified after " << e.steps() << " steps, change " << e.last_change()
           << ", sup " << e.sup();
        note = os.str();
      }
    } catch (const Error& e) {
      ++other;
      if (note.empty()) note = std::string(e.kind_name()) + ": " + e.what();
    }
  }
  rec.add(6, "support_certified", certified, 48, ">=", note);
  rec.add(6, "support_sup", worst_sup, 1e-6);
  rec.add(6, "support_contains_base", worst_contain, 1e-10);
  (void)other;
}

// Boundary point where balls of radius r around c1 and c2 = exp_{c1}(r w) meet.
Point lens_corner(const Point& c1, const Point& c2, double r) {
  const Point mid = exp_map(log_map(c1, c2) * 0.5);
  const TangentVector along = log_map(mid, c2);
  TangentVector perp = TangentVector::zero(mid);
  for (const TangentVector& b : tangent_basis(mid)) {
    const TangentVector cand = b - along * (metric_inner(b, along) / metric_inner(along, along));
    if (norm(cand) > 1e-6) {
      perp = cand * (1.0 / norm(cand));
      break;
    }
  }
  double lo = 0.0;
  double hi = r;
  for (int i = 0; i < 200; ++i) {
    const double h = 0.5 * (lo + hi);
    (dist(exp_map(perp * h), c1) <= r ? lo : hi) = h;
  }
  return exp_map(perp * lo);
}

struct ConeSite {
  ConvexRegion region;
  Point p;
  std::string label;
};

std::vector<ConeSite> cone_sites(std::uint64_t seed) {
  std::vector<ConeSite> sites;
  for (ManifoldKind kind : kKinds) {
    const ManifoldSpec m(kind, 2);
    const Point o = corpus::origin(m);
    const double r = 0.5;
    const TangentVector w = tangent_basis(o)[0];
    const Point c2 = exp_map(w * r);
    const Point mid = exp_map(w * (0.5 * r));
    const std::string g1 = corpus::gdist_call(o) + " - " + corpus::number(r);
    const std::string g2 = corpus::gdist_call(c2) + " - " + corpus::number(r);
    // Smooth boundary point of a single ball.
    ConvexRegion ball = ConvexRegion::make(m, {corpus::expr(m, g1)}, o);
    sites.push_back({ball, exp_map(tangent_basis(o)[1] * r), "ball." + kind_name(kind)});
    // Corner of a lens.
    ConvexRegion lens = ConvexRegion::make(m, {corpus::expr(m, g1), corpus::expr(m, g2)}, mid);
    sites.push_back({lens, lens_corner(o, c2, r), "lens." + kind_name(kind)});
    // Random instances.
    std::mt19937_64 rng(stream(seed, 7, static_cast<int>(kind)));
    for (int i = 0; i < 2; ++i) {
      corpus::RegionInstance inst = corpus::random_instance(kind, rng);
      Point p = boundary_between(inst.region, inst.region.anchor(), inst.exterior);
      sites.push_back({std::move(inst.region), std::move(p), "random." + kind_name(kind)});
    }
  }
  return sites;
}

// Criterion 7.
void cone_duality(Recorder& rec, std::uint64_t seed) {
  int probes = 0;
  int counterexamples = 0;
  int undecided = 0;
  int excluded_sites = 0;
  int disagreements = 0;
  double worst_lin = -kInf;
  std::string note;
  const int per_site = 1000;
  for (const ConeSite& site : cone_sites(seed)) {
    const ProblemSpec cq_problem{corpus::expr(site.region.manifold(), "0"), site.region, site.p, {}};
    const CQReport cq = check_cq(cq_problem, site.p, 200, stream(seed, 7, 100));
    if (cq.fraction < 1.0) {
      ++excluded_sites;
      continue;
    }
    const GeneratedCone normal = normal_cone_generators(site.region, site.p);
    std::mt19937_64 rng(stream(seed, 7, 200 + probes));
    for (int i = 0; i < per_site; ++i) {
      const TangentVector v = random_unit_tangent(site.p, rng);
      const ConeProbe probe = tangent_cone_member(site.region, v);
      ++probes;
      const ConeProbe seq = tangent_cone_member_seq(site.region, v);
      if (probe.verdict != ConeVerdict::undecided && seq.verdict != ConeVerdict::undecided &&
          probe.verdict != seq.verdict) {
        ++disagreements;
      }
      if (probe.verdict == ConeVerdict::undecided) {
        ++undecided;
        continue;
      }
      const bool in_polar = polar_member(normal, probe.direction, 1e-6);
      const bool in = probe.verdict == ConeVerdict::in_tangent_cone;
      if (in != in_polar) {
        ++counterexamples;
        if (note.empty()) note = "counterexample at " + site.label;
      }
      if (in) {
        for (const TangentVector& g : normal.generators) {
          worst_lin = std::max(worst_lin, metric_inner(g, probe.direction));
        }
      }
    }
  }
  rec.add(7, "cone_duality.counterexamples", counterexamples, 0, "<=", note);
  rec.add(7, "cone_duality.probes", probes, 10000, ">=",
          std::to_string(undecided) + " undecided, " + std::to_string(excluded_sites) +
              " sites excluded by the constraint qualification test");
  rec.add(7, "cone_duality.sequence_disagreements", disagreements, 0);
  rec.add(7, "linearization_inclusion", worst_lin, 1e-6);

  // Nested lens inside ball: N_ball(p) must lie in the polar of T_lens(p).
  double worst_mono = 0.0;
  for (ManifoldKind kind : kKinds) {
    const ManifoldSpec m(kind, 2);
    const Point o = corpus::origin(m);
    const double r = 0.5;
    const TangentVector w = tangent_basis(o)[0];
    const Point c2 = exp_map(w * r);
    const Point mid = exp_map(w * (0.5 * r));
    const std::string g1 = corpus::gdist_call(o) + " - " + corpus::number(r);
    const std::string g2 = corpus::gdist_call(c2) + " - " + corpus::number(r);
    const ConvexRegion outer = ConvexRegion::make(m, {corpus::expr(m, g1)}, mid);
    const ConvexRegion inner = ConvexRegion::make(m, {corpus::expr(m, g1), corpus::expr(m, g2)}, mid);
    const Point p = lens_corner(o, c2, r);
    std::mt19937_64 rng(stream(seed, 7, 300 + static_cast<int>(kind)));
    GeneratedCone tangent{p, {}};
    for (int i = 0; i < 500; ++i) {
      const ConeProbe probe = tangent_cone_member(inner, random_unit_tangent(p, rng));
      if (probe.verdict == ConeVerdict::in_tangent_cone) tangent.generators.push_back(probe.direction);
    }
    const ConeInclusionReport report = cone_in_cone(normal_cone_generators(outer, p), tangent,
                                                    1000, stream(seed, 7, 400), 1e-8);
    worst_mono = std::max(worst_mono, report.max_violation);
  }
  rec.add(7, "normal_cone_monotonicity", worst_mono, 1e-8);
}

// Independent multipliers for the affine instances: least squares on the
// exact active normals.
std::vector<double> affine_oracle(const corpus::AffineInstance& inst) {
  Eigen::MatrixXd a(3, 2);
  a.col(0) = inst.normals[0];
  a.col(1) = inst.normals[1];
  const Eigen::VectorXd rhs = inst.c - inst.minimizer.coords();
  const Eigen::VectorXd lam = a.colPivHouseholderQr().solve(rhs);
  return {lam[0], lam[1], 0.0};
}

// Criteria 8, 9 and 10.
void optimality(Recorder& rec, std::uint64_t seed) {
  std::vector<std::pair<const ProblemSpec*, Point>> kkt_points;
  // Exact KKT points bound the FJ residual absolutely; approximate ones
  // (solver output) only by the rescaled KKT combination.
  double fj_worst = 0.0;
  double fj_consistency = -kInf;
  auto fj_consistent = [&](const ProblemSpec& problem, const KKTCertificate& kkt) {
    double total = 1.0;
    for (double l : kkt.multipliers) total += l;
    const double fj = check_fritz_john(problem, kkt.point).stationarity_residual;
    fj_consistency = std::max(fj_consistency, fj - kkt.stationarity_residual / total);
    return fj;
  };
  auto fj_at = [&](const ProblemSpec& problem, const Point& x) {
    fj_worst = std::max(fj_worst, fj_consistent(problem, check_kkt(problem, x)));
  };

  const ProblemSpec disk = corpus::disk_linear_problem();
  const Point disk_min = Point::on(disk.manifold(), Vector::Unit(2, 0) * -1.0);
  {
    const KKTCertificate c = check_kkt(disk, disk_min);
    rec.add(8, "kkt.disk_multiplier", c.certified ? std::abs(c.multipliers[0] - 0.5) : kInf, 1e-7);
    if (c.certified) fj_at(disk, disk_min);
  }
  const ProblemSpec cap = corpus::sphere_cap_problem();
  const Point cap_min = corpus::sphere_cap_minimizer();
  {
    const KKTCertificate c = check_kkt(cap, cap_min);
    rec.add(8, "kkt.sphere_cap_stationarity", c.certified ? c.stationarity_residual : kInf, 1e-5);
    if (c.certified) fj_at(cap, cap_min);
  }
  {
    std::mt19937_64 rng(stream(seed, 8, 0));
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
      const corpus::AffineInstance inst = corpus::random_affine_instance(rng);
      const KKTCertificate c = check_kkt(inst.problem, inst.minimizer);
      const std::vector<double> ref = affine_oracle(inst);
      double err = c.certified ? 0.0 : kInf;
      for (std::size_t k = 0; k < ref.size(); ++k) err = std::max(err, std::abs(c.multipliers[k] - ref[k]));
      worst = std::max(worst, err);
      if (c.certified) fj_at(inst.problem, inst.minimizer);
    }
    rec.add(8, "kkt.affine_vs_linear_solve", worst, 1e-7);
  }

  // Criterion 10, feeding criterion 9 with every certified solver output.
  Point hyp_target = corpus::origin(ManifoldSpec(ManifoldKind::hyperboloid, 2));
  const ProblemSpec hyp = corpus::hyperbolic_center_problem(&hyp_target);
  struct Case {
    const ProblemSpec* problem;
    Point target;
    std::string name;
  };
  const Case cases[] = {{&hyp, hyp_target, "solve.hyperbolic_center"},
                        {&disk, disk_min, "solve.disk_linear"},
                        {&cap, cap_min, "solve.sphere_cap"}};
  for (const Case& c : cases) {
    try {
      const SolveResult s = solve(*c.problem, seed);
      rec.add(10, c.name + ".distance", dist(s.point, c.target), 1e-4, "<=",
              std::string(to_string(s.stop)) + " after " + std::to_string(s.trace.size()) + " steps");
      rec.add(10, c.name + ".normal_cone",
              normal_cone_probe(*c.problem, s.point, 200, stream(seed, 10, 0)), 1e-5);
      const KKTCertificate kkt = check_kkt(*c.problem, s.point);
      if (kkt.certified) fj_consistent(*c.problem, kkt);
    } catch (const Error& e) {
      rec.inconclusive(10, c.name, std::string(e.kind_name()) + ": " + e.what());
    }
  }

  rec.add(9, "fritz_john.at_kkt_points", fj_worst, 1e-8);
  rec.add(9, "fritz_john.rescaled_kkt_consistency", fj_consistency, 1e-8);
  const ProblemSpec degenerate = corpus::degenerate_fj_problem();
  const KKTCertificate fj = check_fritz_john(degenerate, degenerate.start);
  const KKTCertificate kkt = check_kkt(degenerate, degenerate.start);
  rec.add(9, "fritz_john.degenerate_lambda0", fj.certified ? fj.lambda0 : kInf, 1e-8);
  rec.add(9, "fritz_john.degenerate_kkt_fails", kkt.certified ? 1.0 : 0.0, 0.0, "<=",
          "kkt residual " + corpus::number(kkt.stationarity_residual));
}

template <class F>
void guarded(Recorder& rec, int criterion, const char* name, F&& body) {
  try {
    body();
  } catch (const Error& e) {
    rec.inconclusive(criterion, name, std::string(e.kind_name()) + ": " + e.what());
  }
}

}  // namespace

std::string_view to_string(CheckStatus s) noexcept {
  switch (s) {
    case CheckStatus::pass: return "pass";
    case CheckStatus::fail: return "fail";
    case CheckStatus::inconclusive: return "inconclusive";
  }
  return "fail";
}

const std::vector<std::string>& criterion_titles() {
  static const std::vector<std::string> titles{
      "",
      "geometry roundtrip",
      "distance convexity",
      "projection variational inequality",
      "projection vs brute-force oracle",
      "separation",
      "supporting plane",
      "cone duality",
      "KKT certificates",
      "Fritz-John certificates",
      "solver sanity",
      "CLI determinism and exit codes",
  };
  return titles;
}

std::vector<CheckRecord> run_verification(const VerifyOptions& options) {
  Recorder rec(options);
  const std::uint64_t seed = options.seed;
  guarded(rec, 1, "geometry_roundtrip", [&] { geometry_roundtrip(rec, seed); });
  guarded(rec, 2, "distance_convexity", [&] { distance_convexity(rec, seed); });
  guarded(rec, 3, "projection", [&] { projection_and_separation(rec, seed); });
  guarded(rec, 4, "projection_vs_oracle", [&] { projection_vs_oracle(rec, seed); });
  guarded(rec, 6, "supporting_planes", [&] { supporting_planes(rec, seed); });
  guarded(rec, 7, "cone_duality", [&] { cone_duality(rec, seed); });
  guarded(rec, 8, "optimality", [&] { optimality(rec, seed); });
  std::vector<CheckRecord> records = rec.take();
  std::stable_sort(records.begin(), records.end(),
                   [](const CheckRecord& a, const CheckRecord& b) { return a.criterion < b.criterion; });
  return records;
}

CheckStatus criterion_status(const std::vector<CheckRecord>& records, int criterion) {
  bool any = false;
  bool inconclusive = false;
  for (const CheckRecord& r : records) {
    if (r.criterion != criterion) continue;
    any = true;
    if (r.status == CheckStatus::fail) return CheckStatus::fail;
    if (r.status == CheckStatus::inconclusive) inconclusive = true;
  }
  return (!any || inconclusive) ? CheckStatus::inconclusive : CheckStatus::pass;
}

}  // namespace geoconvex
