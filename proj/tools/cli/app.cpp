#include "app.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include "geoconvex/cones.hpp"
#include "geoconvex/kkt.hpp"
#include "geoconvex/region.hpp"
#include "geoconvex/separation.hpp"
#include "geoconvex/verify.hpp"
#include "problem_file.hpp"
#include "samples.hpp"

namespace geoconvex::cli {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Context {
  const Invocation& inv;
  const ProblemFile& file;
  std::uint64_t seed;
  Report& report;
  std::ostream& log;

  int probes(int fallback) const { return inv.probes.value_or(fallback); }
};

std::string describe(const Point& p) {
  std::ostringstream os;
  os << '(';
  for (Eigen::Index i = 0; i < p.coords().size(); ++i) {
    if (i > 0) os << ", ";
    os << p[i];
  }
  os << ')';
  return os.str();
}

Point require_point(const Context& ctx) {
  if (!ctx.inv.point) {
    throw Error(ErrorKind::InvalidArgument, ctx.inv.command + " requires --point");
  }
  return make_point(ctx.file.manifold, parse_coordinates(*ctx.inv.point));
}

Json to_json(const std::vector<double>& xs) {
  Json arr = Json::array();
  for (double x : xs) arr.push_back(std::isfinite(x) ? Json(x) : Json(nullptr));
  return arr;
}

void cmd_project(const Context& ctx) {
  const ConvexRegion region = build_region(ctx.file);
  const Point q = require_point(ctx);
  const Membership m = member(region, q);
  ctx.report.set("membership", std::string(to_string(m)));
  if (m != Membership::exterior) {
    ctx.report.set_point("q_star", q);
    ctx.report.set("distance", 0.0);
    ctx.report.check("projection.identity_distance", 0.0, 0.0);
    ctx.log << "point is " << to_string(m) << "; projection is the point itself\n";
    return;
  }
  ProjectOptions opts;
  opts.seed = ctx.seed;
  opts.probes = ctx.probes(64);
  try {
    const ProjectionResult r = project(region, q, opts);
    ctx.report.set_point("q_star", r.q_star);
    ctx.report.set("distance", r.distance);
    ctx.report.set("vi_residual", r.vi_residual);
    ctx.report.set("iterations", r.iterations);
    ctx.report.set("converged", r.converged);
    ctx.report.check("projection.vi_residual", r.vi_residual, opts.vi_tol);
    ctx.log << "q* = " << describe(r.q_star) << ", distance " << r.distance << ", vi residual "
            << r.vi_residual << '\n';
  } catch (const ProjectionNotCertified& e) {
    const ProjectionResult& best = e.best();
    ctx.report.set_point("q_star", best.q_star);
    ctx.report.set("distance", best.distance);
    ctx.report.set("vi_residual", best.vi_residual);
    ctx.report.set("iterations", best.iterations);
    ctx.report.set("converged", best.converged);
    ctx.report.inconclusive("projection.vi_residual", best.vi_residual, opts.vi_tol);
    ctx.report.error(e);
    ctx.log << "projection not certified: " << e.what() << '\n';
  }
}

void cmd_separate(const Context& ctx) {
  const ConvexRegion region = build_region(ctx.file);
  const Point y = require_point(ctx);
  const SeparationCertificate cert = separate(region, y, ctx.probes(500), ctx.seed);
  const TangentVector& u = cert.plane.direction();
  const double un = norm(u);
  ctx.report.set_point("base", cert.plane.base());
  ctx.report.set_vector("direction", u.coords());
  ctx.report.set("offset", cert.plane.offset());
  ctx.report.set("distance", cert.projection.distance);
  ctx.report.set("point_value", cert.point_value);
  ctx.report.set("set_sup", cert.set_sup);
  ctx.report.set("margin", cert.margin);
  ctx.report.set("probes_used", cert.probes_used);
  ctx.report.check("separation.set_sup_over_norm", cert.set_sup / un, 1e-8);
  ctx.report.check("separation.point_value_vs_norm_sq", std::abs(cert.point_value - un * un), 1e-9);
  ctx.report.check("separation.point_value", cert.point_value, 0.0, ">");
  ctx.log << "separated at base " << describe(cert.plane.base()) << ", point value "
          << cert.point_value << ", set sup " << cert.set_sup << '\n';
}

void cmd_support(const Context& ctx) {
  const ConvexRegion region = build_region(ctx.file);
  const Point p = require_point(ctx);
  SupportOptions opts;
  opts.probes = ctx.probes(500);
  opts.seed = ctx.seed;
  try {
    const SupportResult r = supporting_plane(region, p, opts);
    ctx.report.set_point("base", r.plane.base());
    ctx.report.set_vector("direction", r.plane.direction().coords());
    ctx.report.set("offset", r.plane.offset());
    ctx.report.set("steps", r.steps);
    ctx.report.set("last_change", r.last_change);
    ctx.report.set("sup", r.sup);
    ctx.report.set("probes_used", r.probes_used);
    ctx.report.check("support.sup", r.sup, 1e-6);
    ctx.report.check("support.contains_base", std::abs(r.plane.evaluate(p)), 1e-10);
    ctx.log << "supporting plane after " << r.steps << " steps, sup " << r.sup << '\n';
  } catch (const SupportNotCertified& e) {
    ctx.report.set("steps", e.steps());
    ctx.report.set("last_change", e.last_change());
    ctx.report.set("sup", e.sup());
    ctx.report.inconclusive("support.sup", e.sup(), 1e-6);
    ctx.report.error(e);
    ctx.log << "support not certified: " << e.what() << '\n';
  }
}

void cmd_cone(const Context& ctx) {
  const ConvexRegion region = build_region(ctx.file);
  const Point p = require_point(ctx);
  const double eps = epsilon_of(region, p);
  const Membership m = member(region, p);
  const GeneratedCone normal = normal_cone_generators(region, p);
  ctx.report.set("membership", std::string(to_string(m)));
  ctx.report.set("epsilon", eps);
  ctx.report.set("active", active_set(region, p));
  ctx.report.set("normal_generators", static_cast<int>(normal.generators.size()));

  double cq_fraction = 1.0;
  if (m == Membership::boundary) {
    const ProblemSpec probe_problem{
        ctx.file.objective ? parse(ctx.file.objective->value, ctx.file.manifold.ambient_dim())
                           : parse("0", ctx.file.manifold.ambient_dim()),
        region, p, ctx.file.tolerances};
    cq_fraction = check_cq(probe_problem, p, 200, ctx.seed).fraction;
  }
  ctx.report.set("cq_fraction", cq_fraction);

  const int probes = ctx.probes(200);
  std::mt19937_64 rng(ctx.seed);
  int in = 0;
  int out = 0;
  int undecided = 0;
  int counterexamples = 0;
  int disagreements = 0;
  double worst_lin = -kInf;
  for (int i = 0; i < probes; ++i) {
    const TangentVector v = random_unit_tangent(p, rng);
    const ConeProbe probe = tangent_cone_member(region, v);
    const ConeProbe seq = tangent_cone_member_seq(region, v);
    if (probe.verdict != ConeVerdict::undecided && seq.verdict != ConeVerdict::undecided &&
        probe.verdict != seq.verdict) {
      ++disagreements;
    }
    if (probe.verdict == ConeVerdict::undecided) {
      ++undecided;
      continue;
    }
    const bool is_in = probe.verdict == ConeVerdict::in_tangent_cone;
    (is_in ? in : out) += 1;
    if (is_in != polar_member(normal, probe.direction, 1e-6)) ++counterexamples;
    if (is_in) {
      for (const TangentVector& g : normal.generators) {
        worst_lin = std::max(worst_lin, metric_inner(g, probe.direction));
      }
    }
  }
  ctx.report.set("probes", probes);
  ctx.report.set("in_tangent_cone", in);
  ctx.report.set("not_in_tangent_cone", out);
  ctx.report.set("undecided", undecided);
  ctx.report.check("cone.sequence_disagreements", disagreements, 0.0);
  // Without the constraint qualification the generators need not span the
  // normal cone, so duality failures there are expected, not certified.
  if (cq_fraction < 1.0) {
    ctx.report.inconclusive("cone.double_polar_counterexamples", counterexamples, 0.0);
  } else {
    ctx.report.check("cone.double_polar_counterexamples", counterexamples, 0.0);
  }
  if (in > 0 && !normal.generators.empty()) {
    ctx.report.check("cone.linearization_inclusion", worst_lin, 1e-6);
  }
  ctx.log << probes << " probes: " << in << " in, " << out << " out, " << undecided
          << " undecided; " << counterexamples << " duality counterexamples, cq fraction "
          << cq_fraction << '\n';
}

// KKT and Fritz-John checks shared by `kkt` and `solve`.
void certify(const Context& ctx, const ProblemSpec& problem, const Point& x) {
  const KKTCertificate kkt = check_kkt(problem, x);
  const KKTCertificate fj = check_fritz_john(problem, x);
  const std::vector<double> g = problem.region.constraint_values(x);
  double worst_comp = 0.0;
  for (double c : kkt.complementarity) worst_comp = std::max(worst_comp, std::abs(c));

  ctx.report.set_point("point", x);
  ctx.report.set("objective_value", evaluate(problem.objective, x));
  ctx.report.set("active", kkt.active);
  ctx.report.set("multipliers", to_json(kkt.multipliers));
  ctx.report.set("complementarity", to_json(kkt.complementarity));
  ctx.report.set("stationarity_residual", kkt.stationarity_residual);
  ctx.report.set("feasible", kkt.feasible);
  ctx.report.set("fj_lambda0", fj.lambda0);
  ctx.report.set("fj_multipliers", to_json(fj.multipliers));
  ctx.report.set("fj_stationarity_residual", fj.stationarity_residual);

  const double tol = problem.tolerances.stationarity_tol;
  ctx.report.check("kkt.feasibility", *std::max_element(g.begin(), g.end()),
                   problem.region.interior_tol());
  ctx.report.check("kkt.stationarity", kkt.stationarity_residual, tol);
  ctx.report.check("kkt.complementarity", worst_comp, problem.tolerances.complementarity_tol);
  ctx.report.check("fritz_john.stationarity", fj.stationarity_residual, tol);
  ctx.log << "kkt residual " << kkt.stationarity_residual << ", fritz-john lambda0 " << fj.lambda0
          << " residual " << fj.stationarity_residual << '\n';
}

void cmd_kkt(const Context& ctx) {
  const ProblemSpec problem = build_problem(ctx.file);
  if (!ctx.inv.point && !ctx.inv.use_start) {
    throw Error(ErrorKind::InvalidArgument, "kkt requires --point or --use-start");
  }
  const Point x = ctx.inv.point ? require_point(ctx) : problem.start;
  certify(ctx, problem, x);
}

void cmd_solve(const Context& ctx) {
  const ProblemSpec problem = build_problem(ctx.file);
  const SolveResult r = solve(problem, ctx.seed);
  std::vector<double> trace_f;
  for (const SolveStep& s : r.trace) trace_f.push_back(s.f);
  ctx.report.set("iterations", static_cast<int>(r.trace.size()));
  ctx.report.set("stop", std::string(to_string(r.stop)));
  ctx.report.set("solver_stationarity", r.stationarity);
  ctx.report.set("trace_f", to_json(trace_f));
  ctx.log << "solve stopped (" << to_string(r.stop) << ") after " << r.trace.size()
          << " iterations at " << describe(r.point) << '\n';
  certify(ctx, problem, r.point);
  ctx.report.check("solve.normal_cone_probe",
                   normal_cone_probe(problem, r.point, ctx.probes(200), ctx.seed), 1e-5);
}

void cmd_verify(const Context& ctx) {
  VerifyOptions opts;
  opts.seed = ctx.seed;
  opts.on_record = [&](const CheckRecord& r) {
    ctx.log << "[" << r.criterion << "] " << r.name << ": " << to_string(r.status) << " ("
            << r.measured << ' ' << r.relation << ' ' << r.tolerance << ")\n";
  };
  std::vector<CheckRecord> records = run_verification(opts);
  for (CheckRecord r : contract_checks(ctx.seed, ctx.log)) {
    r.criterion = 11;
    records.push_back(std::move(r));
  }
  Json summary = Json::array();
  for (int c = 1; c <= 11; ++c) summary.push_back(std::string(to_string(criterion_status(records, c))));
  ctx.report.set("criteria", std::move(summary));
  for (const CheckRecord& r : records) ctx.report.check(r);
}

std::uint64_t resolve_seed(const Invocation& inv, const std::optional<std::uint64_t>& env,
                           const ProblemFile* file) {
  if (inv.seed) return *inv.seed;
  if (env) return *env;
  if (file != nullptr && file->seed) return *file->seed;
  return 0;
}

Outcome dispatch(const Invocation& inv, std::string_view text, bool have_file,
                 const std::optional<std::uint64_t>& env_seed, std::ostream& log) {
  const auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };
  static const char* const kCommands[] = {"project", "separate", "support", "cone",
                                          "kkt",     "solve",    "verify"};
  Report report(inv.command, text, resolve_seed(inv, env_seed, nullptr));
  try {
    if (std::find(std::begin(kCommands), std::end(kCommands), inv.command) == std::end(kCommands)) {
      throw Error(ErrorKind::InvalidArgument, "unknown command '" + inv.command + "'");
    }
    if (inv.probes && *inv.probes < 1) {
      throw Error(ErrorKind::InvalidArgument, "--probes must be positive");
    }
    std::optional<ProblemFile> file;
    if (have_file) {
      file = parse_problem_file(text);
    } else if (inv.command != "verify") {
      throw Error(ErrorKind::InvalidArgument, inv.command + " requires a problem file");
    }
    const std::uint64_t seed = resolve_seed(inv, env_seed, file ? &*file : nullptr);
    report = Report(inv.command, text, seed);
    static const ProblemFile kNoFile{};
    const Context ctx{inv, file ? *file : kNoFile, seed, report, log};
    if (inv.command == "project") cmd_project(ctx);
    if (inv.command == "separate") cmd_separate(ctx);
    if (inv.command == "support") cmd_support(ctx);
    if (inv.command == "cone") cmd_cone(ctx);
    if (inv.command == "kkt") cmd_kkt(ctx);
    if (inv.command == "solve") cmd_solve(ctx);
    if (inv.command == "verify") cmd_verify(ctx);
  } catch (const Error& e) {
    report.error(e);
    log << "error: " << e.kind_name() << ": " << e.what() << '\n';
  }
  Outcome out;
  out.exit_code = report.exit_code();
  out.report = report.finish(elapsed());
  return out;
}

std::optional<std::uint64_t> env_seed() {
  const char* raw = std::getenv("GEOCONVEX_SEED");
  if (raw == nullptr || *raw == '\0') return std::nullopt;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(raw, &end, 10);
  if (*end != '\0') {
    throw Error(ErrorKind::InvalidArgument, "GEOCONVEX_SEED must be a nonnegative integer");
  }
  return static_cast<std::uint64_t>(v);
}

}  // namespace

Outcome run(const Invocation& inv, std::ostream& log) {
  std::optional<std::uint64_t> seed_from_env;
  try {
    seed_from_env = env_seed();
  } catch (const Error& e) {
    Report report(inv.command, "", 0);
    report.error(e);
    log << "error: " << e.what() << '\n';
    return Outcome{report.exit_code(), report.finish(0.0)};
  }
  if (!inv.file) return dispatch(inv, "", false, seed_from_env, log);
  std::ifstream in(*inv.file, std::ios::binary);
  if (!in) {
    Report report(inv.command, "", inv.seed.value_or(seed_from_env.value_or(0)));
    report.error(ErrorKind::InvalidProblem, "cannot read problem file '" + *inv.file + "'",
                 kExitInput);
    log << "error: cannot read " << *inv.file << '\n';
    return Outcome{report.exit_code(), report.finish(0.0)};
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  log << inv.command << " " << *inv.file << '\n';
  return dispatch(inv, buf.str(), true, seed_from_env, log);
}

Outcome run_text(const Invocation& inv, std::string_view text, std::string_view label,
                 std::ostream& log) {
  log << inv.command << " " << label << '\n';
  return dispatch(inv, text, true, std::nullopt, log);
}

std::string_view sample_problem(std::string_view name) {
  for (const auto& s : kSamples) {
    if (s.name == name) return s.text;
  }
  throw Error(ErrorKind::InvalidArgument, "no built-in sample '" + std::string(name) + "'");
}

std::vector<CheckRecord> contract_checks(std::uint64_t seed, std::ostream& log) {
  struct Case {
    const char* label;
    const char* command;
    const char* sample;
    const char* point;
    bool use_start;
    int expected_exit;
    const char* expected_error;
  };
  static const Case kCases[] = {
      {"solve_disk", "solve", "disk_linear", nullptr, false, kExitPass, nullptr},
      {"solve_sphere_cap", "solve", "sphere_cap", nullptr, false, kExitPass, nullptr},
      {"solve_hyperbolic", "solve", "hyperbolic_center", nullptr, false, kExitPass, nullptr},
      {"malformed", "solve", "malformed", nullptr, false, kExitInput, "ParseError"},
      {"separate_interior", "separate", "disk_linear", "0.2,0.1", false, kExitInput, "PointInSet"},
      {"separate_exterior", "separate", "sphere_cap", "0.5403023058681398,0,0.8414709848078965",
       false, kExitPass, nullptr},
      {"project_exterior", "project", "disk_linear", "2,0", false, kExitPass, nullptr},
      {"project_missing_point", "project", "disk_linear", nullptr, false, kExitInput,
       "InvalidArgument"},
      {"support_boundary", "support", "disk_linear", "1,0", false, kExitPass, nullptr},
      {"support_interior", "support", "disk_linear", "0.5,0", false, kExitInput,
       "NotBoundaryPoint"},
      {"cone_boundary", "cone", "disk_linear", "1,0", false, kExitPass, nullptr},
      {"cone_exterior", "cone", "disk_linear", "2,0", false, kExitInput, "NotInSet"},
      {"kkt_minimizer", "kkt", "disk_linear", "-1,0", false, kExitPass, nullptr},
      {"kkt_degenerate", "kkt", "degenerate_fj", nullptr, true, kExitFail, nullptr},
  };

  std::vector<CheckRecord> out;
  auto add = [&](std::string name, double measured, double tolerance, const char* relation) {
    CheckRecord r;
    r.criterion = 11;
    r.name = std::move(name);
    r.measured = measured;
    r.tolerance = tolerance;
    r.relation = relation;
    const bool ok = r.relation == "==" ? measured == tolerance : measured <= tolerance;
    r.status = ok ? CheckStatus::pass : CheckStatus::fail;
    out.push_back(std::move(r));
  };

  int nondeterministic = 0;
  std::ostringstream quiet;
  for (const Case& c : kCases) {
    Invocation inv;
    inv.command = c.command;
    inv.seed = seed;
    inv.use_start = c.use_start;
    if (c.point != nullptr) inv.point = c.point;
    const std::string_view text = sample_problem(c.sample);
    const Outcome first = run_text(inv, text, c.sample, quiet);
    const Outcome second = run_text(inv, text, c.sample, quiet);
    if (strip_wall_time(first.report).dump() != strip_wall_time(second.report).dump()) {
      ++nondeterministic;
    }
    const std::string base = std::string("cli.") + c.label;
    add(base + ".exit_code", first.exit_code, c.expected_exit, "==");
    if (c.expected_error != nullptr) {
      const bool match = first.report.value("error", std::string()) == c.expected_error;
      add(base + ".error_kind", match ? 0.0 : 1.0, 0.0, "<=");
    }
    log << "contract " << c.label << ": exit " << first.exit_code << " (expected "
        << c.expected_exit << ")\n";
  }

  // Payload contracts on two of the cases.
  {
    Invocation inv;
    inv.command = "solve";
    inv.seed = seed;
    const Outcome r = run_text(inv, sample_problem("disk_linear"), "disk_linear", quiet);
    double err = kInf;
    if (r.report.contains("point")) {
      const auto& p = r.report["point"];
      err = std::hypot(p[0].get<double>() + 1.0, p[1].get<double>());
    }
    add("cli.solve_disk.distance_to_minimizer", err, 1e-5, "<=");
  }
  {
    Invocation inv;
    inv.command = "solve";
    inv.seed = seed;
    const Outcome r = run_text(inv, sample_problem("malformed"), "malformed", quiet);
    const double offset = r.report.contains("error_offset")
                              ? r.report["error_offset"].get<double>()
                              : -1.0;
    add("cli.malformed.error_offset", offset, 5.0, "==");
  }
  add("cli.report_determinism", nondeterministic, 0.0, "<=");
  return out;
}

}  // namespace geoconvex::cli
