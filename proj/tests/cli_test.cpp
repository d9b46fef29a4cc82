#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "app.hpp"
#include "problem_file.hpp"
#include "report.hpp"

namespace geoconvex::cli {
namespace {

constexpr const char* kDisk = R"(# comment line
[problem]
manifold = euclidean
dim = 2
objective = "x1"
constraint = "x1^2 + x2^2 - 1"   # trailing comment
anchor = [0, 0]
start = [0, 0.5]
seed = 4
)";

int problem_error_line(std::string_view text) {
  try {
    parse_problem_file(text);
  } catch (const ProblemError& e) {
    return e.line();
  }
  ADD_FAILURE() << "no ProblemError";
  return -1;
}

Outcome run_sample(const char* command, const char* sample, const char* point = nullptr,
                   bool use_start = false) {
  Invocation inv;
  inv.command = command;
  if (point != nullptr) inv.point = point;
  inv.use_start = use_start;
  std::ostringstream log;
  return run_text(inv, sample_problem(sample), sample, log);
}

TEST(ProblemFile, ParsesFullGrammar) {
  const ProblemFile f = parse_problem_file(kDisk);
  EXPECT_EQ(f.manifold.kind(), ManifoldKind::euclidean);
  EXPECT_EQ(f.manifold.dim(), 2);
  ASSERT_TRUE(f.objective.has_value());
  EXPECT_EQ(f.objective->value, "x1");
  ASSERT_EQ(f.constraints.size(), 1u);
  EXPECT_EQ(f.constraints[0].value, "x1^2 + x2^2 - 1");
  EXPECT_EQ(f.constraints[0].number, 6);
  EXPECT_EQ(f.anchor.size(), 2);
  ASSERT_TRUE(f.start.has_value());
  EXPECT_EQ((*f.start)[1], 0.5);
  EXPECT_EQ(f.seed, 4u);
}

TEST(ProblemFile, ToleranceOverridesAndHashInsideQuotes) {
  const ProblemFile f = parse_problem_file(
      "manifold = sphere\ndim = 2\nconstraint = \"gdist(1,0,0) - 0.5\" # cap\n"
      "anchor = [1, 0, 0]\nstationarity_tol = 1e-7\nmax_iters = 10\nconvexity = trust\n"
      "objective = \"x1 # not a comment\"\n");
  EXPECT_EQ(f.tolerances.stationarity_tol, 1e-7);
  EXPECT_EQ(f.tolerances.max_iters, 10);
  EXPECT_EQ(f.region_options.convexity, ConvexityCheck::trust_declared);
  EXPECT_EQ(f.objective->value, "x1 # not a comment");
}

TEST(ProblemFile, ErrorsCarryLineNumbers) {
  EXPECT_EQ(problem_error_line("manifold = torus\n"), 1);
  EXPECT_EQ(problem_error_line("manifold = sphere\ndim = 2\nfoo = 1\n"), 3);
  EXPECT_EQ(problem_error_line("manifold = sphere\nmanifold = sphere\n"), 2);
  EXPECT_EQ(problem_error_line("manifold = sphere\ndim two\n"), 2);
  EXPECT_EQ(problem_error_line("manifold = sphere\ndim = 2\nconstraint = \"x1\nanchor = [1,0]\n"), 3);
  EXPECT_EQ(problem_error_line("manifold = sphere\ndim = 2\nconstraint = x1\nanchor = [1, 0]\n"), 4);
  EXPECT_EQ(problem_error_line("manifold = sphere\ndim = 2\nanchor = [1, 0, 0]\n"), 0);
}

TEST(ProblemFile, ExpressionErrorsKeepOffsetAndLine) {
  const ProblemFile f = parse_problem_file(sample_problem("malformed"));
  try {
    build_region(f);
    FAIL() << "expected ExpressionError";
  } catch (const ExpressionError& e) {
    EXPECT_EQ(e.offset(), 5u);
    EXPECT_EQ(e.line(), 5);
    EXPECT_EQ(e.key(), "constraint");
  }
}

TEST(ProblemFile, AnchorMustBeStrictlyFeasible) {
  const ProblemFile f = parse_problem_file(
      "manifold = euclidean\ndim = 2\nconstraint = \"x1^2 + x2^2 - 1\"\nanchor = [1, 0]\n");
  EXPECT_THROW(build_region(f), Error);
}

TEST(Coordinates, ParsingAndLifting) {
  EXPECT_EQ(parse_coordinates("1, 2.5,-3").size(), 3);
  EXPECT_EQ(parse_coordinates("[1,2]")[1], 2.0);
  EXPECT_THROW(parse_coordinates("1,,2"), Error);
  EXPECT_THROW(parse_coordinates("1, x"), Error);
  EXPECT_THROW(parse_coordinates(""), Error);
  const ManifoldSpec s(ManifoldKind::sphere, 2);
  EXPECT_NEAR(make_point(s, parse_coordinates("0.995, 0.0998, 0")).coords().norm(), 1.0, 1e-15);
  EXPECT_THROW(make_point(s, parse_coordinates("1, 0")), Error);
}

TEST(Report, Sha256KnownVector) {
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Report, ExitCodePrecedence) {
  Report r("x", "", 0);
  EXPECT_EQ(r.exit_code(), kExitPass);
  r.inconclusive("a", 1.0, 0.0);
  EXPECT_EQ(r.exit_code(), kExitInconclusive);
  r.check("b", 2.0, 1.0);
  EXPECT_EQ(r.exit_code(), kExitFail);
  r.error(Error(ErrorKind::PointInSet, "inside"));
  EXPECT_EQ(r.exit_code(), kExitInput);
  EXPECT_EQ(exit_code_for(ErrorKind::ProjectionNotCertified), kExitInconclusive);
  EXPECT_EQ(exit_code_for(ErrorKind::ParseError), kExitInput);
}

TEST(Report, FlatAndNonFiniteAsNull) {
  Report r("x", "body", 3);
  r.check("inf", std::numeric_limits<double>::infinity(), 1.0);
  const Json j = r.finish(0.5);
  EXPECT_EQ(j["seed"], 3);
  EXPECT_TRUE(j["checks"][0]["measured"].is_null());
  for (const auto& [key, value] : j.items()) {
    if (key != "checks") EXPECT_FALSE(value.is_object()) << key;
  }
}

TEST(Run, SolveDiskReachesMinimizer) {
  const Outcome out = run_sample("solve", "disk_linear");
  EXPECT_EQ(out.exit_code, kExitPass);
  const auto& p = out.report["point"];
  EXPECT_LE(std::hypot(p[0].get<double>() + 1.0, p[1].get<double>()), 1e-5);
  EXPECT_EQ(out.report["status"], "pass");
}

TEST(Run, MalformedExpressionReportsOffset) {
  const Outcome out = run_sample("kkt", "malformed", "0,0");
  EXPECT_EQ(out.exit_code, kExitInput);
  EXPECT_EQ(out.report["error"], "ParseError");
  EXPECT_EQ(out.report["error_offset"], 5);
  EXPECT_EQ(out.report["error_line"], 5);
}

TEST(Run, SeparateInteriorPoint) {
  const Outcome out = run_sample("separate", "disk_linear", "0.2,0.1");
  EXPECT_EQ(out.exit_code, kExitInput);
  EXPECT_EQ(out.report["error"], "PointInSet");
}

TEST(Run, CommandContracts) {
  EXPECT_EQ(run_sample("project", "disk_linear", "2,0").exit_code, kExitPass);
  EXPECT_EQ(run_sample("project", "disk_linear").exit_code, kExitInput);
  EXPECT_EQ(run_sample("support", "sphere_cap", "0.8775825618903728,0.479425538604203,0").exit_code,
            kExitPass);
  EXPECT_EQ(run_sample("cone", "disk_linear", "1,0").exit_code, kExitPass);
  EXPECT_EQ(run_sample("kkt", "disk_linear").exit_code, kExitInput);
  EXPECT_EQ(run_sample("kkt", "disk_linear", nullptr, true).exit_code, kExitFail);
  EXPECT_EQ(run_sample("kkt", "degenerate_fj", nullptr, true).exit_code, kExitFail);
  EXPECT_EQ(run_sample("solve", "sphere_cap").exit_code, kExitPass);
  EXPECT_EQ(run_sample("bogus", "disk_linear").exit_code, kExitInput);
}

TEST(Run, FileSeedAndFlagPrecedence) {
  Invocation inv;
  inv.command = "project";
  inv.point = "2,0";
  std::ostringstream log;
  EXPECT_EQ(run_text(inv, kDisk, "disk", log).report["seed"], 4);
  inv.seed = 9;
  EXPECT_EQ(run_text(inv, kDisk, "disk", log).report["seed"], 9);
}

TEST(Run, EnvironmentSeedOverridesFile) {
  const auto path = std::filesystem::temp_directory_path() / "geoconvex_cli_test.gcp";
  std::ofstream(path) << kDisk;
  Invocation inv;
  inv.command = "project";
  inv.point = "2,0";
  inv.file = path.string();
  std::ostringstream log;
  ::setenv("GEOCONVEX_SEED", "17", 1);
  const Outcome with_env = run(inv, log);
  ::unsetenv("GEOCONVEX_SEED");
  const Outcome without = run(inv, log);
  std::filesystem::remove(path);
  EXPECT_EQ(with_env.report["seed"], 17);
  EXPECT_EQ(without.report["seed"], 4);
  EXPECT_EQ(with_env.report["input_digest"], without.report["input_digest"]);
}

TEST(Run, MissingFileIsInputError) {
  Invocation inv;
  inv.command = "solve";
  inv.file = "/nonexistent/problem.gcp";
  std::ostringstream log;
  EXPECT_EQ(run(inv, log).exit_code, kExitInput);
}

TEST(Run, ReportsAreDeterministic) {
  for (const char* cmd : {"solve", "cone"}) {
    const Outcome a = run_sample(cmd, "sphere_cap", "0.8775825618903728,0.479425538604203,0");
    const Outcome b = run_sample(cmd, "sphere_cap", "0.8775825618903728,0.479425538604203,0");
    EXPECT_EQ(strip_wall_time(a.report).dump(), strip_wall_time(b.report).dump()) << cmd;
  }
}

}  // namespace
}  // namespace geoconvex::cli
