#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "geoconvex/kkt.hpp"
#include "geoconvex/manifold.hpp"
#include "geoconvex/region.hpp"

namespace geoconvex::cli {

/// One `key = value` line of a problem file, kept for error locations.
struct SourceLine {
  int number = 0;
  std::string key;
  std::string value;
};

/// Parsed problem file. Coordinates are raw ambient vectors; expressions
/// are kept as source text together with the line they came from.
struct ProblemFile {
  ManifoldSpec manifold{ManifoldKind::euclidean, 1};
  std::optional<SourceLine> objective;
  std::vector<SourceLine> constraints;
  Vector anchor;
  std::optional<Vector> start;
  std::optional<std::uint64_t> seed;
  SolverTolerances tolerances;
  RegionOptions region_options;
};

/// Problem-file error with the 1-based line it refers to (0 when global).
class ProblemError : public Error {
 public:
  ProblemError(int line, const std::string& message)
      : Error(ErrorKind::InvalidProblem, message), line_(line) {}

  int line() const noexcept { return line_; }

 private:
  int line_;
};

/// Expression ParseError relocated to the problem-file line it came from.
class ExpressionError : public ParseError {
 public:
  ExpressionError(const ParseError& inner, int line, std::string key)
      : ParseError(inner), line_(line), key_(std::move(key)) {}

  int line() const noexcept { return line_; }
  const std::string& key() const noexcept { return key_; }

 private:
  int line_;
  std::string key_;
};

/// Grammar: `key = value` lines, `#` comments outside quotes, optional
/// `[section]` headers that only group lines. Throws ProblemError.
ProblemFile parse_problem_file(std::string_view text);

/// Parses every expression and builds the region (anchor must be strictly
/// feasible). Throws ExpressionError, InvalidRegion, InvalidPoint.
ConvexRegion build_region(const ProblemFile& file);

/// Region plus objective and start; the start defaults to the anchor.
/// Throws ProblemError when the file has no objective.
ProblemSpec build_problem(const ProblemFile& file);

/// Comma-separated coordinates such as "1, 0, 0" (brackets optional).
/// Throws InvalidArgument.
Vector parse_coordinates(std::string_view text);

/// Lifts ambient coordinates onto the manifold (sphere normalization,
/// hyperboloid lift) within the snap tolerance; length must match.
Point make_point(const ManifoldSpec& manifold, const Vector& coords);

}  // namespace geoconvex::cli
