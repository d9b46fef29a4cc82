#include "problem_file.hpp"

#include <charconv>
#include <set>
#include <sstream>

#include "geoconvex/expr.hpp"

namespace geoconvex::cli {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

// Drops a trailing `#` comment; `#` inside double quotes is kept.
std::string_view strip_comment(std::string_view line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') quoted = !quoted;
    if (line[i] == '#' && !quoted) return line.substr(0, i);
  }
  return line;
}

double parse_real(std::string_view text, int line, std::string_view key) {
  const std::string_view t = trim(text);
  double v = 0.0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || res.ec != std::errc{} || res.ptr != t.data() + t.size()) {
    throw ProblemError(line, std::string(key) + ": expected a number, got '" + std::string(t) + "'");
  }
  return v;
}

std::uint64_t parse_unsigned(std::string_view text, int line, std::string_view key) {
  const std::string_view t = trim(text);
  std::uint64_t v = 0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || res.ec != std::errc{} || res.ptr != t.data() + t.size()) {
    throw ProblemError(line, std::string(key) + ": expected a nonnegative integer, got '" +
                                 std::string(t) + "'");
  }
  return v;
}

std::string unquote(std::string_view text, int line, std::string_view key) {
  const std::string_view t = trim(text);
  if (t.empty()) throw ProblemError(line, std::string(key) + ": empty value");
  if (t.front() != '"') return std::string(t);
  if (t.size() < 2 || t.back() != '"') {
    throw ProblemError(line, std::string(key) + ": unterminated string");
  }
  return std::string(t.substr(1, t.size() - 2));
}

ExprAst parse_expression(const SourceLine& src, int ambient_dim) {
  try {
    return parse(src.value, ambient_dim);
  } catch (const ParseError& e) {
    throw ExpressionError(e, src.number, src.key);
  }
}

}  // namespace

Vector parse_coordinates(std::string_view text) {
  std::string_view t = trim(text);
  if (!t.empty() && t.front() == '[') {
    if (t.back() != ']') throw Error(ErrorKind::InvalidArgument, "unbalanced '[' in coordinates");
    t = trim(t.substr(1, t.size() - 2));
  }
  std::vector<double> xs;
  while (!t.empty()) {
    const auto comma = t.find(',');
    const std::string_view item = trim(t.substr(0, comma));
    double v = 0.0;
    const auto res = std::from_chars(item.data(), item.data() + item.size(), v);
    if (item.empty() || res.ec != std::errc{} || res.ptr != item.data() + item.size()) {
      throw Error(ErrorKind::InvalidArgument, "bad coordinate '" + std::string(item) + "'");
    }
    xs.push_back(v);
    if (comma == std::string_view::npos) break;
    t = trim(t.substr(comma + 1));
    if (t.empty()) throw Error(ErrorKind::InvalidArgument, "trailing ',' in coordinates");
  }
  if (xs.empty()) throw Error(ErrorKind::InvalidArgument, "empty coordinate list");
  Vector v(static_cast<Eigen::Index>(xs.size()));
  for (std::size_t i = 0; i < xs.size(); ++i) v[static_cast<Eigen::Index>(i)] = xs[i];
  return v;
}

Point make_point(const ManifoldSpec& manifold, const Vector& coords) {
  if (coords.size() != manifold.ambient_dim()) {
    std::ostringstream msg;
    msg << "point has " << coords.size() << " coordinates, manifold needs "
        << manifold.ambient_dim();
    throw Error(ErrorKind::InvalidPoint, msg.str());
  }
  return Point::snap(manifold, coords);
}

ProblemFile parse_problem_file(std::string_view text) {
  ProblemFile out;
  std::optional<ManifoldKind> kind;
  std::optional<int> dim;
  std::optional<SourceLine> anchor;
  std::optional<SourceLine> start;
  std::set<std::string> seen;

  int number = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    const std::string_view raw =
        text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++number;

    const std::string_view line = trim(strip_comment(raw));
    if (line.empty()) continue;
    if (line.front() == '[' && line.back() == ']') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ProblemError(number, "expected 'key = value', got '" + std::string(line) + "'");
    }
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));
    if (key.empty()) throw ProblemError(number, "missing key before '='");
    if (key != "constraint" && !seen.insert(key).second) {
      throw ProblemError(number, "duplicate key '" + key + "'");
    }

    if (key == "manifold") {
      kind = parse_manifold_kind(trim(value));
      if (!kind) {
        throw ProblemError(number, "manifold must be euclidean, sphere or hyperboloid");
      }
    } else if (key == "dim") {
      const std::uint64_t d = parse_unsigned(value, number, key);
      if (d < 1 || d > 64) throw ProblemError(number, "dim must be between 1 and 64");
      dim = static_cast<int>(d);
    } else if (key == "objective") {
      out.objective = SourceLine{number, key, unquote(value, number, key)};
    } else if (key == "constraint") {
      out.constraints.push_back(SourceLine{number, key, unquote(value, number, key)});
    } else if (key == "anchor") {
      anchor = SourceLine{number, key, std::string(value)};
    } else if (key == "start") {
      start = SourceLine{number, key, std::string(value)};
    } else if (key == "seed") {
      out.seed = parse_unsigned(value, number, key);
    } else if (key == "stationarity_tol") {
      out.tolerances.stationarity_tol = parse_real(value, number, key);
    } else if (key == "complementarity_tol") {
      out.tolerances.complementarity_tol = parse_real(value, number, key);
    } else if (key == "step_init") {
      out.tolerances.step_init = parse_real(value, number, key);
    } else if (key == "max_iters") {
      out.tolerances.max_iters = static_cast<int>(parse_unsigned(value, number, key));
    } else if (key == "interior_tol") {
      out.region_options.interior_tol = parse_real(value, number, key);
    } else if (key == "convexity") {
      const std::string_view v = trim(value);
      if (v == "check") {
        out.region_options.convexity = ConvexityCheck::spot_check;
      } else if (v == "trust") {
        out.region_options.convexity = ConvexityCheck::trust_declared;
      } else {
        throw ProblemError(number, "convexity must be check or trust");
      }
    } else {
      throw ProblemError(number, "unknown key '" + key + "'");
    }
  }

  if (!kind) throw ProblemError(0, "missing required key 'manifold'");
  if (!dim) throw ProblemError(0, "missing required key 'dim'");
  if (out.constraints.empty()) throw ProblemError(0, "at least one 'constraint' is required");
  if (!anchor) throw ProblemError(0, "missing required key 'anchor'");
  out.manifold = ManifoldSpec(*kind, *dim);

  auto coords = [&](const SourceLine& src) {
    try {
      Vector v = parse_coordinates(src.value);
      if (v.size() != out.manifold.ambient_dim()) {
        std::ostringstream msg;
        msg << src.key << " has " << v.size() << " coordinates, manifold needs "
            << out.manifold.ambient_dim();
        throw ProblemError(src.number, msg.str());
      }
      return v;
    } catch (const ProblemError&) {
      throw;
    } catch (const Error& e) {
      throw ProblemError(src.number, src.key + ": " + e.what());
    }
  };
  out.anchor = coords(*anchor);
  if (start) out.start = coords(*start);
  return out;
}

ConvexRegion build_region(const ProblemFile& file) {
  std::vector<ExprAst> gs;
  for (const SourceLine& src : file.constraints) {
    gs.push_back(parse_expression(src, file.manifold.ambient_dim()));
  }
  return ConvexRegion::make(file.manifold, std::move(gs), make_point(file.manifold, file.anchor),
                            file.region_options);
}

ProblemSpec build_problem(const ProblemFile& file) {
  ConvexRegion region = build_region(file);
  if (!file.objective) throw ProblemError(0, "missing required key 'objective'");
  ExprAst f = parse_expression(*file.objective, file.manifold.ambient_dim());
  Point start = make_point(file.manifold, file.start ? *file.start : file.anchor);
  return ProblemSpec{std::move(f), std::move(region), std::move(start), file.tolerances};
}

}  // namespace geoconvex::cli
