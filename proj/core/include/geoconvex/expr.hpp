#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "geoconvex/error.hpp"
#include "geoconvex/manifold.hpp"

namespace geoconvex {

enum class ExprFunc { sin, cos, tan, sinh, cosh, tanh, exp, log, sqrt, abs };

std::string_view to_string(ExprFunc f) noexcept;

struct ExprNode {
  enum class Kind { number, variable, negate, add, sub, mul, div, pow, call, gdist };

  Kind kind = Kind::number;
  double value = 0.0;          // number
  int variable = 0;            // 1-based coordinate index
  ExprFunc func = ExprFunc::sin;
  int lhs = -1;                // operand / left child
  int rhs = -1;                // right child
  std::vector<double> target;  // gdist literal coordinates
  std::size_t offset = 0;      // byte offset in the source text
};

/// Immutable expression tree over ambient coordinates x1..xN, stored as a
/// node arena. Equality is structural and ignores source offsets.
class ExprAst {
 public:
  const std::vector<ExprNode>& nodes() const noexcept { return nodes_; }
  int root() const noexcept { return root_; }
  int ambient_dim() const noexcept { return ambient_dim_; }
  const std::string& source() const noexcept { return source_; }

  friend bool operator==(const ExprAst& a, const ExprAst& b);

 private:
  friend class ExprParser;

  std::vector<ExprNode> nodes_;
  int root_ = -1;
  int ambient_dim_ = 0;
  std::string source_;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t offset, std::string expected, std::string excerpt);

  std::size_t offset() const noexcept { return offset_; }
  const std::string& expected() const noexcept { return expected_; }
  const std::string& excerpt() const noexcept { return excerpt_; }

 private:
  std::size_t offset_;
  std::string expected_;
  std::string excerpt_;
};

class EvalDomainError : public Error {
 public:
  EvalDomainError(std::size_t offset, const std::string& what);

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// Recursive-descent parse. Precedence, lowest first: + -, * /, unary -,
/// ^ (right-associative, variable-free exponent), atoms. Atoms are decimal
/// literals, x1..xN, one-argument calls of the ExprFunc set, parenthesized
/// groups, and gdist(a1, ..., aN) with constant arguments, which evaluates
/// the manifold distance to the point a.
ExprAst parse(std::string_view source, int ambient_dim);

/// Throws EvalDomainError instead of ever producing NaN or infinity.
double evaluate(const ExprAst& ast, const Point& point);

/// Central differences along geodesics through an orthonormal tangent basis,
/// step h = 1e-6 * max(1, sqrt|f(p)|).
TangentVector riemannian_grad(const ExprAst& ast, const Point& point);

/// Fully parenthesized text that parses back to an equal tree.
std::string to_canonical_string(const ExprAst& ast);

}  // namespace geoconvex
