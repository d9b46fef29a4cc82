#include "geoconvex/expr.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <optional>
#include <sstream>

namespace geoconvex {
namespace {

constexpr double kMinDenominator = 1e-300;

struct FuncName {
  std::string_view name;
  ExprFunc func;
};

constexpr std::array<FuncName, 10> kFunctions{{
    {"sin", ExprFunc::sin},   {"cos", ExprFunc::cos},   {"tan", ExprFunc::tan},
    {"sinh", ExprFunc::sinh}, {"cosh", ExprFunc::cosh}, {"tanh", ExprFunc::tanh},
    {"exp", ExprFunc::exp},   {"log", ExprFunc::log},   {"sqrt", ExprFunc::sqrt},
    {"abs", ExprFunc::abs},
}};

std::optional<ExprFunc> lookup_function(std::string_view name) {
  for (const auto& f : kFunctions) {
    if (f.name == name) return f.func;
  }
  return std::nullopt;
}

std::string excerpt_at(std::string_view source, std::size_t offset) {
  const std::size_t begin = offset > 12 ? offset - 12 : 0;
  std::string out(source.substr(begin, 24));
  return out;
}

std::string format_number(double x) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  (void)ec;
  return std::string(buf.data(), ptr);
}

}  // namespace

std::string_view to_string(ExprFunc f) noexcept {
  for (const auto& entry : kFunctions) {
    if (entry.func == f) return entry.name;
  }
  return "?";
}

ParseError::ParseError(std::size_t offset, std::string expected, std::string excerpt)
    : Error(ErrorKind::ParseError,
            "parse error at offset " + std::to_string(offset) + ": expected " + expected +
                " near '" + excerpt + "'"),
      offset_(offset),
      expected_(std::move(expected)),
      excerpt_(std::move(excerpt)) {}

EvalDomainError::EvalDomainError(std::size_t offset, const std::string& what)
    : Error(ErrorKind::EvalDomainError,
            "domain error at offset " + std::to_string(offset) + ": " + what),
      offset_(offset) {}

bool operator==(const ExprAst& a, const ExprAst& b) {
  if (a.ambient_dim_ != b.ambient_dim_) return false;
  // Compare reachable structure, not arena layout.
  auto same = [&](auto&& self, int ia, int ib) -> bool {
    if (ia < 0 || ib < 0) return ia == ib;
    const ExprNode& x = a.nodes_[ia];
    const ExprNode& y = b.nodes_[ib];
    if (x.kind != y.kind) return false;
    switch (x.kind) {
      case ExprNode::Kind::number: return x.value == y.value;
      case ExprNode::Kind::variable: return x.variable == y.variable;
      case ExprNode::Kind::gdist: return x.target == y.target;
      case ExprNode::Kind::call:
        return x.func == y.func && self(self, x.lhs, y.lhs);
      default:
        return self(self, x.lhs, y.lhs) && self(self, x.rhs, y.rhs);
    }
  };
  return same(same, a.root_, b.root_);
}

// ---------------------------------------------------------------- parser

class ExprParser {
 public:
  ExprParser(std::string_view source, int ambient_dim) : src_(source) {
    ast_.ambient_dim_ = ambient_dim;
    ast_.source_ = std::string(source);
  }

  ExprAst run() {
    skip_ws();
    if (at_end()) fail("an expression");
    ast_.root_ = parse_sum();
    skip_ws();
    if (!at_end()) fail("end of expression");
    return std::move(ast_);
  }

 private:
  [[noreturn]] void fail(const std::string& expected) const { fail_at(pos_, expected); }
  [[noreturn]] void fail_at(std::size_t offset, const std::string& expected) const {
    throw ParseError(offset, expected, excerpt_at(src_, offset));
  }

  bool at_end() const { return pos_ >= src_.size(); }
  char peek() const { return at_end() ? '\0' : src_[pos_]; }
  void skip_ws() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }
  bool accept(char c) {
    skip_ws();
    if (peek() == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!accept(c)) fail(std::string("'") + c + "'");
  }

  int push(ExprNode node) {
    ast_.nodes_.push_back(std::move(node));
    return static_cast<int>(ast_.nodes_.size()) - 1;
  }
  int binary(ExprNode::Kind kind, int lhs, int rhs, std::size_t offset) {
    ExprNode n;
    n.kind = kind;
    n.lhs = lhs;
    n.rhs = rhs;
    n.offset = offset;
    return push(std::move(n));
  }

  int parse_sum() {
    int lhs = parse_product();
    for (;;) {
      skip_ws();
      const std::size_t at = pos_;
      if (accept('+')) {
        lhs = binary(ExprNode::Kind::add, lhs, parse_product(), at);
      } else if (accept('-')) {
        lhs = binary(ExprNode::Kind::sub, lhs, parse_product(), at);
      } else {
        return lhs;
      }
    }
  }

  int parse_product() {
    int lhs = parse_unary();
    for (;;) {
      skip_ws();
      const std::size_t at = pos_;
      if (accept('*')) {
        lhs = binary(ExprNode::Kind::mul, lhs, parse_unary(), at);
      } else if (accept('/')) {
        lhs = binary(ExprNode::Kind::div, lhs, parse_unary(), at);
      } else {
        return lhs;
      }
    }
  }

  int parse_unary() {
    skip_ws();
    const std::size_t at = pos_;
    if (accept('-')) {
      ExprNode n;
      n.kind = ExprNode::Kind::negate;
      n.lhs = parse_unary();
      n.offset = at;
      return push(std::move(n));
    }
    return parse_power();
  }

  int parse_power() {
    const int base = parse_atom();
    skip_ws();
    const std::size_t at = pos_;
    if (!accept('^')) return base;
    skip_ws();
    const std::size_t exponent_at = pos_;
    const int exponent = parse_exponent();
    if (!is_constant(exponent)) fail_at(exponent_at, "a constant exponent");
    return binary(ExprNode::Kind::pow, base, exponent, at);
  }

  // Exponents may carry their own sign: x1^-2 reads as x1^(-2).
  int parse_exponent() {
    skip_ws();
    const std::size_t at = pos_;
    if (accept('-')) {
      ExprNode n;
      n.kind = ExprNode::Kind::negate;
      n.lhs = parse_exponent();
      n.offset = at;
      return push(std::move(n));
    }
    return parse_power();
  }

  int parse_atom() {
    skip_ws();
    const std::size_t at = pos_;
    const char c = peek();
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_identifier();
    if (accept('(')) {
      const int inner = parse_sum();
      expect(')');
      return inner;
    }
    fail_at(at, "a number, variable, function call or '('");
  }

  int parse_number() {
    const std::size_t start = pos_;
    auto digits = [&] {
      while (std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
    };
    digits();
    if (peek() == '.') {
      ++pos_;
      digits();
    }
    if (peek() == 'e' || peek() == 'E') {
      const std::size_t mark = pos_;
      ++pos_;
      if (peek() == '+' || peek() == '-') ++pos_;
      if (!std::isdigit(static_cast<unsigned char>(peek()))) {
        pos_ = mark;  // not an exponent; leave 'e' for the identifier rule
      } else {
        digits();
      }
    }
    double value = 0.0;
    const char* first = src_.data() + start;
    const char* last = src_.data() + pos_;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last || !std::isfinite(value)) {
      fail_at(start, "a finite decimal literal");
    }
    ExprNode n;
    n.kind = ExprNode::Kind::number;
    n.value = value;
    n.offset = start;
    return push(std::move(n));
  }

  int parse_identifier() {
    const std::size_t start = pos_;
    while (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_') ++pos_;
    const std::string_view name = src_.substr(start, pos_ - start);

    if (name.size() >= 2 && name[0] == 'x' &&
        name.find_first_not_of("0123456789", 1) == std::string_view::npos) {
      int index = 0;
      auto [ptr, ec] = std::from_chars(name.data() + 1, name.data() + name.size(), index);
      if (ec != std::errc() || index < 1 || index > ast_.ambient_dim_) {
        fail_at(start, "a variable x1..x" + std::to_string(ast_.ambient_dim_));
      }
      ExprNode n;
      n.kind = ExprNode::Kind::variable;
      n.variable = index;
      n.offset = start;
      return push(std::move(n));
    }

    if (name == "gdist") return parse_gdist(start);

    const auto func = lookup_function(name);
    if (!func) fail_at(start, "a known function or variable");
    skip_ws();
    expect('(');
    const int arg = parse_sum();
    skip_ws();
    if (peek() == ',') fail("')' (functions take exactly one argument)");
    expect(')');
    ExprNode n;
    n.kind = ExprNode::Kind::call;
    n.func = *func;
    n.lhs = arg;
    n.offset = start;
    return push(std::move(n));
  }

  int parse_gdist(std::size_t start) {
    expect('(');
    std::vector<double> target;
    for (;;) {
      skip_ws();
      const std::size_t arg_at = pos_;
      const int arg = parse_sum();
      if (!is_constant(arg)) fail_at(arg_at, "a constant gdist coordinate");
      target.push_back(constant_value(arg));
      if (accept(',')) continue;
      expect(')');
      break;
    }
    if (static_cast<int>(target.size()) != ast_.ambient_dim_) {
      fail_at(start, "gdist with " + std::to_string(ast_.ambient_dim_) + " coordinates");
    }
    // Argument subtrees are folded into the literal target.
    ExprNode n;
    n.kind = ExprNode::Kind::gdist;
    n.target = std::move(target);
    n.offset = start;
    return push(std::move(n));
  }

  bool is_constant(int index) const {
    const ExprNode& n = ast_.nodes_[index];
    switch (n.kind) {
      case ExprNode::Kind::number: return true;
      case ExprNode::Kind::variable:
      case ExprNode::Kind::gdist: return false;
      case ExprNode::Kind::negate:
      case ExprNode::Kind::call: return is_constant(n.lhs);
      default: return is_constant(n.lhs) && is_constant(n.rhs);
    }
  }

  double constant_value(int index) const;

  std::string_view src_;
  std::size_t pos_ = 0;
  ExprAst ast_;
};

ExprAst parse(std::string_view source, int ambient_dim) {
  if (ambient_dim < 1) {
    throw Error(ErrorKind::InvalidArgument, "ambient dimension must be >= 1");
  }
  return ExprParser(source, ambient_dim).run();
}

// ------------------------------------------------------------- evaluate

namespace {

class Evaluator {
 public:
  Evaluator(const std::vector<ExprNode>& nodes, const Point* point)
      : nodes_(nodes), point_(point) {}

  double eval(int index) const {
    const ExprNode& n = nodes_[index];
    const double v = eval_raw(n);
    if (!std::isfinite(v)) throw EvalDomainError(n.offset, "non-finite result");
    return v;
  }

 private:
  double eval_raw(const ExprNode& n) const {
    using K = ExprNode::Kind;
    switch (n.kind) {
      case K::number: return n.value;
      case K::variable: return point_->coords()[n.variable - 1];
      case K::negate: return -eval(n.lhs);
      case K::add: return eval(n.lhs) + eval(n.rhs);
      case K::sub: return eval(n.lhs) - eval(n.rhs);
      case K::mul: return eval(n.lhs) * eval(n.rhs);
      case K::div: {
        const double num = eval(n.lhs);
        const double den = eval(n.rhs);
        if (std::abs(den) < kMinDenominator) throw EvalDomainError(n.offset, "division by zero");
        return num / den;
      }
      case K::pow: {
        const double base = eval(n.lhs);
        const double exponent = eval(n.rhs);
        if (base < 0.0 && exponent != std::trunc(exponent)) {
          throw EvalDomainError(n.offset, "negative base with non-integer exponent");
        }
        if (base == 0.0 && exponent < 0.0) throw EvalDomainError(n.offset, "zero to a negative power");
        return std::pow(base, exponent);
      }
      case K::call: return call(n, eval(n.lhs));
      case K::gdist: return gdist(n);
    }
    return 0.0;
  }

  static double call(const ExprNode& n, double x) {
    switch (n.func) {
      case ExprFunc::sin: return std::sin(x);
      case ExprFunc::cos: return std::cos(x);
      case ExprFunc::tan: return std::tan(x);
      case ExprFunc::sinh: return std::sinh(x);
      case ExprFunc::cosh: return std::cosh(x);
      case ExprFunc::tanh: return std::tanh(x);
      case ExprFunc::exp: return std::exp(x);
      case ExprFunc::log:
        if (x <= 0.0) throw EvalDomainError(n.offset, "log of a nonpositive value");
        return std::log(x);
      case ExprFunc::sqrt:
        if (x < 0.0) throw EvalDomainError(n.offset, "sqrt of a negative value");
        return std::sqrt(x);
      case ExprFunc::abs: return std::abs(x);
    }
    return 0.0;
  }

  double gdist(const ExprNode& n) const {
    if (point_ == nullptr) throw EvalDomainError(n.offset, "gdist needs a point");
    Vector target = Eigen::Map<const Vector>(n.target.data(), static_cast<Eigen::Index>(n.target.size()));
    try {
      return dist(*point_, Point::snap(point_->manifold(), std::move(target)));
    } catch (const Error& e) {
      throw EvalDomainError(n.offset, std::string("gdist target: ") + e.what());
    }
  }

  const std::vector<ExprNode>& nodes_;
  const Point* point_;
};

}  // namespace

double ExprParser::constant_value(int index) const {
  try {
    return Evaluator(ast_.nodes_, nullptr).eval(index);
  } catch (const EvalDomainError& e) {
    fail_at(e.offset(), "a well-defined constant");
  }
}

double evaluate(const ExprAst& ast, const Point& point) {
  if (point.manifold().ambient_dim() < ast.ambient_dim()) {
    throw Error(ErrorKind::InvalidArgument, "expression references coordinates beyond the point's dimension");
  }
  return Evaluator(ast.nodes(), &point).eval(ast.root());
}

TangentVector riemannian_grad(const ExprAst& ast, const Point& point) {
  const double f0 = evaluate(ast, point);
  const double h = 1e-6 * std::max(1.0, std::sqrt(std::abs(f0)));
  const auto basis = tangent_basis(point);
  Vector grad = Vector::Zero(point.manifold().ambient_dim());
  for (const auto& e : basis) {
    const double fp = evaluate(ast, exp_map(e * h));
    const double fm = evaluate(ast, exp_map(e * (-h)));
    grad += ((fp - fm) / (2.0 * h)) * e.coords();
  }
  return TangentVector::project(point, grad);
}

// ------------------------------------------------------------ printing

namespace {

void print_node(const ExprAst& ast, int index, std::string& out) {
  using K = ExprNode::Kind;
  const ExprNode& n = ast.nodes()[index];
  auto bin = [&](const char* op) {
    out += '(';
    print_node(ast, n.lhs, out);
    out += op;
    print_node(ast, n.rhs, out);
    out += ')';
  };
  switch (n.kind) {
    case K::number: out += format_number(n.value); break;
    case K::variable: out += 'x' + std::to_string(n.variable); break;
    case K::negate:
      out += "(-";
      print_node(ast, n.lhs, out);
      out += ')';
      break;
    case K::add: bin(" + "); break;
    case K::sub: bin(" - "); break;
    case K::mul: bin(" * "); break;
    case K::div: bin(" / "); break;
    case K::pow: bin("^"); break;
    case K::call:
      out += to_string(n.func);
      out += '(';
      print_node(ast, n.lhs, out);
      out += ')';
      break;
    case K::gdist:
      out += "gdist(";
      for (std::size_t i = 0; i < n.target.size(); ++i) {
        if (i) out += ", ";
        out += format_number(n.target[i]);
      }
      out += ')';
      break;
  }
}

}  // namespace

std::string to_canonical_string(const ExprAst& ast) {
  std::string out;
  print_node(ast, ast.root(), out);
  return out;
}

}  // namespace geoconvex
