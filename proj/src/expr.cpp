#include "qlflow/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <utility>
#include <vector>

namespace qlflow {

struct Expr::Node {
  Kind kind = Kind::Constant;
  double value = 0.0;  // Constant value, or the exponent of a Pow node
  Var var = Var::T;
  Func func = Func::Sin;
  Expr lhs{Empty{}};  // operand for unary kinds
  Expr rhs{Empty{}};
};

namespace {

const char* func_name(Func f) {
  switch (f) {
    case Func::Sin: return "sin";
    case Func::Cos: return "cos";
    case Func::Tan: return "tan";
    case Func::Exp: return "exp";
    case Func::Ln: return "ln";
    case Func::Sinh: return "sinh";
    case Func::Cosh: return "cosh";
    case Func::Tanh: return "tanh";
    case Func::Sqrt: return "sqrt";
  }
  return "?";
}

std::string format_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

[[noreturn]] void eval_fail(const char* what, const Expr& node) {
  throw EvalError(std::string(what) + " in '" + node.to_string() + "'");
}

}  // namespace

std::string_view var_name(Var v) {
  switch (v) {
    case Var::T: return "t";
    case Var::Z1: return "z1";
    case Var::Z2: return "z2";
  }
  return "?";
}

ParseError::ParseError(std::size_t position, const std::string& what)
    : std::runtime_error("parse error at position " + std::to_string(position) + ": " + what),
      position_(position) {}

// Node construction ----------------------------------------------------------

// The default Expr is a constant zero; a shared node avoids allocating one for
// every default-constructed child slot.
Expr::Expr() : Expr(0.0) {}

Expr::Expr(double value) : node_(nullptr) {
  static const auto zero = std::make_shared<const Node>();
  if (value == 0.0 && !std::signbit(value)) {
    node_ = zero;
    return;
  }
  auto n = std::make_shared<Node>();
  n->kind = Kind::Constant;
  n->value = value;
  node_ = std::move(n);
}

Expr::Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

Expr Expr::constant(double value) { return Expr(value); }

Expr Expr::variable(Var v) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Variable;
  n->var = v;
  return Expr(std::shared_ptr<const Node>(std::move(n)));
}

Expr Expr::call(Func f, Expr arg) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Call;
  n->func = f;
  n->lhs = std::move(arg);
  return Expr(std::shared_ptr<const Node>(std::move(n)));
}

Expr Expr::power(Expr base, double exponent) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Pow;
  n->value = exponent;
  n->lhs = std::move(base);
  return Expr(std::shared_ptr<const Node>(std::move(n)));
}

Expr Expr::binary(Kind kind, Expr lhs, Expr rhs) {
  auto n = std::make_shared<Node>();
  n->kind = kind;
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  return Expr(std::shared_ptr<const Node>(std::move(n)));
}

Expr Expr::negate(Expr operand) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Neg;
  n->lhs = std::move(operand);
  return Expr(std::shared_ptr<const Node>(std::move(n)));
}

Expr::Kind Expr::kind() const { return node_->kind; }

double Expr::constant_value() const { return node_->value; }

bool Expr::is_constant(double value) const {
  return node_->kind == Kind::Constant && node_->value == value;
}

bool Expr::depends_on(Var v) const {
  const Node& n = *node_;
  switch (n.kind) {
    case Kind::Constant: return false;
    case Kind::Variable: return n.var == v;
    case Kind::Neg:
    case Kind::Pow:
    case Kind::Call: return n.lhs.depends_on(v);
    default: return n.lhs.depends_on(v) || n.rhs.depends_on(v);
  }
}

// Evaluation -----------------------------------------------------------------

double Expr::evaluate(const Env& env) const {
  const Node& n = *node_;
  switch (n.kind) {
    case Kind::Constant: return n.value;
    case Kind::Variable: return env[n.var];
    case Kind::Add: return n.lhs.evaluate(env) + n.rhs.evaluate(env);
    case Kind::Sub: return n.lhs.evaluate(env) - n.rhs.evaluate(env);
    case Kind::Mul: return n.lhs.evaluate(env) * n.rhs.evaluate(env);
    case Kind::Div: {
      const double den = n.rhs.evaluate(env);
      if (den == 0.0) eval_fail("division by zero", *this);
      return n.lhs.evaluate(env) / den;
    }
    case Kind::Neg: return -n.lhs.evaluate(env);
    case Kind::Pow: {
      const double base = n.lhs.evaluate(env);
      const double e = n.value;
      if (base == 0.0 && e < 0.0) eval_fail("division by zero", *this);
      if (base < 0.0 && e != std::floor(e)) eval_fail("non-integer power of negative base", *this);
      if (e == 2.0) return base * base;
      return std::pow(base, e);
    }
    case Kind::Call: {
      const double a = n.lhs.evaluate(env);
      switch (n.func) {
        case Func::Sin: return std::sin(a);
        case Func::Cos: return std::cos(a);
        case Func::Tan: {
          if (std::cos(a) == 0.0) eval_fail("tan pole", *this);
          return std::tan(a);
        }
        case Func::Exp: return std::exp(a);
        case Func::Ln:
          if (!(a > 0.0)) eval_fail("log of non-positive value", *this);
          return std::log(a);
        case Func::Sinh: return std::sinh(a);
        case Func::Cosh: return std::cosh(a);
        case Func::Tanh: return std::tanh(a);
        case Func::Sqrt:
          if (a < 0.0) eval_fail("sqrt of negative value", *this);
          return std::sqrt(a);
      }
    }
  }
  return 0.0;
}

// Simplifying builders -------------------------------------------------------

Expr operator+(const Expr& a, const Expr& b) {
  if (a.is_constant(0.0)) return b;
  if (b.is_constant(0.0)) return a;
  if (a.kind() == Expr::Kind::Constant && b.kind() == Expr::Kind::Constant)
    return Expr(a.constant_value() + b.constant_value());
  return Expr::binary(Expr::Kind::Add, a, b);
}

Expr operator-(const Expr& a, const Expr& b) {
  if (b.is_constant(0.0)) return a;
  if (a.is_constant(0.0)) return -b;
  if (a.kind() == Expr::Kind::Constant && b.kind() == Expr::Kind::Constant)
    return Expr(a.constant_value() - b.constant_value());
  return Expr::binary(Expr::Kind::Sub, a, b);
}

Expr operator*(const Expr& a, const Expr& b) {
  if (a.is_constant(0.0) || b.is_constant(0.0)) return Expr(0.0);
  if (a.is_constant(1.0)) return b;
  if (b.is_constant(1.0)) return a;
  if (a.is_constant(-1.0)) return -b;
  if (b.is_constant(-1.0)) return -a;
  if (a.kind() == Expr::Kind::Constant && b.kind() == Expr::Kind::Constant)
    return Expr(a.constant_value() * b.constant_value());
  return Expr::binary(Expr::Kind::Mul, a, b);
}

Expr operator/(const Expr& a, const Expr& b) {
  if (a.is_constant(0.0)) return Expr(0.0);
  if (b.is_constant(1.0)) return a;
  return Expr::binary(Expr::Kind::Div, a, b);
}

Expr operator-(const Expr& a) {
  if (a.kind() == Expr::Kind::Constant) return Expr(-a.constant_value());
  if (a.kind() == Expr::Kind::Neg) return a.node().lhs;
  return Expr::negate(a);
}

Expr sin(const Expr& a) { return Expr::call(Func::Sin, a); }
Expr cos(const Expr& a) { return Expr::call(Func::Cos, a); }
Expr exp(const Expr& a) { return Expr::call(Func::Exp, a); }

Expr pow(const Expr& a, double exponent) {
  if (exponent == 0.0) return Expr(1.0);
  if (exponent == 1.0) return a;
  return Expr::power(a, exponent);
}

// Differentiation ------------------------------------------------------------

Expr Expr::derivative(Var v) const {
  const Node& n = *node_;
  if (!depends_on(v)) return Expr(0.0);
  switch (n.kind) {
    case Kind::Constant: return Expr(0.0);
    case Kind::Variable: return Expr(1.0);
    case Kind::Add: return n.lhs.derivative(v) + n.rhs.derivative(v);
    case Kind::Sub: return n.lhs.derivative(v) - n.rhs.derivative(v);
    case Kind::Mul: return n.lhs.derivative(v) * n.rhs + n.lhs * n.rhs.derivative(v);
    case Kind::Div: {
      const Expr da = n.lhs.derivative(v);
      const Expr db = n.rhs.derivative(v);
      if (db.is_constant(0.0)) return da / n.rhs;
      return (da * n.rhs - n.lhs * db) / pow(n.rhs, 2.0);
    }
    case Kind::Neg: return -n.lhs.derivative(v);
    case Kind::Pow:
      return Expr(n.value) * pow(n.lhs, n.value - 1.0) * n.lhs.derivative(v);
    case Kind::Call: {
      const Expr& a = n.lhs;
      const Expr da = a.derivative(v);
      switch (n.func) {
        case Func::Sin: return cos(a) * da;
        case Func::Cos: return -(sin(a) * da);
        case Func::Tan: return da / pow(cos(a), 2.0);
        case Func::Exp: return *this * da;
        case Func::Ln: return da / a;
        case Func::Sinh: return Expr::call(Func::Cosh, a) * da;
        case Func::Cosh: return Expr::call(Func::Sinh, a) * da;
        case Func::Tanh: return da / pow(Expr::call(Func::Cosh, a), 2.0);
        case Func::Sqrt: return da / (Expr(2.0) * *this);
      }
    }
  }
  return Expr(0.0);
}

// Printing -------------------------------------------------------------------

std::string Expr::to_string() const {
  const Node& n = *node_;
  switch (n.kind) {
    case Kind::Constant: {
      std::string s = format_number(n.value);
      return n.value < 0.0 ? "(" + s + ")" : s;
    }
    case Kind::Variable: return std::string(var_name(n.var));
    case Kind::Add: return "(" + n.lhs.to_string() + " + " + n.rhs.to_string() + ")";
    case Kind::Sub: return "(" + n.lhs.to_string() + " - " + n.rhs.to_string() + ")";
    case Kind::Mul: return "(" + n.lhs.to_string() + " * " + n.rhs.to_string() + ")";
    case Kind::Div: return "(" + n.lhs.to_string() + " / " + n.rhs.to_string() + ")";
    case Kind::Neg: return "(-" + n.lhs.to_string() + ")";
    case Kind::Pow: {
      std::string e = format_number(n.value);
      if (n.value < 0.0) e = "(" + e + ")";
      return "(" + n.lhs.to_string() + "^" + e + ")";
    }
    case Kind::Call: return std::string(func_name(n.func)) + "(" + n.lhs.to_string() + ")";
  }
  return {};
}

// Parsing --------------------------------------------------------------------

namespace {

enum class Tok { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, Comma, End };

struct Token {
  Tok kind;
  std::size_t pos;
  std::string text;
  double number = 0.0;
};

std::vector<Token> tokenize(std::string_view s) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    const char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    const std::size_t start = i;
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      while (i < s.size() && (std::isdigit(static_cast<unsigned char>(s[i])) || s[i] == '.')) ++i;
      // exponent part only when followed by digits, so "2e" is not swallowed
      if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
        std::size_t j = i + 1;
        if (j < s.size() && (s[j] == '+' || s[j] == '-')) ++j;
        if (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) {
          i = j;
          while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
        }
      }
      std::string text(s.substr(start, i - start));
      char* end = nullptr;
      const double value = std::strtod(text.c_str(), &end);
      if (end != text.c_str() + text.size()) throw ParseError(start, "malformed number '" + text + "'");
      out.push_back({Tok::Number, start, std::move(text), value});
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (i < s.size() && (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '_')) ++i;
      out.push_back({Tok::Ident, start, std::string(s.substr(start, i - start))});
      continue;
    }
    Tok k;
    switch (c) {
      case '+': k = Tok::Plus; break;
      case '-': k = Tok::Minus; break;
      case '*': k = Tok::Star; break;
      case '/': k = Tok::Slash; break;
      case '^': k = Tok::Caret; break;
      case '(': k = Tok::LParen; break;
      case ')': k = Tok::RParen; break;
      case ',': k = Tok::Comma; break;
      default: throw ParseError(start, std::string("unexpected character '") + c + "'");
    }
    out.push_back({k, start, std::string(1, c)});
    ++i;
  }
  out.push_back({Tok::End, s.size(), ""});
  return out;
}

bool lookup_func(const std::string& name, Func& f) {
  static constexpr std::pair<const char*, Func> table[] = {
      {"sin", Func::Sin},   {"cos", Func::Cos},   {"tan", Func::Tan},
      {"exp", Func::Exp},   {"ln", Func::Ln},     {"sinh", Func::Sinh},
      {"cosh", Func::Cosh}, {"tanh", Func::Tanh}, {"sqrt", Func::Sqrt},
  };
  for (const auto& [n, fn] : table) {
    if (name == n) {
      f = fn;
      return true;
    }
  }
  return false;
}

bool lookup_var(const std::string& name, Var& v) {
  if (name == "t") v = Var::T;
  else if (name == "z1") v = Var::Z1;
  else if (name == "z2") v = Var::Z2;
  else return false;
  return true;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : toks_(tokenize(text)) {}

  Expr parse_all() {
    if (peek().kind == Tok::End) throw ParseError(0, "empty expression");
    Expr e = expr();
    if (peek().kind != Tok::End) {
      const Token& t = peek();
      if (t.kind == Tok::Ident || t.kind == Tok::Number || t.kind == Tok::LParen)
        throw ParseError(t.pos, "unexpected '" + t.text + "' (implicit multiplication is not allowed)");
      throw ParseError(t.pos, "unexpected '" + t.text + "'");
    }
    return e;
  }

 private:
  const Token& peek() const { return toks_[i_]; }
  const Token& next() { return toks_[i_++]; }

  void expect(Tok kind, const char* what) {
    if (peek().kind != kind) {
      const Token& t = peek();
      throw ParseError(t.pos, std::string("expected ") + what +
                                  (t.kind == Tok::End ? " before end of input" : " but found '" + t.text + "'"));
    }
    ++i_;
  }

  Expr expr() {
    Expr lhs = term();
    while (peek().kind == Tok::Plus || peek().kind == Tok::Minus) {
      const Expr::Kind k = next().kind == Tok::Plus ? Expr::Kind::Add : Expr::Kind::Sub;
      lhs = Expr::binary(k, lhs, term());
    }
    return lhs;
  }

  Expr term() {
    Expr lhs = unary();
    while (peek().kind == Tok::Star || peek().kind == Tok::Slash) {
      const Expr::Kind k = next().kind == Tok::Star ? Expr::Kind::Mul : Expr::Kind::Div;
      lhs = Expr::binary(k, lhs, unary());
    }
    return lhs;
  }

  // Unary minus binds looser than '^', so -z1^2 is -(z1^2).
  Expr unary() {
    if (peek().kind == Tok::Minus) {
      next();
      return Expr::negate(unary());
    }
    return power();
  }

  Expr power() {
    Expr base = primary();
    if (peek().kind != Tok::Caret) return base;
    next();
    const std::size_t pos = peek().pos;
    const Expr e = unary();
    if (e.depends_on(Var::T) || e.depends_on(Var::Z1) || e.depends_on(Var::Z2))
      throw ParseError(pos, "exponent must be a constant");
    double value = 0.0;
    try {
      value = e.evaluate(Env{});
    } catch (const EvalError& err) {
      throw ParseError(pos, std::string("exponent has no value: ") + err.what());
    }
    return Expr::power(base, value);
  }

  Expr primary() {
    const Token& tok = peek();
    switch (tok.kind) {
      case Tok::Number: next(); return Expr::constant(tok.number);
      case Tok::LParen: {
        next();
        Expr e = expr();
        expect(Tok::RParen, "')'");
        return e;
      }
      case Tok::Ident: {
        next();
        Func f;
        Var v;
        if (lookup_func(tok.text, f)) {
          if (peek().kind != Tok::LParen)
            throw ParseError(tok.pos, "function '" + tok.text + "' expects 1 argument in parentheses");
          next();
          if (peek().kind == Tok::RParen)
            throw ParseError(peek().pos, "function '" + tok.text + "' expects 1 argument, got 0");
          Expr arg = expr();
          if (peek().kind == Tok::Comma)
            throw ParseError(peek().pos, "function '" + tok.text + "' expects 1 argument, got more");
          expect(Tok::RParen, "')'");
          return Expr::call(f, arg);
        }
        if (lookup_var(tok.text, v)) {
          if (peek().kind == Tok::LParen)
            throw ParseError(peek().pos, "variable '" + tok.text + "' cannot be called");
          return Expr::variable(v);
        }
        throw ParseError(tok.pos, "unknown identifier '" + tok.text + "'");
      }
      case Tok::End: throw ParseError(tok.pos, "unexpected end of input");
      default: throw ParseError(tok.pos, "unexpected '" + tok.text + "'");
    }
  }

  std::vector<Token> toks_;
  std::size_t i_ = 0;
};

}  // namespace

Expr parse(std::string_view text) { return Parser(text).parse_all(); }

Expr differentiate(const Expr& e, Var v) { return e.derivative(v); }

double evaluate(const Expr& e, const Env& env) { return e.evaluate(env); }

}  // namespace qlflow
