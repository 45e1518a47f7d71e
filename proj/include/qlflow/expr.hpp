#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>

namespace qlflow {

/// Independent variables an expression may reference.
enum class Var : std::uint8_t { T, Z1, Z2 };

std::string_view var_name(Var v);

/// Values bound to the independent variables during evaluation.
struct Env {
  double t = 0.0;
  double z1 = 0.0;
  double z2 = 0.0;

  [[nodiscard]] double operator[](Var v) const {
    switch (v) {
      case Var::T: return t;
      case Var::Z1: return z1;
      case Var::Z2: return z2;
    }
    return 0.0;
  }
};

/// Raised by parse() with the 0-based character offset of the offending token.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t position, const std::string& what);
  [[nodiscard]] std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

/// Raised by evaluate() when a node has no real value (x/0, ln(x<=0), sqrt(x<0), ...).
class EvalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Func : std::uint8_t { Sin, Cos, Tan, Exp, Ln, Sinh, Cosh, Tanh, Sqrt };

/// Immutable expression tree over t, z1, z2.
///
/// Nodes are shared between trees, so copying an Expr is cheap and derivative
/// trees reuse the subtrees of their source. All operations are pure and may be
/// called concurrently on shared instances.
class Expr {
 public:
  enum class Kind : std::uint8_t { Constant, Variable, Add, Sub, Mul, Div, Neg, Pow, Call };

  struct Node;

  /// Constant zero.
  Expr();
  Expr(double value);  // NOLINT(google-explicit-constructor): literals read naturally in builders

  static Expr constant(double value);
  static Expr variable(Var v);
  static Expr call(Func f, Expr arg);
  static Expr power(Expr base, double exponent);

  /// Raw binary node without any simplification. Used by the parser so that
  /// literals like 1/20 stay as Div nodes.
  static Expr binary(Kind kind, Expr lhs, Expr rhs);
  static Expr negate(Expr operand);

  [[nodiscard]] Kind kind() const;
  [[nodiscard]] double constant_value() const;  // Constant nodes only
  [[nodiscard]] bool is_constant(double value) const;
  [[nodiscard]] bool depends_on(Var v) const;

  [[nodiscard]] double evaluate(const Env& env) const;
  [[nodiscard]] Expr derivative(Var v) const;

  /// Fully parenthesized text that parses back to an evaluation-equivalent tree.
  [[nodiscard]] std::string to_string() const;

  [[nodiscard]] const Node& node() const { return *node_; }

 private:
  struct Empty {};
  explicit Expr(Empty) {}
  explicit Expr(std::shared_ptr<const Node> node);
  std::shared_ptr<const Node> node_;
};

// Builders with 0/1 identity simplification; used by derivative() and by
// family constructors. They never change a value by more than rounding.
Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);

Expr sin(const Expr& a);
Expr cos(const Expr& a);
Expr exp(const Expr& a);
Expr pow(const Expr& a, double exponent);

Expr parse(std::string_view text);
Expr differentiate(const Expr& e, Var v);
double evaluate(const Expr& e, const Env& env);

}  // namespace qlflow
