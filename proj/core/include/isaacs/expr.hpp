#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "isaacs/errors.hpp"

namespace isaacs {

/// The eight scalar slots an expression may read. Which subset is legal
/// depends on the role of the expression (drift, driver, terminal, ...).
enum class Var : std::uint8_t { t = 0, x, y, z, k, u, v, e };

inline constexpr int kNumVars = 8;

const char* var_name(Var v);

/// Bitmask over Var, bit i == Var(i).
using VarMask = std::uint8_t;

constexpr VarMask var_bit(Var v) { return static_cast<VarMask>(1u << static_cast<unsigned>(v)); }

namespace mask {
inline constexpr VarMask t = var_bit(Var::t);
inline constexpr VarMask x = var_bit(Var::x);
inline constexpr VarMask y = var_bit(Var::y);
inline constexpr VarMask z = var_bit(Var::z);
inline constexpr VarMask k = var_bit(Var::k);
inline constexpr VarMask u = var_bit(Var::u);
inline constexpr VarMask v = var_bit(Var::v);
inline constexpr VarMask e = var_bit(Var::e);
inline constexpr VarMask all = 0xff;
}  // namespace mask

/// Full slot assignment used on hot evaluation paths. Slots an expression
/// was parsed without are simply ignored.
struct Env {
  double t = 0, x = 0, y = 0, z = 0, k = 0, u = 0, v = 0, e = 0;

  double get(Var which) const {
    switch (which) {
      case Var::t: return t;
      case Var::x: return x;
      case Var::y: return y;
      case Var::z: return z;
      case Var::k: return k;
      case Var::u: return u;
      case Var::v: return v;
      case Var::e: return e;
    }
    return 0;  // unreachable
  }

  void set(Var which, double value) {
    switch (which) {
      case Var::t: t = value; break;
      case Var::x: x = value; break;
      case Var::y: y = value; break;
      case Var::z: z = value; break;
      case Var::k: k = value; break;
      case Var::u: u = value; break;
      case Var::v: v = value; break;
      case Var::e: e = value; break;
    }
  }
};

/// Parse failure. `line` and `column` are 1-based positions in the source
/// string handed to parse_expression.
class ExprParseError : public ConfigError {
public:
  ExprParseError(const std::string& msg, int line, int column)
      : ConfigError(msg), line_(line), column_(column) {}
  int line() const { return line_; }
  int column() const { return column_; }

private:
  int line_, column_;
};

/// Immutable scalar expression over the Var slots.
///
/// Grammar (binary ops +,-,*,/ left associative; '^' binds one atom pair):
///   expr   := term (('+'|'-') term)*
///   term   := factor (('*'|'/') factor)*
///   factor := atom ('^' atom)?
///   atom   := number | ident | ident '(' expr (',' expr)* ')'
///           | '(' expr ')' | '-' atom
///
/// Functions: abs exp log sin cos tanh sqrt (unary), min max (binary).
/// Evaluation is pure; any NaN or Inf produced at any node raises EvalError.
class Expression {
public:
  Expression() = default;

  /// Fast path: every slot is supplied, no lookups.
  double eval(const Env& env) const;

  /// Contract form: missing bindings for referenced variables are an error.
  double evaluate(const std::map<std::string, double>& bindings) const;

  /// Deterministic fully parenthesised rendering; reparsing yields a tree
  /// with identical evaluation order.
  std::string print() const;

  /// Union of variables the expression references.
  VarMask vars() const { return vars_; }
  bool references(Var v) const { return (vars_ & var_bit(v)) != 0; }

  bool empty() const { return nodes_.empty(); }

  /// True when the expression tree is a single numeric literal.
  bool is_constant() const;

private:
  enum class Kind : std::uint8_t { Const, Variable, Add, Sub, Mul, Div, Pow, Neg, Call };
  enum class Func : std::uint8_t { Abs, Exp, Log, Sin, Cos, Tanh, Sqrt, Min, Max };

  struct Node {
    Kind kind;
    Func func;    // Call only
    Var var;      // Variable only
    double value; // Const only
    std::int32_t a = -1, b = -1;
  };

  double eval_node(std::int32_t idx, const Env& env) const;
  void print_node(std::int32_t idx, std::string& out) const;

  std::vector<Node> nodes_;  // root is nodes_.back()
  VarMask vars_ = 0;

  friend class ExprParser;
};

/// Parse `src` admitting only the slots in `allowed`. `what` names the
/// expression in diagnostics ("drift", "terminal", ...). Out-of-slot
/// variables and malformed syntax raise ExprParseError with line/column.
Expression parse_expression(std::string_view src, VarMask allowed = mask::all,
                            std::string_view what = {});

}  // namespace isaacs
