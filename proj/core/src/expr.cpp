#include "isaacs/expr.hpp"

#include <cmath>
#include <cstdio>
#include <optional>

namespace isaacs {

const char* var_name(Var v) {
  static const char* names[kNumVars] = {"t", "x", "y", "z", "k", "u", "v", "e"};
  return names[static_cast<unsigned>(v)];
}

namespace {

std::optional<Var> var_from_name(std::string_view name) {
  for (int i = 0; i < kNumVars; ++i) {
    auto v = static_cast<Var>(i);
    if (name == var_name(v)) return v;
  }
  return std::nullopt;
}

struct FuncInfo {
  const char* name;
  int arity;
};

// Index order must match Expression::Func.
constexpr FuncInfo kFuncs[] = {
    {"abs", 1}, {"exp", 1}, {"log", 1}, {"sin", 1}, {"cos", 1},
    {"tanh", 1}, {"sqrt", 1}, {"min", 2}, {"max", 2},
};

void position_of(std::string_view src, std::size_t offset, int& line, int& column) {
  line = 1;
  column = 1;
  for (std::size_t i = 0; i < offset && i < src.size(); ++i) {
    if (src[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
}

}  // namespace

class ExprParser {
public:
  ExprParser(std::string_view src, VarMask allowed, std::string_view what)
      : src_(src), allowed_(allowed), what_(what) {}

  Expression run() {
    Expression out;
    out_ = &out;
    skip_ws();
    std::int32_t root = parse_expr();
    skip_ws();
    if (pos_ != src_.size()) fail("unexpected trailing input", pos_);
    if (out.nodes_.empty()) fail("empty expression", 0);
    (void)root;  // root is nodes_.back() by construction
    return out;
  }

private:
  [[noreturn]] void fail(const std::string& msg, std::size_t offset) {
    int line, column;
    position_of(src_, offset, line, column);
    std::string full = msg;
    if (!what_.empty()) full = std::string(what_) + ": " + full;
    full += " at line " + std::to_string(line) + ", column " + std::to_string(column);
    throw ExprParseError(full, line, column);
  }

  void skip_ws() {
    while (pos_ < src_.size() && (src_[pos_] == ' ' || src_[pos_] == '\t' ||
                                  src_[pos_] == '\r' || src_[pos_] == '\n'))
      ++pos_;
  }

  bool peek_is(char c) {
    skip_ws();
    return pos_ < src_.size() && src_[pos_] == c;
  }

  bool consume(char c) {
    if (peek_is(c)) {
      ++pos_;
      return true;
    }
    return false;
  }

  std::int32_t push(Expression::Node n) {
    out_->nodes_.push_back(n);
    return static_cast<std::int32_t>(out_->nodes_.size() - 1);
  }

  std::int32_t parse_expr() {
    std::int32_t lhs = parse_term();
    for (;;) {
      skip_ws();
      if (consume('+')) {
        std::int32_t rhs = parse_term();
        lhs = push({Expression::Kind::Add, {}, {}, 0, lhs, rhs});
      } else if (consume('-')) {
        std::int32_t rhs = parse_term();
        lhs = push({Expression::Kind::Sub, {}, {}, 0, lhs, rhs});
      } else {
        return lhs;
      }
    }
  }

  std::int32_t parse_term() {
    std::int32_t lhs = parse_factor();
    for (;;) {
      skip_ws();
      if (consume('*')) {
        std::int32_t rhs = parse_factor();
        lhs = push({Expression::Kind::Mul, {}, {}, 0, lhs, rhs});
      } else if (consume('/')) {
        std::int32_t rhs = parse_factor();
        lhs = push({Expression::Kind::Div, {}, {}, 0, lhs, rhs});
      } else {
        return lhs;
      }
    }
  }

  std::int32_t parse_factor() {
    std::int32_t base = parse_atom();
    skip_ws();
    if (consume('^')) {
      std::int32_t expo = parse_atom();
      base = push({Expression::Kind::Pow, {}, {}, 0, base, expo});
    }
    return base;
  }

  std::int32_t parse_atom() {
    skip_ws();
    if (pos_ >= src_.size()) fail("unexpected end of expression", pos_);
    char c = src_[pos_];

    if (c == '-') {
      ++pos_;
      std::int32_t inner = parse_atom();
      return push({Expression::Kind::Neg, {}, {}, 0, inner, -1});
    }
    if (c == '(') {
      ++pos_;
      std::int32_t inner = parse_expr();
      if (!consume(')')) fail("expected ')'", pos_);
      return inner;
    }
    if ((c >= '0' && c <= '9') || c == '.') return parse_number();
    if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_') return parse_ident();
    fail(std::string("unexpected character '") + c + "'", pos_);
  }

  std::int32_t parse_number() {
    std::size_t start = pos_;
    while (pos_ < src_.size() && ((src_[pos_] >= '0' && src_[pos_] <= '9') || src_[pos_] == '.'))
      ++pos_;
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t mark = pos_;
      ++pos_;
      if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
      if (pos_ < src_.size() && src_[pos_] >= '0' && src_[pos_] <= '9') {
        while (pos_ < src_.size() && src_[pos_] >= '0' && src_[pos_] <= '9') ++pos_;
      } else {
        pos_ = mark;  // the 'e' belongs to the next token
      }
    }
    std::string text(src_.substr(start, pos_ - start));
    char* end = nullptr;
    double value = std::strtod(text.c_str(), &end);
    if (end != text.c_str() + text.size() || !std::isfinite(value))
      fail("malformed number '" + text + "'", start);
    return push({Expression::Kind::Const, {}, {}, value, -1, -1});
  }

  std::int32_t parse_ident() {
    std::size_t start = pos_;
    while (pos_ < src_.size() &&
           ((src_[pos_] >= 'a' && src_[pos_] <= 'z') || (src_[pos_] >= 'A' && src_[pos_] <= 'Z') ||
            (src_[pos_] >= '0' && src_[pos_] <= '9') || src_[pos_] == '_'))
      ++pos_;
    std::string_view name = src_.substr(start, pos_ - start);

    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == '(') {
      int fi = -1;
      for (int i = 0; i < static_cast<int>(std::size(kFuncs)); ++i)
        if (name == kFuncs[i].name) fi = i;
      if (fi < 0) fail("unknown function '" + std::string(name) + "'", start);
      ++pos_;  // '('
      std::int32_t a = parse_expr();
      std::int32_t b = -1;
      int argc = 1;
      while (consume(',')) {
        std::int32_t next = parse_expr();
        if (argc == 1) b = next;
        ++argc;
      }
      if (!consume(')')) fail("expected ')' in call to '" + std::string(name) + "'", pos_);
      if (argc != kFuncs[fi].arity)
        fail("function '" + std::string(name) + "' expects " +
                 std::to_string(kFuncs[fi].arity) + " argument(s), got " + std::to_string(argc),
             start);
      return push({Expression::Kind::Call, static_cast<Expression::Func>(fi), {}, 0, a, b});
    }

    auto var = var_from_name(name);
    if (!var) fail("unknown identifier '" + std::string(name) + "'", start);
    if (!(allowed_ & var_bit(*var))) {
      std::string slots;
      for (int i = 0; i < kNumVars; ++i)
        if (allowed_ & var_bit(static_cast<Var>(i))) {
          if (!slots.empty()) slots += ",";
          slots += var_name(static_cast<Var>(i));
        }
      fail("variable '" + std::string(name) + "' is not admissible here (allowed: " + slots + ")",
           start);
    }
    out_->vars_ |= var_bit(*var);
    return push({Expression::Kind::Variable, {}, *var, 0, -1, -1});
  }

  std::string_view src_;
  VarMask allowed_;
  std::string_view what_;
  std::size_t pos_ = 0;
  Expression* out_ = nullptr;
};

Expression parse_expression(std::string_view src, VarMask allowed, std::string_view what) {
  return ExprParser(src, allowed, what).run();
}

double Expression::eval_node(std::int32_t idx, const Env& env) const {
  const Node& n = nodes_[static_cast<std::size_t>(idx)];
  double r;
  switch (n.kind) {
    case Kind::Const: r = n.value; break;
    case Kind::Variable: r = env.get(n.var); break;
    case Kind::Add: r = eval_node(n.a, env) + eval_node(n.b, env); break;
    case Kind::Sub: r = eval_node(n.a, env) - eval_node(n.b, env); break;
    case Kind::Mul: r = eval_node(n.a, env) * eval_node(n.b, env); break;
    case Kind::Div: r = eval_node(n.a, env) / eval_node(n.b, env); break;
    case Kind::Pow: r = std::pow(eval_node(n.a, env), eval_node(n.b, env)); break;
    case Kind::Neg: r = -eval_node(n.a, env); break;
    case Kind::Call: {
      double a = eval_node(n.a, env);
      switch (n.func) {
        case Func::Abs: r = std::fabs(a); break;
        case Func::Exp: r = std::exp(a); break;
        case Func::Log: r = std::log(a); break;
        case Func::Sin: r = std::sin(a); break;
        case Func::Cos: r = std::cos(a); break;
        case Func::Tanh: r = std::tanh(a); break;
        case Func::Sqrt: r = std::sqrt(a); break;
        case Func::Min: r = std::fmin(a, eval_node(n.b, env)); break;
        case Func::Max: r = std::fmax(a, eval_node(n.b, env)); break;
        default: r = 0; break;
      }
      break;
    }
    default: r = 0; break;
  }
  if (!std::isfinite(r)) {
    throw EvalError("non-finite value in expression evaluation near '" + print() + "'");
  }
  return r;
}

double Expression::eval(const Env& env) const {
  if (nodes_.empty()) throw EvalError("evaluating empty expression");
  return eval_node(static_cast<std::int32_t>(nodes_.size() - 1), env);
}

double Expression::evaluate(const std::map<std::string, double>& bindings) const {
  Env env;
  VarMask bound = 0;
  for (const auto& [name, value] : bindings) {
    auto v = var_from_name(name);
    if (!v) throw EvalError("binding for unknown variable '" + name + "'");
    env.set(*v, value);
    bound |= var_bit(*v);
  }
  VarMask missing = vars_ & static_cast<VarMask>(~bound);
  if (missing) {
    for (int i = 0; i < kNumVars; ++i)
      if (missing & var_bit(static_cast<Var>(i)))
        throw EvalError(std::string("unbound variable '") + var_name(static_cast<Var>(i)) + "'");
  }
  return eval(env);
}

bool Expression::is_constant() const {
  return nodes_.size() == 1 && nodes_[0].kind == Kind::Const;
}

void Expression::print_node(std::int32_t idx, std::string& out) const {
  const Node& n = nodes_[static_cast<std::size_t>(idx)];
  char buf[40];
  switch (n.kind) {
    case Kind::Const:
      std::snprintf(buf, sizeof buf, "%.17g", n.value);
      out += buf;
      break;
    case Kind::Variable: out += var_name(n.var); break;
    case Kind::Add:
    case Kind::Sub:
    case Kind::Mul:
    case Kind::Div:
    case Kind::Pow: {
      const char* op = n.kind == Kind::Add   ? " + "
                       : n.kind == Kind::Sub ? " - "
                       : n.kind == Kind::Mul ? " * "
                       : n.kind == Kind::Div ? " / "
                                             : "^";
      out += '(';
      print_node(n.a, out);
      out += op;
      print_node(n.b, out);
      out += ')';
      break;
    }
    case Kind::Neg:
      out += "(-";
      print_node(n.a, out);
      out += ')';
      break;
    case Kind::Call:
      out += kFuncs[static_cast<int>(n.func)].name;
      out += '(';
      print_node(n.a, out);
      if (n.b >= 0) {
        out += ", ";
        print_node(n.b, out);
      }
      out += ')';
      break;
  }
}

std::string Expression::print() const {
  if (nodes_.empty()) return {};
  std::string out;
  print_node(static_cast<std::int32_t>(nodes_.size() - 1), out);
  return out;
}

}  // namespace isaacs
