#include <cmath>
#include <string>
#include <vector>

#include "doctest.h"
#include "isaacs/config.hpp"
#include "isaacs/expr.hpp"
#include "isaacs/rng.hpp"

using namespace isaacs;

namespace {

Env random_env(std::uint64_t seed, std::uint64_t idx) {
  Env env;
  for (int s = 0; s < kNumVars; ++s)
    env.set(static_cast<Var>(s), 4 * rng::u01(seed, rng::stream_id(3, s), idx) - 2);
  return env;
}

}  // namespace

TEST_CASE("frozen evaluations and operator precedence") {
  Env env;
  env.x = 3;
  CHECK(parse_expression("0.5*x + 2").eval(env) == doctest::Approx(3.5).epsilon(1e-15));
  CHECK(parse_expression("2 + 3*4^2").eval(env) == doctest::Approx(50).epsilon(1e-15));
  CHECK(parse_expression("-x^2").eval(env) == doctest::Approx(9).epsilon(1e-15));
  CHECK(parse_expression("1 - 2 - 3").eval(env) == doctest::Approx(-4).epsilon(1e-15));
  CHECK(parse_expression("8/4/2").eval(env) == doctest::Approx(1).epsilon(1e-15));
  CHECK(parse_expression("2^-1").eval(env) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(parse_expression("exp(0)").eval(env) == 1.0);

  env.x = -2;
  CHECK(parse_expression("max(x, 0)").eval(env) == 0.0);
  env.x = 1.5;
  CHECK(parse_expression("max(x, 0)").eval(env) == 1.5);
  env.e = -0.25;
  CHECK(parse_expression("min(1, abs(e))").eval(env) == 0.25);
}

TEST_CASE("print-parse identity over a corpus") {
  const std::vector<std::string> corpus = {
      "0.5*x + 2",
      "u + v - 0.5*y",
      "0.2*(1 - z)",
      "max(x, 0)",
      "tanh(z)*0.3 + 0.5",
      "x*x",
      "0.5*min(1, abs(e))",
      "exp(-(x^2)/2)",
      "t + x*y - z/2",
      "sin(cos(x)) + sqrt(abs(u))",
  };
  for (const std::string& src : corpus) {
    CAPTURE(src);
    const Expression a = parse_expression(src);
    const std::string printed = a.print();
    const Expression b = parse_expression(printed);
    // Rendering is canonical: a second print round does not move.
    CHECK(b.print() == printed);
    CHECK(a.vars() == b.vars());
    for (std::uint64_t i = 0; i < 1000; ++i) {
      const Env env = random_env(7, i);
      const double va = a.eval(env);
      const double vb = b.eval(env);
      if (va != vb) {
        CAPTURE(i);
        REQUIRE(va == vb);  // identical trees evaluate bit-identically
      }
    }
  }
}

TEST_CASE("variable accounting") {
  const Expression e = parse_expression("u + v");
  CHECK(e.vars() == (mask::u | mask::v));
  CHECK(e.references(Var::u));
  CHECK(e.references(Var::v));
  CHECK_FALSE(e.references(Var::x));
  CHECK_FALSE(parse_expression("3.5").references(Var::x));
  CHECK(parse_expression("3.5").is_constant());
  CHECK_FALSE(parse_expression("x").is_constant());
}

TEST_CASE("slot masks reject out-of-role variables") {
  CHECK_NOTHROW(parse_expression("x*x", mask::x, "terminal"));
  CHECK_THROWS_AS(parse_expression("y", mask::x, "terminal"), ExprParseError);
  CHECK_THROWS_AS(parse_expression("x + u", mask::x | mask::t, "terminal"), ExprParseError);
  try {
    parse_expression("x +\n z*2", mask::x, "drift");
    FAIL("expected a parse error");
  } catch (const ExprParseError& err) {
    CHECK(err.line() == 2);
    CHECK(err.column() >= 1);
  }
}

TEST_CASE("malformed sources raise with positions") {
  CHECK_THROWS_AS(parse_expression("x +"), ExprParseError);
  CHECK_THROWS_AS(parse_expression("foo(x)"), ExprParseError);
  CHECK_THROWS_AS(parse_expression("x y"), ExprParseError);
  CHECK_THROWS_AS(parse_expression("(x"), ExprParseError);
  CHECK_THROWS_AS(parse_expression("max(x)"), ExprParseError);
  CHECK_THROWS_AS(parse_expression("abs(x, 1)"), ExprParseError);
  CHECK_THROWS_AS(parse_expression(""), ExprParseError);
}

TEST_CASE("non-finite values raise at evaluation time") {
  Env env;
  env.x = -1;
  CHECK_THROWS_AS(parse_expression("log(x)").eval(env), EvalError);
  CHECK_THROWS_AS(parse_expression("sqrt(x)").eval(env), EvalError);
  env.x = 0;
  CHECK_THROWS_AS(parse_expression("1/x").eval(env), EvalError);
  CHECK_THROWS_AS(parse_expression("log(x)").eval(env), EvalError);
  env.x = 2;
  CHECK_NOTHROW(parse_expression("log(x)").eval(env));
}

TEST_CASE("named-binding evaluation enforces coverage") {
  const Expression e = parse_expression("x*x + y");
  CHECK(e.evaluate({{"x", 2.0}, {"y", 1.0}}) == doctest::Approx(5.0).epsilon(1e-15));
  CHECK_THROWS_AS(e.evaluate({{"x", 2.0}}), EvalError);
}

namespace {

const char* kBaseConfig = R"(# sample
[grid]
T = 1
nt = 50
x_min = -2
x_max = 2
nx = 41

[model]
b = "0"
sigma = "1"
phi = "x*x"
)";

}  // namespace

TEST_CASE("digest is stable under formatting and order") {
  const ConfigDoc a = ConfigDoc::from_text(kBaseConfig);
  const ConfigDoc b = ConfigDoc::from_text(
      "[model]\n"
      "phi   =   \"x*x\"   # terminal\n"
      "sigma = \"1\"\n"
      "b = \"0\"\n"
      "\n"
      "[grid]\n"
      "nx = 41\n"
      "x_max = 2\n"
      "x_min = -2\n"
      "nt = 50\n"
      "T = 1\n");
  CHECK(a.digest() == b.digest());
  CHECK(a.digest().size() == 16);
  CHECK(a.digest().find_first_not_of("0123456789abcdef") == std::string::npos);

  ConfigDoc c = ConfigDoc::from_text(kBaseConfig);
  c.set("grid", "nt", "51");
  CHECK(c.digest() != a.digest());
  CHECK(c.integer("grid", "nt") == 51);

  ConfigDoc d = ConfigDoc::from_text(kBaseConfig);
  d.set("solver", "picard_tol", "1e-9");
  CHECK(d.digest() != a.digest());
  CHECK(d.num("solver", "picard_tol") == doctest::Approx(1e-9));
}

TEST_CASE("config accessors and failure modes") {
  const ConfigDoc doc = ConfigDoc::from_text(kBaseConfig);
  CHECK(doc.num("grid", "T") == 1.0);
  CHECK(doc.integer("grid", "nx") == 41);
  CHECK(doc.str("model", "phi") == "x*x");
  CHECK(doc.has("model", "b"));
  CHECK_FALSE(doc.has("model", "f"));
  CHECK(doc.num_or("grid", "t0", 0.25) == 0.25);
  CHECK(doc.int_or("solver", "picard_max", 7) == 7);

  CHECK_THROWS_AS(doc.num("grid", "missing"), ConfigError);
  CHECK_THROWS_AS(doc.raw("nowhere", "key"), ConfigError);
  CHECK_THROWS_AS(doc.integer("grid", "T") && doc.integer("model", "phi"), ConfigError);

  const ConfigDoc lists = ConfigDoc::from_text("[levy]\natoms = -1, 1\n");
  const std::vector<double> atoms = lists.num_list("levy", "atoms");
  REQUIRE(atoms.size() == 2);
  CHECK(atoms[0] == -1.0);
  CHECK(atoms[1] == 1.0);
}

TEST_CASE("config parse errors carry origin and line") {
  CHECK_THROWS_AS(ConfigDoc::from_text("x = 1\n"), ConfigError);
  CHECK_THROWS_AS(ConfigDoc::from_text("[grid]\n[grid]\n"), ConfigError);
  CHECK_THROWS_AS(ConfigDoc::from_text("[grid]\nnt = 1\nnt = 2\n"), ConfigError);
  CHECK_THROWS_AS(ConfigDoc::from_text("[grid\nnt = 1\n"), ConfigError);
  CHECK_THROWS_AS(ConfigDoc::from_text("[grid]\nnt\n"), ConfigError);
  CHECK_THROWS_AS(ConfigDoc::from_text("[grid]\nnt =\n"), ConfigError);
  CHECK_THROWS_AS(ConfigDoc::from_file("/nonexistent/path.cfg"), ConfigError);
  try {
    ConfigDoc::from_text("[grid]\nbroken line\n", "unit.cfg");
    FAIL("expected a parse error");
  } catch (const ConfigError& err) {
    const std::string what = err.what();
    CHECK(what.find("unit.cfg:2") != std::string::npos);
  }
  CHECK_THROWS_AS(ConfigDoc::from_text("[grid]\nnt = 2.5\n").integer("grid", "nt"),
                  ConfigError);
}

TEST_CASE("integer accessor rejects fractional text") {
  const ConfigDoc doc = ConfigDoc::from_text("[grid]\nnt = 50\nbad = 2.5\n");
  CHECK(doc.integer("grid", "nt") == 50);
  CHECK_THROWS_AS(doc.integer("grid", "bad"), ConfigError);
}
