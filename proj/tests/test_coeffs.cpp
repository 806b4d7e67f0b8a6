#include <cmath>
#include <string>

#include "doctest.h"
#include "isaacs/coefficients.hpp"
#include "isaacs/config.hpp"
#include "isaacs/expr.hpp"
#include "isaacs/levy.hpp"

using namespace isaacs;

namespace {

ConfigDoc doc_of(const std::string& body) { return ConfigDoc::from_text(body, "unit.cfg"); }

CoefficientSet coeffs_of(const std::string& body) { return parse_coefficients(doc_of(body)); }

LevyModel unit_jumps() {
  return discretize_levy({-1.0, 1.0}, {0.5, 0.5},
                         parse_expression("0.5*min(1,abs(e))", mask::e, "l"), 1.0);
}

/// Minimal model block; callers append extra sections.
const char* kBaseModel =
    "[model]\n"
    "b = 0\n"
    "sigma = 0\n"
    "f = 0\n"
    "phi = x\n";

}  // namespace

TEST_CASE("coefficient table parses with defaulted jump slots") {
  const CoefficientSet cs = coeffs_of(
      "[model]\n"
      "b = -0.5*y\n"
      "sigma = 0.5 + 0*u\n"
      "f = -y + 0.1*z + u*v\n"
      "phi = x*x\n"
      "lip_b = 0.5\n"
      "lip_phi = 10\n");

  Env by;
  by.y = 3;
  CHECK(cs.b.eval(by) == -1.5);
  CHECK(cs.b.references(Var::y));
  CHECK_FALSE(cs.b.references(Var::x));
  CHECK(cs.f.references(Var::u));
  CHECK(cs.f.references(Var::v));

  // h and l default to the jump-free model, and the envelope constant to 1.
  CHECK(cs.h.is_constant());
  CHECK(cs.h.evaluate({}) == 0.0);
  CHECK(cs.l.is_constant());
  CHECK(cs.l.evaluate({}) == 0.0);
  CHECK(cs.rho_bound == 1.0);

  REQUIRE(cs.lip_constants.size() == 2);
  CHECK(cs.lip_constants.at("b") == 0.5);
  CHECK(cs.lip_constants.at("phi") == 10.0);

  // Round trip: printing and reparsing reproduces the same functions.
  Env env;
  env.y = 0.7;
  env.z = -0.3;
  env.u = 1;
  env.v = -1;
  const Expression again = parse_expression(cs.f.print(), mask::all, "f");
  CHECK(again.eval(env) == cs.f.eval(env));
}

TEST_CASE("coefficient table carries the jump data when present") {
  const CoefficientSet cs = coeffs_of(
      "[model]\n"
      "b = 0\n"
      "sigma = 1\n"
      "f = 0.2*k\n"
      "phi = x\n"
      "h = 0.1*e*(1+x)\n"
      "[levy]\n"
      "atoms = -1, 1\n"
      "intensities = 0.5, 0.5\n"
      "l = 0.5*min(1,abs(e))\n"
      "C = 2\n");
  CHECK(cs.h.references(Var::e));
  CHECK(cs.f.references(Var::k));
  CHECK(cs.rho_bound == 2.0);
  Env env;
  env.e = -1;
  env.x = 3;
  CHECK(cs.h.eval(env) == doctest::Approx(-0.4).epsilon(1e-14));
  CHECK(cs.l.eval(env) == 0.5);
}

TEST_CASE("coefficient slot rules are enforced at parse time") {
  // Forward coefficients cannot read the nonlocal pairing.
  CHECK_THROWS_AS(coeffs_of("[model]\n"
                            "b = k\n"
                            "sigma = 0\n"
                            "f = 0\n"
                            "phi = x\n"),
                  ConfigError);
  // The driver cannot read the jump mark.
  CHECK_THROWS_AS(coeffs_of("[model]\n"
                            "b = 0\n"
                            "sigma = 0\n"
                            "f = e\n"
                            "phi = x\n"),
                  ConfigError);
  // Terminal data depends on space only.
  CHECK_THROWS_AS(coeffs_of("[model]\n"
                            "b = 0\n"
                            "sigma = 0\n"
                            "f = 0\n"
                            "phi = x + t\n"),
                  ConfigError);
  // Declaring atoms without an amplitude is inconsistent.
  CHECK_THROWS_AS(coeffs_of("[model]\n"
                            "b = 0\n"
                            "sigma = 0\n"
                            "f = 0\n"
                            "phi = x\n"
                            "[levy]\n"
                            "atoms = 1\n"
                            "intensities = 1\n"
                            "l = 0\n"),
                  ConfigError);
  CHECK_THROWS_AS(parse_coefficients(doc_of("[grid]\nnx = 3\n")), ConfigError);
}

TEST_CASE("directional slope of a linear function is its coefficient") {
  const LevyModel none;
  const Expression lin = parse_expression("0.5*x", mask::all, "test");
  CHECK(directional_lipschitz(lin, Var::x, none, 200, 7) == doctest::Approx(0.5).epsilon(1e-9));
  // Slots the expression does not read report slope zero without probing.
  CHECK(directional_lipschitz(lin, Var::y, none, 200, 7) == 0.0);

  // For x^2 on [-5,5] the worst sampled quotient approaches but never
  // reaches 10: both endpoints of every probed chord stay inside the box.
  const Expression quad = parse_expression("x*x", mask::all, "test");
  const double slope = directional_lipschitz(quad, Var::x, none, 400, 7);
  CHECK(slope > 9.5);
  CHECK(slope < 10.0);

  // Probe streams are indexed per probe, so enlarging the budget only adds
  // candidates: the reported maximum is monotone in the probe count.
  const double s100 = directional_lipschitz(quad, Var::x, none, 100, 7);
  const double s200 = directional_lipschitz(quad, Var::x, none, 200, 7);
  const double s400 = directional_lipschitz(quad, Var::x, none, 400, 7);
  CHECK(s100 <= s200);
  CHECK(s200 <= s400);
  CHECK(s400 == slope);
}

TEST_CASE("regularity report measures growth and slopes per coefficient") {
  const CoefficientSet cs = coeffs_of(
      "[model]\n"
      "b = 0.2*x\n"
      "sigma = 0.5\n"
      "f = -y + 0.1*z\n"
      "phi = x*x\n");
  const LevyModel none;
  const H22Report rep = check_h22(cs, none, 400, 11);

  CHECK(rep.probes == 400);
  CHECK(rep.cap == 10.0);
  CHECK(rep.pass);

  // phi = x^2 against 1+|x| on |x| <= 5 tops out at 25/6.
  const auto& phi = rep.coefficients.at("phi");
  CHECK(phi.growth > 3.9);
  CHECK(phi.growth <= 25.0 / 6.0 + 1e-12);
  CHECK(phi.lip_overall > 9.5);

  const auto& b = rep.coefficients.at("b");
  CHECK(b.lip.at(Var::x) == doctest::Approx(0.2).epsilon(1e-9));
  CHECK(b.lip_overall == doctest::Approx(0.2).epsilon(1e-9));

  // A constant coefficient reads no state slot: growth is its magnitude.
  const auto& sg = rep.coefficients.at("sigma");
  CHECK(sg.lip_overall == 0.0);
  CHECK(sg.growth == 0.5);

  const auto& f = rep.coefficients.at("f");
  CHECK(f.lip.at(Var::y) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(f.lip.at(Var::z) == doctest::Approx(0.1).epsilon(1e-9));

  // The sampled certificate is a pure function of (inputs, seed).
  const H22Report rep2 = check_h22(cs, none, 400, 11);
  CHECK(rep2.coefficients.at("phi").growth == phi.growth);
  CHECK(rep2.coefficients.at("b").lip_overall == b.lip_overall);

  CHECK_THROWS_AS(check_h22(cs, none, 50, 11), ConfigError);
}

TEST_CASE("coupling parameter block validates its structural constraints") {
  // Absent section: all-zero betas fail the positivity combinations.
  CHECK_THROWS_AS(monotonicity_params(doc_of(kBaseModel)), ConfigError);
  CHECK_THROWS_AS(monotonicity_params(doc_of("[monotonicity]\n"
                                             "G = 0\n"
                                             "beta1 = 1\n"
                                             "mu1 = 1\n")),
                  ConfigError);
  CHECK_THROWS_AS(monotonicity_params(doc_of("[monotonicity]\n"
                                             "beta1 = -1\n"
                                             "mu1 = 1\n")),
                  ConfigError);
  // beta1 covers the first two sums but mu1 = 0 leaves the last two empty.
  CHECK_THROWS_AS(monotonicity_params(doc_of("[monotonicity]\n"
                                             "beta1 = 1\n")),
                  ConfigError);

  const MonotonicityCert cert = monotonicity_params(doc_of("[monotonicity]\n"
                                                           "G = -2\n"
                                                           "beta1 = 0.25\n"
                                                           "beta2 = 0.5\n"
                                                           "beta3 = 0.75\n"
                                                           "mu1 = 1.5\n"));
  CHECK(cert.G == -2.0);
  CHECK(cert.beta1 == 0.25);
  CHECK(cert.beta2 == 0.5);
  CHECK(cert.beta3 == 0.75);
  CHECK(cert.mu1 == 1.5);
  CHECK_FALSE(cert.verified);
}

TEST_CASE("dissipation certificate accepts exactly dissipative families") {
  const LevyModel none;
  MonotonicityCert params;

  // Vanishing dynamics with the identity terminal: both inequalities hold
  // with equality, so the sampled violation is exactly zero.
  params.G = 1;
  params.beta1 = 0;
  params.beta2 = 0.5;
  params.beta3 = 0.5;
  params.mu1 = 1;
  const CoefficientSet flat = coeffs_of(kBaseModel);
  const MonotonicityCert a = check_h23(flat, none, params, 200, 5);
  CHECK(a.verified);
  CHECK(a.worst_violation == 0.0);
  CHECK(a.probes == 200);

  // f = x pays the beta1 budget exactly.
  params.beta1 = 1;
  params.beta2 = 0;
  params.beta3 = 0;
  const CoefficientSet fx = coeffs_of(
      "[model]\n"
      "b = 0\n"
      "sigma = 0\n"
      "f = x\n"
      "phi = x\n");
  const MonotonicityCert bcert = check_h23(fx, none, params, 200, 5);
  CHECK(bcert.verified);
  CHECK(bcert.worst_violation == 0.0);

  // Flipping the driver sign turns the pairing expansive.
  const CoefficientSet fneg = coeffs_of(
      "[model]\n"
      "b = 0\n"
      "sigma = 0\n"
      "f = -x\n"
      "phi = x\n");
  const MonotonicityCert c = check_h23(fneg, none, params, 200, 5);
  CHECK_FALSE(c.verified);
  CHECK(c.worst_violation > 100.0);

  // b = -0.5*y dissipates at rate 1/2 in y: claiming beta2 = 0.5 is tight,
  // claiming 0.6 asks for dissipation the drift does not provide.
  params.beta1 = 0;
  params.beta3 = 0.5;
  const CoefficientSet relax = coeffs_of(
      "[model]\n"
      "b = -0.5*y\n"
      "sigma = 0\n"
      "f = 0\n"
      "phi = x\n");
  params.beta2 = 0.5;
  CHECK(check_h23(relax, none, params, 200, 5).verified);
  params.beta2 = 0.6;
  const MonotonicityCert d = check_h23(relax, none, params, 200, 5);
  CHECK_FALSE(d.verified);
  CHECK(d.worst_violation > 1e-3);
}

TEST_CASE("dissipation certificate flags a terminal against the grain") {
  const LevyModel none;
  MonotonicityCert params;
  params.G = 1;
  params.beta1 = 0;
  params.beta2 = 0.5;
  params.beta3 = 0.5;
  params.mu1 = 1;
  const CoefficientSet down = coeffs_of(
      "[model]\n"
      "b = 0\n"
      "sigma = 0\n"
      "f = 0\n"
      "phi = -x\n");
  const MonotonicityCert cert = check_h23(down, none, params, 200, 5);
  CHECK_FALSE(cert.verified);
  CHECK(cert.worst_violation > 1.0);
}

TEST_CASE("dissipation probe maximum is monotone in the budget") {
  const LevyModel none;
  MonotonicityCert params;
  params.G = 1;
  params.beta1 = 1;
  params.beta2 = 0;
  params.beta3 = 0;
  params.mu1 = 1;
  const CoefficientSet fneg = coeffs_of(
      "[model]\n"
      "b = 0\n"
      "sigma = 0\n"
      "f = -x\n"
      "phi = x\n");
  const double w100 = check_h23(fneg, none, params, 100, 5).worst_violation;
  const double w200 = check_h23(fneg, none, params, 200, 5).worst_violation;
  const double w400 = check_h23(fneg, none, params, 400, 5).worst_violation;
  CHECK(w100 <= w200);
  CHECK(w200 <= w400);
  CHECK(check_h23(fneg, none, params, 400, 5).worst_violation == w400);
}

TEST_CASE("smallness certificate measures the z-slope of the volatility") {
  const LevyModel none;
  const CoefficientSet mild = coeffs_of(
      "[model]\n"
      "b = 0\n"
      "sigma = 0.1*z\n"
      "f = 0\n"
      "phi = x\n");
  const SmallnessCert ok = check_h31(mild, none);
  CHECK(ok.holds);
  CHECK(ok.L_sigma == doctest::Approx(0.1).epsilon(1e-9));
  CHECK(ok.C_tilde_h == 0.0);
  CHECK(ok.threshold == 0.25);

  const CoefficientSet steep = coeffs_of(
      "[model]\n"
      "b = 0\n"
      "sigma = z\n"
      "f = 0\n"
      "phi = x\n");
  const SmallnessCert bad = check_h31(steep, none);
  CHECK_FALSE(bad.holds);
  CHECK(bad.L_sigma == doctest::Approx(1.0).epsilon(1e-9));

  // A generous threshold admits the same coefficient.
  CHECK(check_h31(steep, none, 1.5).holds);
}

TEST_CASE("smallness certificate measures the jump coupling constant") {
  const LevyModel jumps = unit_jumps();
  const CoefficientSet mild = coeffs_of(
      "[model]\n"
      "b = 0\n"
      "sigma = 0\n"
      "f = 0\n"
      "phi = x\n"
      "h = 0.4*x + e\n"
      "[levy]\n"
      "atoms = -1, 1\n"
      "intensities = 0.5, 0.5\n"
      "l = 0.5*min(1,abs(e))\n");
  // Slope 0.4 per atom: sup_i Lh^2 = 0.16 and the intensity-weighted sum is
  // 0.16 * (0.5 + 0.5), both inside the quarter budget.
  const SmallnessCert ok = check_h31(mild, jumps);
  CHECK(ok.holds);
  CHECK(ok.C_tilde_h == doctest::Approx(0.16).epsilon(1e-8));

  const CoefficientSet steep = coeffs_of(
      "[model]\n"
      "b = 0\n"
      "sigma = 0\n"
      "f = 0\n"
      "phi = x\n"
      "h = 0.6*x + e\n"
      "[levy]\n"
      "atoms = -1, 1\n"
      "intensities = 0.5, 0.5\n"
      "l = 0.5*min(1,abs(e))\n");
  const SmallnessCert bad = check_h31(steep, jumps);
  CHECK_FALSE(bad.holds);
  CHECK(bad.C_tilde_h == doctest::Approx(0.36).epsilon(1e-8));

  // High intensity fails through the weighted sum even when the per-atom
  // square stays inside the budget.
  const LevyModel hot =
      discretize_levy({1.0}, {3.0}, parse_expression("0.5*min(1,abs(e))", mask::e, "l"), 1.0);
  const CoefficientSet single = coeffs_of(
      "[model]\n"
      "b = 0\n"
      "sigma = 0\n"
      "f = 0\n"
      "phi = x\n"
      "h = 0.4*x\n"
      "[levy]\n"
      "atoms = 1\n"
      "intensities = 3\n"
      "l = 0.5*min(1,abs(e))\n");
  const SmallnessCert sum = check_h31(single, hot);
  CHECK_FALSE(sum.holds);
  CHECK(sum.C_tilde_h == doctest::Approx(0.48).epsilon(1e-8));
}
