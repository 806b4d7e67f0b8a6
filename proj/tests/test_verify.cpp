#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "isaacs/config.hpp"
#include "isaacs/errors.hpp"
#include "isaacs/verify.hpp"
#include "isaacs/version.hpp"

using namespace isaacs;

namespace {

struct Row {
  const char* id;
  const char* anchor;
  const char* module;
};

/// The property catalogue is a public contract: renaming, reordering, or
/// dropping an entry is a breaking change this table makes loud.
const Row kCatalogue[] = {
    {"expr-roundtrip", "print-parse-identity", "coeffs"},
    {"dissipativity-probe-monotone", "probe-budget-running-max", "coeffs"},
    {"lipschitz-linear-probe", "linear-slope-recovery", "coeffs"},
    {"stencil-moments", "stencil-moment-matching", "stochastics"},
    {"split-mass-moment", "interpolation-mass-preservation", "stochastics"},
    {"path-law-match", "path-law-sampling", "stochastics"},
    {"terminal-consistency", "terminal-condition-identity", "bsde"},
    {"bsde-comparison", "backward-comparison-principle", "bsde"},
    {"bsde-convergence-order", "first-order-time-convergence", "bsde"},
    {"zero-noise-euler", "deterministic-euler-degeneration", "bsde"},
    {"representation-residual", "representation-residual-bound", "algebraic"},
    {"representation-unique-root", "strictly-increasing-root-uniqueness", "algebraic"},
    {"representation-consistency", "gradient-volatility-consistency", "algebraic"},
    {"semigroup-composition", "semigroup-composition-law", "fbsde"},
    {"picard-contraction", "picard-geometric-contraction", "fbsde"},
    {"value-apriori-bounds", "affine-growth-envelope", "fbsde"},
    {"value-ordering", "lower-upper-ordering", "game"},
    {"game-comparison", "terminal-data-comparison", "game"},
    {"g-monotonicity", "signed-monotonicity-under-g", "game"},
    {"value-lipschitz", "uniform-lipschitz-in-space", "game"},
    {"value-holder-half", "half-holder-in-time", "game"},
    {"value-determinism", "seed-invariance-and-clt-scaling", "game"},
    {"pde-monotone-stencil", "nonnegative-stencil-coefficients", "pde"},
    {"pde-comparison", "discrete-comparison-principle", "pde"},
    {"pde-cross-validation", "scheme-value-cross-validation", "pde"},
    {"pde-ordering", "pde-lower-upper-ordering", "pde"},
    {"isaacs-gap", "hamiltonian-saddle-gap", "game"},
};

std::string strip_runtime(const std::string& json) {
  std::istringstream in(json);
  std::string line, out;
  while (std::getline(in, line))
    if (line.find("\"runtime_ms\"") == std::string::npos) {
      out += line;
      out += '\n';
    }
  return out;
}

ConfigDoc game_doc() {
  return ConfigDoc::from_file(std::string(CONFIG_DIR) + "/games/uv_sum.cfg");
}

}  // namespace

TEST_CASE("the property catalogue is locked") {
  const auto& reg = property_registry();
  REQUIRE(reg.size() == std::size(kCatalogue));
  for (std::size_t i = 0; i < reg.size(); ++i) {
    CHECK(std::string(reg[i].id) == kCatalogue[i].id);
    CHECK(std::string(reg[i].anchor) == kCatalogue[i].anchor);
    CHECK(std::string(reg[i].module) == kCatalogue[i].module);
  }

  // Anchors are unique: each names one mathematical statement.
  for (std::size_t i = 0; i < reg.size(); ++i)
    for (std::size_t j = i + 1; j < reg.size(); ++j)
      CHECK(std::string(reg[i].anchor) != reg[j].anchor);
}

TEST_CASE("selection tokens expand, deduplicate, and keep catalogue order") {
  const auto all = select_properties({"all"});
  REQUIRE(all.size() == std::size(kCatalogue));
  for (std::size_t i = 0; i < all.size(); ++i) CHECK(all[i] == kCatalogue[i].id);

  CHECK(select_properties({"isaacs"}) ==
        std::vector<std::string>{"value-ordering", "pde-ordering", "isaacs-gap"});
  CHECK(select_properties({"comparison"}) ==
        std::vector<std::string>{"bsde-comparison", "game-comparison", "pde-comparison"});
  CHECK(select_properties({"pde"}) ==
        std::vector<std::string>{"pde-monotone-stencil", "pde-comparison",
                                 "pde-cross-validation", "pde-ordering"});
  CHECK(select_properties({"game"}).size() == 7);
  CHECK(select_properties({"zero-noise-euler"}) ==
        std::vector<std::string>{"zero-noise-euler"});

  // Mixed tokens: the union lands in catalogue order with duplicates gone.
  CHECK(select_properties({"isaacs", "pde-ordering", "expr-roundtrip"}) ==
        std::vector<std::string>{"expr-roundtrip", "value-ordering", "pde-ordering",
                                 "isaacs-gap"});

  CHECK_THROWS_AS(select_properties({"no-such-property"}), ConfigError);
}

TEST_CASE("a module subset runs green on a shipped instance") {
  const ConfigDoc doc = game_doc();
  const VerificationReport rep = run_suite(doc, select_properties({"coeffs"}), 42);

  CHECK(rep.version == kVersion);
  CHECK(rep.config_digest == doc.digest());
  CHECK(rep.seed == 42);
  REQUIRE(rep.entries.size() == 3);
  CHECK(rep.all_pass());
  for (const auto& e : rep.entries) {
    CHECK(e.status == "pass");
    CHECK(e.pass);
    CHECK(e.tol_source == "default");
    CHECK(e.measured <= e.tol);
    CHECK(e.runtime_ms >= 0.0);
  }
  CHECK(rep.entries[0].id == "expr-roundtrip");
}

TEST_CASE("tolerances can be overridden from the [verify] section") {
  ConfigDoc doc = game_doc();
  doc.set("verify", "expr_roundtrip", "0.5");
  const VerificationReport rep = run_suite(doc, {"expr-roundtrip"}, 1);
  REQUIRE(rep.entries.size() == 1);
  CHECK(rep.entries[0].tol == 0.5);
  CHECK(rep.entries[0].tol_source == "config");
  CHECK(rep.entries[0].pass);
}

TEST_CASE("a property that cannot set up is reported, not thrown") {
  // No [grid], no [controls]: game properties error out, coefficient-level
  // properties still pass, and the suite always returns a full report.
  const ConfigDoc doc = ConfigDoc::from_text(
      "[model]\n"
      "b = \"0\"\n"
      "sigma = \"0.5\"\n"
      "f = \"0\"\n"
      "phi = \"x\"\n",
      "nogrid.cfg");
  const VerificationReport rep =
      run_suite(doc, {"expr-roundtrip", "value-ordering"}, 9);
  REQUIRE(rep.entries.size() == 2);
  CHECK(rep.entries[0].status == "pass");
  CHECK(rep.entries[1].status == "errored");
  CHECK_FALSE(rep.entries[1].pass);
  CHECK_FALSE(rep.entries[1].detail.empty());
  CHECK_FALSE(rep.all_pass());
}

TEST_CASE("the JSON report is reproducible once timing lines are dropped") {
  const ConfigDoc doc = game_doc();
  const std::string a = report_to_json(run_suite(doc, select_properties({"coeffs"}), 7));
  const std::string b = report_to_json(run_suite(doc, select_properties({"coeffs"}), 7));
  CHECK(strip_runtime(a) == strip_runtime(b));

  for (const char* key :
       {"\"version\"", "\"config_digest\"", "\"seed\"", "\"entries\"", "\"anchor\"",
        "\"measured\"", "\"tol_source\"", "\"status\""}) {
    INFO(key);
    CHECK(a.find(key) != std::string::npos);
  }
}

TEST_CASE("path-sampled cost of a constant driver is the horizon, exactly") {
  const CoefficientSet cs = parse_coefficients(ConfigDoc::from_text(
      "[model]\n"
      "b = \"0\"\n"
      "sigma = \"0.5\"\n"
      "f = \"1\"\n"
      "phi = \"0\"\n",
      "flat.cfg"));
  const LevyModel none;
  const TimeGrid time{0.0, 1.0, 50};
  const SpaceGrid space{-2.0, 2.0, 41};
  const PolicyField zeros(static_cast<std::size_t>(50) * 41, 0.0);

  const McEstimate est = mc_cost_estimate(cs, none, time, space, zeros, zeros, 0.3, 500, 11);
  CHECK(est.n_paths == 500);
  CHECK(std::fabs(est.mean - 1.0) <= 1e-12);
  CHECK(est.std_err <= 1e-12);

  // Per-path accumulation has no backward fields to feed the driver with.
  const CoefficientSet coupled = parse_coefficients(ConfigDoc::from_text(
      "[model]\n"
      "b = \"0\"\n"
      "sigma = \"0.5\"\n"
      "f = \"y\"\n"
      "phi = \"0\"\n",
      "coupled.cfg"));
  CHECK_THROWS_AS(mc_cost_estimate(coupled, none, time, space, zeros, zeros, 0.3, 10, 11),
                  ConfigError);
}

TEST_CASE("grid value and path sampling agree within sampling error") {
  const CoefficientSet cs = parse_coefficients(ConfigDoc::from_text(
      "[model]\n"
      "b = \"0\"\n"
      "sigma = \"0.5\"\n"
      "f = \"0\"\n"
      "phi = \"x*x\"\n",
      "quad.cfg"));
  const LevyModel none;
  const TimeGrid time{0.0, 1.0, 50};
  const SpaceGrid space{-4.0, 4.0, 81};
  const PolicyField zeros(static_cast<std::size_t>(50) * 81, 0.0);

  const McReport rep =
      expected_value_reduction(cs, none, time, space, zeros, zeros, FbsdeOptions{}, 0.0, 4000, 3);
  CHECK(rep.n_paths == 4000);
  CHECK(rep.seed == 3);
  // Both sides estimate E[(x + 0.5 B_1)^2] = 0.25.
  CHECK(std::fabs(rep.grid_value - 0.25) <= 0.01);
  CHECK(std::fabs(rep.mc_mean - 0.25) <= 5 * rep.mc_std_err + 0.005);
  CHECK(rep.gap == doctest::Approx(std::fabs(rep.grid_value - rep.mc_mean)).epsilon(1e-12));
  CHECK(rep.gap <= 5 * rep.mc_std_err + 0.01);
}
