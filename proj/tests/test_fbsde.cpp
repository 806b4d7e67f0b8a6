#include <cmath>
#include <vector>

#include "doctest.h"
#include "isaacs/bsde.hpp"
#include "isaacs/config.hpp"
#include "isaacs/errors.hpp"
#include "isaacs/fbsde.hpp"
#include "isaacs/stencil.hpp"

using namespace isaacs;

namespace {

CoefficientSet model(const std::string& body) {
  return parse_coefficients(ConfigDoc::from_text(body, "unit.cfg"));
}

std::vector<double> zeros(int steps, int nodes) {
  return std::vector<double>(static_cast<std::size_t>(steps) * nodes, 0.0);
}

std::vector<double> terminal_of(const CoefficientSet& cs, const SpaceGrid& space) {
  std::vector<double> out(space.n_nodes);
  for (int j = 0; j < space.n_nodes; ++j) {
    Env env;
    env.x = space.node(j);
    out[j] = cs.phi.eval(env);
  }
  return out;
}

}  // namespace

TEST_CASE("a decoupled system reproduces the plain backward solve") {
  const CoefficientSet cs = model(
      "[model]\n"
      "b = 0\n"
      "sigma = 0.5\n"
      "f = -0.5*y + 0.2*z\n"
      "phi = sin(x)\n");
  const LevyModel none;
  const TimeGrid time{0.0, 1.0, 50};
  const SpaceGrid space{-2.0, 2.0, 41};
  const FbsdeOptions opt;

  const WindowReport rep = cost_functional(cs, none, time, space, zeros(50, 41), zeros(50, 41), opt);

  // Reference: the same scheme assembled by hand, no coupling loop.
  const SliceStencil st = build_slice_stencil(space, none, time.dt(),
                                              std::vector<double>(41, 0.0),
                                              std::vector<double>(41, 0.5), {});
  const Driver drv = [](int, int, double y, double z, double) { return -0.5 * y + 0.2 * z; };
  const BackwardSolution ref = solve_bsde(time, space, none, terminal_of(cs, space), drv,
                                          [&st](int) -> const SliceStencil& { return st; });

  for (int s : {0, 25, 49}) {
    for (int j = 0; j < 41; ++j) {
      CHECK(rep.sol.y(s, j) == doctest::Approx(ref.y(s, j)).epsilon(1e-12));
      CHECK(rep.sol.z(s, j) == doctest::Approx(ref.z(s, j)).epsilon(1e-12));
    }
  }
  CHECK(rep.window_splits == 0);
}

TEST_CASE("policies reach the driver with step-major indexing") {
  const CoefficientSet cs = model(
      "[model]\n"
      "b = 0\n"
      "sigma = 0\n"
      "f = u*x\n"
      "phi = 0\n");
  const LevyModel none;
  const TimeGrid time{0.0, 1.0, 50};
  const SpaceGrid space{-2.0, 2.0, 41};

  // u switches on halfway through; integrating it backward leaves 0.5*x.
  std::vector<double> u_policy = zeros(50, 41);
  for (int k = 25; k < 50; ++k)
    for (int j = 0; j < 41; ++j) u_policy[static_cast<std::size_t>(k) * 41 + j] = 1.0;

  const WindowReport rep =
      cost_functional(cs, none, time, space, u_policy, zeros(50, 41), FbsdeOptions{});
  for (int j = 0; j < 41; ++j)
    CHECK(rep.sol.y(0, j) == doctest::Approx(0.5 * space.node(j)).epsilon(1e-12));
}

TEST_CASE("running cost accrues the remaining horizon") {
  const CoefficientSet cs = model(
      "[model]\n"
      "b = 0\n"
      "sigma = 0\n"
      "f = 1\n"
      "phi = 0\n");
  const LevyModel none;
  const TimeGrid time{0.0, 1.0, 50};
  const SpaceGrid space{-2.0, 2.0, 41};
  const WindowReport rep =
      cost_functional(cs, none, time, space, zeros(50, 41), zeros(50, 41), FbsdeOptions{});
  for (int j = 0; j < 41; ++j) {
    CHECK(rep.sol.y(0, j) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(rep.sol.y(25, j) == doctest::Approx(0.5).epsilon(1e-12));
  }
}

TEST_CASE("quadratic terminal under unit noise gains the remaining time") {
  const CoefficientSet cs = model(
      "[model]\n"
      "b = 0\n"
      "sigma = 1\n"
      "f = 0\n"
      "phi = x*x\n");
  const LevyModel none;
  const TimeGrid time{0.0, 1.0, 120};
  const SpaceGrid space{-4.0, 4.0, 81};
  const WindowReport rep =
      cost_functional(cs, none, time, space, zeros(120, 81), zeros(120, 81), FbsdeOptions{});
  for (int j = 30; j <= 50; ++j) {
    const double x = space.node(j);
    const double exact = x * x + 1.0;
    CHECK(std::fabs(rep.sol.y(0, j) - exact) <= 0.02 * exact);
  }
}

TEST_CASE("forward coupling through the drift contracts on a short window") {
  // b = y with terminal x transports along characteristics: the window
  // value at t = 0 is x / (1 - delta), with e^delta the small-delta shadow.
  const CoefficientSet cs = model(
      "[model]\n"
      "b = y\n"
      "sigma = 0.05\n"
      "f = 0\n"
      "phi = x\n");
  const LevyModel none;
  const TimeGrid window{0.0, 0.1, 10};
  const SpaceGrid space{-3.0, 3.0, 61};

  const WindowReport rep = solve_fbsde_small(cs, none, window, space, zeros(10, 61),
                                             zeros(10, 61), terminal_of(cs, space), FbsdeOptions{});
  const int at_one = space.nearest(1.0);
  CHECK(space.node(at_one) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::fabs(rep.sol.y(0, at_one) - 1.0 / 0.9) <= 0.02);
  CHECK(std::fabs(rep.sol.y(0, at_one) - std::exp(0.1)) <= 0.02);

  CHECK(rep.picard_iterations >= 2);
  CHECK(rep.window_splits == 0);
  CHECK(rep.final_change <= FbsdeOptions{}.picard_tol);
  CHECK_FALSE(rep.change_history.empty());
}

TEST_CASE("the one-window flow composes across adjacent windows") {
  const CoefficientSet cs = model(
      "[model]\n"
      "b = 0\n"
      "sigma = 0.5\n"
      "f = -0.5*y + 0.2*z\n"
      "phi = sin(x)\n");
  const LevyModel none;
  const TimeGrid time{0.0, 1.0, 50};
  const SpaceGrid space{-2.0, 2.0, 41};
  const FbsdeOptions opt;
  const std::vector<double> terminal = terminal_of(cs, space);

  const std::vector<double> direct =
      backward_semigroup(cs, none, time, space, 40, 10, zeros(10, 41), zeros(10, 41), terminal, opt);
  const std::vector<double> tail =
      backward_semigroup(cs, none, time, space, 45, 5, zeros(5, 41), zeros(5, 41), terminal, opt);
  const std::vector<double> composed =
      backward_semigroup(cs, none, time, space, 40, 5, zeros(5, 41), zeros(5, 41), tail, opt);

  REQUIRE(direct.size() == composed.size());
  for (std::size_t j = 0; j < direct.size(); ++j)
    CHECK(std::fabs(composed[j] - direct[j]) <= 1e-9);

  // Zero steps is the identity on the terminal field.
  const std::vector<double> same =
      backward_semigroup(cs, none, time, space, 50, 0, {}, {}, terminal, opt);
  CHECK(same == terminal);
}

TEST_CASE("window and policy validation rejects malformed requests") {
  const CoefficientSet cs = model(
      "[model]\n"
      "b = 0\n"
      "sigma = 0.5\n"
      "f = 0\n"
      "phi = x\n");
  const LevyModel none;
  const TimeGrid time{0.0, 1.0, 50};
  const SpaceGrid space{-2.0, 2.0, 41};
  const FbsdeOptions opt;
  const std::vector<double> terminal = terminal_of(cs, space);

  CHECK_THROWS_AS(backward_semigroup(cs, none, time, space, 40, -1, {}, {}, terminal, opt),
                  ConfigError);
  CHECK_THROWS_AS(backward_semigroup(cs, none, time, space, 30, 11, zeros(11, 41), zeros(11, 41),
                                     terminal, opt),
                  ConfigError);
  // Window longer than delta0 must be refused by the small solver itself.
  CHECK_THROWS_AS(solve_fbsde_small(cs, none, TimeGrid{0.0, 0.22, 11}, space, zeros(11, 41),
                                    zeros(11, 41), terminal, opt),
                  ConfigError);
  // Policy fields must cover the window exactly.
  CHECK_THROWS_AS(solve_fbsde_small(cs, none, TimeGrid{0.0, 0.2, 10}, space, zeros(9, 41),
                                    zeros(10, 41), terminal, opt),
                  ConfigError);
  CHECK_THROWS_AS(cost_functional(cs, none, time, space, zeros(49, 41), zeros(50, 41), opt),
                  ConfigError);
}

TEST_CASE("an unstable step size raises instead of producing a sweep") {
  const CoefficientSet cs = model(
      "[model]\n"
      "b = 0\n"
      "sigma = 1\n"
      "f = 0\n"
      "phi = x\n");
  const LevyModel none;
  const SpaceGrid space{-2.0, 2.0, 41};
  CHECK_THROWS_AS(solve_fbsde_small(cs, none, TimeGrid{0.0, 0.2, 10}, space, zeros(10, 41),
                                    zeros(10, 41), terminal_of(cs, space), FbsdeOptions{}),
                  SolverError);
}
